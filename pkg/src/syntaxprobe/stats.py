"""Binomial intervals and tests, logistic regression by IRLS, Pearson r.

The accuracy analyses need exactly four tools: a Wilson score interval for
per-bucket accuracies, an exact one-sided binomial test against chance,
logistic fits of accuracy against exposure (optionally with cluster-robust
standard errors standing in for by-item random intercepts), and a Pearson
correlation test.  Nothing here aims to be a general stats library.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import expit
from scipy.stats import norm, t as t_dist

from .errors import InputError, RankError, SeparationError

SIGNIFICANCE_TIERS = ((0.001, "***"), (0.01, "**"), (0.05, "*"))


def stars(p: float) -> str:
    for cutoff, mark in SIGNIFICANCE_TIERS:
        if p < cutoff:
            return mark
    return ""


# ---------------------------------------------------------------------------
# Binomial


def wilson_ci(k: int, n: int, level: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if n <= 0:
        raise InputError("wilson_ci requires n > 0")
    if not 0 <= k <= n:
        raise InputError(f"k={k} outside [0, {n}]")
    z = float(norm.ppf(0.5 + level / 2.0))
    phat = k / n
    denom = 1.0 + z * z / n
    center = (phat + z * z / (2 * n)) / denom
    margin = (z / denom) * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n))
    return (max(0.0, center - margin), min(1.0, center + margin))


def _pmf_terms(n: int, p0: float) -> list[float]:
    logp, log1p = math.log(p0), math.log1p(-p0)
    return [
        math.exp(math.lgamma(n + 1) - math.lgamma(i + 1) - math.lgamma(n - i + 1)
                 + i * logp + (n - i) * log1p)
        for i in range(n + 1)
    ]


def binom_test_above(k: int, n: int, p0: float = 0.5) -> float:
    """Exact one-sided tail P(X >= k | n, p0).

    For the chance-level null (p0 = 0.5) the tail is computed in integer
    arithmetic, so P(X>=k) + P(X<=k-1) = 1 holds exactly.
    """
    if n <= 0:
        raise InputError("binom_test_above requires n > 0")
    if not 0 <= k <= n:
        raise InputError(f"k={k} outside [0, {n}]")
    if p0 == 0.5:
        numer = sum(math.comb(n, i) for i in range(k, n + 1))
        return float(Fraction(numer, 2 ** n))
    return min(1.0, math.fsum(_pmf_terms(n, p0)[k:]))


def binom_test_below(k: int, n: int, p0: float = 0.5) -> float:
    """Exact lower tail P(X <= k | n, p0); complement of the upper tail."""
    if n <= 0:
        raise InputError("binom_test_below requires n > 0")
    if k < 0:
        return 0.0
    if k >= n:
        return 1.0
    if p0 == 0.5:
        numer = sum(math.comb(n, i) for i in range(0, k + 1))
        return float(Fraction(numer, 2 ** n))
    return min(1.0, math.fsum(_pmf_terms(n, p0)[: k + 1]))


@dataclass(frozen=True)
class BinomialSummary:
    k: int
    n: int
    accuracy: float
    ci_lo: float
    ci_hi: float
    p_above_chance: float

    @classmethod
    def from_counts(cls, k: int, n: int, level: float = 0.95, p0: float = 0.5):
        lo, hi = wilson_ci(k, n, level)
        return cls(k, n, k / n, lo, hi, binom_test_above(k, n, p0))


# ---------------------------------------------------------------------------
# Logistic regression (IRLS)


@dataclass
class LogisticFit:
    labels: list[str]
    coef: np.ndarray
    se: np.ndarray
    z: np.ndarray
    p: np.ndarray
    loglik: float
    converged: bool
    iterations: int
    cluster_robust: bool = False

    def coefficient(self, label: str) -> float:
        return float(self.coef[self.labels.index(label)])

    def p_value(self, label: str) -> float:
        return float(self.p[self.labels.index(label)])


def _loglik(y, eta):
    # log L = sum y*eta - log(1 + e^eta), stable via logaddexp
    return float(np.sum(y * eta - np.logaddexp(0.0, eta)))


def fit_logistic(
    X,
    y,
    labels: list[str] | None = None,
    clusters=None,
    add_intercept: bool = True,
    max_iter: int = 100,
    tol: float = 1e-10,
) -> LogisticFit:
    """Maximum-likelihood logistic regression via iteratively reweighted
    least squares (Newton steps on the log-likelihood).

    ``clusters`` switches the standard errors to the CR1 cluster-robust
    sandwich, the stand-in for by-item random intercepts in the exposure
    models.  Complete separation (a coefficient running away while the
    likelihood still improves) and singular information matrices raise.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    if X.shape[0] != y.shape[0]:
        raise InputError("X and y disagree on the number of rows")
    if not np.all((y == 0) | (y == 1)):
        raise InputError("outcomes must be binary 0/1")
    if np.all(y == y[0]):
        # Constant outcomes have no finite MLE: degenerate complete separation.
        raise SeparationError("all outcomes identical; intercept diverges")
    if add_intercept:
        X = np.hstack([np.ones((X.shape[0], 1)), X])
        if labels is not None:
            labels = ["intercept"] + list(labels)
    if labels is None:
        labels = ["intercept" if (add_intercept and j == 0) else f"x{j}"
                  for j in range(X.shape[1])]
    if len(labels) != X.shape[1]:
        raise InputError("labels do not match design columns")

    beta = np.zeros(X.shape[1])
    ll_prev = _loglik(y, X @ beta)
    iterations = 0
    for iterations in range(1, max_iter + 1):
        eta = X @ beta
        p = expit(eta)
        w = p * (1.0 - p)
        score = X.T @ (y - p)
        if np.max(np.abs(score)) < tol:
            break
        H = (X * w[:, None]).T @ X
        try:
            step = np.linalg.solve(H, score)
        except np.linalg.LinAlgError as exc:
            raise RankError("singular information matrix") from exc
        beta = beta + step
        ll = _loglik(y, X @ beta)
        if np.max(np.abs(beta)) > 30.0 and ll > ll_prev + 1e-12:
            raise SeparationError(
                "complete separation detected (coefficient magnitude > 30 "
                "with improving likelihood)"
            )
        ll_prev = ll

    eta = X @ beta
    p = expit(eta)
    w = p * (1.0 - p)
    score = X.T @ (y - p)
    converged = bool(np.max(np.abs(score)) < 1e-8)
    H = (X * w[:, None]).T @ X
    try:
        bread = np.linalg.inv(H)
    except np.linalg.LinAlgError as exc:
        raise RankError("singular information matrix") from exc

    cluster_robust = clusters is not None
    if cluster_robust:
        clusters = np.asarray(clusters)
        if clusters.shape[0] != X.shape[0]:
            raise InputError("clusters do not match design rows")
        groups = {}
        for i, c in enumerate(clusters):
            groups.setdefault(c, []).append(i)
        G = len(groups)
        if G < 2:
            raise InputError("cluster-robust errors need >= 2 clusters")
        meat = np.zeros_like(H)
        resid = y - p
        for idx in groups.values():
            s_g = X[idx].T @ resid[idx]
            meat += np.outer(s_g, s_g)
        cov = bread @ meat @ bread * (G / (G - 1))
    else:
        cov = bread
    se = np.sqrt(np.diag(cov))
    with np.errstate(divide="ignore", invalid="ignore"):
        zval = np.where(se > 0, beta / se, np.inf)
    pval = np.array([math.erfc(abs(zi) / math.sqrt(2.0)) for zi in zval])
    return LogisticFit(list(labels), beta, se, zval, pval,
                       _loglik(y, eta), converged, iterations, cluster_robust)


# ---------------------------------------------------------------------------
# Correlation


@dataclass(frozen=True)
class CorrelationResult:
    r: float
    n: int
    t: float
    p: float


def pearson_test(x, y) -> CorrelationResult:
    """Pearson r with the t-test two-sided p-value (n - 2 df)."""
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape:
        raise InputError("x and y must have equal length")
    n = x.shape[0]
    if n < 3:
        raise InputError("pearson_test requires n >= 3")
    dx, dy = x - x.mean(), y - y.mean()
    sxx, syy = float(dx @ dx), float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise InputError("correlation undefined for constant input")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    r = max(-1.0, min(1.0, r))
    if abs(r) == 1.0:
        return CorrelationResult(r, n, math.inf, 0.0)
    tval = r * math.sqrt((n - 2) / (1.0 - r * r))
    p = 2.0 * float(t_dist.sf(abs(tval), n - 2))
    return CorrelationResult(r, n, tval, min(1.0, p))


# ---------------------------------------------------------------------------
# Accuracy-vs-exposure curves


@dataclass
class CurveFit:
    """Logistic accuracy curve over log10 exposure, with sample points.

    ``samples`` rows are (log10_exposure, p_hat, band_lo, band_hi) where the
    band is +/- one standard error on the linear predictor, mapped through
    the logistic.  ``separated`` flags the flat-curve fallback used when the
    outcomes are all identical (complete separation).
    """

    fit: LogisticFit | None
    separated: bool
    samples: np.ndarray
    mean_accuracy: float


def accuracy_curve(points, n_samples: int = 100, clusters=None) -> CurveFit:
    """Fit accuracy ~ log10(exposure count) on raw (count, correct) pairs."""
    pts = [(float(c), int(o)) for c, o in points]
    if not pts:
        raise InputError("no points")
    counts = np.array([c for c, _ in pts])
    outcomes = np.array([o for _, o in pts])
    if np.any(counts <= 0):
        raise InputError("exposure counts must be positive")
    xs = np.log10(counts)
    if np.unique(xs).size < 2:
        raise InputError("need >= 2 distinct exposure values")
    grid = np.linspace(xs.min(), xs.max(), n_samples)
    mean_acc = float(outcomes.mean())
    try:
        fit = fit_logistic(xs[:, None], outcomes, labels=["log10_exposure"],
                           clusters=clusters)
    except SeparationError:
        eps = 1.0 / (2.0 * len(pts))
        flat = min(1.0 - eps, max(eps, mean_acc))
        band = np.full_like(grid, flat)
        samples = np.column_stack([grid, band, band, band])
        return CurveFit(None, True, samples, mean_acc)
    eta = fit.coef[0] + fit.coef[1] * grid
    design = np.column_stack([np.ones_like(grid), grid])
    H = (np.column_stack([np.ones_like(xs), xs])
         * (expit(fit.coef[0] + fit.coef[1] * xs)
            * (1 - expit(fit.coef[0] + fit.coef[1] * xs)))[:, None])
    info = H.T @ np.column_stack([np.ones_like(xs), xs])
    cov = np.linalg.inv(info)
    se_eta = np.sqrt(np.einsum("ij,jk,ik->i", design, cov, design))
    samples = np.column_stack([grid, expit(eta), expit(eta - se_eta),
                               expit(eta + se_eta)])
    return CurveFit(fit, False, samples, mean_acc)
