"""Interpolated modified Kneser-Ney n-gram language model.

The model is trained on the treebank's terminal strings and emits per-token
surprisals in bits.  Highest-order counts are raw; lower orders use
continuation (distinct-predecessor) counts, except for grams that begin
with the start symbol, which cannot be preceded and keep raw counts.  Three
discounts per order are derived from the order's count-of-counts:

    Y   = n1 / (n1 + 2*n2)
    D_k = k - (k+1) * Y * n_{k+1} / n_k      (k = 1, 2, 3+)

clamped to [0, 1]; if n1 or n2 is zero at some order the model falls back
to a single absolute discount of 0.5 there and warns.

Sentences are padded with order-1 start symbols for well-defined initial
contexts.  The model predicts real tokens only: there is no end-of-sentence
event, so a one-type corpus really does give that type probability 1.  Out
of vocabulary queries route through the reserved unknown symbol, which has
mass only when training mapped singletons onto it.
"""

from __future__ import annotations

import math
import warnings
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import FormatError, InputError, TrainingError

BOS = "<s>"
EOS = "</s>"  # reserved; not a prediction event (see module docstring)
UNK = "<unk>"

_LOG2 = math.log(2.0)
NEG_INF = float("-inf")


@dataclass
class _ContextEntry:
    counts: dict
    total: int
    n1: int
    n2: int
    n3p: int


@dataclass
class NGramModel:
    order: int
    support: tuple[str, ...]           # prediction vocabulary, sorted
    discounts: list[tuple[float, float, float]]   # per order, 1-based at [k-1]
    tables: list[dict]                 # per order: context -> _ContextEntry
    map_singletons: bool = False
    fallback_orders: tuple[int, ...] = ()

    def __post_init__(self):
        self._support_set = set(self.support)

    # -- lookups ----------------------------------------------------------

    def _lookup_form(self, word: str) -> str | None:
        if word in self._support_set:
            return word
        if UNK in self._support_set:
            return UNK
        return None

    def _map_context(self, context: Sequence[str]) -> tuple[str, ...]:
        if UNK not in self._support_set:
            return tuple(context)
        return tuple(
            w if (w in self._support_set or w == BOS) else UNK for w in context
        )

    def prob(self, context: Sequence[str], word: str) -> float:
        """P(word | context) under the modified-KN interpolation."""
        w = self._lookup_form(word)
        if w is None:
            return 0.0
        ctx = self._map_context(context)
        if len(ctx) > self.order - 1:
            ctx = ctx[len(ctx) - (self.order - 1):]
        p = 1.0 / len(self.support)
        top = min(self.order, len(ctx) + 1)
        for k in range(1, top + 1):
            sub = ctx[len(ctx) - (k - 1):] if k > 1 else ()
            entry = self.tables[k - 1].get(sub)
            if entry is None or entry.total == 0:
                continue  # unseen context: distribution equals lower order
            d1, d2, d3 = self.discounts[k - 1]
            c = entry.counts.get(w, 0)
            if c == 0:
                discount = 0.0
            elif c == 1:
                discount = d1
            elif c == 2:
                discount = d2
            else:
                discount = d3
            direct = max(c - discount, 0.0) / entry.total
            gamma = (d1 * entry.n1 + d2 * entry.n2 + d3 * entry.n3p) / entry.total
            p = direct + gamma * p
        return p

    def logprob(self, context: Sequence[str], word: str) -> float:
        """log2 P(word | context); contexts longer than order-1 are
        truncated from the left; OOV words yield -inf under the default
        no-singleton-mapping configuration."""
        p = self.prob(context, word)
        return math.log2(p) if p > 0.0 else NEG_INF

    # -- scoring ----------------------------------------------------------

    def surprisals(self, tokens: Sequence[str]) -> list[float]:
        padded = [BOS] * (self.order - 1) + list(tokens)
        out = []
        for i in range(self.order - 1, len(padded)):
            lp = self.logprob(padded[i - self.order + 1: i], padded[i])
            out.append(0.0 - lp if lp != NEG_INF else math.inf)
        return out

    def score_sentences(self, sentences: Iterable[Sequence[str]]):
        """Per-token (token, surprisal-in-bits) lists, boundaries excluded."""
        return [list(zip(sent, self.surprisals(sent))) for sent in sentences]

    def perplexity(self, sentences: Iterable[Sequence[str]]) -> float:
        surps = [s for sent in sentences for s in self.surprisals(sent)]
        if not surps:
            raise InputError("perplexity requires a nonempty held-out set")
        return 2.0 ** (math.fsum(surps) / len(surps))


def _count_of_counts(counts: Iterable[int]) -> Counter:
    coc = Counter()
    for c in counts:
        if 1 <= c <= 4:
            coc[c] += 1
    return coc


def _estimate_discounts(counts: Iterable[int], order_k: int):
    coc = _count_of_counts(counts)
    n1, n2, n3, n4 = coc[1], coc[2], coc[3], coc[4]
    if n1 == 0 or n2 == 0:
        warnings.warn(
            f"order {order_k}: degenerate count-of-counts (n1={n1}, n2={n2}); "
            "falling back to absolute discount 0.5"
        )
        return (0.5, 0.5, 0.5), True
    y = n1 / (n1 + 2.0 * n2)
    raw = (
        1.0 - 2.0 * y * (n2 / n1),
        2.0 - 3.0 * y * (n3 / n2 if n2 else 0.0),
        3.0 - 4.0 * y * (n4 / n3 if n3 else 0.0),
    )
    # A non-positive formula value would zero out smoothing mass and break
    # strict positivity; treat it like the degenerate case above.
    out = []
    for k, d in enumerate(raw, start=1):
        if d <= 0.0:
            warnings.warn(
                f"order {order_k}: discount D{k} formula gave {d:.3f}; "
                "using absolute discount 0.5"
            )
            out.append(0.5)
        else:
            out.append(min(1.0, d))
    return tuple(out), False


def train(sentences: Iterable[Sequence[str]], order: int = 5,
          map_singletons: bool = False) -> NGramModel:
    """Count, adjust, and discount; returns an immutable scoring model."""
    if order < 1:
        raise InputError(f"order must be >= 1, got {order}")
    sents = [list(s) for s in sentences if len(s) > 0]
    if not sents:
        raise TrainingError("empty training corpus")

    if map_singletons:
        unigrams = Counter(w for s in sents for w in s)
        sents = [[w if unigrams[w] > 1 else UNK for w in s] for s in sents]

    support = tuple(sorted({w for s in sents for w in s}))

    raw: list[Counter] = [Counter() for _ in range(order)]
    for sent in sents:
        padded = [BOS] * (order - 1) + sent
        for i in range(order - 1, len(padded)):
            for k in range(1, order + 1):
                raw[k - 1][tuple(padded[i - k + 1: i + 1])] += 1

    adjusted: list[dict] = [dict() for _ in range(order)]
    adjusted[order - 1] = dict(raw[order - 1])
    for k in range(order - 1, 0, -1):
        adj: dict = {}
        for gram in raw[k]:          # (k+1)-grams: distinct-predecessor types
            suffix = gram[1:]
            adj[suffix] = adj.get(suffix, 0) + 1
        for gram, c in raw[k - 1].items():
            if gram[0] == BOS:       # start-anchored grams keep raw counts
                adj[gram] = c
        adjusted[k - 1] = adj

    discounts = []
    fallback = []
    for k in range(1, order + 1):
        d, fell = _estimate_discounts(adjusted[k - 1].values(), k)
        discounts.append(d)
        if fell:
            fallback.append(k)

    tables: list[dict] = []
    for k in range(1, order + 1):
        ctxs: dict = {}
        for gram, c in adjusted[k - 1].items():
            ctx, w = gram[:-1], gram[-1]
            ctxs.setdefault(ctx, {})[w] = c
        table = {}
        for ctx, counts in ctxs.items():
            n1 = sum(1 for c in counts.values() if c == 1)
            n2 = sum(1 for c in counts.values() if c == 2)
            n3p = sum(1 for c in counts.values() if c >= 3)
            table[ctx] = _ContextEntry(counts, sum(counts.values()), n1, n2, n3p)
        tables.append(table)

    return NGramModel(order, support, discounts, tables,
                      map_singletons=map_singletons,
                      fallback_orders=tuple(fallback))


# ---------------------------------------------------------------------------
# Persistence: sorted textual n-gram table with counts and discounts.


def write_model(model: NGramModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("#syntax-probe-ngram v1\n")
        fh.write(f"order\t{model.order}\n")
        fh.write(f"unk\t{int(model.map_singletons)}\n")
        fh.write(f"fallback\t{','.join(map(str, model.fallback_orders))}\n")
        fh.write("[discounts]\n")
        for k, (d1, d2, d3) in enumerate(model.discounts, start=1):
            fh.write(f"{k}\t{d1!r}\t{d2!r}\t{d3!r}\n")
        for k, table in enumerate(model.tables, start=1):
            fh.write(f"[ngrams {k}]\n")
            rows = []
            for ctx, entry in table.items():
                for w, c in entry.counts.items():
                    rows.append((ctx + (w,), c))
            for gram, c in sorted(rows):
                fh.write(f"{' '.join(gram)}\t{c}\n")


def read_model(path) -> NGramModel:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != "#syntax-probe-ngram v1":
        raise FormatError(f"{path}: not an n-gram model file")
    order = None
    unk = False
    fallback: tuple[int, ...] = ()
    discounts: list[tuple[float, float, float]] = []
    grams: list[dict] = []
    section = None
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        if line.startswith("[discounts]"):
            section = "discounts"
            continue
        if line.startswith("[ngrams "):
            k = int(line[len("[ngrams "):-1])
            while len(grams) < k:
                grams.append({})
            section = ("ngrams", k)
            continue
        parts = line.split("\t")
        if section is None:
            key, value = parts[0], parts[1]
            if key == "order":
                order = int(value)
            elif key == "unk":
                unk = bool(int(value))
            elif key == "fallback":
                fallback = tuple(int(x) for x in value.split(",") if x)
        elif section == "discounts":
            discounts.append((float(parts[1]), float(parts[2]), float(parts[3])))
        else:
            _, k = section
            gram = tuple(parts[0].split(" "))
            grams[k - 1][gram] = int(parts[1])
    if order is None or len(discounts) != order or len(grams) != order:
        raise FormatError(f"{path}: incomplete model file")

    tables: list[dict] = []
    for k in range(1, order + 1):
        ctxs: dict = {}
        for gram, c in grams[k - 1].items():
            ctxs.setdefault(gram[:-1], {})[gram[-1]] = c
        table = {}
        for ctx, counts in ctxs.items():
            n1 = sum(1 for c in counts.values() if c == 1)
            n2 = sum(1 for c in counts.values() if c == 2)
            n3p = sum(1 for c in counts.values() if c >= 3)
            table[ctx] = _ContextEntry(counts, sum(counts.values()), n1, n2, n3p)
        tables.append(table)
    support = tuple(sorted(w for (w,) in grams[0]))
    return NGramModel(order, support, discounts, tables,
                      map_singletons=unk, fallback_orders=fallback)
