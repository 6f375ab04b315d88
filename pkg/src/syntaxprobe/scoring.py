"""Join surprisal tables to test suites and score items.

An item is correct when the grammatical condition's critical region carries
strictly less summed surprisal than the ungrammatical one; equal-region
pairs (within a tiny tolerance) count as failures.  Accuracies aggregate
per exposure bucket and per grammatical category with Wilson intervals and
exact one-sided binomial tests against chance.

The surprisal adapter format is the interchange surface for external
models: a header line ``#syntax-probe-surprisal v1 base=2`` followed by
``sentence_id<TAB>token_index<TAB>token<TAB>surprisal`` records.  Natural-log
files (``base=e``) are converted to bits on read.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .errors import AlignmentError, FormatError, IncompleteResultsError, InputError
from .stats import BinomialSummary

SURPRISAL_HEADER = "#syntax-probe-surprisal v1"
CONDITIONS = ("gram", "ungram")
DEFAULT_TIE_EPS = 1e-9


@dataclass(frozen=True)
class SurprisalRecord:
    sentence_id: str
    tokens: tuple
    surprisals: tuple

    def __post_init__(self):
        if len(self.tokens) != len(self.surprisals):
            raise InputError(
                f"{self.sentence_id}: {len(self.tokens)} tokens vs "
                f"{len(self.surprisals)} surprisals"
            )


def sentence_id(item_id: str, condition: str) -> str:
    if condition not in CONDITIONS:
        raise InputError(f"unknown condition {condition!r}")
    return f"{item_id}:{condition}"


def split_sentence_id(sid: str) -> tuple[str, str]:
    item_id, _, condition = sid.rpartition(":")
    if condition not in CONDITIONS or not item_id:
        raise FormatError(f"bad sentence id {sid!r}")
    return item_id, condition


def write_surprisal_file(records: Iterable[SurprisalRecord], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(SURPRISAL_HEADER + " base=2\n")
        for rec in records:
            for i, (tok, s) in enumerate(zip(rec.tokens, rec.surprisals)):
                fh.write(f"{rec.sentence_id}\t{i}\t{tok}\t{s!r}\n")


def read_surprisal_file(path) -> list[SurprisalRecord]:
    """Read adapter records; base=e values are converted to bits."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if not header.startswith(SURPRISAL_HEADER):
            raise FormatError(f"{path}: missing {SURPRISAL_HEADER!r} header")
        base_field = header[len(SURPRISAL_HEADER):].strip()
        if base_field == "base=2":
            scale = 1.0
        elif base_field == "base=e":
            scale = 1.0 / math.log(2.0)
        else:
            raise FormatError(f"{path}: unsupported base declaration {base_field!r}")
        rows: dict[str, list] = {}
        order: list[str] = []
        for lineno, line in enumerate(fh, start=2):
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 4:
                raise FormatError(f"{path}:{lineno}: expected 4 columns")
            sid, idx, tok, surp = parts
            if sid not in rows:
                rows[sid] = []
                order.append(sid)
            rows[sid].append((int(idx), tok, float(surp) * scale))
    records = []
    seen = set()
    for sid in order:
        if sid in seen:
            raise FormatError(f"{path}: duplicate sentence id {sid!r}")
        seen.add(sid)
        entries = rows[sid]
        indices = [i for i, _, _ in entries]
        if indices != list(range(len(entries))):
            raise FormatError(f"{path}: non-sequential token indices for {sid!r}")
        records.append(SurprisalRecord(
            sid,
            tuple(t for _, t, _ in entries),
            tuple(s for _, _, s in entries),
        ))
    return records


# ---------------------------------------------------------------------------
# Alignment and region scoring


def align(suite, records: Iterable[SurprisalRecord]) -> dict:
    """Map item_id -> {condition: record}, verifying token identity.

    Distinct failures get distinct categories: duplicate ids (caught at
    read), unknown ids, missing conditions, and token mismatches (reported
    with the first divergent index).
    """
    by_item: dict = {item.item_id: {} for item in suite.items}
    items = {item.item_id: item for item in suite.items}
    for rec in records:
        item_id, condition = split_sentence_id(rec.sentence_id)
        if item_id not in by_item:
            raise AlignmentError(f"unknown sentence id {rec.sentence_id!r}")
        if condition in by_item[item_id]:
            raise AlignmentError(f"duplicate sentence id {rec.sentence_id!r}")
        expected = items[item_id].tokens(condition)
        if rec.tokens != tuple(expected):
            diverge = next(
                (i for i, (a, b) in enumerate(zip(rec.tokens, expected)) if a != b),
                min(len(rec.tokens), len(expected)),
            )
            raise AlignmentError(
                f"{rec.sentence_id}: token mismatch at index {diverge} "
                f"(got {list(rec.tokens)!r}, suite has {list(expected)!r})"
            )
        by_item[item_id][condition] = rec
    missing = sorted(
        sentence_id(i, c) for i, conds in by_item.items()
        for c in CONDITIONS if c not in conds
    )
    if missing:
        raise AlignmentError(
            f"missing records for {len(missing)} sentences "
            f"(first: {missing[0]!r})"
        )
    return by_item


def region_surprisal(item, record: SurprisalRecord, condition: str) -> float:
    """Summed surprisal over the item's critical region (joint log prob)."""
    expected = tuple(item.tokens(condition))
    if record.tokens != expected:
        diverge = next(
            (i for i, (a, b) in enumerate(zip(record.tokens, expected)) if a != b),
            min(len(record.tokens), len(expected)),
        )
        raise AlignmentError(f"{record.sentence_id}: token mismatch at index {diverge}")
    start, end = item.region(condition)
    return math.fsum(record.surprisals[start:end])


def item_accuracy(gram_bits: float, ungram_bits: float,
                  eps_tie: float = DEFAULT_TIE_EPS) -> int:
    """1 iff the grammatical region is strictly less surprising.

    Ties within ``eps_tie`` bits count as failures; that rule is what makes
    an n-gram score exactly 0 on suites whose conditions diverge outside
    its context window.
    """
    if not (math.isfinite(gram_bits) and math.isfinite(ungram_bits)):
        raise InputError("non-finite region surprisal")
    return 1 if gram_bits < ungram_bits - eps_tie else 0


@dataclass(frozen=True)
class ItemResult:
    item_id: str
    bucket: int
    category: str
    target: str
    gram_bits: float
    ungram_bits: float
    correct: int


def score_items(suite, records: Iterable[SurprisalRecord],
                eps_tie: float = DEFAULT_TIE_EPS) -> list[ItemResult]:
    aligned = align(suite, records)
    out = []
    for item in suite.items:
        conds = aligned[item.item_id]
        g = region_surprisal(item, conds["gram"], "gram")
        u = region_surprisal(item, conds["ungram"], "ungram")
        out.append(ItemResult(item.item_id, item.bucket, item.category,
                              item.target, g, u, item_accuracy(g, u, eps_tie)))
    return out


# ---------------------------------------------------------------------------
# Aggregation


@dataclass(frozen=True)
class EvalCell:
    bucket: int
    category: str  # "all" pools categories within the bucket
    summary: BinomialSummary


@dataclass
class EvalResult:
    suite_id: str
    cells: list

    def cell(self, bucket: int, category: str = "all") -> EvalCell:
        for c in self.cells:
            if c.bucket == bucket and c.category == category:
                return c
        raise KeyError((bucket, category))

    def buckets(self) -> list[int]:
        return sorted({c.bucket for c in self.cells})


def aggregate(suite, results: Iterable[ItemResult]) -> EvalResult:
    """Per-bucket and per-(bucket, category) accuracy summaries.

    The pooled per-bucket row is the mean over items, i.e. categories
    contribute in proportion to their item counts.
    """
    results = list(results)
    have = {r.item_id for r in results}
    missing = sorted(i.item_id for i in suite.items if i.item_id not in have)
    if missing:
        raise IncompleteResultsError(
            f"{len(missing)} items without results (first: {missing[0]!r})"
        )
    extra = have - {i.item_id for i in suite.items}
    if extra:
        raise IncompleteResultsError(f"results for unknown items: {sorted(extra)[:3]}")

    groups: dict = {}
    for r in results:
        groups.setdefault((r.bucket, r.category), []).append(r.correct)
        groups.setdefault((r.bucket, "all"), []).append(r.correct)
    cells = []
    for (bucket, category) in sorted(groups, key=lambda kc: (kc[0], kc[1])):
        outcomes = groups[(bucket, category)]
        cells.append(EvalCell(bucket, category,
                              BinomialSummary.from_counts(sum(outcomes), len(outcomes))))
    return EvalResult(suite.suite_id, cells)


def evaluate_suite(suite, records, eps_tie: float = DEFAULT_TIE_EPS):
    results = score_items(suite, records, eps_tie)
    return results, aggregate(suite, results)


# ---------------------------------------------------------------------------
# CSV emission (tidy, deterministic)


def write_eval_csv(result: EvalResult, path, model: str = "-") -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("suite,model,bucket,category,n,k,accuracy,ci_lo,ci_hi,"
                 "p_above_chance\n")
        for cell in result.cells:
            s = cell.summary
            fh.write(
                f"{result.suite_id},{model},{cell.bucket},{cell.category},"
                f"{s.n},{s.k},{s.accuracy:.6f},{s.ci_lo:.6f},{s.ci_hi:.6f},"
                f"{s.p_above_chance:.6g}\n"
            )


def write_items_csv(results: Iterable[ItemResult], path, suite_id: str,
                    model: str = "-") -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("suite,model,item_id,bucket,category,target,"
                 "gram_bits,ungram_bits,correct\n")
        for r in results:
            fh.write(
                f"{suite_id},{model},{r.item_id},{r.bucket},{r.category},"
                f"{r.target},{r.gram_bits:.10f},{r.ungram_bits:.10f},{r.correct}\n"
            )


def read_items_csv(path) -> list[dict]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split(",")
        for line in fh:
            if not line.strip():
                continue
            rows.append(dict(zip(header, line.rstrip("\n").split(","))))
    return rows


def read_eval_csv(path) -> list[dict]:
    return read_items_csv(path)
