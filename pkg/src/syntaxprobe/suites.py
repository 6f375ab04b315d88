"""Targeted grammaticality test suites with marked critical regions.

Thirteen suites probe two lexical features in base and transformed frames:
nominal number (simple declaratives, PP- and object-RC-modified subjects,
polar questions with and without a four-word modifier) and verbal argument
structure (infinitival and past-tense actives, passives with no/short/long
modifiers, and the same passives restricted to verbs never seen as
participles).  Every item pairs a grammatical and an ungrammatical sentence
differing only as the suite's condition rule prescribes: an agreement swap,
an auxiliary swap, an auxiliary deletion, or an object deletion.

Templates and filler inventories live in an editable definitions file (see
``data/suites.cfg``); generation is a pure function of (lexicon,
definitions, seed) and suite files are byte-identical across runs.
"""

from __future__ import annotations

import configparser
import hashlib
import itertools
import random
from dataclasses import dataclass, field
from typing import Mapping

from .corpus import (
    DEFAULT_BUCKETS,
    ExposureBucket,
    LexiconStats,
    TransitivityClass,
    active_only_verbs,
    exposure_bucket,
    is_punct,
    lexicon_digest,
)
from .errors import EmptyPoolError, FormatError, GenerationError, InputError

NOUN_CATEGORIES = ("singular", "plural")
VERB_CATEGORIES = ("transitive", "intransitive")

KIND_CONDITION_RULES = {
    "copula_agreement": "verb-form swap",
    "polar_inversion": "auxiliary swap",
    "object_manipulation": "object deletion",
    "passive_aux": "auxiliary deletion",
}

_OTHER = {
    "singular": "plural", "plural": "singular",
    "transitive": "intransitive", "intransitive": "transitive",
}


# ---------------------------------------------------------------------------
# Definitions file


@dataclass
class SuiteDef:
    suite_id: str
    kind: str
    categories: tuple
    region: str
    frames: dict          # frame name -> tuple of frame tokens
    values: dict          # condition slot values (verb_*/aux_*)
    pools: dict           # slot name -> list of (possibly multi-token) strings
    target_tag: str | None = None
    invariance: bool = False


@dataclass
class SuiteDefs:
    defs: dict
    digest: str

    def __getitem__(self, suite_id: str) -> SuiteDef:
        try:
            return self.defs[suite_id]
        except KeyError:
            raise FormatError(f"no suite {suite_id!r} in definitions") from None

    def ids(self) -> list[str]:
        return list(self.defs)


_FRAME_KEYS = (
    "frame", "frame_present", "frame_past",
    "frame_with_object", "frame_without_object",
    "frame_with_aux", "frame_without_aux",
)

_KIND_REQUIRED = {
    "copula_agreement": ("frame", "verb_singular", "verb_plural"),
    "polar_inversion": (
        "frame_present", "frame_past",
        "aux_singular_present", "aux_plural_present",
        "aux_singular_past", "aux_plural_past",
    ),
    "object_manipulation": ("frame_with_object", "frame_without_object"),
    "passive_aux": ("frame_with_aux", "frame_without_aux"),
}


def _frame_slot_names(frame_tokens) -> list[str]:
    names = []
    for tok in frame_tokens:
        if tok.startswith("{") and tok.endswith("}"):
            name = tok[1:-1]
            if name not in names:
                names.append(name)
    return names


def parse_suite_defs(text: str) -> SuiteDefs:
    parser = configparser.ConfigParser(default_section="shared", interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise FormatError(f"bad suite definitions: {exc}") from exc
    defs = {}
    for section in parser.sections():
        raw = dict(parser[section])
        kind = raw.get("kind")
        if kind not in KIND_CONDITION_RULES:
            raise FormatError(f"[{section}]: unknown kind {kind!r}")
        for key in _KIND_REQUIRED[kind]:
            if key not in raw:
                raise FormatError(f"[{section}]: missing key {key!r}")
        categories = tuple(c.strip() for c in raw.get("categories", "").split(",") if c.strip())
        expected = NOUN_CATEGORIES if kind in ("copula_agreement", "polar_inversion") else VERB_CATEGORIES
        if sorted(categories) != sorted(expected):
            raise FormatError(f"[{section}]: categories must be {expected}")
        frames = {
            key: tuple(raw[key].split())
            for key in _FRAME_KEYS if key in raw
        }
        pools = {
            key[len("pool_"):]: [e.strip() for e in value.split(",") if e.strip()]
            for key, value in raw.items() if key.startswith("pool_")
        }
        values = {
            key: value.strip() for key, value in raw.items()
            if key.startswith(("verb_", "aux_"))
        }
        region = raw.get("region", "")
        if not (region.startswith("slot:") or region.startswith("last:")):
            raise FormatError(f"[{section}]: region must be 'slot:NAME' or 'last:K'")
        d = SuiteDef(
            suite_id=section,
            kind=kind,
            categories=tuple(sorted(categories)),
            region=region,
            frames=frames,
            values=values,
            pools=pools,
            target_tag=raw.get("target_tag"),
            invariance=raw.get("invariance", "false").strip().lower() == "true",
        )
        for frame_tokens in frames.values():
            for name in _frame_slot_names(frame_tokens):
                if name in ("target", "verb", "aux"):
                    continue
                if name not in pools:
                    raise FormatError(f"[{section}]: slot {{{name}}} has no pool_{name}")
        defs[section] = d
    if not defs:
        raise FormatError("suite definitions file has no sections")
    return SuiteDefs(defs, hashlib.sha256(text.encode()).hexdigest())


def read_suite_defs(path) -> SuiteDefs:
    with open(path, encoding="utf-8") as fh:
        return parse_suite_defs(fh.read())


# ---------------------------------------------------------------------------
# Items and suites


@dataclass(frozen=True)
class TestItem:
    __test__ = False  # not a pytest class, despite the name

    item_id: str
    suite_id: str
    target: str
    category: str
    bucket: int
    gram_tokens: tuple
    gram_region: tuple
    ungram_tokens: tuple
    ungram_region: tuple

    def tokens(self, condition: str) -> tuple:
        return self.gram_tokens if condition == "gram" else self.ungram_tokens

    def region(self, condition: str) -> tuple:
        return self.gram_region if condition == "gram" else self.ungram_region


@dataclass
class TestSuite:
    __test__ = False  # not a pytest class, despite the name

    suite_id: str
    kind: str
    condition_rule: str
    items: list
    provenance: dict = field(default_factory=dict)
    shortfalls: list = field(default_factory=list)  # (bucket, category, wanted, got)
    invariance: bool = False

    def sentence_count(self) -> int:
        return 2 * len(self.items)


# ---------------------------------------------------------------------------
# Target sampling


@dataclass
class SuiteResources:
    """External inputs generation needs beyond the lexicon."""

    transitivity_marks: Mapping[str, str] = field(default_factory=dict)
    transitivity_calls: Mapping = field(default_factory=dict)
    irregular: frozenset = frozenset()


def _majority_tag(stats) -> str | None:
    if not stats.pos:
        return None
    return sorted(stats.pos.items(), key=lambda kv: (-kv[1], kv[0]))[0][0]


def candidate_pool(lex: LexiconStats, suite_def: SuiteDef, category: str,
                   resources: SuiteResources) -> list[str]:
    """All word forms eligible for a suite/category, any exposure."""
    if category in NOUN_CATEGORIES:
        tag = "NN" if category == "singular" else "NNS"
        pool = [w for w in lex.words() if _majority_tag(lex.stats(w)) == tag]
        if suite_def.kind == "polar_inversion":
            pool = [w for w in pool if lex.stats(w).inverted == 0]
        return pool
    if category not in VERB_CATEGORIES:
        raise InputError(f"unknown category {category!r}")
    tag = suite_def.target_tag or "VBD"
    if suite_def.invariance:
        active = set(active_only_verbs(lex, resources.irregular))
        return sorted(
            w for w, mark in resources.transitivity_marks.items()
            if mark == category and w in active
        )
    pool = []
    for w, call in resources.transitivity_calls.items():
        if call.klass != TransitivityClass(category):
            continue
        if lex.pos_counts(w).get(tag, 0) == 0:
            continue
        if suite_def.kind == "passive_aux" and w in resources.irregular:
            continue
        pool.append(w)
    return sorted(pool)


def _derived_rng(*parts) -> random.Random:
    key = ":".join(str(p) for p in parts)
    digest = hashlib.sha256(key.encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def sample_targets(
    lex: LexiconStats,
    category: str,
    bucket: ExposureBucket,
    n: int,
    seed,
    *,
    suite_def: SuiteDef,
    resources: SuiteResources,
    bucket_table=DEFAULT_BUCKETS,
) -> list[str]:
    """Up to ``n`` distinct eligible words whose exposure falls in ``bucket``,
    drawn uniformly without replacement; deterministic for a fixed seed."""
    pool = [
        w for w in candidate_pool(lex, suite_def, category, resources)
        if exposure_bucket(lex.count(w), bucket_table) == bucket
    ]
    if not pool:
        raise EmptyPoolError(
            f"{suite_def.suite_id}: no {category} candidates in bucket {bucket.id}"
        )
    rng = _derived_rng(seed, suite_def.suite_id, bucket.id, category)
    return rng.sample(sorted(pool), min(n, len(pool)))


# ---------------------------------------------------------------------------
# Instantiation


def _render(frame_tokens, assignment) -> tuple[list, dict]:
    tokens: list = []
    spans: dict = {}
    for ft in frame_tokens:
        if ft.startswith("{") and ft.endswith("}"):
            name = ft[1:-1]
            try:
                value = assignment[name]
            except KeyError:
                raise GenerationError(f"no value for slot {{{name}}}") from None
            parts = value.split()
            spans[name] = (len(tokens), len(tokens) + len(parts))
            tokens.extend(parts)
        else:
            tokens.append(ft)
    return tokens, spans


def _region(defn: SuiteDef, tokens, spans) -> tuple:
    if defn.region.startswith("slot:"):
        name = defn.region[len("slot:"):]
        if name not in spans:
            raise GenerationError(f"region slot {{{name}}} absent from frame")
        return spans[name]
    k = int(defn.region[len("last:"):])
    return (len(tokens) - k, len(tokens))


def _condition_frames(defn: SuiteDef, category: str, meta: dict):
    """(gram frame+values, ungram frame+values) for one item."""
    other = _OTHER[category]
    if defn.kind == "copula_agreement":
        frame = defn.frames["frame"]
        return (frame, {"verb": defn.values[f"verb_{category}"]}), \
               (frame, {"verb": defn.values[f"verb_{other}"]})
    if defn.kind == "polar_inversion":
        frame = defn.frames[f"frame_{meta['tense']}"]
        tense = meta["tense"]
        return (frame, {"aux": defn.values[f"aux_{category}_{tense}"]}), \
               (frame, {"aux": defn.values[f"aux_{other}_{tense}"]})
    if defn.kind == "object_manipulation":
        with_f = defn.frames["frame_with_object"]
        without_f = defn.frames["frame_without_object"]
        pair = (with_f, without_f) if category == "transitive" else (without_f, with_f)
        return (pair[0], {}), (pair[1], {})
    if defn.kind == "passive_aux":
        with_f = defn.frames["frame_with_aux"]
        without_f = defn.frames["frame_without_aux"]
        pair = (with_f, without_f) if category == "transitive" else (without_f, with_f)
        return (pair[0], {}), (pair[1], {})
    raise InputError(f"unknown kind {defn.kind!r}")


def instantiate(
    defn: SuiteDef,
    target: str,
    category: str,
    fillers: Mapping[str, str],
    condition: str,
    meta: dict | None = None,
    *,
    lex: LexiconStats | None = None,
    filler_min_count: int = 50,
    punct_exempt: bool = True,
) -> tuple[tuple, tuple]:
    """Realize one condition of one item: (tokens, region span).

    When a lexicon is given, every non-target token must clear the
    frequency threshold (punctuation exempt by default); a failing filler
    rejects the instantiation by name.
    """
    meta = meta or {}
    frames = _condition_frames(defn, category, meta)
    frame, cond_values = frames[0] if condition == "gram" else frames[1]
    assignment = dict(fillers)
    assignment["target"] = target
    assignment.update(cond_values)
    tokens, spans = _render(frame, assignment)
    region = _region(defn, tokens, spans)
    if not (0 <= region[0] < region[1] <= len(tokens)):
        raise GenerationError(f"region {region} outside sentence of {len(tokens)} tokens")
    if lex is not None:
        for tok in tokens:
            if tok == target:
                continue
            if punct_exempt and is_punct(tok):
                continue
            if lex.count(tok) < filler_min_count:
                raise GenerationError(
                    f"filler {tok!r} occurs {lex.count(tok)} times "
                    f"(< {filler_min_count})"
                )
    return tuple(tokens), region


def _instances(defn: SuiteDef, target: str, k: int, rng: random.Random):
    """k deterministic (fillers, meta) frame instances for one target word."""

    def combos(frame_names) -> list[dict]:
        slot_names: list[str] = []
        for fname in frame_names:
            for name in _frame_slot_names(defn.frames[fname]):
                if name not in ("target", "verb", "aux") and name not in slot_names:
                    slot_names.append(name)
        pools = [defn.pools[name] for name in slot_names]
        out = []
        for values in itertools.product(*pools):
            if any(target in v.split() for v in values):
                continue  # a filler equal to the target would break uniqueness
            out.append(dict(zip(slot_names, values)))
        return out

    if defn.kind == "polar_inversion":
        n_past = k // 2
        n_present = k - n_past
        picked = []
        for tense, need in (("present", n_present), ("past", n_past)):
            options = combos([f"frame_{tense}"])
            if len(options) < need:
                raise GenerationError(
                    f"{defn.suite_id}: only {len(options)} frame variants for "
                    f"{tense} tense, need {need}"
                )
            picked.extend(
                (options[i], {"tense": tense})
                for i in rng.sample(range(len(options)), need)
            )
        return picked
    frame_names = [name for name in _FRAME_KEYS if name in defn.frames]
    options = combos(frame_names)
    if len(options) < k:
        raise GenerationError(
            f"{defn.suite_id}: only {len(options)} frame variants, need {k}"
        )
    return [(options[i], {}) for i in rng.sample(range(len(options)), k)]


# ---------------------------------------------------------------------------
# Generation


def generate_suite(
    suite_id: str,
    defs: SuiteDefs,
    lex: LexiconStats,
    seed,
    *,
    resources: SuiteResources | None = None,
    words_per_category: int = 20,
    frames_per_word: int = 20,
    filler_min_count: int = 50,
    punct_exempt: bool = True,
    bucket_table=DEFAULT_BUCKETS,
) -> TestSuite:
    """Deterministically instantiate one suite from a lexicon.

    Buckets that lack candidates produce fewer words (recorded as
    shortfalls), never resampling from other buckets; a suite whose every
    bucket is empty raises.  The returned suite has already passed
    validation.
    """
    defn = defs[suite_id]
    resources = resources or SuiteResources()
    items = []
    shortfalls = []
    for bucket in bucket_table:
        for category in defn.categories:
            try:
                targets = sample_targets(
                    lex, category, bucket, words_per_category, seed,
                    suite_def=defn, resources=resources, bucket_table=bucket_table,
                )
            except EmptyPoolError:
                shortfalls.append((bucket.id, category, words_per_category, 0))
                continue
            if len(targets) < words_per_category:
                shortfalls.append(
                    (bucket.id, category, words_per_category, len(targets))
                )
            for target in targets:
                rng = _derived_rng(seed, suite_id, bucket.id, category, target)
                for f_idx, (fillers, meta) in enumerate(
                    _instances(defn, target, frames_per_word, rng)
                ):
                    gram_tokens, gram_region = instantiate(
                        defn, target, category, fillers, "gram", meta,
                        lex=lex, filler_min_count=filler_min_count,
                        punct_exempt=punct_exempt,
                    )
                    ungram_tokens, ungram_region = instantiate(
                        defn, target, category, fillers, "ungram", meta,
                        lex=lex, filler_min_count=filler_min_count,
                        punct_exempt=punct_exempt,
                    )
                    items.append(TestItem(
                        item_id=f"{suite_id}.b{bucket.id}.{target}.f{f_idx:02d}",
                        suite_id=suite_id,
                        target=target,
                        category=category,
                        bucket=bucket.id,
                        gram_tokens=gram_tokens,
                        gram_region=gram_region,
                        ungram_tokens=ungram_tokens,
                        ungram_region=ungram_region,
                    ))
    if not items:
        raise EmptyPoolError(f"{suite_id}: every bucket/category pool is empty")
    suite = TestSuite(
        suite_id=suite_id,
        kind=defn.kind,
        condition_rule=KIND_CONDITION_RULES[defn.kind],
        items=items,
        invariance=defn.invariance,
        provenance={
            "corpus": lexicon_digest(lex),
            "defs": defs.digest,
            "seed": str(seed),
            "words_per_category": str(words_per_category),
            "frames_per_word": str(frames_per_word),
            "filler_min_count": str(filler_min_count),
        },
        shortfalls=shortfalls,
    )
    report = validate_suite(
        suite, lex, filler_min_count=filler_min_count,
        punct_exempt=punct_exempt,
    )
    if report.violations:
        first = report.violations[0]
        raise GenerationError(
            f"{suite_id}: generated suite failed validation "
            f"({len(report.violations)} violations; first: {first})"
        )
    return suite


# ---------------------------------------------------------------------------
# Validation


@dataclass
class ValidationReport:
    violations: list  # (item_id or None, code, message)
    warnings: list

    @property
    def ok(self) -> bool:
        return not self.violations


def _diff_spans(a: tuple, b: tuple):
    """(prefix length, a middle, b middle) with maximal common affixes."""
    p = 0
    while p < len(a) and p < len(b) and a[p] == b[p]:
        p += 1
    s = 0
    while (s < len(a) - p and s < len(b) - p
           and a[len(a) - 1 - s] == b[len(b) - 1 - s]):
        s += 1
    return p, a[p:len(a) - s], b[p:len(b) - s]


def validate_suite(
    suite: TestSuite,
    lex: LexiconStats | None = None,
    *,
    filler_min_count: int = 50,
    punct_exempt: bool = True,
) -> ValidationReport:
    """Report-only check of item invariants, pair minimality, frequency
    constraints, balance, and filter soundness."""
    violations = []
    warnings = []

    def bad(item_id, code, message):
        violations.append((item_id, code, message))

    seen_ids = set()
    per_bucket: dict = {}
    for item in suite.items:
        if item.item_id in seen_ids:
            bad(item.item_id, "duplicate-id", "item id occurs twice")
        seen_ids.add(item.item_id)
        per_bucket.setdefault(item.bucket, {}).setdefault(item.category, set()).add(item.target)

        for condition in ("gram", "ungram"):
            tokens = item.tokens(condition)
            start, end = item.region(condition)
            if not (0 <= start < end <= len(tokens)):
                bad(item.item_id, "bad-region",
                    f"{condition} region ({start}, {end}) invalid for "
                    f"{len(tokens)} tokens")
            n_target = sum(1 for t in tokens if t == item.target)
            if n_target != 1:
                bad(item.item_id, "target-count",
                    f"target occurs {n_target} times in {condition} sentence")
            if lex is not None:
                for tok in tokens:
                    if tok == item.target:
                        continue
                    if punct_exempt and is_punct(tok):
                        continue
                    if lex.count(tok) < filler_min_count:
                        bad(item.item_id, "filler-frequency",
                            f"filler {tok!r} occurs {lex.count(tok)} times "
                            f"(< {filler_min_count})")

        _, gmid, umid = _diff_spans(item.gram_tokens, item.ungram_tokens)
        rule = suite.condition_rule
        if rule in ("verb-form swap", "auxiliary swap"):
            pair_ok = len(gmid) == 1 and len(umid) == 1
        elif rule == "auxiliary deletion":
            pair_ok = (len(gmid) == 1 and not umid) or (len(umid) == 1 and not gmid)
        elif rule == "object deletion":
            pair_ok = (bool(gmid) != bool(umid)) and 1 <= max(len(gmid), len(umid)) <= 3
        else:
            pair_ok = False
        if not pair_ok:
            bad(item.item_id, "minimal-pair",
                f"conditions differ as {list(gmid)!r} vs {list(umid)!r}, "
                f"not per rule {rule!r}")

        if lex is not None:
            if suite.kind == "polar_inversion" and lex.stats(item.target).inverted > 0:
                bad(item.item_id, "polar-overlap",
                    f"target {item.target!r} occurs in inverted frames")
            if suite.invariance and lex.stats(item.target).vbn > 0:
                bad(item.item_id, "participle-evidence",
                    f"target {item.target!r} has participle occurrences")

    shortfall_keys = {(b, c) for (b, c, _, _) in suite.shortfalls}
    all_cats = sorted({i.category for i in suite.items}
                      | {c for (_, c, _, _) in suite.shortfalls})
    for bucket in sorted(per_bucket):
        sizes = {cat: len(per_bucket[bucket].get(cat, set())) for cat in all_cats}
        if len(set(sizes.values())) > 1:
            biggest = max(sizes.values())
            lagging = [c for c in all_cats if sizes[c] < biggest]
            message = f"bucket {bucket}: category sizes {sizes}"
            if all((bucket, c) in shortfall_keys for c in lagging):
                warnings.append((None, "balance", message + " (recorded shortfall)"))
            else:
                bad(None, "balance", message)
    return ValidationReport(violations, warnings)


# ---------------------------------------------------------------------------
# Suite files: line-delimited, one record per (item, condition)


SUITE_HEADER = "#syntax-probe-suite v1"


def write_suite(suite: TestSuite, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(SUITE_HEADER + "\n")
        fh.write(f"#suite_id\t{suite.suite_id}\n")
        fh.write(f"#kind\t{suite.kind}\n")
        fh.write(f"#condition_rule\t{suite.condition_rule}\n")
        fh.write(f"#invariance\t{int(suite.invariance)}\n")
        prov = "\t".join(f"{k}={v}" for k, v in sorted(suite.provenance.items()))
        fh.write(f"#provenance\t{prov}\n")
        for bucket, category, wanted, got in suite.shortfalls:
            fh.write(f"#shortfall\t{bucket}\t{category}\t{wanted}\t{got}\n")
        fh.write("#item_id\tsuite_id\ttarget\tcategory\tbucket\tcondition"
                 "\ttokens\tregion_start\tregion_end\n")
        for item in suite.items:
            for condition in ("gram", "ungram"):
                tokens = item.tokens(condition)
                start, end = item.region(condition)
                fh.write(
                    f"{item.item_id}\t{item.suite_id}\t{item.target}"
                    f"\t{item.category}\t{item.bucket}\t{condition}"
                    f"\t{' '.join(tokens)}\t{start}\t{end}\n"
                )


def read_suite(path) -> TestSuite:
    meta: dict = {}
    provenance: dict = {}
    shortfalls: list = []
    rows: dict = {}
    order: list = []
    with open(path, encoding="utf-8") as fh:
        first = fh.readline().rstrip("\n")
        if first != SUITE_HEADER:
            raise FormatError(f"{path}: not a suite file")
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split("\t")
                if parts[0] in ("suite_id", "kind", "condition_rule", "invariance"):
                    meta[parts[0]] = parts[1]
                elif parts[0] == "provenance":
                    for kv in parts[1:]:
                        if kv:
                            k, _, v = kv.partition("=")
                            provenance[k] = v
                elif parts[0] == "shortfall":
                    shortfalls.append((int(parts[1]), parts[2],
                                       int(parts[3]), int(parts[4])))
                continue
            parts = line.split("\t")
            if len(parts) != 9:
                raise FormatError(f"{path}:{lineno}: expected 9 columns")
            item_id, suite_id, target, category, bucket, condition, toks, rs, re_ = parts
            key = item_id
            if key not in rows:
                rows[key] = {"suite_id": suite_id, "target": target,
                             "category": category, "bucket": int(bucket)}
                order.append(key)
            rows[key][condition] = (tuple(toks.split(" ")), (int(rs), int(re_)))
    items = []
    for item_id in order:
        row = rows[item_id]
        if "gram" not in row or "ungram" not in row:
            raise FormatError(f"{path}: item {item_id!r} missing a condition")
        items.append(TestItem(
            item_id=item_id,
            suite_id=row["suite_id"],
            target=row["target"],
            category=row["category"],
            bucket=row["bucket"],
            gram_tokens=row["gram"][0],
            gram_region=row["gram"][1],
            ungram_tokens=row["ungram"][0],
            ungram_region=row["ungram"][1],
        ))
    return TestSuite(
        suite_id=meta.get("suite_id", ""),
        kind=meta.get("kind", ""),
        condition_rule=meta.get("condition_rule", ""),
        items=items,
        provenance=provenance,
        shortfalls=shortfalls,
        invariance=bool(int(meta.get("invariance", "0"))),
    )
