"""Treebank reading and lexical exposure statistics.

This module reads POS-tagged bracketed parses (one tree per S-expression,
PTB ``.mrg`` style) and folds them into per-word-form statistics: raw and
per-tag counts, object-presence evidence for verbs, passive-participle
usage, and occurrence as the subject noun of an inverted polar frame.
Those statistics drive exposure bucketing, transitivity classification and
the word filters used by suite generation.

Statistics construction is a pure fold over trees: :func:`build_lexicon`
over a concatenation equals the merge of the parts (see
:meth:`LexiconStats.merge`), so corpora can be sharded freely.
"""

from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping

from .errors import FormatError, InputError, TreebankParseError

NOUN_TAGS = ("NN", "NNS", "NNP", "NNPS")

#: Sentence-initial forms that open an inverted polar frame.
DEFAULT_AUX_FORMS = frozenset(
    "is are was were am do does did has have had".split()
)

#: Tags whose occurrences contribute object-presence evidence.  The strict
#: past-tense-only reading corresponds to ("VBD",).
DEFAULT_OBJECT_TAGS = frozenset(("VB", "VBD", "VBP", "VBZ"))

#: Tokens exempt from the filler-frequency threshold when punctuation is
#: excluded (every non-alphanumeric single-character token qualifies too).
PUNCT_TOKENS = frozenset(". , ? ! ; : -- ... `` '' ` '".split())


# ---------------------------------------------------------------------------
# Trees


class Tree:
    """A bracketed constituency parse node.

    Terminals carry ``word`` and use ``label`` for the POS tag; internal
    nodes have ``children`` and an empty ``word``.
    """

    __slots__ = ("label", "children", "word")

    def __init__(self, label: str, children: Iterable["Tree"] | None = None,
                 word: str | None = None):
        self.label = label
        self.children = list(children) if children is not None else []
        self.word = word
        if self.word is not None and self.children:
            raise ValueError("a node cannot have both a word and children")

    @property
    def is_terminal(self) -> bool:
        return self.word is not None

    def terminals(self):
        """Yield ``(word, tag)`` pairs in surface order."""
        if self.is_terminal:
            yield (self.word, self.label)
        else:
            for child in self.children:
                yield from child.terminals()

    def pretty(self) -> str:
        """Canonical single-space bracketing; inverse of :func:`parse_treebank`."""
        if self.is_terminal:
            return f"({self.label} {self.word})"
        inner = " ".join(child.pretty() for child in self.children)
        return f"({self.label} {inner})"

    def __eq__(self, other):
        return (
            isinstance(other, Tree)
            and self.label == other.label
            and self.word == other.word
            and self.children == other.children
        )

    def __hash__(self):
        return hash((self.label, self.word, tuple(self.children)))

    def __repr__(self):
        return f"Tree({self.pretty()!r})"


def base_label(label: str) -> str:
    """Strip PTB function tags and indices: ``NP-SBJ-1`` -> ``NP``."""
    return label.split("-")[0].split("=")[0]


def _skip_ws(text: str, i: int) -> int:
    n = len(text)
    while i < n and text[i].isspace():
        i += 1
    return i


def _atom(text: str, i: int) -> tuple[str, int]:
    n = len(text)
    j = i
    while j < n and not text[j].isspace() and text[j] not in "()":
        j += 1
    return text[i:j], j


def _parse_node(text: str, i: int) -> tuple[Tree, int]:
    start = i
    i = _skip_ws(text, i + 1)  # past '('
    label, i = _atom(text, i)
    children: list[Tree] = []
    word: str | None = None
    n = len(text)
    while True:
        i = _skip_ws(text, i)
        if i >= n:
            raise TreebankParseError("unclosed '('", offset=start)
        ch = text[i]
        if ch == ")":
            i += 1
            break
        if ch == "(":
            if word is not None:
                raise TreebankParseError("child after terminal word", offset=i)
            child, i = _parse_node(text, i)
            children.append(child)
        else:
            atom, i = _atom(text, i)
            if children or word is not None:
                raise TreebankParseError(f"unexpected token {atom!r}", offset=i - len(atom))
            word = atom
    if word is not None:
        if not label:
            raise TreebankParseError("empty node label", offset=start)
        return Tree(label, word=word), i
    if not children:
        raise TreebankParseError("empty constituent", offset=start)
    if not label:
        # PTB files wrap each tree in an unlabeled top bracket; unwrap it.
        if len(children) == 1:
            return children[0], i
        raise TreebankParseError("empty node label", offset=start)
    return Tree(label, children), i


def parse_treebank(text: str) -> list[Tree]:
    """Parse a sequence of bracketed trees.

    Raises :class:`TreebankParseError` with the byte offset of the offending
    bracket on unbalanced input or empty labels.
    """
    trees = []
    i = _skip_ws(text, 0)
    n = len(text)
    while i < n:
        if text[i] != "(":
            raise TreebankParseError(f"expected '(' but found {text[i]!r}", offset=i)
        tree, i = _parse_node(text, i)
        trees.append(tree)
        i = _skip_ws(text, i)
    return trees


def read_treebank(path, comment_prefix: str = "#") -> list[Tree]:
    """Read trees from a file, skipping lines that start with ``comment_prefix``."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln for ln in fh if not ln.lstrip().startswith(comment_prefix)]
    return parse_treebank("".join(lines))


# ---------------------------------------------------------------------------
# Lexicon statistics


@dataclass
class WordStats:
    """Evidence accumulated for one word form."""

    total: int = 0
    pos: Counter = field(default_factory=Counter)
    obj_present: int = 0
    obj_absent: int = 0
    inverted: int = 0
    vbn: int = 0

    def merge(self, other: "WordStats") -> None:
        self.total += other.total
        self.pos.update(other.pos)
        self.obj_present += other.obj_present
        self.obj_absent += other.obj_absent
        self.inverted += other.inverted
        self.vbn += other.vbn


_EMPTY = WordStats()


class LexiconStats:
    """Per word-form occurrence statistics for a treebank.

    Lookup keys are folded the same way counts were (see ``lowercase``), so
    callers can query with surface forms.
    """

    def __init__(self, lowercase: bool = False):
        self.lowercase = lowercase
        self._words: dict[str, WordStats] = {}

    def _fold(self, word: str) -> str:
        return word.lower() if self.lowercase else word

    def _entry(self, word: str) -> WordStats:
        key = self._fold(word)
        entry = self._words.get(key)
        if entry is None:
            entry = self._words[key] = WordStats()
        return entry

    def stats(self, word: str) -> WordStats:
        return self._words.get(self._fold(word), _EMPTY)

    def count(self, word: str) -> int:
        return self.stats(word).total

    def pos_counts(self, word: str) -> Counter:
        return self.stats(word).pos

    def words(self) -> list[str]:
        return sorted(self._words)

    def __len__(self):
        return len(self._words)

    def __contains__(self, word: str) -> bool:
        return self._fold(word) in self._words

    def merge(self, other: "LexiconStats") -> "LexiconStats":
        """Field-wise sum; requires identical case handling."""
        if self.lowercase != other.lowercase:
            raise InputError("cannot merge lexicons with different case handling")
        out = LexiconStats(lowercase=self.lowercase)
        for src in (self, other):
            for word, stats in src._words.items():
                out._entry(word).merge(stats)
        return out

    def __eq__(self, other):
        return (
            isinstance(other, LexiconStats)
            and self.lowercase == other.lowercase
            and self._words == other._words
        )


def _np_head_noun(node: Tree) -> str | None:
    """Rightmost noun-tagged terminal of an NP, or None."""
    nouns = [w for (w, t) in node.terminals() if t in NOUN_TAGS]
    return nouns[-1] if nouns else None


def _detect_inversion(tree: Tree, aux_forms: frozenset) -> str | None:
    """Return the subject noun of an inverted polar frame, if this tree is one.

    The frame detector: the sentence's first terminal is a configured
    auxiliary form; the subject is the rightmost noun-tagged terminal of the
    first NP among that auxiliary's right siblings (searched innermost-out).
    """
    first = next(tree.terminals(), None)
    if first is None or first[0].lower() not in aux_forms:
        return None

    # Path of nodes from root down to the first terminal.
    path = [tree]
    while not path[-1].is_terminal:
        path.append(path[-1].children[0])
    # Innermost ancestor whose right siblings contain an NP wins.
    for depth in range(len(path) - 2, -1, -1):
        parent = path[depth]
        below = path[depth + 1]
        idx = parent.children.index(below)
        for sib in parent.children[idx + 1:]:
            if not sib.is_terminal and base_label(sib.label) == "NP":
                return _np_head_noun(sib)
    return None


def _object_evidence(node: Tree, object_tags: frozenset, out: list):
    """Collect (verb, has_following_np) pairs from VP-internal verbs."""
    if node.is_terminal:
        return
    if base_label(node.label) == "VP":
        for i, child in enumerate(node.children):
            if child.is_terminal and child.label in object_tags:
                has_np = any(
                    not sib.is_terminal and base_label(sib.label) == "NP"
                    for sib in node.children[i + 1:]
                )
                out.append((child.word, has_np))
    for child in node.children:
        _object_evidence(child, object_tags, out)


def build_lexicon(
    trees: Iterable[Tree],
    *,
    lowercase: bool = False,
    aux_forms: frozenset = DEFAULT_AUX_FORMS,
    object_tags: frozenset = DEFAULT_OBJECT_TAGS,
    dependencies: Mapping[int, frozenset] | None = None,
) -> LexiconStats:
    """Fold trees into a :class:`LexiconStats`.

    ``dependencies`` optionally maps 1-based sentence ids to the set of
    1-based token indices that head an ``obj`` relation; for those sentences
    the sidecar replaces the phrase-structure object heuristic.
    """
    trees = list(trees)
    if not trees:
        raise InputError("build_lexicon requires at least one tree")
    lex = LexiconStats(lowercase=lowercase)
    for sent_id, tree in enumerate(trees, start=1):
        terms = list(tree.terminals())
        for word, tag in terms:
            entry = lex._entry(word)
            entry.total += 1
            entry.pos[tag] += 1
            if tag == "VBN":
                entry.vbn += 1

        if dependencies is not None and sent_id in dependencies:
            obj_heads = dependencies[sent_id]
            for idx, (word, tag) in enumerate(terms, start=1):
                if tag in object_tags:
                    entry = lex._entry(word)
                    if idx in obj_heads:
                        entry.obj_present += 1
                    else:
                        entry.obj_absent += 1
        else:
            evidence: list = []
            _object_evidence(tree, object_tags, evidence)
            for word, has_np in evidence:
                entry = lex._entry(word)
                if has_np:
                    entry.obj_present += 1
                else:
                    entry.obj_absent += 1

        inverted_noun = _detect_inversion(tree, aux_forms)
        if inverted_noun is not None:
            lex._entry(inverted_noun).inverted += 1
    return lex


def read_dependency_sidecar(path) -> dict[int, frozenset]:
    """Read a ``sent_id<TAB>token_index<TAB>head_index<TAB>relation`` sidecar.

    Returns {sent_id: head token indices of obj/dobj relations}; sentences
    listed with any relation are considered covered by the sidecar.
    """
    covered: dict[int, set] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise FormatError(f"{path}:{lineno}: expected 4 tab-separated fields")
            try:
                sent_id, _token, head = int(parts[0]), int(parts[1]), int(parts[2])
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: non-integer index") from exc
            covered.setdefault(sent_id, set())
            if parts[3] in ("obj", "dobj"):
                covered[sent_id].add(head)
    return {sid: frozenset(heads) for sid, heads in covered.items()}


# ---------------------------------------------------------------------------
# Exposure buckets


@dataclass(frozen=True)
class ExposureBucket:
    """Inclusive count range labeled by the end of the range."""

    id: int
    lo: int
    hi: int

    @property
    def label(self) -> str:
        return str(self.id)


DEFAULT_BUCKETS: tuple[ExposureBucket, ...] = (
    ExposureBucket(2, 2, 2),
    ExposureBucket(3, 3, 3),
    ExposureBucket(4, 4, 4),
    ExposureBucket(5, 5, 5),
    ExposureBucket(10, 6, 10),
    ExposureBucket(20, 11, 20),
    ExposureBucket(30, 21, 30),
    ExposureBucket(100, 50, 100),
)


def exposure_bucket(count: int, table: tuple[ExposureBucket, ...] = DEFAULT_BUCKETS):
    """Bucket containing ``count``, or None (counts of 1, 31-49, >100 have none)."""
    if count < 0:
        raise InputError(f"negative count {count}")
    for bucket in table:
        if bucket.lo <= count <= bucket.hi:
            return bucket
    return None


def parse_bucket_table(spec: str) -> tuple[ExposureBucket, ...]:
    """Parse ``"2:2-2,3:3-3,..."`` into a bucket table; ranges must be disjoint."""
    buckets = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            label, rng = part.split(":")
            lo, hi = rng.split("-")
            buckets.append(ExposureBucket(int(label), int(lo), int(hi)))
        except ValueError as exc:
            raise FormatError(f"bad bucket spec {part!r}") from exc
    buckets.sort(key=lambda b: b.lo)
    for a, b in zip(buckets, buckets[1:]):
        if b.lo <= a.hi:
            raise FormatError(f"overlapping buckets {a.id} and {b.id}")
    return tuple(buckets)


# ---------------------------------------------------------------------------
# Word classification


class TransitivityClass(Enum):
    TRANSITIVE = "transitive"
    INTRANSITIVE = "intransitive"
    EXCLUDED = "excluded"


@dataclass(frozen=True)
class TransitivityCall:
    word: str
    marked: str
    klass: TransitivityClass
    reason: str
    obj_fraction: float | None = None


def classify_transitivity(
    lex: LexiconStats,
    external: Mapping[str, str],
    hi: float = 0.9,
    lo: float = 0.1,
) -> dict[str, TransitivityCall]:
    """Keep externally-marked verbs whose corpus object evidence agrees.

    A verb marked transitive is kept iff its with-object fraction of active
    uses is >= ``hi``; one marked intransitive iff the fraction is <= ``lo``;
    anything else (including verbs with no evidence) is excluded with a
    reason code.
    """
    if not hi > lo:
        raise InputError(f"hi ({hi}) must exceed lo ({lo})")
    calls: dict[str, TransitivityCall] = {}
    for word in sorted(external):
        marked = external[word].strip().lower()
        if marked not in ("transitive", "intransitive"):
            raise FormatError(f"bad transitivity mark {external[word]!r} for {word!r}")
        stats = lex.stats(word)
        if stats.total == 0:
            calls[word] = TransitivityCall(word, marked, TransitivityClass.EXCLUDED,
                                           "not-in-corpus")
            continue
        evidence = stats.obj_present + stats.obj_absent
        if evidence == 0:
            calls[word] = TransitivityCall(word, marked, TransitivityClass.EXCLUDED,
                                           "no-object-evidence")
            continue
        frac = stats.obj_present / evidence
        if marked == "transitive":
            if frac >= hi:
                klass, reason = TransitivityClass.TRANSITIVE, "kept"
            else:
                klass, reason = TransitivityClass.EXCLUDED, "object-fraction-below-hi"
        else:
            if frac <= lo:
                klass, reason = TransitivityClass.INTRANSITIVE, "kept"
            else:
                klass, reason = TransitivityClass.EXCLUDED, "object-fraction-above-lo"
        calls[word] = TransitivityCall(word, marked, klass, reason, frac)
    return calls


def vbn_fraction(lex: LexiconStats, verb: str) -> float:
    """Fraction of a verb's occurrences tagged as passive participle."""
    stats = lex.stats(verb)
    if stats.total == 0:
        raise InputError(f"{verb!r} has no occurrences")
    return stats.vbn / stats.total


def filter_polar_overlap(nouns: Iterable[str], lex: LexiconStats):
    """Split nouns into (kept, removed-for-inverted-occurrence)."""
    kept, removed = [], []
    for noun in nouns:
        (removed if lex.stats(noun).inverted > 0 else kept).append(noun)
    return kept, removed


def active_only_verbs(lex: LexiconStats, irregular: frozenset = frozenset()) -> list[str]:
    """Word forms with past-tense but no participle usage.

    ``irregular`` lists forms whose past tense and participle differ on the
    surface; those are dropped because the passive frames reuse the form.
    """
    out = []
    for word in lex.words():
        stats = lex.stats(word)
        if stats.pos.get("VBD", 0) > 0 and stats.vbn == 0 and word not in irregular:
            out.append(word)
    return out


# ---------------------------------------------------------------------------
# External files


def read_transitivity_lexicon(path) -> dict[str, str]:
    """Two-column ``verb<TAB>transitive|intransitive`` file."""
    marks: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise FormatError(f"{path}:{lineno}: expected verb<TAB>mark")
            marks[parts[0]] = parts[1]
    return marks


def read_irregular_verbs(path) -> frozenset:
    with open(path, encoding="utf-8") as fh:
        return frozenset(
            line.strip() for line in fh
            if line.strip() and not line.lstrip().startswith("#")
        )


def write_lexicon(lex: LexiconStats, path) -> None:
    """Deterministic sorted TSV: word, total, tag:count pairs, evidence columns."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("#syntax-probe-lexicon v1 lowercase=%d\n" % int(lex.lowercase))
        fh.write("#word\ttotal\tpos\tobj_present\tobj_absent\tinverted\tvbn\n")
        for word in lex.words():
            s = lex.stats(word)
            pos = ",".join(f"{tag}:{n}" for tag, n in sorted(s.pos.items()))
            fh.write(f"{word}\t{s.total}\t{pos}\t{s.obj_present}\t{s.obj_absent}"
                     f"\t{s.inverted}\t{s.vbn}\n")


def read_lexicon(path) -> LexiconStats:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if not header.startswith("#syntax-probe-lexicon v1"):
            raise FormatError(f"{path}: not a lexicon table")
        lowercase = "lowercase=1" in header
        lex = LexiconStats(lowercase=lowercase)
        for lineno, line in enumerate(fh, start=2):
            if line.startswith("#") or not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 7:
                raise FormatError(f"{path}:{lineno}: expected 7 columns")
            word, total, pos, present, absent, inverted, vbn = parts
            entry = lex._entry(word)
            entry.total = int(total)
            if pos:
                for pair in pos.split(","):
                    tag, n = pair.rsplit(":", 1)
                    entry.pos[tag] = int(n)
            entry.obj_present = int(present)
            entry.obj_absent = int(absent)
            entry.inverted = int(inverted)
            entry.vbn = int(vbn)
    return lex


def lexicon_digest(lex: LexiconStats) -> str:
    """Stable content hash used in suite provenance."""
    h = hashlib.sha256()
    h.update(b"lowercase=%d\n" % int(lex.lowercase))
    for word in lex.words():
        s = lex.stats(word)
        pos = ",".join(f"{t}:{n}" for t, n in sorted(s.pos.items()))
        h.update(f"{word}\t{s.total}\t{pos}\t{s.obj_present}\t{s.obj_absent}"
                 f"\t{s.inverted}\t{s.vbn}\n".encode())
    return h.hexdigest()


def is_punct(token: str) -> bool:
    return token in PUNCT_TOKENS or (len(token) == 1 and not token.isalnum())
