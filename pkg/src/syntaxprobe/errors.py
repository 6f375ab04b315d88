"""Exception hierarchy with stable machine-readable categories.

Every error raised by this package carries a ``category`` token that the CLI
prints on stderr, so scripted callers can switch on it without parsing prose.
"""

from __future__ import annotations


class SyntaxProbeError(Exception):
    """Base class; ``category`` is a stable token, never localized."""

    category = "error"

    def __init__(self, message: str, **context):
        super().__init__(message)
        self.context = context


class TreebankParseError(SyntaxProbeError):
    category = "parse-error"

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})", offset=offset)
        self.offset = offset


class InputError(SyntaxProbeError):
    """Precondition violation on user-supplied values."""

    category = "undefined-input"


class FormatError(SyntaxProbeError):
    """Malformed artifact file (suite, surprisal, model, config)."""

    category = "format-error"


class GenerationError(SyntaxProbeError):
    category = "generation-error"


class EmptyPoolError(GenerationError):
    category = "empty-pool"


class TrainingError(SyntaxProbeError):
    category = "training-error"


class AlignmentError(SyntaxProbeError):
    category = "alignment-error"


class IncompleteResultsError(SyntaxProbeError):
    category = "incomplete-results"


class DeadBeamError(SyntaxProbeError):
    category = "dead-beam"

    def __init__(self, word_index: int, word: str):
        super().__init__(
            f"no live parser states before word {word_index} ({word!r})",
            word_index=word_index,
        )
        self.word_index = word_index
        self.word = word


class OracleInfeasibleError(SyntaxProbeError):
    category = "oracle-infeasible"


class GrammarError(SyntaxProbeError):
    category = "grammar-error"


class SeparationError(SyntaxProbeError):
    category = "separation-error"


class RankError(SyntaxProbeError):
    category = "rank-error"


class UsageError(SyntaxProbeError):
    category = "usage-error"
