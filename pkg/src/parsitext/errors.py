"""Exception hierarchy shared by every parsitext module."""


class ParsitextError(Exception):
    """Base class for all errors raised by this package."""


class EmptyCorpus(ParsitextError, ValueError):
    pass


class InsufficientData(ParsitextError, ValueError):
    pass


class InvalidK(ParsitextError, ValueError):
    pass


class ShapeMismatch(ParsitextError, ValueError):
    pass


class NonFiniteInput(ParsitextError, ValueError):
    pass


class DegenerateLabels(ParsitextError, ValueError):
    pass


class NegativeFeature(ParsitextError, ValueError):
    pass


class InvalidSampleSize(ParsitextError, ValueError):
    pass


class InvalidFraction(ParsitextError, ValueError):
    pass


class UndefinedRoc(ParsitextError, ValueError):
    pass


class TargetUnreachable(ParsitextError, ValueError):
    """No threshold reaches the requested metric value.

    ``best`` holds the best achievable value of the targeted metric.
    """

    def __init__(self, metric, target, best):
        super().__init__(f"{metric} >= {target} is unreachable; best achievable is {best}")
        self.metric = metric
        self.target = target
        self.best = best


class MissingColumn(ParsitextError, KeyError):
    def __str__(self):
        return f"missing column: {self.args[0]!r}"


class UnmappableLabel(ParsitextError, ValueError):
    def __init__(self, row, label):
        super().__init__(f"row {row}: label {label!r} is not in the label map")
        self.row = row
        self.label = label


class MalformedUtf8(ParsitextError, ValueError):
    def __init__(self, row):
        super().__init__(f"row {row}: invalid UTF-8")
        self.row = row


class DuplicateDocId(ParsitextError, ValueError):
    pass


class UnknownSchema(ParsitextError, ValueError):
    pass


class CorruptModel(ParsitextError, ValueError):
    pass


class TableError(ParsitextError, ValueError):
    """A normalization, transliteration or stemmer table violates its invariants."""


class StageError(ParsitextError, RuntimeError):
    """Wraps a failure inside one pipeline stage; ``stage`` names it."""

    def __init__(self, stage, cause):
        super().__init__(f"[{stage}] {type(cause).__name__}: {cause}")
        self.stage = stage
        self.cause = cause
