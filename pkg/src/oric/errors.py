"""Exception hierarchy. Every error carries a short kind name for the CLI."""


class OricError(Exception):
    kind = "OricError"


class EmptyPattern(OricError, ValueError):
    kind = "EmptyPattern"


class DuplicateFeature(OricError, ValueError):
    kind = "DuplicateFeature"


class RankOutOfRange(OricError, IndexError):
    kind = "RankOutOfRange"


class EmptyClass(OricError, ValueError):
    kind = "EmptyClass"


class Indeterminate(OricError, ArithmeticError):
    kind = "Indeterminate"


class SchemaMismatch(OricError, ValueError):
    kind = "SchemaMismatch"


class EmptyModel(OricError, ValueError):
    kind = "EmptyModel"


class PlannerOverflow(OricError, OverflowError):
    kind = "Overflow"


class Infeasible(OricError, ValueError):
    kind = "Infeasible"

    def __init__(self, message, best_probability=None, best_length=None, curve=()):
        super().__init__(message)
        self.best_probability = best_probability
        self.best_length = best_length
        self.curve = tuple(curve)


class EmptyHistory(OricError, ValueError):
    kind = "EmptyHistory"


class ScheduleTooShort(OricError, ValueError):
    kind = "ScheduleTooShort"


class MissingLabelColumn(OricError, ValueError):
    kind = "MissingLabelColumn"


class MalformedRow(OricError, ValueError):
    kind = "MalformedRow"

    def __init__(self, message, row_index=None):
        super().__init__(message)
        self.row_index = row_index


class NonBinaryLabel(OricError, ValueError):
    kind = "NonBinaryLabel"


class VersionMismatch(OricError, ValueError):
    kind = "VersionMismatch"


class CorruptFile(OricError, ValueError):
    kind = "CorruptFile"
