"""Exception types raised across the package.

Every error carries enough context (row/column indices, offending ids) to
locate the bad input without a debugger.
"""


class GlpropError(Exception):
    """Base class for all glprop errors."""


class NonFinite(GlpropError):
    def __init__(self, row, col):
        self.row, self.col = row, col
        super().__init__(f"non-finite entry at ({row}, {col})")


class NegativeEntry(GlpropError):
    def __init__(self, row, col):
        self.row, self.col = row, col
        super().__init__(f"negative entry at ({row}, {col})")


class ZeroRow(GlpropError):
    def __init__(self, row):
        self.row = row
        super().__init__(f"row {row} sums to zero")


class ZeroRowSum(GlpropError):
    def __init__(self, row):
        self.row = row
        super().__init__(f"similarity row {row} has non-positive sum")


class DegenerateBandwidth(GlpropError):
    pass


class DimensionMismatch(GlpropError):
    pass


class SingularSystem(GlpropError):
    pass


class EmptyCollection(GlpropError):
    pass


class ZeroTotal(GlpropError):
    pass


class EmptyInput(GlpropError):
    pass


class NoGroundTruth(GlpropError):
    pass


class ZeroIdeal(GlpropError):
    pass


class InvalidK(GlpropError):
    pass


class LengthMismatch(GlpropError):
    pass


class ParseError(GlpropError):
    def __init__(self, path, line, message):
        self.path, self.line = str(path), line
        super().__init__(f"{path}:{line}: {message}")


class DanglingReference(GlpropError):
    def __init__(self, ref, message=""):
        self.ref = ref
        super().__init__(f"unresolved reference {ref!r}" + (f": {message}" if message else ""))


class InvalidConfig(GlpropError):
    pass
