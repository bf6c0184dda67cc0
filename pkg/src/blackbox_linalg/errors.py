"""Exception types shared across the package."""


class BlackboxLinalgError(Exception):
    """Base class for all package errors."""


class DimensionError(BlackboxLinalgError):
    """Operand shapes are incompatible."""


class NotInvertible(BlackboxLinalgError):
    """A field element has no inverse (it is zero)."""


class Singular(BlackboxLinalgError):
    """A dense matrix is singular.

    ``column`` is the index of the first column found dependent on the
    previous ones during elimination.
    """

    def __init__(self, column):
        super().__init__(f"matrix is singular (first dependent column: {column})")
        self.column = column


class FieldTooSmall(BlackboxLinalgError):
    """The prime does not meet the required field-size bound."""

    def __init__(self, p, required):
        super().__init__(f"field size {p} below required bound {required}")
        self.p = p
        self.required = required


class ResidueSingular(BlackboxLinalgError):
    """A residue/normalizer in the block-Hankel inversion is singular."""


class HankelSingular(BlackboxLinalgError):
    """Block-Hankel matrix judged singular after resampling attempts."""


class SingularMatrix(BlackboxLinalgError):
    """Input matrix proved singular; carries a nonzero kernel vector."""

    def __init__(self, kernel_vector):
        super().__init__("matrix is singular (kernel vector attached)")
        self.kernel_vector = kernel_vector


class RetriesExhausted(BlackboxLinalgError):
    """All randomized attempts failed without a definite verdict."""


class DegenerateSequence(BlackboxLinalgError):
    """Projected sequence admits no full-degree minimal generator."""


class InsufficientPrimes(BlackboxLinalgError):
    """Product of the supplied primes does not cover the result bound."""


class MatrixMarketError(BlackboxLinalgError):
    """Base class for Matrix Market parsing problems."""


class MalformedHeader(MatrixMarketError):
    pass


class IndexOutOfRange(MatrixMarketError):
    pass


class NonSquareWhereSquareRequired(MatrixMarketError):
    pass
