"""Exception hierarchy for matrix analysis, with CLI exit codes attached."""


class MatrixAnalysisError(Exception):
    """Base class for every error raised by the analysis pipeline."""

    exit_code = 1


class InputError(MatrixAnalysisError):
    """The input matrix or file is unusable."""

    exit_code = 2


class NonSquare(InputError):
    pass


class RowSumViolation(InputError):
    pass


class NegativeEntry(InputError):
    pass


class ParseError(InputError):
    pass


class MatrixFileError(InputError):
    """The matrix file could not be read."""


class NoConvergence(MatrixAnalysisError):
    """A limit did not settle within the allowed number of squarings."""

    exit_code = 3


class DecoherenceTimeout(MatrixAnalysisError):
    """The transient part did not fall below epsilon within t_max steps."""

    exit_code = 3


class VerificationFailed(MatrixAnalysisError):
    exit_code = 4


class IdempotentVerificationFailed(VerificationFailed):
    pass


class RankMismatch(VerificationFailed):
    pass


class NotAClass(MatrixAnalysisError):
    """The state set is not a closed, strongly connected class."""


class TooLarge(MatrixAnalysisError):
    pass


class NotPeripheral(MatrixAnalysisError):
    pass


class NotInRange(MatrixAnalysisError):
    """A vector is not fixed by the peripheral projection."""
