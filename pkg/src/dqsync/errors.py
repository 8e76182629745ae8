"""Exception types shared across the package."""


class DQSyncError(Exception):
    """Base class for every error raised by this package."""


class NotInvertible(DQSyncError):
    """Inverse requested for a nilpotent (or zero) element."""


class DomainError(DQSyncError):
    """Operand outside the domain of a partial function (e.g. sqrt of a negative)."""


class NotUnit(DQSyncError):
    """A unit quaternion / unit dual quaternion was required."""


class NotPure(DQSyncError):
    """A pure (zero first coordinate) quaternion was required."""


class NotAPose(DQSyncError):
    """A 4x4 matrix does not satisfy the rigid-motion block structure."""


class ZeroInput(DQSyncError):
    """The zero element was passed where it cannot be handled."""


class Degenerate(DQSyncError):
    """A matrix is numerically singular where a full-rank input is required."""


class DimensionMismatch(DQSyncError):
    """Operand shapes do not agree."""


class NotHermitian(DQSyncError):
    """A Hermitian matrix was required."""


class ZeroIterate(DQSyncError):
    """Power iteration produced an iterate with no usable standard part."""


class DisconnectedGraph(DQSyncError):
    """The measurement graph is not connected; the problem is infeasible."""


class RoundingDegenerate(DQSyncError):
    """An eigenvector entry is nilpotent and cannot be rounded onto the group."""


class DegenerateSpectrum(DQSyncError):
    """The eigenvalues needed by the solver are not separated."""


class DegenerateAlignment(DQSyncError):
    """The global aligner between two pose sequences is not determined."""


class ProblemFormatError(DQSyncError):
    """A problem file failed to parse or validate.

    Carries the 1-based line number when one is known.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
