"""Exception hierarchy shared by all modules."""


class HubbardPairError(ValueError):
    """Base class for every error raised by this package."""


class FlatBandError(HubbardPairError):
    """The collective hopping J_K vanishes (|K| = pi/d), so the quantity is undefined."""


class SingularRelativeMomentumError(HubbardPairError):
    """sin(kd) = 0 with U != 0; use the band-edge limit instead."""


class ZeroInteractionError(HubbardPairError):
    """The quantity requires U != 0."""


class OutsideBandError(HubbardPairError):
    """Energy outside the open scattering band (-2 J_K, 2 J_K)."""


class MemoryBudgetError(HubbardPairError):
    """Requested matrix exceeds the configured memory budget."""


class NonSymmetricError(HubbardPairError):
    """Input matrix is not real symmetric."""


class ConvergenceError(HubbardPairError):
    """Eigensolver failed to converge."""
