"""Error types raised across the package.

Everything derives from PhaseFisherError so callers can catch broadly.
"""


class PhaseFisherError(Exception):
    """Base class for all package errors."""


class TruncationTooSmall(PhaseFisherError):
    """The Fock cutoff cannot hold the requested state at the configured tail tolerance."""


class NotHermitian(PhaseFisherError):
    """A matrix expected to be Hermitian is not, beyond tolerance."""


class NegativeEigenvalue(PhaseFisherError):
    """A density operator has an eigenvalue below the roundoff floor."""


class DimensionMismatch(PhaseFisherError):
    """Operands live on incompatible spaces."""


class InvalidEta(PhaseFisherError):
    """Transmittance outside [0, 1]."""


class DegenerateSpectrum(PhaseFisherError):
    """The two-level spectral data is numerically inconsistent."""


class InvalidWeights(PhaseFisherError):
    """Spectral weights are negative or sum beyond one."""


class NonpositiveFisher(PhaseFisherError):
    """Sensitivity requested for a nonpositive Fisher information."""


class NoConvergence(PhaseFisherError):
    """An iterative solver exhausted its iteration budget."""


class NoCrossingFound(PhaseFisherError):
    """No sign change of the compared QFI curves on the search grid."""
