"""Exception types raised by the library.

Everything derives from :class:`SpectrumError`, which itself derives
from ``ValueError`` so that generic callers can catch invalid input
the usual way.
"""

__all__ = [
    "SpectrumError",
    "NegativeEntry",
    "NotNormalized",
    "DimensionTooSmall",
    "DimensionTooLarge",
    "LengthMismatch",
    "ComplexRoots",
    "NegativeRoot",
    "NoConvergence",
    "InvalidTolerance",
    "OrderOutOfRange",
    "SingularSpectrum",
    "InvalidInvariants",
    "NegativeEntropy",
    "EntropyTooLarge",
    "Infeasible",
    "ConfigError",
]


class SpectrumError(ValueError):
    """Base class for all library errors."""


class NegativeEntry(SpectrumError):
    """A spectrum entry is negative beyond the allowed tolerance."""


class NotNormalized(SpectrumError):
    """Spectrum entries do not sum to one within tolerance."""


class DimensionTooSmall(SpectrumError):
    """Dimension below the supported minimum of 2."""


class DimensionTooLarge(SpectrumError):
    """Dimension above the configured cap."""


class LengthMismatch(SpectrumError):
    """Vectors whose lengths are inconsistent with the dimension."""


class ComplexRoots(SpectrumError):
    """Characteristic roots have imaginary parts beyond tolerance."""


class NegativeRoot(SpectrumError):
    """A recovered eigenvalue is negative beyond tolerance."""


class NoConvergence(SpectrumError):
    """Adaptive quadrature exhausted its subdivision budget."""


class InvalidTolerance(SpectrumError):
    """A tolerance parameter is not a positive finite number."""


class OrderOutOfRange(SpectrumError):
    """Entropy order q outside the integer range 2..d."""


class SingularSpectrum(SpectrumError):
    """An eigenvalue sits below the positivity floor, so derivative
    integrals are divergent or unreliable."""


class InvalidInvariants(SpectrumError):
    """Elementary invariants that cannot come from any spectrum."""


class NegativeEntropy(SpectrumError):
    """A requested Renyi entropy is negative."""


class EntropyTooLarge(SpectrumError):
    """A requested Renyi entropy exceeds log d plus tolerance."""


class Infeasible(SpectrumError):
    """No spectrum realizes the requested Renyi entropies.

    The ``stage`` attribute names the first pipeline stage that failed:
    ``"entropy_range"``, ``"negative_invariant"`` or ``"root_extraction"``.
    """

    def __init__(self, stage: str, message: str):
        super().__init__(f"infeasible at stage {stage}: {message}")
        self.stage = stage


class ConfigError(SpectrumError):
    """A sweep configuration value is out of range or unknown."""
