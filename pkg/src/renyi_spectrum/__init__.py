"""Finite probability spectra, symmetric invariants and Renyi entropies.

The library interconverts four equivalent descriptions of a spectrum of
d probabilities: the eigenvalues, the power sums r_q, the elementary
symmetric invariants e_k and the integer order Renyi entropies S_q.
On top of the conversions it evaluates the von Neumann entropy both
directly and through a half line integral over the characteristic
polynomial, returns exact first derivatives of the entropy in every
coordinate system, reconstructs spectra from candidate Renyi entropies
with feasibility diagnosis, and ships a randomized self-verification
harness with machine readable reports.
"""

from .entropy import (
    POS_FLOOR,
    EntropyGradient,
    RenyiVector,
    dS_de,
    dS_dr,
    dS_dSq,
    entropy_gradient,
    renyi_entropy,
    renyi_vector,
    von_neumann_direct,
    von_neumann_integral,
    xlogx_integral,
)
from .exceptions import (
    ComplexRoots,
    ConfigError,
    DimensionTooLarge,
    DimensionTooSmall,
    EntropyTooLarge,
    Infeasible,
    InvalidInvariants,
    InvalidTolerance,
    LengthMismatch,
    NegativeEntropy,
    NegativeEntry,
    NegativeRoot,
    NoConvergence,
    NotNormalized,
    OrderOutOfRange,
    SingularSpectrum,
    SpectrumError,
)
from .invariants import (
    D_MAX,
    NORM_TOL,
    ROOT_TOL,
    ElemSym,
    JacobianTable,
    PowerSums,
    Spectrum,
    elem_from_power,
    elem_sym_direct,
    jacobian_e_wrt_r,
    jacobian_r_wrt_e,
    make_spectrum,
    newton_residual,
    power_from_elem,
    power_sums,
    spectrum_from_elem,
)
from .quadrature import QuadResult, integrate_halfline, integrate_halfline_batch
from .reconstruct import (
    RECON_TOL,
    ReconstructionResult,
    power_from_renyi,
    reconstruct_spectrum,
)
from .verify import (
    CHECK_NAMES,
    DEFAULT_TOLERANCES,
    THREADS_ENV_VAR,
    CheckResult,
    SweepConfig,
    VerificationReport,
    evaluate_checks,
    run_sweep,
    sample_spectrum,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # types
    "Spectrum",
    "PowerSums",
    "ElemSym",
    "JacobianTable",
    "RenyiVector",
    "EntropyGradient",
    "QuadResult",
    "ReconstructionResult",
    "CheckResult",
    "SweepConfig",
    "VerificationReport",
    # constants
    "D_MAX",
    "NORM_TOL",
    "ROOT_TOL",
    "POS_FLOOR",
    "RECON_TOL",
    "CHECK_NAMES",
    "DEFAULT_TOLERANCES",
    "THREADS_ENV_VAR",
    # conversions
    "make_spectrum",
    "power_sums",
    "elem_sym_direct",
    "elem_from_power",
    "power_from_elem",
    "newton_residual",
    "spectrum_from_elem",
    "jacobian_e_wrt_r",
    "jacobian_r_wrt_e",
    # quadrature
    "integrate_halfline",
    "integrate_halfline_batch",
    # entropies and derivatives
    "renyi_entropy",
    "renyi_vector",
    "von_neumann_direct",
    "von_neumann_integral",
    "xlogx_integral",
    "dS_de",
    "dS_dr",
    "dS_dSq",
    "entropy_gradient",
    # reconstruction
    "power_from_renyi",
    "reconstruct_spectrum",
    # verification
    "sample_spectrum",
    "evaluate_checks",
    "run_sweep",
    # errors
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
