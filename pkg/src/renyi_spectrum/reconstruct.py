"""Recovering a spectrum from its integer order Renyi entropies.

The vector (S_2, ..., S_d) determines the spectrum exactly: each S_q
fixes the power sum r_q = exp(-(q-1) S_q), the Newton recursion turns
power sums into elementary invariants, and the spectrum is the root set
of the characteristic polynomial.  Feasibility is not guaranteed; an
arbitrary vector of candidate entropies may fail at three points, each
of which is diagnosed separately:

* an entry outside [0, log d] (up to tolerance) bounds no spectrum,
* the implied invariants may go negative,
* the characteristic polynomial may acquire complex or negative roots.

The pipeline is exact in principle but badly conditioned in floating
point as d grows: the entropies compress the tail invariants so hard
that reconstruction error at d around 10 can reach 1e-6 even for
perfectly feasible inputs.  The residual check at the end reports the
achieved Renyi entropies honestly instead of trusting the algebra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .entropy import RenyiVector, renyi_vector, von_neumann_direct
from .exceptions import (
    ComplexRoots,
    EntropyTooLarge,
    Infeasible,
    InvalidTolerance,
    NegativeEntropy,
    NegativeRoot,
)
from .invariants import (
    ROOT_TOL,
    PowerSums,
    Spectrum,
    elem_from_power,
    make_spectrum,
    spectrum_from_elem,
)

__all__ = [
    "RECON_TOL",
    "ReconstructionResult",
    "power_from_renyi",
    "reconstruct_spectrum",
]

RECON_TOL = 1e-7

# entropies within this distance of log d in every order snap to the
# uniform spectrum, where root extraction is needlessly ill conditioned
_SNAP_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class ReconstructionResult:
    """Outcome of a reconstruction.

    residuals[q - 2] is |S_q(recovered) - S_q(requested)|; the feasible
    flag records whether all residuals stayed within the tolerance the
    reconstruction was asked for.
    """

    spectrum: Spectrum
    von_neumann: float
    residuals: np.ndarray
    feasible: bool


def _as_renyi(rv) -> RenyiVector:
    if isinstance(rv, RenyiVector):
        return rv
    v = np.asarray(rv, dtype=float)
    return RenyiVector(dim=v.size + 1, values=v)


def power_from_renyi(rv, recon_tol: float = RECON_TOL) -> PowerSums:
    """Power sums r_q = exp(-(q-1) S_q) from candidate Renyi entropies.

    Rejects entries that no d dimensional spectrum can produce:
    negative entropies and entropies above log d + recon_tol.
    """
    recon_tol = float(recon_tol)
    if not math.isfinite(recon_tol) or recon_tol <= 0.0:
        raise InvalidTolerance(
            f"recon_tol must be positive and finite, got {recon_tol!r}"
        )
    vec = _as_renyi(rv)
    d = vec.dim
    cap = math.log(d) + recon_tol
    r = np.empty(d + 1)
    r[0] = float(d)
    r[1] = 1.0
    for q in range(2, d + 1):
        s_q = float(vec.values[q - 2])
        if s_q < 0.0:
            raise NegativeEntropy(f"S_{q} = {s_q!r} is negative")
        if s_q > cap:
            raise EntropyTooLarge(
                f"S_{q} = {s_q!r} exceeds log({d}) + {recon_tol!r} = {cap!r}"
            )
        r[q] = math.exp(-(q - 1) * s_q)
    return PowerSums(r)


def reconstruct_spectrum(rv, recon_tol: float = RECON_TOL) -> ReconstructionResult:
    """Recover the spectrum realizing the given integer Renyi entropies.

    Runs entropies -> power sums -> invariants -> roots, verifies the
    achieved entropies against the request, and reports the worst
    residual per order.  Raises :class:`Infeasible` naming the first
    failed stage when no spectrum fits; near misses (all stages pass
    but residuals above ``recon_tol``) are returned with
    ``feasible = False`` rather than raised.
    """
    vec = _as_renyi(rv)
    d = vec.dim
    logd = math.log(d)
    if float(np.abs(vec.values - logd).max()) <= _SNAP_TOL:
        # maximally mixed input: all roots coincide, so skip the solver
        spectrum = make_spectrum(np.full(d, 1.0 / d))
    else:
        try:
            r = power_from_renyi(vec, recon_tol=recon_tol)
        except (NegativeEntropy, EntropyTooLarge) as exc:
            raise Infeasible("entropy_range", str(exc)) from exc
        e = elem_from_power(r)
        worst_e = float(e.e.min())
        if worst_e < -float(recon_tol):
            k = int(np.argmin(e.e))
            raise Infeasible(
                "negative_invariant",
                f"e_{k} = {worst_e!r} below -recon_tol = {-float(recon_tol)!r}",
            )
        try:
            spectrum = spectrum_from_elem(e, root_tol=ROOT_TOL)
        except (ComplexRoots, NegativeRoot) as exc:
            raise Infeasible("root_extraction", str(exc)) from exc
    achieved = renyi_vector(spectrum).values
    residuals = np.abs(achieved - vec.values)
    return ReconstructionResult(
        spectrum=spectrum,
        von_neumann=von_neumann_direct(spectrum),
        residuals=residuals,
        feasible=bool(residuals.max() <= float(recon_tol)),
    )
