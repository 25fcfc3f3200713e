"""Von Neumann and integer order Renyi entropies, with exact derivatives.

The von Neumann entropy S = -sum_j lambda_j log lambda_j of a spectrum
admits the half line representation

    S = d - 1 - I,
    I = int_0^inf [ d log(1+t) - log P(t) - (d-1)/(1+t) ] dt,

where P(t) = prod_j (t + lambda_j) = sum_k e_k t**(d-k) is the
characteristic polynomial, a function of the elementary symmetric
invariants alone.  Differentiating under the integral sign gives

    dS/de_k = int_0^inf t**(d-k) / P(t) dt  >=  0,   k = 2..d,

and the chain rule through the Newton recursion converts these into
derivatives with respect to the power sums r_q and the integer Renyi
entropies S_q = -log(r_q) / (q-1):

    dS/dr_q  = (-1)**(q+1) / q * sum_{k>=q} dS/de_k * e_{k-q},
    dS/dS_q  = -(q-1) r_q * dS/dr_q.

In particular dS/dS_q is non-negative for even q and non-positive for
odd q: the von Neumann entropy responds monotonically to each integer
Renyi entropy, with alternating orientation.

Numerical form of the integrands.  Both decay like 1/t**2, but the
entropy integrand is a difference of O(log t) terms, so for t > 3 it is
rewritten in s = 1/(1+t).  With

    sum_k e_k (1-s)**(d-k) s**k = 1 - (d-1) s + G(s),
    G(s) = sum_{m=2..d} c_m s**m,
    c_m = sum_{j<=m} e_j (-1)**(m-j) C(d-j, m-j),

the integrand becomes -(G + log1p(h) - h) with h = G - (d-1) s, which
is evaluated without cancellation (log1p(h) - h by series for small h).
On t <= 3 the plain form is already stable because P has positive
coefficients.  The same split handles the derivative integrands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import (
    ComplexRoots,
    DimensionTooLarge,
    DimensionTooSmall,
    InvalidInvariants,
    LengthMismatch,
    NegativeRoot,
    OrderOutOfRange,
    SingularSpectrum,
)
from .invariants import (
    D_MAX,
    NORM_TOL,
    ElemSym,
    Spectrum,
    _as_elem_sym,
    _as_spectrum,
    elem_sym_direct,
    power_from_elem,
    spectrum_from_elem,
)
from .quadrature import integrate_halfline, integrate_halfline_batch

__all__ = [
    "POS_FLOOR",
    "RenyiVector",
    "EntropyGradient",
    "renyi_entropy",
    "renyi_vector",
    "von_neumann_direct",
    "von_neumann_integral",
    "xlogx_integral",
    "dS_de",
    "dS_dr",
    "dS_dSq",
    "entropy_gradient",
]

POS_FLOOR = 1e-9

# relative floor for the derivative integrals; dS/de_d grows like
# 1 / e_{d-1} (often 1e6 and beyond), where a purely absolute target
# sits below the attainable roundoff of any quadrature
_GRAD_REL_TOL = 1e-12

# crossover between the plain and the folded integrand forms
_T_SPLIT = 3.0
# imaginary slack for the positivity probe of the derivative integrals;
# looser than ROOT_TOL because only an eigenvalue estimate is needed
_PROBE_ROOT_TOL = 1e-3


@dataclass(frozen=True, eq=False)
class RenyiVector:
    """Integer order Renyi entropies S_q for q = 2..d."""

    dim: int
    values: np.ndarray

    def __post_init__(self):
        d = int(self.dim)
        object.__setattr__(self, "dim", d)
        if d < 2:
            raise DimensionTooSmall(f"dimension {d} below the minimum 2")
        if d > D_MAX:
            raise DimensionTooLarge(f"dimension {d} exceeds the cap {D_MAX}")
        v = np.array(self.values, dtype=float)
        if v.ndim != 1 or v.size != d - 1:
            raise LengthMismatch(
                f"expected {d - 1} entries S_2..S_{d}, got shape {v.shape}"
            )
        if not np.all(np.isfinite(v)):
            raise InvalidInvariants("Renyi entropies must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


@dataclass(frozen=True, eq=False)
class EntropyGradient:
    """Derivatives of the von Neumann entropy in all three coordinates.

    Arrays are indexed by order minus two, covering orders 2..d.
    """

    dim: int
    dS_de: np.ndarray
    dS_dr: np.ndarray
    dS_dSq: np.ndarray


def _as_invariants(e) -> ElemSym:
    if isinstance(e, ElemSym):
        return e
    if isinstance(e, Spectrum):
        return elem_sym_direct(e)
    return _as_elem_sym(e)


def renyi_entropy(s, q: int) -> float:
    """Renyi entropy S_q = -log(r_q) / (q - 1) for integer q in 2..d."""
    sp = _as_spectrum(s)
    if isinstance(q, bool) or not isinstance(q, (int, np.integer)):
        raise OrderOutOfRange(f"order must be an integer, got {q!r}")
    if not 2 <= q <= sp.dim:
        raise OrderOutOfRange(f"order {q} outside 2..{sp.dim}")
    rq = math.fsum((sp.values ** int(q)).tolist())
    return -math.log(rq) / (q - 1)


def renyi_vector(s) -> RenyiVector:
    """All integer Renyi entropies S_2..S_d of a spectrum."""
    sp = _as_spectrum(s)
    vals = np.array([renyi_entropy(sp, q) for q in range(2, sp.dim + 1)])
    return RenyiVector(dim=sp.dim, values=vals)


def von_neumann_direct(s) -> float:
    """S = -sum lambda log lambda, with 0 log 0 = 0, exactly summed."""
    sp = _as_spectrum(s)
    return -math.fsum(x * math.log(x) for x in sp.values.tolist() if x > 0.0)


def _shift_coeffs(ev: np.ndarray) -> np.ndarray:
    """Coefficients c_m, m = 2..d, highest power first, of G(s)."""
    d = ev.size - 1
    c = [
        math.fsum(
            ev[j] * (-1.0) ** (m - j) * math.comb(d - j, m - j)
            for j in range(m + 1)
        )
        for m in range(2, d + 1)
    ]
    return np.array(c[::-1])


def _log1p_minus(x: np.ndarray) -> np.ndarray:
    """log(1 + x) - x without cancellation near x = 0."""
    out = np.empty_like(x)
    small = np.abs(x) < 0.015625
    xs = x[small]
    acc = np.zeros_like(xs)
    for n in range(12, 1, -1):
        acc = xs * (1.0 / n - acc)
    out[small] = -xs * acc
    xl = x[~small]
    out[~small] = np.log1p(xl) - xl
    return out


def _entropy_integrand(ev: np.ndarray):
    d = ev.size - 1
    c = _shift_coeffs(ev)
    dm1 = float(d - 1)

    def f(t):
        t = np.asarray(t, dtype=float)
        out = np.empty_like(t)
        lo = t <= _T_SPLIT
        if np.any(lo):
            tl = t[lo]
            p = np.polyval(ev, tl)
            out[lo] = d * np.log1p(tl) - np.log(p) - dm1 / (1.0 + tl)
        hi = ~lo
        if np.any(hi):
            s = 1.0 / (1.0 + t[hi])
            g = np.polyval(c, s) * s * s
            h = g - dm1 * s
            out[hi] = -(g + _log1p_minus(h))
        return out

    return f


def _ratio_integrand(ev: np.ndarray):
    """All k = 2..d components of t**(d-k) / P(t), stacked."""
    d = ev.size - 1
    c = _shift_coeffs(ev)
    dm1 = float(d - 1)
    ks = np.arange(2, d + 1)

    def f(t):
        t = np.asarray(t, dtype=float)
        out = np.empty((d - 1, t.size))
        lo = t <= _T_SPLIT
        if np.any(lo):
            tl = t[lo]
            p = np.polyval(ev, tl)
            out[:, lo] = tl ** (d - ks)[:, None] / p
        hi = ~lo
        if np.any(hi):
            s = 1.0 / (1.0 + t[hi])
            g = np.polyval(c, s) * s * s
            q = 1.0 + (g - dm1 * s)
            out[:, hi] = (1.0 - s) ** (d - ks)[:, None] * s ** ks[:, None] / q
        return out

    return f


def _validated_invariants(e) -> ElemSym:
    es = _as_invariants(e)
    if float(es.e.min()) < -NORM_TOL:
        raise InvalidInvariants(
            f"negative invariant {float(es.e.min())!r}; no spectrum has one"
        )
    return es


def von_neumann_integral(e, abs_tol: float = 1e-10) -> float:
    """Von Neumann entropy from the invariants via the half line integral.

    Accepts an ElemSym (or a Spectrum, whose invariants are expanded
    first).  Matches :func:`von_neumann_direct` to near machine
    precision for every feasible spectrum; the quadrature error
    estimate is kept below ``abs_tol``.
    """
    es = _validated_invariants(e)
    res = integrate_halfline(_entropy_integrand(es.e), abs_tol=abs_tol)
    return float(es.dim - 1) - res.value


def xlogx_integral(x: float, abs_tol: float = 1e-10) -> float:
    """-x log x for a single weight x in [0, 1], via the scalar identity

        -x log x = 1 - x - int_0^inf [ log(1+t) - log(t+x) - (1-x)/(1+t) ] dt.

    Exercises the integral kernel one eigenvalue at a time; mainly a
    validation aid.
    """
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise InvalidInvariants(f"x must lie in [0, 1], got {x!r}")

    def f(t):
        t = np.asarray(t, dtype=float)
        return -_log1p_minus((x - 1.0) / (1.0 + t))

    res = integrate_halfline(f, abs_tol=abs_tol)
    return 1.0 - x - res.value


def _positivity_probe(es: ElemSym, pos_floor: float) -> None:
    """Reject invariants of singular or non-spectral operators."""
    try:
        probe = spectrum_from_elem(es, root_tol=_PROBE_ROOT_TOL)
    except (ComplexRoots, NegativeRoot) as exc:
        raise InvalidInvariants(
            f"invariants do not come from a non-negative spectrum ({exc})"
        ) from exc
    lam_min = float(probe.values.min())
    if lam_min < pos_floor:
        raise SingularSpectrum(
            f"smallest eigenvalue {lam_min:.3e} below pos_floor {pos_floor:.3e}; "
            "derivative integrals diverge as the spectrum degenerates"
        )


def dS_de(e, abs_tol: float = 1e-10, pos_floor: float = POS_FLOOR) -> np.ndarray:
    """Exact partial derivatives dS/de_k for k = 2..d.

    Each component equals int_0^inf t**(d-k) / P(t) dt and is therefore
    non-negative.  All k are integrated over one shared adaptive panel
    set, each to abs_tol or twelve significant digits, whichever is
    reached first: the high-k components grow like 1 / e_{d-1} and can
    dwarf any absolute target.  Requires every eigenvalue >=
    ``pos_floor``; otherwise the k = d integral blows up like
    -log(lambda_min).
    """
    es = _validated_invariants(e)
    _positivity_probe(es, pos_floor)
    vals, _, _ = integrate_halfline_batch(
        _ratio_integrand(es.e), es.dim - 1, abs_tol=abs_tol, rel_tol=_GRAD_REL_TOL
    )
    return vals


def entropy_gradient(
    e, abs_tol: float = 1e-10, pos_floor: float = POS_FLOOR
) -> EntropyGradient:
    """Derivatives of S in all three coordinate systems at once.

    Computes dS/de_k by quadrature, then applies the analytic chain

        dS/dr_q = (-1)**(q+1)/q * sum_{k>=q} dS/de_k e_{k-q},
        dS/dS_q = -(q-1) r_q * dS/dr_q,

    so the entire table costs a single batched integration.
    """
    es = _validated_invariants(e)
    g_e = dS_de(es, abs_tol=abs_tol, pos_floor=pos_floor)
    d = es.dim
    ev = es.e
    r = power_from_elem(es).r
    g_r = np.empty(d - 1)
    g_s = np.empty(d - 1)
    for q in range(2, d + 1):
        sign = 1.0 if q % 2 else -1.0
        acc = math.fsum(g_e[k - 2] * ev[k - q] for k in range(q, d + 1))
        g_r[q - 2] = sign * acc / q
        g_s[q - 2] = -(q - 1) * r[q] * g_r[q - 2]
    return EntropyGradient(dim=d, dS_de=g_e, dS_dr=g_r, dS_dSq=g_s)


def dS_dr(e, abs_tol: float = 1e-10, pos_floor: float = POS_FLOOR) -> np.ndarray:
    """Partial derivatives dS/dr_q for q = 2..d.

    Alternating in sign: non-positive for even q, non-negative for odd
    q.  Raising an even power sum concentrates the spectrum and lowers
    the entropy.
    """
    return entropy_gradient(e, abs_tol=abs_tol, pos_floor=pos_floor).dS_dr


def dS_dSq(e, abs_tol: float = 1e-10, pos_floor: float = POS_FLOOR) -> np.ndarray:
    """Partial derivatives dS/dS_q for q = 2..d.

    Non-negative for even q and non-positive for odd q; see
    :func:`entropy_gradient`.
    """
    return entropy_gradient(e, abs_tol=abs_tol, pos_floor=pos_floor).dS_dSq
