"""Conversions between the representations of a finite probability spectrum.

A spectrum is a vector of d probabilities summing to one.  Besides the
eigenvalues themselves, two polynomial coordinate systems are used
throughout the library:

* the power sums ``r_q = sum_j lambda_j**q`` for q = 0..d (so r_0 = d
  and r_1 = 1),
* the elementary symmetric invariants ``e_k = sum_{i1<...<ik}
  lambda_i1 * ... * lambda_ik`` for k = 0..d (so e_0 = e_1 = 1).

The two families determine each other through the Newton recursion

    k e_k = sum_{i=1..k} (-1)**(i-1) e_{k-i} r_i

and its inverse, and both determine the spectrum as the roots of the
characteristic polynomial

    P(t) = sum_k e_k t**(d-k) = prod_j (t + lambda_j),

evaluated at -t.  The recursions alternate in sign and cancel heavily,
so they are computed with compensated products and exact summation:
each coefficient is produced with a single rounding.  The root-finding
step uses companion-matrix eigenvalues polished by a few Newton steps
in extended precision.  Even so, recovering a spectrum from its power
sums is badly conditioned for d beyond about 6; the forward maps stay
at the few-ulp level for all supported dimensions.
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
    InvalidTolerance,
    LengthMismatch,
    NegativeEntry,
    NegativeRoot,
    NotNormalized,
    OrderOutOfRange,
    SpectrumError,
)

__all__ = [
    "D_MAX",
    "NORM_TOL",
    "ROOT_TOL",
    "Spectrum",
    "PowerSums",
    "ElemSym",
    "JacobianTable",
    "make_spectrum",
    "power_sums",
    "elem_sym_direct",
    "elem_from_power",
    "power_from_elem",
    "newton_residual",
    "spectrum_from_elem",
    "jacobian_e_wrt_r",
    "jacobian_r_wrt_e",
]

D_MAX = 20
NORM_TOL = 1e-10
ROOT_TOL = 1e-7

_SPLIT = 134217729.0  # 2**27 + 1, Veltkamp splitting constant


def _two_prod(a: float, b: float) -> tuple[float, float]:
    """Dekker product: return (p, err) with p + err == a*b exactly."""
    p = a * b
    a1 = a * _SPLIT
    ah = a1 - (a1 - a)
    al = a - ah
    b1 = b * _SPLIT
    bh = b1 - (b1 - b)
    bl = b - bh
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


def _check_tol(value: float, name: str) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise InvalidTolerance(f"{name} must be positive and finite, got {value!r}")
    return value


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues of a density operator, sorted non-increasing.

    Use :func:`make_spectrum` to build one from raw values; the
    constructor validates but never reorders or renormalizes.
    """

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 1:
            raise LengthMismatch("spectrum must be a one dimensional vector")
        if v.size < 2:
            raise DimensionTooSmall(f"need at least 2 entries, got {v.size}")
        if v.size > D_MAX:
            raise DimensionTooLarge(f"dimension {v.size} exceeds the cap {D_MAX}")
        if not np.all(np.isfinite(v)):
            raise NotNormalized("spectrum entries must be finite")
        if v.min() < 0.0:
            raise NegativeEntry(f"negative entry {v.min()!r}")
        if np.any(np.diff(v) > 0.0):
            raise SpectrumError("entries must be sorted non-increasing")
        if abs(math.fsum(v.tolist()) - 1.0) > NORM_TOL:
            raise NotNormalized(f"entries sum to {math.fsum(v.tolist())!r}, not 1")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def dim(self) -> int:
        return self.values.size

    def __len__(self) -> int:
        return self.values.size

    @classmethod
    def _trusted(cls, v: np.ndarray) -> "Spectrum":
        # fast path for values the library produced itself
        sp = object.__new__(cls)
        v.setflags(write=False)
        object.__setattr__(sp, "values", v)
        return sp


@dataclass(frozen=True, eq=False)
class PowerSums:
    """Power sums r_q for q = 0..d, with r[0] = d and r[1] = 1."""

    r: np.ndarray

    def __post_init__(self):
        r = np.array(self.r, dtype=float)
        if r.ndim != 1 or r.size < 3:
            raise LengthMismatch("power sums need entries r_0..r_d with d >= 2")
        if not np.all(np.isfinite(r)):
            raise InvalidInvariants("power sums must be finite")
        d = r[0]
        if d != round(d):
            raise InvalidInvariants(f"r_0 must be the integer dimension, got {d!r}")
        if d < 2:
            raise DimensionTooSmall(f"r_0 = {d!r} below the minimum dimension 2")
        if d > D_MAX:
            raise DimensionTooLarge(f"r_0 = {d!r} exceeds the cap {D_MAX}")
        if r.size != int(d) + 1:
            raise LengthMismatch(
                f"expected {int(d) + 1} entries for dimension {int(d)}, got {r.size}"
            )
        if abs(r[1] - 1.0) > NORM_TOL:
            raise NotNormalized(f"r_1 = {r[1]!r}, expected 1")
        r.setflags(write=False)
        object.__setattr__(self, "r", r)

    @property
    def dim(self) -> int:
        return int(self.r[0])

    @classmethod
    def _trusted(cls, r: np.ndarray) -> "PowerSums":
        ps = object.__new__(cls)
        r.setflags(write=False)
        object.__setattr__(ps, "r", r)
        return ps


@dataclass(frozen=True, eq=False)
class ElemSym:
    """Elementary symmetric invariants e_k for k = 0..d, e_0 = e_1 = 1."""

    e: np.ndarray

    def __post_init__(self):
        e = np.array(self.e, dtype=float)
        if e.ndim != 1 or e.size < 3:
            raise LengthMismatch("invariants need entries e_0..e_d with d >= 2")
        if e.size > D_MAX + 1:
            raise DimensionTooLarge(f"dimension {e.size - 1} exceeds the cap {D_MAX}")
        if not np.all(np.isfinite(e)):
            raise InvalidInvariants("invariants must be finite")
        if e[0] != 1.0:
            raise InvalidInvariants(f"e_0 = {e[0]!r}, expected exactly 1")
        if abs(e[1] - 1.0) > NORM_TOL:
            raise NotNormalized(f"e_1 = {e[1]!r}, expected 1")
        e.setflags(write=False)
        object.__setattr__(self, "e", e)

    @property
    def dim(self) -> int:
        return self.e.size - 1

    @classmethod
    def _trusted(cls, e: np.ndarray) -> "ElemSym":
        es = object.__new__(cls)
        e.setflags(write=False)
        object.__setattr__(es, "e", e)
        return es


@dataclass(frozen=True, eq=False)
class JacobianTable:
    """Dense table of partial derivatives between invariant families.

    ``matrix[k - 2, l - 2]`` holds the derivative of ``dependent_k``
    with respect to ``independent_l`` while the remaining independent
    coordinates are held fixed.  Orders run over 2..d; the order 0 and 1
    coordinates are frozen by normalization.
    """

    dim: int
    dependent: str
    independent: str
    matrix: np.ndarray

    def entry(self, k: int, l: int) -> float:
        if not (2 <= k <= self.dim and 2 <= l <= self.dim):
            raise OrderOutOfRange(
                f"orders must lie in 2..{self.dim}, got ({k}, {l})"
            )
        return float(self.matrix[k - 2, l - 2])


def make_spectrum(values, norm_tol: float = NORM_TOL, d_max: int = D_MAX) -> Spectrum:
    """Validate, sort and renormalize raw values into a Spectrum.

    Entries may be off by at most ``norm_tol``: small negative values
    are clipped to zero and the vector is divided by its sum.  Larger
    defects raise :class:`NegativeEntry` or :class:`NotNormalized`.
    """
    norm_tol = _check_tol(norm_tol, "norm_tol")
    v = np.asarray(values, dtype=float)
    if v.ndim != 1:
        raise LengthMismatch("spectrum must be a one dimensional vector")
    if v.size < 2:
        raise DimensionTooSmall(f"need at least 2 entries, got {v.size}")
    if v.size > min(int(d_max), D_MAX):
        raise DimensionTooLarge(
            f"dimension {v.size} exceeds the cap {min(int(d_max), D_MAX)}"
        )
    if not np.all(np.isfinite(v)):
        raise NotNormalized("spectrum entries must be finite")
    if v.min() < -norm_tol:
        raise NegativeEntry(f"entry {v.min()!r} below -norm_tol = {-norm_tol!r}")
    total = math.fsum(v.tolist())
    if abs(total - 1.0) > norm_tol:
        raise NotNormalized(f"entries sum to {total!r}, not 1 within {norm_tol!r}")
    v = np.clip(v, 0.0, None)
    v = v / math.fsum(v.tolist())
    v = np.sort(v)[::-1]
    return Spectrum(v)


def _as_spectrum(s) -> Spectrum:
    return s if isinstance(s, Spectrum) else make_spectrum(s)


def _as_power_sums(r) -> PowerSums:
    return r if isinstance(r, PowerSums) else PowerSums(np.asarray(r, dtype=float))


def _as_elem_sym(e) -> ElemSym:
    return e if isinstance(e, ElemSym) else ElemSym(np.asarray(e, dtype=float))


def power_sums(s) -> PowerSums:
    """Power sums r_q = sum_j lambda_j**q for q = 0..d, exactly summed."""
    sp = _as_spectrum(s)
    lam = sp.values.tolist()
    d = sp.dim
    r = np.empty(d + 1)
    r[0] = float(d)
    r[1] = math.fsum(lam)
    cur = lam
    for q in range(2, d + 1):
        cur = [a * b for a, b in zip(cur, lam)]
        r[q] = math.fsum(cur)
    return PowerSums._trusted(r)


def elem_sym_direct(s) -> ElemSym:
    """Elementary invariants by direct polynomial expansion.

    Multiplies out prod_j (t + lambda_j) one root at a time.  All
    intermediate terms are non-negative, so no cancellation occurs.
    """
    sp = _as_spectrum(s)
    d = sp.dim
    e = [0.0] * (d + 1)
    e[0] = 1.0
    for x in sp.values.tolist():
        for k in range(d, 0, -1):
            e[k] += x * e[k - 1]
    return ElemSym._trusted(np.array(e))


def elem_from_power(r) -> ElemSym:
    """Elementary invariants from power sums via the Newton recursion.

        k e_k = sum_{i=1..k} (-1)**(i-1) e_{k-i} r_i

    The alternating sum is accumulated from exact two-term products so
    that each e_k suffers a single rounding.  This matters: the plain
    recursion loses several digits of e_d already at d = 10.
    """
    ps = _as_power_sums(r)
    d = ps.dim
    rv = ps.r
    e = np.zeros(d + 1)
    e[0] = 1.0
    e[1] = rv[1]
    for k in range(2, d + 1):
        parts = []
        for i in range(1, k + 1):
            p, err = _two_prod(e[k - i], rv[i])
            if i % 2:
                parts.append(p)
                parts.append(err)
            else:
                parts.append(-p)
                parts.append(-err)
        e[k] = math.fsum(parts) / k
    return ElemSym._trusted(e)


def power_from_elem(e) -> PowerSums:
    """Power sums from elementary invariants, inverting the recursion:

        r_k = (-1)**(k-1) k e_k + sum_{i=1..k-1} (-1)**(i-1) e_i r_{k-i}

    Compensated the same way as :func:`elem_from_power`.
    """
    es = _as_elem_sym(e)
    d = es.dim
    ev = es.e
    r = np.zeros(d + 1)
    r[0] = float(d)
    r[1] = ev[1]
    for k in range(2, d + 1):
        lead = float(k) if k % 2 else -float(k)
        p, err = _two_prod(lead, ev[k])
        parts = [p, err]
        for i in range(1, k):
            p, err = _two_prod(ev[i], r[k - i])
            if i % 2:
                parts.append(p)
                parts.append(err)
            else:
                parts.append(-p)
                parts.append(-err)
        r[k] = math.fsum(parts)
    return PowerSums._trusted(r)


def newton_residual(e, r) -> float:
    """Signed residual of the degree-d Newton identity

        sum_{k=0..d} (-1)**k r_k e_{d-k},

    which vanishes exactly when e and r describe the same spectrum.
    """
    es = _as_elem_sym(e)
    ps = _as_power_sums(r)
    if es.dim != ps.dim:
        raise LengthMismatch(f"dimensions differ: e has {es.dim}, r has {ps.dim}")
    d = es.dim
    parts = []
    for k in range(d + 1):
        p, err = _two_prod(ps.r[k], es.e[d - k])
        if k % 2:
            parts.append(-p)
            parts.append(-err)
        else:
            parts.append(p)
            parts.append(err)
    return math.fsum(parts)


def spectrum_from_elem(e, root_tol: float = ROOT_TOL) -> Spectrum:
    """Recover the spectrum as the roots of the characteristic polynomial.

    Roots of P(t) = sum_k e_k t**(d-k) are the negated eigenvalues.
    Companion-matrix eigenvalues are polished with up to three Newton
    steps in 80-bit arithmetic, keeping a step only when it lowers
    |P|.  Imaginary parts beyond ``root_tol`` raise
    :class:`ComplexRoots`; real parts below ``-root_tol`` raise
    :class:`NegativeRoot`.  Surviving values are clipped to zero where
    needed, sorted and renormalized.
    """
    root_tol = _check_tol(root_tol, "root_tol")
    es = _as_elem_sym(e)
    d = es.dim
    coeffs = es.e
    roots = np.roots(coeffs)
    # polish in extended precision; companion eigenvalues alone lose
    # digits for d beyond about 8
    ce = coeffs.astype(np.longdouble)
    cd = ce[:-1] * np.arange(d, 0, -1, dtype=np.longdouble)
    z = roots.astype(np.clongdouble)
    for _ in range(3):
        pz = np.polyval(ce, z)
        dz = np.polyval(cd, z)
        safe = dz != 0
        step = np.where(safe, pz / np.where(safe, dz, 1.0), 0.0)
        znew = z - step
        better = np.abs(np.polyval(ce, znew)) < np.abs(pz)
        z = np.where(better, znew, z)
    lam = (-z).astype(complex)
    worst_im = float(np.abs(lam.imag).max())
    if worst_im > root_tol:
        raise ComplexRoots(
            f"imaginary part {worst_im:.3e} exceeds root_tol = {root_tol:.3e}"
        )
    re = lam.real.copy()
    worst_neg = float(re.min())
    if worst_neg < -root_tol:
        raise NegativeRoot(
            f"eigenvalue {worst_neg:.3e} below -root_tol = {-root_tol:.3e}"
        )
    re = np.clip(re, 0.0, None)
    re = np.sort(re)[::-1]
    re = re / math.fsum(re.tolist())
    return Spectrum(re)


def jacobian_e_wrt_r(e) -> JacobianTable:
    """Partial derivatives of the elementary invariants in the power sums,

        de_k / dr_l = (-1)**(l+1) e_{k-l} / l   for l <= k,  else 0,

    a lower triangular table with diagonal (-1)**(k+1) / k.
    """
    es = _as_elem_sym(e)
    d = es.dim
    ev = es.e
    n = d - 1
    m = np.zeros((n, n))
    for k in range(2, d + 1):
        for l in range(2, k + 1):
            sign = 1.0 if l % 2 else -1.0
            m[k - 2, l - 2] = sign * ev[k - l] / l
    return JacobianTable(dim=d, dependent="e", independent="r", matrix=m)


def jacobian_r_wrt_e(e) -> JacobianTable:
    """Inverse table dr_k / de_l, by forward substitution.

    The forward table is lower triangular with nonzero diagonal, so its
    inverse is again lower triangular.  Columns of odd order l are
    entrywise non-negative and columns of even order entrywise
    non-positive.
    """
    es = _as_elem_sym(e)
    d = es.dim
    lower = jacobian_e_wrt_r(es).matrix
    n = d - 1
    x = np.zeros((n, n))
    for j in range(n):
        x[j, j] = 1.0 / lower[j, j]
        for i in range(j + 1, n):
            acc = math.fsum(lower[i, m] * x[m, j] for m in range(j, i))
            x[i, j] = -acc / lower[i, i]
    return JacobianTable(dim=d, dependent="r", independent="e", matrix=x)
