"""Adaptive Gauss-Kronrod quadrature on the half line [0, inf).

The half line is folded onto the unit interval by t = u / (1 - u),
which is exact for integrands decaying like 1/t**2 (the transformed
integrand then stays bounded near u = 1).  Panels are bisected worst
error first, using the 7/15 Gauss-Kronrod pair with the classic
QUADPACK error rescaling: the raw |K15 - G7| difference is sharpened to

    resasc * min(1, (200 |K15 - G7| / resasc)**1.5)

and floored at 50 eps * resabs so roundoff is never reported as zero
error.  Integrands must accept a numpy array of abscissas and return
values elementwise; a batch variant integrates a family of integrands
over a shared set of panels, which the entropy derivatives use to
price a whole gradient at roughly the cost of one integral.

The reported error estimate is an honest upper bound in the usual
empirical sense: every convergence claim in the test suite checks
|result - exact| <= abs_error_estimate on integrals with closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidTolerance, NoConvergence

__all__ = ["QuadResult", "integrate_halfline", "integrate_halfline_batch"]

# 7 point Gauss / 15 point Kronrod abscissas and weights on [-1, 1]
_XGK = np.array([
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000,
])
_WGK = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
])
_WG = np.array([
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469,
])

_NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[:-1][::-1]])
_WK15 = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[:-1][::-1]])
_WG15 = np.zeros(15)
_WG15[1:14:2] = np.concatenate([_WG[:-1], [_WG[-1]], _WG[:-1][::-1]])

_EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class QuadResult:
    """Value, error estimate and subdivision count of one integral."""

    value: float
    abs_error_estimate: float
    subdivisions: int


def _panel(g, a: float, b: float, m: int):
    """Evaluate one Kronrod panel; returns (values[m], errors[m])."""
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    x = c + h * _NODES
    fv = np.atleast_2d(np.asarray(g(x), dtype=float))
    if fv.shape != (m, 15):
        raise ValueError(f"integrand returned shape {fv.shape}, expected ({m}, 15)")
    if not np.all(np.isfinite(fv)):
        # a non-finite sample poisons the panel; give it infinite error
        # so refinement homes in on the bad spot and the budget decides
        return np.full(m, np.nan), np.full(m, np.inf)
    resk = h * (fv @ _WK15)
    resg = h * (fv @ _WG15)
    resabs = abs(h) * (np.abs(fv) @ _WK15)
    mean = resk / (b - a)
    resasc = abs(h) * (np.abs(fv - mean[:, None]) @ _WK15)
    err = np.abs(resk - resg)
    scale = resasc > 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        sharp = resasc * np.minimum(1.0, (200.0 * err / np.where(scale, resasc, 1.0)) ** 1.5)
    err = np.where(scale, np.minimum(err, sharp), err)
    err = np.maximum(err, 50.0 * _EPS * resabs)
    return resk, err


def _adaptive_unit(g, m: int, abs_tol: float, max_subdivisions: int, rel_tol: float = 0.0):
    """Integrate g over [0, 1] until every component's error is small.

    Component q converges once its summed panel errors drop below
    bound_q = max(abs_tol, rel_tol * |value_q|).  The relative branch
    matters for integrands whose value is large compared to abs_tol:
    the 50 eps floor on each panel makes a purely absolute target
    unreachable for them no matter how finely the interval is split.

    The panel split next is the one with the largest error relative to
    its component's bound.  Ranking by raw error would be wrong for a
    batch spanning many magnitudes: the largest component's floored
    panels would soak up the whole budget while a mid-sized component
    keeps its genuine truncation error.
    """
    vals0, errs0 = _panel(g, 0.0, 1.0, m)
    panels = [(0.0, 1.0)]
    cap = 2 * max_subdivisions + 4
    err_rows = np.zeros((cap, m))
    val_rows = np.zeros((cap, m))
    err_rows[0] = errs0
    val_rows[0] = vals0
    nsub = 0
    while True:
        n = len(panels)
        totals = err_rows[:n].sum(axis=0)
        bound = np.maximum(abs_tol, rel_tol * np.abs(val_rows[:n].sum(axis=0)))
        if np.all(totals <= bound):
            # confirm with exact summation before declaring success
            exact_e = [
                math.fsum(float(err_rows[i, q]) for i in range(n)) for q in range(m)
            ]
            exact_v = [
                math.fsum(float(val_rows[i, q]) for i in range(n)) for q in range(m)
            ]
            if all(
                e <= max(abs_tol, rel_tol * abs(v))
                for e, v in zip(exact_e, exact_v)
            ):
                break
        if nsub >= max_subdivisions:
            raise NoConvergence(
                f"error {float(totals.max()):.3e} above abs_tol {abs_tol:.3e} "
                f"after {nsub} subdivisions; integrand may be nearly singular"
            )
        # a poisoned component (non-finite value) gets abs_tol as its
        # selection scale so its infinite panel error is split first
        scale = np.where(np.isfinite(bound), bound, abs_tol)
        idx = int((err_rows[:n] / scale).max(axis=1).argmax())
        a, b = panels[idx]
        panels[idx] = None
        err_rows[idx] = 0.0
        val_rows[idx] = 0.0
        mid = 0.5 * (a + b)
        for lo, hi in ((a, mid), (mid, b)):
            v, e = _panel(g, lo, hi, m)
            panels.append((lo, hi))
            err_rows[len(panels) - 1] = e
            val_rows[len(panels) - 1] = v
        nsub += 1
    alive = [i for i, p in enumerate(panels) if p is not None]
    out_v = np.array([
        math.fsum(float(val_rows[i, q]) for i in alive) for q in range(m)
    ])
    out_e = np.array([
        math.fsum(float(err_rows[i, q]) for i in alive) for q in range(m)
    ])
    return out_v, out_e, nsub


def _fold(f):
    """Map an integrand on [0, inf) to one on [0, 1)."""

    def g(u):
        w = 1.0 / (1.0 - u)
        t = u * w
        return np.asarray(f(t), dtype=float) * (w * w)

    return g


def _check_tolerances(abs_tol, rel_tol) -> tuple[float, float]:
    abs_tol = float(abs_tol)
    if not math.isfinite(abs_tol) or abs_tol <= 0.0:
        raise InvalidTolerance(f"abs_tol must be positive and finite, got {abs_tol!r}")
    rel_tol = float(rel_tol)
    if not 0.0 <= rel_tol < 1.0:
        raise InvalidTolerance(f"rel_tol must lie in [0, 1), got {rel_tol!r}")
    return abs_tol, rel_tol


def integrate_halfline(
    f, abs_tol: float = 1e-10, max_subdivisions: int = 2000, rel_tol: float = 0.0
) -> QuadResult:
    """Integrate ``f`` over [0, inf) to absolute tolerance ``abs_tol``.

    Parameters
    ----------
    f : callable
        Vectorized integrand; receives a numpy array of points t > 0
        and returns the values elementwise.  Must decay at least like
        1/t**2 for the fold onto [0, 1) to converge.
    abs_tol : float
        Target for the summed panel error estimates.
    max_subdivisions : int
        Bisection budget; exceeding it raises :class:`NoConvergence`.
    rel_tol : float
        Optional relative escape hatch: convergence is declared at
        max(abs_tol, rel_tol * |value|).  Zero (the default) keeps the
        purely absolute criterion.  Large-magnitude integrals need
        this; their roundoff floor alone exceeds any tight abs_tol.

    Returns
    -------
    QuadResult
        value, abs_error_estimate (<= the effective bound on success),
        subdivisions.
    """
    abs_tol, rel_tol = _check_tolerances(abs_tol, rel_tol)
    if int(max_subdivisions) < 1:
        raise InvalidTolerance(f"max_subdivisions must be >= 1, got {max_subdivisions!r}")
    vals, errs, nsub = _adaptive_unit(_fold(f), 1, abs_tol, int(max_subdivisions), rel_tol)
    return QuadResult(float(vals[0]), float(errs[0]), nsub)


def integrate_halfline_batch(
    f,
    n_components: int,
    abs_tol: float = 1e-10,
    max_subdivisions: int = 2000,
    rel_tol: float = 0.0,
):
    """Integrate a family of integrands over shared adaptive panels.

    ``f`` receives an array of points of shape (n,) and returns values
    of shape (n_components, n).  Panels are refined until each
    component's summed error estimate is below
    max(abs_tol, rel_tol * |component value|).  Returns
    (values, error_estimates, subdivisions) with the first two of shape
    (n_components,).
    """
    abs_tol, rel_tol = _check_tolerances(abs_tol, rel_tol)
    m = int(n_components)
    if m < 1:
        raise InvalidTolerance(f"n_components must be >= 1, got {n_components!r}")
    return _adaptive_unit(_fold(f), m, abs_tol, int(max_subdivisions), rel_tol)
