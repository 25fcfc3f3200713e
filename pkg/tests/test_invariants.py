"""Conversions between eigenvalues, power sums and elementary invariants."""

import math

import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from renyi_spectrum import (
    D_MAX,
    ComplexRoots,
    DimensionTooLarge,
    DimensionTooSmall,
    ElemSym,
    InvalidInvariants,
    LengthMismatch,
    NegativeEntry,
    NegativeRoot,
    NotNormalized,
    PowerSums,
    Spectrum,
    SpectrumError,
    elem_from_power,
    elem_sym_direct,
    make_spectrum,
    newton_residual,
    power_from_elem,
    power_sums,
    spectrum_from_elem,
)
from renyi_spectrum.verify import sample_spectrum

NEWTON_TOL = 1e-13
AGREE_TOL = 1e-12
ROUNDTRIP_TOL = 1e-8


def simplex(draw_dim=st.integers(2, 12)):
    """Strategy for normalized probability vectors with bounded ratios."""
    return draw_dim.flatmap(
        lambda d: arrays(
            np.float64,
            d,
            elements=st.floats(min_value=1e-3, max_value=1.0),
        )
    ).map(lambda v: v / v.sum())


# ---------------------------------------------------------------------------
# construction and validation


def test_make_spectrum_sorts_and_renormalizes():
    sp = make_spectrum([0.2, 0.5, 0.3])
    assert np.array_equal(sp.values, np.sort(sp.values)[::-1])
    assert abs(math.fsum(sp.values.tolist()) - 1.0) < 1e-15
    assert sp.dim == 3
    assert len(sp) == 3


def test_make_spectrum_clips_tiny_negative():
    sp = make_spectrum([1.0 + 5e-12, -5e-12])
    assert sp.values.min() == 0.0


def test_make_spectrum_rejections():
    with pytest.raises(DimensionTooSmall):
        make_spectrum([1.0])
    with pytest.raises(DimensionTooLarge):
        make_spectrum(np.full(D_MAX + 1, 1.0 / (D_MAX + 1)))
    with pytest.raises(NegativeEntry):
        make_spectrum([1.1, -0.1])
    with pytest.raises(NotNormalized):
        make_spectrum([0.5, 0.4])
    with pytest.raises(NotNormalized):
        make_spectrum([0.5, math.nan])
    with pytest.raises(LengthMismatch):
        make_spectrum([[0.5, 0.5]])


def test_spectrum_constructor_validates_order():
    with pytest.raises(SpectrumError):
        Spectrum(np.array([0.25, 0.75]))
    # valid construction is read-only
    sp = Spectrum(np.array([0.75, 0.25]))
    with pytest.raises(ValueError):
        sp.values[0] = 0.5


def test_power_sums_container_validation():
    with pytest.raises(LengthMismatch):
        PowerSums(np.array([3.0, 1.0, 0.4]))  # says d=3 but has 3 entries
    with pytest.raises(InvalidInvariants):
        PowerSums(np.array([2.5, 1.0, 0.5]))  # non-integer r_0
    with pytest.raises(NotNormalized):
        PowerSums(np.array([2.0, 0.9, 0.5]))  # r_1 != 1


def test_elem_sym_container_validation():
    with pytest.raises(InvalidInvariants):
        ElemSym(np.array([2.0, 1.0, 0.2]))  # e_0 != 1
    with pytest.raises(NotNormalized):
        ElemSym(np.array([1.0, 0.9, 0.2]))  # e_1 != 1
    with pytest.raises(InvalidInvariants):
        ElemSym(np.array([1.0, 1.0, math.inf]))


# ---------------------------------------------------------------------------
# fixed conversion values


def test_power_sums_values():
    r = power_sums(make_spectrum([0.5, 0.3, 0.2])).r
    assert np.allclose(r, [3.0, 1.0, 0.38, 0.16], rtol=0, atol=1e-15)

    r2 = power_sums(make_spectrum([0.75, 0.25])).r
    assert np.allclose(r2, [2.0, 1.0, 0.625], rtol=0, atol=1e-15)

    uni = power_sums(make_spectrum(np.ones(3) / 3)).r
    assert np.allclose(uni, [3.0, 1.0, 1.0 / 3.0, 1.0 / 9.0], rtol=0, atol=1e-15)


def test_elem_sym_values():
    e = elem_sym_direct(make_spectrum([0.5, 0.3, 0.2])).e
    assert np.allclose(e, [1.0, 1.0, 0.31, 0.03], rtol=0, atol=1e-15)

    e2 = elem_sym_direct(make_spectrum([0.75, 0.25])).e
    assert np.allclose(e2, [1.0, 1.0, 0.1875], rtol=0, atol=1e-15)

    uni = elem_sym_direct(make_spectrum(np.ones(3) / 3)).e
    assert np.allclose(uni, [1.0, 1.0, 1.0 / 3.0, 1.0 / 27.0], rtol=0, atol=1e-15)


def test_against_high_precision_reference():
    """Spot-check conversions against 50 digit arithmetic."""
    import mpmath

    mpmath.mp.dps = 50
    rng = np.random.Generator(np.random.Philox(key=np.array([7, 0], dtype=np.uint64)))
    for dim in (2, 3, 5, 8, 12):
        for _ in range(4):
            lam = rng.dirichlet(np.ones(dim))
            sp = make_spectrum(lam)
            exact = [mpmath.mpf(x) for x in sp.values.tolist()]

            r = power_sums(sp).r
            for q in range(2, dim + 1):
                ref = mpmath.fsum(x**q for x in exact)
                assert abs(r[q] - float(ref)) <= 1e-15 * max(1.0, float(ref))

            e = elem_sym_direct(sp).e
            e_ref = [mpmath.mpf(0)] * (dim + 1)
            e_ref[0] = mpmath.mpf(1)
            for x in exact:
                for k in range(dim, 0, -1):
                    e_ref[k] += x * e_ref[k - 1]
            for k in range(2, dim + 1):
                ref = float(e_ref[k])
                assert abs(e[k] - ref) <= 1e-14 * max(abs(ref), 1e-30)


# ---------------------------------------------------------------------------
# identities


@seed(1)
@given(vec=simplex())
@settings(max_examples=120, deadline=None)
def test_newton_identity_random(vec):
    sp = make_spectrum(vec)
    res = newton_residual(elem_sym_direct(sp), power_sums(sp))
    assert abs(res) <= NEWTON_TOL


@seed(1)
@given(vec=simplex())
@settings(max_examples=100, deadline=None)
def test_elem_from_power_matches_direct(vec):
    sp = make_spectrum(vec)
    via_r = elem_from_power(power_sums(sp)).e
    direct = elem_sym_direct(sp).e
    scale = np.maximum(np.abs(direct), 1e-30)
    assert np.max(np.abs(via_r - direct) / scale) <= 1e-10


@seed(1)
@given(vec=simplex())
@settings(max_examples=100, deadline=None)
def test_power_from_elem_inverts(vec):
    sp = make_spectrum(vec)
    r = power_sums(sp).r
    back = power_from_elem(elem_sym_direct(sp)).r
    assert np.max(np.abs(back - r)) <= AGREE_TOL


@pytest.mark.parametrize("dim", [2, 3, 4, 5])
def test_root_roundtrip_low_dim(dim):
    """Spectrum -> invariants -> roots recovers the spectrum."""
    worst = 0.0
    for i in range(300):
        sp = sample_spectrum(dim, seed=3, index=i)
        rec = spectrum_from_elem(elem_from_power(power_sums(sp)))
        worst = max(worst, float(np.abs(rec.values - sp.values).max()))
    assert worst <= ROUNDTRIP_TOL


def test_root_roundtrip_exact_cases():
    for vals in ([0.75, 0.25], [0.5, 0.3, 0.2], np.ones(4) / 4):
        sp = make_spectrum(vals)
        rec = spectrum_from_elem(elem_sym_direct(sp))
        assert np.allclose(rec.values, sp.values, rtol=0, atol=1e-12)


# ---------------------------------------------------------------------------
# root extraction failure modes


def test_complex_roots_detected():
    # invariants of a polynomial whose roots moved off the real axis
    e = ElemSym(np.array([1.0, 1.0, 0.3334, 0.037037]))
    with pytest.raises(ComplexRoots):
        spectrum_from_elem(e)


def test_negative_root_detected():
    # char poly of (1.3, -0.1, -0.2): valid container, impossible spectrum
    e = ElemSym(np.array([1.0, 1.0, -0.37, 0.026]))
    with pytest.raises(NegativeRoot):
        spectrum_from_elem(e)


def test_root_tol_loosening_accepts():
    e = ElemSym(np.array([1.0, 1.0, -0.37, 0.026]))
    sp = spectrum_from_elem(e, root_tol=0.5)
    # negatives clipped, result renormalized
    assert sp.values.min() >= 0.0
    assert abs(math.fsum(sp.values.tolist()) - 1.0) < 1e-12


def test_trace_normalization_is_enforced_on_recovery():
    sp = spectrum_from_elem(elem_sym_direct(make_spectrum([0.6, 0.4])))
    assert abs(math.fsum(sp.values.tolist()) - 1.0) < 1e-15
