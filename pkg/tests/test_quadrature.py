"""Adaptive Gauss-Kronrod integration over the half line."""

import math

import numpy as np
import pytest

from renyi_spectrum import (
    InvalidTolerance,
    NoConvergence,
    integrate_halfline,
    integrate_halfline_batch,
)

TIGHT = 1e-12


def test_inverse_square():
    res = integrate_halfline(lambda t: 1.0 / (1.0 + t) ** 2)
    assert abs(res.value - 1.0) <= TIGHT
    assert res.abs_error_estimate >= 0.0
    assert res.subdivisions >= 0


def test_shifted_inverse_square():
    res = integrate_halfline(lambda t: 1.0 / (0.5 + t) ** 2)
    assert abs(res.value - 2.0) <= TIGHT


def test_lorentzian_moment():
    # integral of t / (1 + t^2)^2 over [0, inf) is 1/2
    res = integrate_halfline(lambda t: t / (1.0 + t * t) ** 2)
    assert abs(res.value - 0.5) <= TIGHT


def test_exponential_decay():
    res = integrate_halfline(lambda t: np.exp(-t))
    assert abs(res.value - 1.0) <= 1e-10


def test_error_estimate_is_honest():
    for f, truth in [
        (lambda t: 1.0 / (1.0 + t) ** 2, 1.0),
        (lambda t: np.exp(-t), 1.0),
        (lambda t: t / (1.0 + t * t) ** 2, 0.5),
    ]:
        res = integrate_halfline(f)
        assert abs(res.value - truth) <= max(res.abs_error_estimate, 1e-13)


def test_deterministic_bitwise():
    f = lambda t: np.log1p(t) / (1.0 + t) ** 3
    a = integrate_halfline(f)
    b = integrate_halfline(f)
    assert a.value == b.value
    assert a.abs_error_estimate == b.abs_error_estimate
    assert a.subdivisions == b.subdivisions


def test_subdivision_budget_exhaustion():
    # integrable endpoint singularity needs many panels near zero
    with pytest.raises(NoConvergence):
        integrate_halfline(
            lambda t: np.where(t > 0, 1.0 / np.sqrt(np.maximum(t, 1e-300)), 0.0)
            * np.exp(-t),
            max_subdivisions=2,
        )


def test_tolerance_validation():
    f = lambda t: np.exp(-t)
    for bad in (0.0, -1e-10, math.nan, math.inf):
        with pytest.raises(InvalidTolerance):
            integrate_halfline(f, abs_tol=bad)
    for bad_rel in (-1e-3, 1.0, 2.0, math.nan):
        with pytest.raises(InvalidTolerance):
            integrate_halfline(f, rel_tol=bad_rel)
    # rel_tol zero and small positive are both fine
    assert abs(integrate_halfline(f, rel_tol=0.0).value - 1.0) <= 1e-10
    assert abs(integrate_halfline(f, rel_tol=1e-12).value - 1.0) <= 1e-10


def test_relative_tolerance_unlocks_large_integrands():
    # value ~ 1e12: an absolute 1e-10 target sits below the roundoff
    # floor of double precision panels, so the absolute-only criterion
    # cannot terminate, while the relative criterion can
    big = lambda t: 1e12 / (1.0 + t) ** 2
    with pytest.raises(NoConvergence):
        integrate_halfline(big, abs_tol=1e-10, max_subdivisions=200)
    res = integrate_halfline(big, abs_tol=1e-10, rel_tol=1e-12, max_subdivisions=200)
    assert abs(res.value - 1e12) <= 1e-2


def test_batch_matches_scalar():
    fs = [
        lambda t: 1.0 / (1.0 + t) ** 2,
        lambda t: np.exp(-t),
        lambda t: t / (1.0 + t * t) ** 2,
    ]

    def batch(t):
        return np.stack([f(t) for f in fs], axis=0)

    values, errors, nsub = integrate_halfline_batch(batch, 3)
    assert values.shape == (3,)
    assert errors.shape == (3,)
    assert nsub >= 0
    for j, truth in enumerate([1.0, 1.0, 0.5]):
        assert abs(values[j] - truth) <= 1e-10


def test_batch_component_count_must_match():
    def wrong(t):
        return np.stack([np.exp(-t)], axis=0)

    with pytest.raises(ValueError):
        integrate_halfline_batch(wrong, 3)


def test_batch_mixed_scales_converge_together():
    # a huge and a small component share the panel tree; the huge one
    # must not starve refinement of the small one
    def batch(t):
        return np.stack(
            [1e10 / (1.0 + t) ** 2, t / (1.0 + t * t) ** 2], axis=0
        )

    values, errors, nsub = integrate_halfline_batch(
        batch, 2, abs_tol=1e-10, rel_tol=1e-12
    )
    assert abs(values[0] - 1e10) <= 1e-4
    assert abs(values[1] - 0.5) <= 1e-9
