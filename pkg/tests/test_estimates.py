import numpy as np
import pytest

from halfline_nls.estimates import (
    RatioReport,
    boundary_family,
    random_bandlimited,
    shape_family,
    verify_interpolation,
    verify_linear_bound,
    verify_nonlinearity_bound,
    verify_time_trace_bound,
    verify_trace_nonlinearity,
)
from halfline_nls.exceptions import InvalidInputError


def _bumps():
    return [m for m in boundary_family() if m[0].startswith("bump")]


def _scaled(family, c):
    return [(lab, lambda t, T, f=f: c * f(t, T)) for lab, f in family]


# -- families ------------------------------------------------------------------


def test_boundary_family_vanishes_at_the_corner():
    t = np.linspace(0.0, 2.0, 101)
    for label, fun in boundary_family():
        vals = fun(t, 2.0)
        assert abs(vals[0]) < 1e-14, label
        assert np.max(np.abs(vals)) > 0, label


def test_family_is_seeded():
    t = np.linspace(0.0, 1.0, 33)
    a = [f(t, 1.0) for _, f in boundary_family(seed=7)]
    b = [f(t, 1.0) for _, f in boundary_family(seed=7)]
    c = [f(t, 1.0) for _, f in boundary_family(seed=8)]
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    assert not all(np.array_equal(x, y) for x, y in zip(a, c))


def test_random_bandlimited_is_reproducible_and_localized():
    x = np.linspace(-20, 20, 801)
    u = random_bandlimited(x, np.random.default_rng(3))
    v = random_bandlimited(x, np.random.default_rng(3))
    assert np.array_equal(u, v)
    assert np.max(np.abs(u[:50])) < 1e-8 * np.max(np.abs(u))


# -- linear bound ---------------------------------------------------------------


@pytest.fixture(scope="module")
def bump_linear():
    return verify_linear_bound(1.0, T_list=(0.5, 1.0, 2.0), family=_bumps(), refine=False)


def test_linear_bound_bump_sweep(bump_linear):
    assert np.all(np.isfinite(bump_linear.ratios))
    assert 0 < bump_linear.max_ratio < np.inf
    # the (1 + T) factor already absorbs growth
    assert bump_linear.slope <= 0.1
    assert np.isnan(bump_linear.stability)


def test_linear_bound_scale_invariant(bump_linear):
    doubled = verify_linear_bound(1.0, T_list=(0.5, 1.0, 2.0), family=_scaled(_bumps(), 2.0), refine=False)
    assert np.allclose(doubled.ratios, bump_linear.ratios, rtol=1e-10, atol=0)


def test_linear_bound_rejects_zero_data():
    zero = [("zero", lambda t, T: 0 * t + 0j)]
    with pytest.raises(InvalidInputError):
        verify_linear_bound(1.0, T_list=(1.0,), family=zero, refine=False)


def test_report_rows_and_summary(bump_linear):
    rows = bump_linear.rows()
    assert len(rows) == 9
    assert rows[0][:3] == ("linear_bound", "bump-a2", 0.5)
    assert max(r[3] for r in rows) == bump_linear.max_ratio
    assert bump_linear.summary()["max_ratio"] == bump_linear.max_ratio


def test_stable_flag():
    rep = RatioReport("x", np.ones(2), ["a", "b"], stability=0.05)
    assert rep.stable
    rep.stability = 0.2
    assert not rep.stable


# -- time traces ---------------------------------------------------------------


def test_time_trace_bound_peaks_at_the_boundary():
    rep = verify_time_trace_bound(1.0, family=_bumps(), refine=False)
    assert 0 < rep.max_ratio < np.inf
    assert rep.argmax_x < 0.1
    doubled = verify_time_trace_bound(1.0, family=_scaled(_bumps(), 3.0), refine=False)
    assert np.allclose(doubled.ratios, rep.ratios, rtol=1e-10, atol=0)


# -- nonlinearity --------------------------------------------------------------


def test_nonlinearity_bound_homogeneous():
    base = verify_nonlinearity_bound(1.0, 2, n_pairs=50, refine=False)
    doubled = verify_nonlinearity_bound(1.0, 2, n_pairs=50, amplitude=2.0, refine=False)
    assert np.isfinite(base.max_ratio)
    assert doubled.max_ratio == pytest.approx(base.max_ratio, rel=0.05)


def test_nonlinearity_single_ratio_bounded_near_zero():
    maxima = [
        verify_nonlinearity_bound(1.0, 2, n_pairs=10, amplitude=a, refine=False).extra["max_single"]
        for a in (1.0, 1e-1, 1e-2, 1e-3)
    ]
    assert np.all(np.isfinite(maxima))
    assert max(maxima) <= 1.01 * min(maxima)


def test_nonlinearity_report_is_deterministic():
    a = verify_nonlinearity_bound(1.0, 2, n_pairs=5, seed=11, refine=False)
    b = verify_nonlinearity_bound(1.0, 2, n_pairs=5, seed=11, refine=False)
    assert np.array_equal(a.ratios, b.ratios)


# -- interpolation -----------------------------------------------------------


def test_interpolation_slope_matches_exponent():
    rep = verify_interpolation(0.25, 0.5, refine=False)
    theta = rep.extra["theta"]
    assert theta == pytest.approx(2 / 7)
    assert abs(rep.slope - theta) <= 0.25 * theta


def test_interpolation_bound_for_short_intervals():
    T_list = (0.125, 0.25, 0.5, 1.0)
    rep = verify_interpolation(0.25, 0.5, T_list=T_list, refine=False)
    theta = rep.extra["theta"]
    for j, T in enumerate(T_list):
        assert np.all(rep.ratios[:, j] <= T**theta * (1 + 1e-9))


def test_interpolation_scale_invariant():
    base = verify_interpolation(0.25, 0.5, refine=False)
    scaled = [(lab, lambda tau, f=f: -2.5j * f(tau)) for lab, f in shape_family()]
    other = verify_interpolation(0.25, 0.5, family=scaled, refine=False)
    assert np.allclose(other.ratios, base.ratios, rtol=1e-10, atol=0)


def test_interpolation_needs_positive_orders():
    with pytest.raises(InvalidInputError):
        verify_interpolation(0.0, 0.5)
    with pytest.raises(InvalidInputError):
        verify_interpolation(0.25, -1.0)


# -- boundary nonlinearity -----------------------------------------------------


def test_trace_nonlinearity_decays_at_least_like_the_exponent():
    rep = verify_trace_nonlinearity(1.0, 2)
    assert rep.extra["exponent"] == pytest.approx(2 / 7)
    assert rep.slope >= rep.extra["exponent"]
    assert np.all(np.isfinite(rep.ratios))
