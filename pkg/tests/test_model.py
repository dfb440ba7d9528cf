import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fadmem.model import (
    MOLLIFIER_MASS,
    FluxModel,
    GridFunction,
    GridMismatch,
    InitialData,
    kruzkov_pair,
    l1_dist,
    l1_norm,
    linf,
    mass,
    mollifier_weights,
    mollify,
    restrict,
    second_difference_l1,
    standard_mollifier,
    total_variation_bound,
    tv,
)

values = st.lists(st.floats(-5, 5, allow_nan=False), min_size=4, max_size=40)


def grid(vals, boundary="periodic", x_left=0.0, dx=0.1):
    return GridFunction(np.asarray(vals, float), x_left, dx, boundary)


# -- flux models --------------------------------------------------------------


def test_burgers_flux_and_speed():
    f = FluxModel.burgers()
    assert f.f(2.0) == 2.0
    assert f.df(-3.0) == -3.0
    assert f.max_speed(-1.0, 0.5) == 1.0


def test_linear_and_cubic_flux():
    assert FluxModel.linear(2.0).f(3.0) == 6.0
    cubic = FluxModel.cubic()
    assert cubic.f(3.0) == pytest.approx(9.0)
    assert cubic.max_speed(-2.0, 1.0) == pytest.approx(4.0)


def test_cubic_speed_includes_interior_critical_point():
    # f = u^3/3 - u, f' = u^2 - 1 has its extreme |f'| = 1 at u = 0
    f = FluxModel.poly([0.0, -1.0, 0.0, 1.0 / 3.0])
    assert f.max_speed(-0.5, 0.5) == pytest.approx(1.0)


@given(st.floats(-3, 3), st.floats(-3, 3))
def test_engquist_osher_split_recovers_flux(a, b):
    f = FluxModel.burgers()
    u = np.array([a, b])
    fp, fm = f.split(u)
    np.testing.assert_allclose(fp + fm, f.f(u), atol=1e-12)
    assert np.all(np.diff(f.split(np.linspace(-3, 3, 50))[0]) >= -1e-12)


@given(st.floats(-3, 3), st.floats(-3, 3))
def test_kruzkov_flux_vanishes_at_level(u, c):
    eta, q = kruzkov_pair(c, FluxModel.burgers(), np.array([u]))
    assert eta[0] == pytest.approx(abs(u - c))
    assert q[0] == pytest.approx(np.sign(u - c) * (u * u / 2 - c * c / 2))


# -- grid functions -----------------------------------------------------------


def test_grid_function_rejects_bad_input():
    with pytest.raises(ValueError):
        grid([1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        grid([1.0, np.nan, 0.0, 0.0])
    with pytest.raises(ValueError):
        grid([0.0] * 4, boundary="reflecting")


def test_grid_values_are_read_only():
    u = grid([0.0, 1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        u.values[0] = 5.0


def test_norms_on_known_grid():
    u = grid([0.0, 1.0, -1.0, 0.0], boundary="outflow", dx=0.5)
    assert tv(u) == 4.0
    assert l1_norm(u) == 1.0
    assert linf(u) == 1.0
    assert mass(u) == 0.0
    assert total_variation_bound(u) == 6.0


def test_periodic_tv_counts_wraparound_jump():
    assert tv(grid([1.0, 1.0, 0.0, 0.0])) == 2.0
    assert tv(grid([1.0, 1.0, 0.0, 0.0], "outflow")) == 1.0


def test_mismatched_grids_rejected():
    with pytest.raises(GridMismatch):
        l1_dist(grid([0.0] * 4), grid([0.0] * 5))


@given(values)
def test_l1_dist_is_a_metric(vals):
    u = grid(vals)
    v = grid(np.roll(vals, 1))
    assert l1_dist(u, u) == 0.0
    assert l1_dist(u, v) == pytest.approx(l1_dist(v, u))
    assert l1_dist(u, v) <= l1_norm(u) + l1_norm(v) + 1e-12


@given(values)
def test_restrict_preserves_mass_and_does_not_raise_tv(vals):
    fine = grid(np.repeat(vals, 2), dx=0.05)
    coarse = restrict(fine, 2)
    assert coarse.n == len(vals)
    assert mass(coarse) == pytest.approx(mass(fine), abs=1e-12)
    assert tv(coarse) <= tv(fine) + 1e-12
    np.testing.assert_allclose(coarse.values, vals)


def test_second_difference_sees_only_the_outflow_ends_of_linear_data():
    # ghost cells copy the end values, so each end carries one unit kink
    assert second_difference_l1(grid(np.full(10, 3.0))) == 0.0
    u = grid(np.arange(10.0), "outflow")
    assert second_difference_l1(u) == pytest.approx(2.0 / u.dx)


# -- initial data ---------------------------------------------------------------


def test_riemann_profile_on_grid():
    u = InitialData.riemann(1.0, 0.0).on_grid(-1, 1, 4, "outflow")
    np.testing.assert_array_equal(u.values, [1.0, 1.0, 0.0, 0.0])


def test_square_profile_mass():
    u = InitialData.square(1.0, 0.5).on_grid(-1, 1, 400)
    assert mass(u) == pytest.approx(0.5)


def test_smooth_bump_peak_and_support():
    data = InitialData.smooth(2.0, 0.0, 0.5)
    assert data(0.0) == pytest.approx(2.0)
    assert data(0.6) == 0.0


def test_sampled_profile_must_match_grid():
    with pytest.raises(ValueError):
        InitialData.sampled([0.0, 1.0, 2.0]).on_grid(0, 1, 4)
    with pytest.raises(TypeError):
        InitialData.sampled([0.0] * 4)(0.5)


# -- mollification ----------------------------------------------------------


def test_mollifier_normalisation():
    assert standard_mollifier(1.0) == 0.0
    assert MOLLIFIER_MASS > 0
    w = mollifier_weights(0.1, 0.01)
    assert w.sum() == pytest.approx(1.0)
    np.testing.assert_allclose(w, w[::-1])


def test_mollify_requires_resolved_grid():
    g = GridFunction.zeros(-1, 1, 20)
    with pytest.raises(ValueError):
        mollify(InitialData.square(), 0.05, g)


def test_mollify_keeps_mass_and_max_on_periodic_grid():
    data = InitialData.square(1.0, 0.5)
    g = GridFunction.zeros(-1, 1, 800)
    raw = data.on_grid(-1, 1, 800)
    smooth = mollify(data, 0.05, g)
    assert mass(smooth) == pytest.approx(mass(raw), abs=1e-12)
    assert linf(smooth) <= linf(raw) + 1e-12
    assert tv(smooth) <= tv(raw) + 1e-12
