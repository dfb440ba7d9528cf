import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fadmem.kernel_lab import resolvent_exponential
from fadmem.memsolver import RECURSION, RunRecord, SolverConfig, _explicit_update, run
from fadmem.model import FluxModel, GridFunction, InitialData, tv
from fadmem.reference import LocalConfig, run_local
from fadmem.verify import (
    REPORT_NAMES,
    TheoremReport,
    check_bv_bound,
    check_l1_contraction,
    check_max_principle,
    check_relaxation_limit,
    check_time_lipschitz,
    check_viscosity_cauchy,
    entropy_production,
    equivalent_shock_position,
    mass_drift,
    self_convergence_rate,
)

BURGERS = FluxModel.burgers()


def exam(eps=0.5, alpha=0.5):
    return resolvent_exponential(eps, alpha, 1e-3, 2)


def constant_run(dense=False):
    u0 = GridFunction(np.full(20, 0.6), 0.0, 0.05)
    return run(SolverConfig(BURGERS, exam(), t_final=0.3), u0, snapshot_times=[0.1, 0.2], dense=dense)


def shock_run(res=None, cells=100, dense=True, t_final=0.5):
    u0 = InitialData.riemann(1.0, 0.0).on_grid(-1, 1, cells, "outflow")
    return run(SolverConfig(BURGERS, res, t_final=t_final), u0, dense=dense)


# -- reports --------------------------------------------------------------------


def test_report_names_are_closed():
    with pytest.raises(ValueError):
        TheoremReport("Bogus", True, 0.0)
    assert "EntropyInequality" in REPORT_NAMES


def test_report_text_and_csv(tmp_path):
    rep = check_max_principle(constant_run())
    text = rep.to_text()
    assert "report=MaxPrinciple" in text and "passed=true" in text
    rep.write_csv(tmp_path / "m.csv", header="hdr")
    lines = (tmp_path / "m.csv").read_text().splitlines()
    assert lines[0] == "# hdr" and lines[1] == "t,margin"


def test_reports_are_pure_functions_of_records():
    rec = shock_run(exam())
    a, b = check_bv_bound(rec), check_bv_bound(rec)
    assert a.worst_margin == b.worst_margin
    np.testing.assert_array_equal(a.details["lhs"], b.details["lhs"])


# -- maximum principle ---------------------------------------------------------------


def test_max_principle_on_constant_run():
    rep = check_max_principle(constant_run())
    assert rep.passed and rep.worst_margin == 0.0


def test_max_principle_on_bump_run():
    u0 = InitialData.smooth().on_grid(-1, 1, 100)
    assert check_max_principle(run(SolverConfig(BURGERS, exam(), t_final=0.5), u0)).passed


def test_max_principle_has_teeth():
    # steps past the stability limit amplify the highest mode
    u0 = GridFunction(np.where(np.arange(40) % 2 == 0, 1.0, 0.0), 0.0, 0.05)
    cfg = SolverConfig(FluxModel.linear(0.0), None, nu=0.01, t_final=0.5)
    rec = run(cfg, u0)
    assert check_max_principle(rec).passed
    unstable = _explicit_update(u0.values, np.zeros(40), cfg, 0.0, 0.0, 0.25, 0.05, "periodic")
    fake = RunRecord(cfg, u0, 0.25, 0.0, np.array([0.0, 0.25]), [u0, u0.with_values(unstable)],
                               {k: np.array([v]) for k, v in
                                {"t": 0.25, "linf": np.abs(unstable).max(), "tv": tv(u0.with_values(unstable)),
                                 "mass": 0.0, "dl1": 0.0, "entropy_max": np.nan}.items()})
    assert not check_max_principle(fake).passed


# -- BV bound -------------------------------------------------------------------------


def test_bv_bound_without_memory_is_tvd():
    rec = shock_run(None, dense=False)
    rep = check_bv_bound(rec)
    assert rep.passed
    assert rep.info["L"] == 1.0
    assert np.all(rec.diagnostics["tv"] <= tv(rec.u0) + 1e-12)


def test_bv_bound_square_wave_with_memory():
    u0 = InitialData.square(1.0, 0.5).on_grid(-1, 1, 200)
    rep = check_bv_bound(run(SolverConfig(BURGERS, exam(0.5, 0.5), t_final=1.0), u0))
    assert rep.passed
    assert rep.info["L"] == pytest.approx(2.0)
    assert rep.worst_margin < 0


def test_bv_bound_constant_run_margin():
    rep = check_bv_bound(constant_run())
    assert rep.passed
    assert rep.worst_margin == pytest.approx(-1.05 * 2.0 * 2 * 0.6)


# -- time Lipschitz -------------------------------------------------------------------


def test_time_lipschitz_constant_run():
    rep = check_time_lipschitz(constant_run())
    assert rep.passed and rep.info["max_ratio"] == 0.0


def test_time_lipschitz_linear_advection_rate():
    # translation at speed a moves L1 mass at rate a TV(u0) until the profile smears
    u0 = InitialData.square(1.0, 0.5).on_grid(-1, 1, 400)
    rec = run(SolverConfig(FluxModel.linear(1.0), None, t_final=0.2), u0, snapshot_times=[0.01, 0.02])
    rate = check_time_lipschitz(rec).details["ratio"][0]
    assert rate == pytest.approx(1.0 * tv(u0), rel=0.1)
    assert check_time_lipschitz(rec).passed


def test_time_lipschitz_needs_two_snapshots():
    rec = constant_run()
    rec.snapshots = rec.snapshots[:1]
    with pytest.raises(ValueError):
        check_time_lipschitz(rec)


# -- L1 contraction ------------------------------------------------------------------


def test_l1_contraction_identical_data():
    a = shock_run(exam(), dense=False)
    rep = check_l1_contraction(a, shock_run(exam(), dense=False))
    assert rep.passed and rep.info["initial_distance"] == 0.0


def test_l1_contraction_local_scheme_is_classical():
    # periodic grid: an outflow window would let the boundary inject f(1) - f(0.9)
    u0 = InitialData.riemann(1.0, 0.0).on_grid(-1, 1, 100)
    v0 = InitialData.riemann(0.9, 0.0).on_grid(-1, 1, 100)
    cfg = SolverConfig(BURGERS, None, t_final=1.0, dt=0.01)
    a, b = run(cfg, u0, dense=True), run(cfg, v0, dense=True)
    d = np.array([np.sum(np.abs(x.values - y.values)) * x.dx for x, y in zip(a.snapshots, b.snapshots)])
    assert np.all(np.diff(d) <= 1e-12)
    assert check_l1_contraction(a, b).passed


def test_l1_contraction_symmetric():
    u0 = InitialData.riemann(1.0, 0.0).on_grid(-1, 1, 80)
    v0 = InitialData.riemann(0.9, 0.0).on_grid(-1, 1, 80)
    cfg = SolverConfig(BURGERS, exam(), t_final=1.0, dt=0.005)
    a, b = run(cfg, u0, [0.25, 0.5, 0.75]), run(cfg, v0, [0.25, 0.5, 0.75])
    ab, ba = check_l1_contraction(a, b), check_l1_contraction(b, a)
    assert ab.passed and ab.worst_margin == ba.worst_margin


def test_l1_contraction_outflow_window_leaks_through_boundary():
    # the inflow difference grows ||u - v||_1 at rate f(1) - f(0.9) = 0.095 up to t = 1
    u0 = InitialData.riemann(1.0, 0.0).on_grid(-1, 1, 100, "outflow")
    v0 = InitialData.riemann(0.9, 0.0).on_grid(-1, 1, 100, "outflow")
    cfg = SolverConfig(BURGERS, None, t_final=1.0, dt=0.01)
    rep = check_l1_contraction(run(cfg, u0), run(cfg, v0))
    assert rep.details["dist"][-1] == pytest.approx(0.1 + 0.095, rel=1e-6)


def test_l1_contraction_rejects_mismatched_setups():
    u0 = InitialData.riemann(1.0, 0.0).on_grid(-1, 1, 80, "outflow")
    a = run(SolverConfig(BURGERS, exam(), t_final=0.5, dt=0.005), u0)
    b = run(SolverConfig(BURGERS, exam(0.25, 0.5), t_final=0.5, dt=0.005), u0)
    with pytest.raises(ValueError):
        check_l1_contraction(a, b)


# -- entropy -------------------------------------------------------------------------


def test_entropy_needs_dense_record():
    with pytest.raises(ValueError):
        entropy_production(shock_run(exam(), dense=False))


def test_entropy_constant_run_is_zero():
    rep = entropy_production(constant_run(dense=True))
    assert rep.passed
    assert np.max(np.abs(rep.details["max_residual"])) <= 1e-12
    assert np.max(np.abs(rep.details["min_residual"])) <= 1e-12


def test_entropy_level_below_data_is_conservation_residual():
    u0 = InitialData.smooth().on_grid(-1, 1, 60)
    rec = run(SolverConfig(FluxModel.linear(1.0), exam(), t_final=0.2), u0, dense=True)
    rep = entropy_production(rec, levels=[-1.0])
    assert abs(rep.worst_margin) <= 1e-12
    assert abs(rep.info["min_production"]) <= 1e-12


def test_entropy_dissipated_at_shock_without_memory():
    rep = entropy_production(shock_run(None))
    assert rep.passed
    assert rep.info["min_production"] < 0
    assert abs(rep.info["worst_x"]) <= 1.0


@settings(max_examples=10, deadline=None)
@given(st.floats(0.1, 1.0), st.floats(0.1, 0.9))
def test_entropy_inequality_with_memory(eps, alpha):
    rep = entropy_production(shock_run(exam(eps, alpha), cells=60, t_final=0.3))
    assert rep.passed
    assert rep.tolerance == pytest.approx(math.sqrt(2 / 60))


# -- singular limits -----------------------------------------------------------------


def test_viscosity_cauchy_logic():
    assert check_viscosity_cauchy([0.1, 0.05, 0.01], 1.0).passed
    assert not check_viscosity_cauchy([0.1, 0.12, 0.01], 1.0).passed
    assert not check_viscosity_cauchy([0.1, 0.05, 0.03], 1.0).passed
    assert check_viscosity_cauchy([0.0, 0.0], 0.0).passed


def test_relaxation_limit_constant_data():
    u0 = GridFunction(np.full(40, 0.5), -1.0, 0.05, "outflow")
    rep = check_relaxation_limit([0.4, 0.2], SolverConfig(BURGERS, None, t_final=0.5, memory_mode="full"), u0, 0.5)
    assert rep.passed
    assert np.all(rep.details["distance"] <= 1e-13)


def test_relaxation_limit_distances_decrease():
    u0 = InitialData.riemann(1.0, 0.0).on_grid(-1, 2, 200, "outflow")
    cfg = SolverConfig(BURGERS, None, t_final=1.0)
    rep = check_relaxation_limit([0.4, 0.2, 0.1], cfg, u0, 0.5, threshold=0.2)
    assert rep.passed
    assert rep.info["shock_exact"] == pytest.approx(0.25)


def test_relaxation_limit_needs_decreasing_eps():
    u0 = InitialData.riemann(1.0, 0.0).on_grid(-1, 2, 40, "outflow")
    with pytest.raises(ValueError):
        check_relaxation_limit([0.1, 0.2], SolverConfig(BURGERS, None), u0, 0.5)


def test_equivalent_shock_position_of_exact_jump():
    u = GridFunction(np.where(np.arange(10) < 4, 1.0, 0.0), 0.0, 0.1, "outflow")
    assert equivalent_shock_position(u, 1.0, 0.0) == pytest.approx(0.4)


def test_self_convergence_first_order_for_smooth_advection():
    finals = []
    for cells in (100, 200, 400):
        x = (np.arange(cells) + 0.5) / cells
        u0 = GridFunction(np.sin(2 * np.pi * x), 0.0, 1.0 / cells)
        finals.append(run_local(LocalConfig(FluxModel.linear(1.0), 1.0, 0.5, 0.5), u0)[0])
    rate = self_convergence_rate(*finals)
    assert not rate.degenerate
    assert rate.order == pytest.approx(1.0, abs=0.3)


def test_self_convergence_constant_data_sentinel():
    u = [GridFunction(np.full(n, 0.2), 0.0, 1.0 / n) for n in (10, 20, 40)]
    rate = self_convergence_rate(*u)
    assert rate.degenerate and math.isinf(rate.order)


def test_mass_drift_periodic_run():
    u0 = InitialData.smooth().on_grid(-1, 1, 80)
    assert mass_drift(run(SolverConfig(BURGERS, exam(), t_final=0.5, memory_mode=RECURSION), u0)) <= 1e-13
