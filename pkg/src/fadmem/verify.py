"""Report cards turning the a-priori estimates into checks over run records.

Each check returns a :class:`TheoremReport` whose ``worst_margin`` is the
largest signed defect ``lhs - bound`` over the recorded times; the check
passes iff that margin is at most the report's tolerance. All checks are
pure functions of the records.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .kernel_lab import ResolventTable, resolvent_exponential
from .memsolver import (
    RunRecord,
    SolverConfig,
    compare_nested,
    default_levels,
    entropy_residual,
    run,
)
from .model import (
    GridFunction,
    l1_dist,
    linf,
    second_difference_l1,
    total_variation_bound,
    tv,
)
from .reference import LocalConfig, run_local, shock_speed

SLACK = 1.05
MAX_PRINCIPLE_TOL = 1e-12

REPORT_NAMES = (
    "MaxPrinciple",
    "BVBound",
    "TimeLipschitz",
    "L1Contraction",
    "EntropyInequality",
    "ViscosityCauchy",
    "RelaxationLimit",
)


@dataclass
class TheoremReport:
    name: str
    passed: bool
    worst_margin: float
    tolerance: float = 0.0
    details: dict = field(default_factory=dict)
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in REPORT_NAMES:
            raise ValueError(f"unknown report {self.name!r}")

    def to_text(self) -> str:
        lines = [
            f"report={self.name}",
            f"passed={str(self.passed).lower()}",
            f"worst_margin={self.worst_margin:.17g}",
            f"tolerance={self.tolerance:.17g}",
        ]
        lines += [f"{k}={_fmt(v)}" for k, v in self.info.items()]
        return "\n".join(lines) + "\n"

    def write_csv(self, path, header: str | None = None):
        cols = list(self.details)
        with Path(path).open("w") as fh:
            if header:
                fh.write(f"# {header}\n")
            fh.write(",".join(cols) + "\n")
            if cols:
                for row in zip(*(np.asarray(self.details[c]) for c in cols)):
                    fh.write(",".join(_fmt(v) for v in row) + "\n")


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    if isinstance(v, (list, tuple, np.ndarray)):
        return ";".join(_fmt(x) for x in v)
    return str(v)


def _report(name, margins, tol, details, **info) -> TheoremReport:
    worst = float(np.max(margins)) if len(margins) else 0.0
    return TheoremReport(name, bool(worst <= tol), worst, tol, details, info)


def _step_series(rec: RunRecord, key: str, initial: float):
    """``(times, values)`` at every step including ``t = 0``."""
    t = np.concatenate([[0.0], rec.diagnostics["t"]])
    v = np.concatenate([[initial], rec.diagnostics[key]])
    return t, v


def _lipschitz_constant(rec: RunRecord, r: ResolventTable | None) -> float:
    r = r if r is not None else rec.config.resolvent
    return 1.0 if r is None else r.lipschitz_constant


def _memory_weighted(times: np.ndarray, values: np.ndarray, r_at) -> np.ndarray:
    """Trapezoid ``int_0^t r(t - s) v(s) ds`` at every sample time."""
    out = np.zeros(times.size)
    for n in range(1, times.size):
        rr = r_at(times[n] - times[: n + 1]) * values[: n + 1]
        out[n] = np.trapezoid(rr, times[: n + 1])
    return out


def _uniform_memory_weighted(values: np.ndarray, r_grid: np.ndarray, dt: float) -> np.ndarray:
    n = values.size
    full = np.convolve(r_grid[:n], values)[:n]
    full -= 0.5 * (r_grid[:n] * values[0] + r_grid[0] * values)
    full[0] = 0.0
    return dt * full


# ---------------------------------------------------------------------------
# a-priori estimates
# ---------------------------------------------------------------------------


def check_max_principle(rec: RunRecord, tol: float = MAX_PRINCIPLE_TOL) -> TheoremReport:
    """``||u(t)||_inf - ||u0||_inf`` over every step and snapshot."""
    base = linf(rec.u0)
    snap = np.array([linf(u) for u in rec.snapshots]) - base
    steps = rec.diagnostics["linf"] - base
    margins = np.concatenate([snap, steps])
    return _report("MaxPrinciple", margins, tol,
                   {"t": rec.times, "margin": snap}, linf_u0=base)


def check_bv_bound(rec: RunRecord, r: ResolventTable | None = None, slack: float = SLACK) -> TheoremReport:
    """Memory-weighted total variation against ``slack L M(u0)``.

    The left side ``TV(u^n) + int_0^{t_n} r(t_n - s) TV(u(s)) ds`` uses the
    per-step TV diagnostics, so the quadrature is on the solver time grid.
    """
    cfg = rec.config
    res = r if r is not None else cfg.resolvent
    t, tvs = _step_series(rec, "tv", tv(rec.u0))
    r_grid = np.zeros(t.size) if res is None else res.at(np.arange(t.size) * rec.dt)
    lhs = tvs + _uniform_memory_weighted(tvs, r_grid, rec.dt)
    L = _lipschitz_constant(rec, res)
    M = total_variation_bound(rec.u0)
    bound = slack * L * M
    return _report("BVBound", lhs - bound, 0.0, {"t": t, "lhs": lhs, "margin": lhs - bound},
                   L=L, M=M, slack=slack)


def time_lipschitz_constant(rec: RunRecord, slack: float = 1.1) -> float:
    """``slack (nu ||u0_xx||_1 + max|f'| ||u0_x||_1)``, the bound on ``||u_t(0)||_1``."""
    cfg = rec.config
    u0 = rec.u0
    w0 = cfg.nu * second_difference_l1(u0) + rec.speed * tv(u0)
    return slack * w0


def check_time_lipschitz(rec: RunRecord, C: float | None = None) -> TheoremReport:
    """Largest ``||u(t) - u(s)||_1 / |t - s|`` over consecutive snapshots.

    By the triangle inequality the maximum over all pairs is attained by a
    consecutive pair.
    """
    if len(rec.snapshots) < 2:
        raise ValueError("need at least two snapshots")
    if C is None:
        C = time_lipschitz_constant(rec)
    ratios = np.array([
        l1_dist(b, a) / (tb - ta)
        for a, b, ta, tb in zip(rec.snapshots[:-1], rec.snapshots[1:], rec.times[:-1], rec.times[1:])
    ])
    return _report("TimeLipschitz", ratios - C, 0.0,
                   {"t": rec.times[1:], "ratio": ratios}, C=C, max_ratio=float(ratios.max()))


# ---------------------------------------------------------------------------
# L1 contraction
# ---------------------------------------------------------------------------


def _same_setup(a: RunRecord, b: RunRecord):
    ca, cb = a.config, b.config
    same = (
        a.u0.same_grid(b.u0)
        and ca.flux == cb.flux
        and ca.nu == cb.nu
        and ca.numerical_flux == cb.numerical_flux
        and math.isclose(a.dt, b.dt, rel_tol=1e-12)
        and np.array_equal(a.times, b.times)
        and ca.resolvent_at(a.times).tolist() == cb.resolvent_at(b.times).tolist()
    )
    if not same:
        raise ValueError("records differ in grid, flux, viscosity, kernel, step or snapshot times")


def check_l1_contraction(rec_a: RunRecord, rec_b: RunRecord, r: ResolventTable | None = None,
                         slack: float = SLACK) -> TheoremReport:
    """``||u - v||_1(t) + int_0^t r(t - s) ||u - v||_1(s) ds`` against ``slack L ||u0 - v0||_1``."""
    _same_setup(rec_a, rec_b)
    res = r if r is not None else rec_a.config.resolvent
    r_at = (lambda s: np.zeros_like(s)) if res is None else res.at
    d = np.array([l1_dist(u, v) for u, v in zip(rec_a.snapshots, rec_b.snapshots)])
    lhs = d + _memory_weighted(rec_a.times, d, r_at)
    L = _lipschitz_constant(rec_a, res)
    bound = slack * L * d[0]
    return _report("L1Contraction", lhs - bound, 0.0, {"t": rec_a.times, "dist": d, "lhs": lhs},
                   L=L, initial_distance=float(d[0]), slack=slack)


# ---------------------------------------------------------------------------
# entropy inequality
# ---------------------------------------------------------------------------


def entropy_production(rec: RunRecord, levels=None, C: float = 1.0, sign_at: str = "old") -> TheoremReport:
    """Largest per-cell Kruzkov residual against ``C sqrt(dx)``.

    Needs a dense record (every step plus the memory forcing). The details
    table holds, per step, the largest and smallest residual over cells and
    levels; ``info`` names the offending ``(t, x, c)``.
    """
    if not rec.dense:
        raise ValueError("entropy check needs a dense record (run with dense=True)")
    cfg = rec.config
    levels = default_levels(rec.u0) if levels is None else np.asarray(levels, dtype=float)
    r0 = cfg.r0
    dx = rec.u0.dx
    x = rec.u0.centers
    emax, emin = np.empty(rec.steps), np.empty(rec.steps)
    worst = (-math.inf, 0.0, 0.0, 0.0)
    best = (math.inf, 0.0, 0.0, 0.0)
    for n in range(rec.steps):
        uo, un = rec.snapshots[n].values, rec.snapshots[n + 1].values
        hi, lo = -math.inf, math.inf
        for c in levels:
            e = entropy_residual(uo, un, rec.sources[n], r0, rec.dt, dx, cfg, rec.speed, c,
                                 rec.u0.boundary, sign_at)
            i = int(np.argmax(e))
            if e[i] > hi:
                hi = float(e[i])
            if e[i] > worst[0]:
                worst = (float(e[i]), rec.times[n + 1], float(x[i]), float(c))
            j = int(np.argmin(e))
            lo = min(lo, float(e[j]))
            if e[j] < best[0]:
                best = (float(e[j]), rec.times[n + 1], float(x[j]), float(c))
        emax[n], emin[n] = hi, lo
    tol = C * math.sqrt(dx)
    return _report("EntropyInequality", emax, tol,
                   {"t": rec.times[1:], "max_residual": emax, "min_residual": emin},
                   worst_t=worst[1], worst_x=worst[2], worst_c=worst[3],
                   min_production=best[0], min_t=best[1], min_x=best[2], min_c=best[3],
                   levels=list(levels), sign_at=sign_at)


# ---------------------------------------------------------------------------
# singular limits
# ---------------------------------------------------------------------------


def check_viscosity_cauchy(gaps, scale: float, rel: float = 0.02) -> TheoremReport:
    """Successive L1 gaps of a viscosity sweep: strictly decreasing, last one small.

    Passes when every gap is below its predecessor and the final gap is at
    most ``rel * scale`` (``scale`` is typically ``||u0||_1``). Zero gaps
    (constant data) pass.
    """
    gaps = np.asarray(gaps, dtype=float)
    incr = np.diff(gaps)
    all_zero = bool(np.all(gaps == 0))
    monotone = all_zero or bool(np.all(incr < 0))
    final_margin = float(gaps[-1] - rel * scale)
    margin = max(final_margin, 0.0 if monotone else float(np.max(incr)) + 1e-300)
    return TheoremReport("ViscosityCauchy", bool(monotone and final_margin <= 0), margin, 0.0,
                         {"level": np.arange(gaps.size), "gap": gaps},
                         {"monotone": monotone, "final_gap": float(gaps[-1]), "threshold": rel * scale})


def equivalent_shock_position(u: GridFunction, u_left: float, u_right: float) -> float:
    """Location of the single jump carrying the same mass as ``u``."""
    return u.x_left + float(np.sum(u.values - u_right) * u.dx) / (u_left - u_right)


def check_relaxation_limit(eps_list, cfg: SolverConfig, u0: GridFunction, alpha: float,
                           threshold: float = 0.05, resolvent_dt: float = 1e-3) -> TheoremReport:
    """Distance of the memory solution to the local limit as ``eps`` shrinks.

    Each ``eps`` uses the exponential kernel with the given ``alpha``. Passes
    when the distances decrease strictly and the last one is at most
    ``threshold``. For jump data the equivalent shock position of the
    smallest ``eps`` and its error against Rankine-Hugoniot are reported.
    """
    eps_list = [float(e) for e in eps_list]
    if any(b >= a for a, b in zip(eps_list[:-1], eps_list[1:])):
        raise ValueError("eps_list must be strictly decreasing")
    local, _ = run_local(LocalConfig(cfg.flux, alpha, cfg.cfl, cfg.t_final, cfg.numerical_flux), u0)
    dists, finals = [], []
    for eps in eps_list:
        res = resolvent_exponential(eps, alpha, resolvent_dt, 2)
        rec = run(replace(cfg, resolvent=res, kernel=None), u0)
        finals.append(rec.final)
        dists.append(l1_dist(rec.final, local))
    dists = np.array(dists)
    is_constant = bool(np.all(u0.values == u0.values[0]))
    monotone = is_constant or bool(np.all(np.diff(dists) < 0))
    info = {"monotone": monotone, "threshold": threshold, "alpha": alpha}
    ul, ur = float(u0.values[0]), float(u0.values[-1])
    if not is_constant and ul != ur and u0.boundary == "outflow":
        xs = equivalent_shock_position(finals[-1], ul, ur)
        exact = shock_speed(ul, ur, alpha, cfg.flux) * cfg.t_final
        info.update(shock_position=xs, shock_exact=exact, shock_error=abs(xs - exact), dx=u0.dx)
    margin = max(float(dists[-1] - threshold), 0.0 if monotone else float(np.max(np.diff(dists))))
    return TheoremReport("RelaxationLimit", bool(monotone and dists[-1] <= threshold), margin, 0.0,
                         {"eps": np.array(eps_list), "distance": dists}, info)


@dataclass(frozen=True)
class ConvergenceRate:
    order: float
    gaps: tuple[float, float]
    degenerate: bool


def self_convergence_rate(coarse: GridFunction, medium: GridFunction, fine: GridFunction) -> ConvergenceRate:
    """Observed order ``log2(d1/d2)`` from three nested solutions.

    ``d1 = |u_dx - u_dx/2|``, ``d2 = |u_dx/2 - u_dx/4|`` after block
    averaging. Zero gaps give ``order = inf`` with ``degenerate = True``.
    """
    d1 = compare_nested(coarse, medium)
    d2 = compare_nested(medium, fine)
    if d1 == 0 or d2 == 0:
        return ConvergenceRate(math.inf, (d1, d2), True)
    return ConvergenceRate(math.log2(d1 / d2), (d1, d2), False)


def mass_drift(rec: RunRecord) -> float:
    """Largest relative mass change over the run."""
    m0 = float(np.sum(rec.u0.values) * rec.u0.dx)
    scale = abs(m0) if m0 != 0 else float(np.sum(np.abs(rec.u0.values)) * rec.u0.dx) or 1.0
    return float(np.max(np.abs(rec.diagnostics["mass"] - m0)) / scale)
