"""Explicit finite-volume solver for the viscous resolvent-form equation.

The memory equation is marched in its damped form

    u_t + f(u)_x + r(0) u = r(t) u0 - int_0^t r'(t - s) u(s) ds + nu u_xx

with a monotone two-point flux, explicit diffusion and explicit damping.
The history integral is a product rule: over each past step the exact
increment of ``r`` multiplies the mean of the two end values of ``u``,

    Q^n = sum_{m<n} (r(t_n - t_m) - r(t_n - t_{m+1})) (u^m + u^{m+1}) / 2.

This telescopes exactly on constant histories (constant states are fixed
points) and, for a nonincreasing nonnegative ``r``, writes the update as a
convex combination of past values, which gives the discrete maximum
principle. For the exponential resolvent the sum obeys a one-step
recursion, so the O(N_t^2) history sum collapses to O(N_t).

``run_divergence_form`` marches the original kernel form directly in
conservation form and is used as a cross-check.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .kernel_lab import KernelSpec, ResolventTable, _check_exponential
from .model import (
    PERIODIC,
    FluxModel,
    GridFunction,
    InitialData,
    l1_dist,
    linf,
    mass,
    pad,
    restrict,
    tv,
)

log = logging.getLogger(__name__)

FULL_HISTORY = "full"
RECURSION = "recursion"
LAX_FRIEDRICHS = "lax_friedrichs"
ENGQUIST_OSHER = "engquist_osher"
DIAG_COLUMNS = ("t", "linf", "tv", "mass", "dl1", "entropy_max")
MAX_WORK = 2e10  # cells * steps (* history length for full history)


class CFLViolation(ValueError):
    pass


class SolverBlowup(RuntimeError):
    pass


class ResourceGuard(RuntimeError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    flux: FluxModel
    resolvent: ResolventTable | None = None
    nu: float = 0.0
    cfl: float = 0.5
    t_final: float = 1.0
    memory_mode: str = FULL_HISTORY
    numerical_flux: str = LAX_FRIEDRICHS
    kernel: KernelSpec | None = None
    dt: float | None = None

    def __post_init__(self):
        if self.nu < 0:
            raise ValueError(f"nu must be nonnegative, got {self.nu}")
        if not 0 < self.cfl <= 1:
            raise ValueError(f"cfl must lie in (0, 1], got {self.cfl}")
        if not self.t_final > 0:
            raise ValueError(f"t_final must be positive, got {self.t_final}")
        if self.memory_mode not in (FULL_HISTORY, RECURSION):
            raise ValueError(f"unknown memory mode {self.memory_mode!r}")
        if self.numerical_flux not in (LAX_FRIEDRICHS, ENGQUIST_OSHER):
            raise ValueError(f"unknown numerical flux {self.numerical_flux!r}")
        if self.memory_mode == RECURSION:
            fam = None if self.resolvent is None else self.resolvent.family
            if fam is None or fam[0] != "exponential":
                raise ValueError("recursion mode needs the closed-form exponential resolvent")

    @property
    def r0(self) -> float:
        return 0.0 if self.resolvent is None else self.resolvent.r0

    @property
    def exponential_params(self) -> tuple[float, float] | None:
        if self.resolvent is not None and self.resolvent.family is not None:
            return self.resolvent.family[1], self.resolvent.family[2]
        return None

    def resolvent_at(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.resolvent is None:
            return np.zeros_like(t)
        return self.resolvent.at(t)

    def kernel_spec(self) -> KernelSpec:
        if self.kernel is not None:
            return self.kernel
        if self.resolvent is None or self.resolvent.is_zero:
            return KernelSpec.zero()
        fam = self.resolvent.family
        if fam is not None and fam[0] == "exponential":
            return KernelSpec.exponential(fam[1], fam[2])
        raise ValueError("divergence form needs an explicit kernel for a tabulated resolvent")


# ---------------------------------------------------------------------------
# numerical fluxes
# ---------------------------------------------------------------------------


def numerical_flux(flux: FluxModel, ul, ur, speed: float, kind: str = LAX_FRIEDRICHS):
    """Monotone two-point flux at interfaces between ``ul`` and ``ur``.

    Lax-Friedrichs uses a global dissipation speed ``speed >= max |f'|``.
    """
    if kind == LAX_FRIEDRICHS:
        return 0.5 * (flux.f(ul) + flux.f(ur)) - 0.5 * speed * (ur - ul)
    fp, _ = flux.split(ul)
    _, fm = flux.split(ur)
    return fp + fm


def interface_fluxes(flux: FluxModel, values: np.ndarray, boundary: str, speed: float, kind: str):
    """Fluxes at all ``N + 1`` interfaces (ghost cells from ``boundary``)."""
    p = pad(values, boundary)
    return numerical_flux(flux, p[:-1], p[1:], speed, kind)


def laplacian(values: np.ndarray, boundary: str) -> np.ndarray:
    p = pad(values, boundary)
    return p[2:] - 2.0 * p[1:-1] + p[:-2]


def data_speed(flux: FluxModel, u: GridFunction) -> float:
    return flux.max_speed(float(u.values.min()), float(u.values.max()))


def cfl_timestep(cfg: SolverConfig, u: GridFunction) -> float:
    """Stable explicit step for transport, diffusion and damping together.

    ``dt = cfl / (max(a/dx, 2 nu/dx^2) + r(0))``, additionally capped so that
    ``dt (a/dx + 2 nu/dx^2 + r(0)) <= 1``, which keeps every coefficient of
    the update nonnegative.
    """
    a = data_speed(cfg.flux, u)
    adv = a / u.dx
    dif = 2.0 * cfg.nu / u.dx**2
    damp = cfg.r0
    if adv == 0 and dif == 0 and damp == 0:
        return cfg.cfl * u.dx
    dt = cfg.cfl / (max(adv, dif) + damp)
    return min(dt, 1.0 / (adv + dif + damp))


def _check_cfl(dt: float, speed: float, dx: float, nu: float, r0: float):
    load = dt * (speed / dx + 2.0 * nu / dx**2 + r0)
    if load > 1.0 + 1e-12:
        raise CFLViolation(f"dt={dt:g} too large: dt (a/dx + 2nu/dx^2 + r0) = {load:.6g} > 1")


# ---------------------------------------------------------------------------
# memory state
# ---------------------------------------------------------------------------


class _Buffer:
    """Append-only row store shared by successive states of one run."""

    def __init__(self, first: np.ndarray, capacity: int = 64):
        self.data = np.empty((max(capacity, 1), first.size))
        self.data[0] = first
        self.filled = 1

    def append_after(self, n: int, row: np.ndarray) -> _Buffer:
        buf = self
        if self.filled != n + 1:
            # stepping an older state again: branch off a private copy
            buf = _Buffer(self.data[0])
            buf.data = self.data[: n + 1].copy()
            buf.filled = n + 1
        if buf.filled == buf.data.shape[0]:
            grown = np.empty((2 * buf.data.shape[0], buf.data.shape[1]))
            grown[: buf.filled] = buf.data[: buf.filled]
            buf.data = grown
        buf.data[buf.filled] = row
        buf.filled += 1
        return buf


@dataclass(frozen=True, eq=False)
class MemoryState:
    """Solution, time index and memory register at ``t_n = n dt``.

    In full-history mode ``history`` holds ``u^0..u^n``; in recursion mode
    ``accumulator`` holds ``Q^n``, the history integral of ``r' u``.
    """

    u: GridFunction
    n: int
    dt: float
    u0: GridFunction
    mode: str = FULL_HISTORY
    accumulator: np.ndarray | None = None
    _buffer: _Buffer | None = field(default=None, repr=False)

    @classmethod
    def initial(cls, u0: GridFunction, dt: float, mode: str = FULL_HISTORY) -> MemoryState:
        if mode == FULL_HISTORY:
            return cls(u0, 0, dt, u0, mode, None, _Buffer(u0.values))
        return cls(u0, 0, dt, u0, mode, np.zeros(u0.n), None)

    @property
    def t(self) -> float:
        return self.n * self.dt

    @property
    def history(self) -> np.ndarray | None:
        if self._buffer is None:
            return None
        return self._buffer.data[: self.n + 1]


def history_weights(r_grid: np.ndarray, n: int) -> np.ndarray:
    """Coefficients ``c_m`` with ``Q^n = sum_m c_m u^m`` (m = 0..n)."""
    c = np.zeros(n + 1)
    if n == 0:
        return c
    d = r_grid[n:0:-1] - r_grid[n - 1 :: -1]
    c[:n] += 0.5 * d
    c[1:] += 0.5 * d
    return c


def _history_integral(state: MemoryState, r_grid: np.ndarray) -> np.ndarray:
    if state.mode == RECURSION:
        return state.accumulator
    return history_weights(r_grid, state.n) @ state.history


def memory_term(state: MemoryState, r: ResolventTable | None) -> GridFunction:
    """``g^n = r(t_n) u0 - Q^n``, the memory forcing of the damped equation."""
    if r is None:
        return state.u.with_values(np.zeros(state.u.n))
    times = np.arange(state.n + 1) * state.dt
    if r.family is None and times[-1] > r.horizon * (1 + 1e-12) + 1e-15:
        raise ValueError(f"resolvent table covers [0, {r.horizon}], state is at t={times[-1]}")
    r_grid = r.at(times)
    g = r_grid[state.n] * state.u0.values - _history_integral(state, r_grid)
    return state.u.with_values(g)


def exponential_memory_update(accumulator, u_old, u_new, eps: float, alpha: float, dt: float) -> np.ndarray:
    """Advance ``Q`` one step for ``r(t) = (1-alpha)/eps exp(-alpha t/eps)``.

    ``Q^{n+1} = exp(-alpha dt/eps) Q^n + (r(dt) - r(0)) (u^n + u^{n+1}) / 2``,
    which reproduces the full history sum exactly.
    """
    _check_exponential(eps, alpha)
    r0 = (1.0 - alpha) / eps
    decay = math.exp(-alpha * dt / eps)
    acc = np.asarray(getattr(accumulator, "values", accumulator), dtype=float)
    uo = np.asarray(getattr(u_old, "values", u_old), dtype=float)
    un = np.asarray(getattr(u_new, "values", u_new), dtype=float)
    return decay * acc + (r0 * decay - r0) * 0.5 * (uo + un)


# ---------------------------------------------------------------------------
# stepping
# ---------------------------------------------------------------------------


def _explicit_update(u: np.ndarray, g: np.ndarray, cfg: SolverConfig, r0: float, speed: float,
                     dt: float, dx: float, boundary: str) -> np.ndarray:
    fl = interface_fluxes(cfg.flux, u, boundary, speed, cfg.numerical_flux)
    new = u - (dt / dx) * (fl[1:] - fl[:-1]) - (dt * r0) * u + dt * g
    if cfg.nu > 0:
        new += (cfg.nu * dt / dx**2) * laplacian(u, boundary)
    return new


def _advance(state: MemoryState, cfg: SolverConfig, r_grid: np.ndarray, speed: float):
    """One explicit step; returns ``(new_state, g^n)``."""
    u = state.u
    g = r_grid[state.n] * state.u0.values - _history_integral(state, r_grid)
    new = _explicit_update(u.values, g, cfg, r_grid[0], speed, state.dt, u.dx, u.boundary)
    if not np.all(np.isfinite(new)):
        raise SolverBlowup(f"non-finite values after step {state.n + 1} (t={state.t + state.dt:g})")
    u_new = u.with_values(new)
    if state.mode == RECURSION:
        acc = _recursion_update(state.accumulator, u.values, new, r_grid)
        nxt = replace(state, u=u_new, n=state.n + 1, accumulator=acc)
    else:
        buf = state._buffer.append_after(state.n, new)
        nxt = replace(state, u=u_new, n=state.n + 1, _buffer=buf)
    return nxt, g


def _recursion_update(acc, u_old, u_new, r_grid):
    # r_grid[1] / r_grid[0] is exp(-alpha dt / eps) for the exponential family
    return acc * (r_grid[1] / r_grid[0]) + (r_grid[1] - r_grid[0]) * 0.5 * (u_old + u_new)


def viscous_step(state: MemoryState, cfg: SolverConfig) -> MemoryState:
    """One step of the damped viscous memory equation."""
    speed = data_speed(cfg.flux, state.u0)
    speed = max(speed, data_speed(cfg.flux, state.u))
    _check_cfl(state.dt, speed, state.u.dx, cfg.nu, cfg.r0)
    r_grid = cfg.resolvent_at(np.arange(state.n + 2) * state.dt)
    return _advance(state, cfg, r_grid, speed)[0]


# ---------------------------------------------------------------------------
# runs
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class RunRecord:
    """Snapshots plus per-step diagnostics of one run.

    ``diagnostics`` maps each name in ``DIAG_COLUMNS`` to an array with one
    entry per step. ``sources`` (dense runs only) holds the memory forcing
    ``g^n`` used for the step from ``t_n`` to ``t_{n+1}``.
    """

    config: SolverConfig
    u0: GridFunction
    dt: float
    speed: float
    times: np.ndarray
    snapshots: list[GridFunction]
    diagnostics: dict[str, np.ndarray]
    sources: list[np.ndarray] | None = None
    form: str = "resolvent"

    @property
    def steps(self) -> int:
        return len(self.diagnostics["t"])

    @property
    def final(self) -> GridFunction:
        return self.snapshots[-1]

    @property
    def dense(self) -> bool:
        return self.sources is not None and len(self.snapshots) == self.steps + 1


def _step_count(cfg: SolverConfig, u0: GridFunction) -> tuple[int, float]:
    dt_max = cfl_timestep(cfg, u0)
    if cfg.dt is not None:
        speed = data_speed(cfg.flux, u0)
        _check_cfl(cfg.dt, speed, u0.dx, cfg.nu, cfg.r0)
        dt_max = cfg.dt
    steps = max(1, int(math.ceil(cfg.t_final / dt_max - 1e-9)))
    return steps, cfg.t_final / steps


def _snapshot_steps(times, steps: int, dt: float) -> set[int]:
    if times is None:
        return {steps}
    return {min(steps, max(0, int(round(t / dt)))) for t in times} | {steps}


def _work_guard(cells: int, steps: int, mode: str, limit: float = MAX_WORK):
    work = cells * steps * (steps / 2 if mode == FULL_HISTORY else 1)
    if work > limit:
        raise ResourceGuard(f"run needs ~{work:.3g} cell-updates, limit is {limit:.3g}")


def run(cfg: SolverConfig, u0: GridFunction, snapshot_times=None, dense: bool = False,
        entropy_levels=None) -> RunRecord:
    """March the resolvent form to ``t_final`` with a fixed CFL step.

    Snapshots are taken at the step nearest each requested time (and always
    at ``t = 0`` and ``t_final``); ``dense=True`` keeps every step and the
    memory forcing needed by the entropy check.
    """
    steps, dt = _step_count(cfg, u0)
    _work_guard(u0.n, steps, cfg.memory_mode)
    if cfg.resolvent is not None and cfg.resolvent.family is None and cfg.t_final > cfg.resolvent.horizon * (1 + 1e-12):
        raise ValueError(f"resolvent table covers [0, {cfg.resolvent.horizon}], run needs t_final={cfg.t_final}")
    speed = data_speed(cfg.flux, u0)
    _check_cfl(dt, speed, u0.dx, cfg.nu, cfg.r0)
    r_grid = cfg.resolvent_at(np.arange(steps + 2) * dt)
    keep = _snapshot_steps(snapshot_times, steps, dt)

    dx, bnd = u0.dx, u0.boundary
    u0v = u0.values
    u = u0v.copy()
    hist = np.empty((steps + 1, u0.n)) if cfg.memory_mode == FULL_HISTORY else None
    acc = np.zeros(u0.n)
    if hist is not None:
        hist[0] = u
    times, snaps = [0.0], [u0]
    sources = [] if dense else None
    diag = {name: np.empty(steps) for name in DIAG_COLUMNS}
    diag["entropy_max"][:] = np.nan
    levels = None if entropy_levels is None else np.asarray(entropy_levels, dtype=float)
    wrap = bnd == PERIODIC

    for n in range(steps):
        if hist is not None:
            q = history_weights(r_grid, n) @ hist[: n + 1]
        else:
            q = acc
        g = r_grid[n] * u0v - q
        new = _explicit_update(u, g, cfg, r_grid[0], speed, dt, dx, bnd)
        if not np.isfinite(new.sum()):
            raise SolverBlowup(f"non-finite values after step {n + 1} (t={(n + 1) * dt:g})")
        if hist is not None:
            hist[n + 1] = new
        else:
            acc = _recursion_update(acc, u, new, r_grid)
        d = np.diff(new)
        diag["t"][n] = (n + 1) * dt
        diag["linf"][n] = np.abs(new).max()
        diag["tv"][n] = np.abs(d).sum() + (abs(new[0] - new[-1]) if wrap else 0.0)
        diag["mass"][n] = dx * new.sum()
        diag["dl1"][n] = dx * np.abs(new - u).sum()
        if levels is not None:
            diag["entropy_max"][n] = max(
                float(np.max(entropy_residual(u, new, g, r_grid[0], dt, dx, cfg, speed, c, bnd)))
                for c in levels
            )
        if dense or (n + 1) in keep:
            times.append((n + 1) * dt)
            snaps.append(u0.with_values(new))
        if dense:
            sources.append(g)
        u = new
    return RunRecord(cfg, u0, dt, speed, np.array(times), snaps, diag, sources)


def entropy_residual(u_old, u_new, g, r0, dt, dx, cfg: SolverConfig, speed, c, boundary,
                     sign_at: str = "old") -> np.ndarray:
    """Per-cell discrete Kruzkov residual at level ``c``.

    ``E = (|u^{n+1}-c| - |u^n-c|)/dt + (Q_{i+1/2} - Q_{i-1/2})/dx + s (r0 u^n - g^n)``
    with the numerical entropy flux ``Q = F(u v c, .) - F(u ^ c, .)`` minus its
    viscous part, and ``s = sign(u - c)`` taken at the old level (default)
    or the new one.
    """
    uo = np.asarray(u_old, dtype=float)
    un = np.asarray(u_new, dtype=float)
    p = pad(uo, boundary)
    hi, lo = np.maximum(p, c), np.minimum(p, c)
    q = (numerical_flux(cfg.flux, hi[:-1], hi[1:], speed, cfg.numerical_flux)
         - numerical_flux(cfg.flux, lo[:-1], lo[1:], speed, cfg.numerical_flux))
    if cfg.nu > 0:
        e = np.abs(p - c)
        q = q - cfg.nu * (e[1:] - e[:-1]) / dx
    s = np.sign((un if sign_at == "new" else uo) - c)
    return (np.abs(un - c) - np.abs(uo - c)) / dt + (q[1:] - q[:-1]) / dx + s * (r0 * uo - g)


def run_divergence_form(cfg: SolverConfig, u0: GridFunction, snapshot_times=None) -> RunRecord:
    """March ``u_t + (f(u) + k*f(u))_x = nu (u + k*u)_xx`` in conservation form.

    The memory flux reuses the stored interface fluxes ``F^m`` and is
    integrated by the trapezoid rule, so every update is a flux difference
    and mass is conserved to rounding on periodic grids.
    """
    kernel = cfg.kernel_spec()
    steps, dt = _step_count(cfg, u0)
    _work_guard(u0.n, steps, FULL_HISTORY)
    speed = data_speed(cfg.flux, u0)
    kv = kernel.sample(dt, steps + 1)
    keep = _snapshot_steps(snapshot_times, steps, dt)
    dx, bnd = u0.dx, u0.boundary

    fl_hist = np.empty((steps + 1, u0.n + 1))
    u_hist = np.empty((steps + 1, u0.n))
    u = u0.values.copy()
    u_hist[0] = u
    times, snaps = [0.0], [u0]
    diag = {name: np.empty(steps) for name in DIAG_COLUMNS}
    diag["entropy_max"][:] = np.nan
    for n in range(steps):
        fl_hist[n] = interface_fluxes(cfg.flux, u, bnd, speed, cfg.numerical_flux)
        if n > 0:
            w = dt * kv[n::-1].copy()
            w[0] *= 0.5
            w[-1] *= 0.5
            mem_flux = w @ fl_hist[: n + 1]
            mem_u = w @ u_hist[: n + 1]
        else:
            mem_flux = 0.0
            mem_u = 0.0
        total = fl_hist[n] + mem_flux
        new = u - (dt / dx) * (total[1:] - total[:-1])
        if cfg.nu > 0:
            new = new + (cfg.nu * dt / dx**2) * laplacian(u + mem_u, bnd)
        if not np.all(np.isfinite(new)):
            raise SolverBlowup(f"non-finite values after step {n + 1}")
        gf = u0.with_values(new)
        diag["t"][n] = (n + 1) * dt
        diag["linf"][n] = linf(gf)
        diag["tv"][n] = tv(gf)
        diag["mass"][n] = mass(gf)
        diag["dl1"][n] = dx * float(np.sum(np.abs(new - u)))
        u = new
        u_hist[n + 1] = u
        if (n + 1) in keep:
            times.append((n + 1) * dt)
            snaps.append(gf)
    return RunRecord(cfg, u0, dt, speed, np.array(times), snaps, diag, None, form="divergence")


# ---------------------------------------------------------------------------
# viscosity sweep
# ---------------------------------------------------------------------------


@dataclass
class SweepResult:
    nus: list[float]
    records: list[RunRecord]
    gaps: list[float]

    def pairs(self):
        return list(zip(self.nus, self.records))


def _cells_for(nu: float, cells: int, width: float) -> int:
    while nu > 0 and width / cells > nu / 2 * (1 + 1e-12):
        cells *= 2
    return cells


def _sweep_job(args):
    cfg, u0, x_min, x_max, cells, boundary = args
    grid_u0 = u0.on_grid(x_min, x_max, cells, boundary)
    return run(cfg, grid_u0)


def sweep_viscosity(cfg: SolverConfig, u0: InitialData, grid: tuple, nu0: float, levels: int,
                    jobs: int = 1, max_work: float = MAX_WORK) -> SweepResult:
    """Runs with ``nu_k = nu0 2^-k`` on nested grids resolving each ``nu_k``.

    ``grid`` is ``(x_min, x_max, cells, boundary)``; each level doubles the
    base grid until ``dx <= nu_k / 2``. Successive results are compared on
    the coarser of the two grids after block averaging.
    """
    if levels < 2:
        raise ValueError("a viscosity sweep needs at least 2 levels")
    if not nu0 > 0:
        raise ValueError("nu0 must be positive")
    x_min, x_max, cells, boundary = grid
    width = x_max - x_min
    jobs_args, work = [], 0.0
    nus = [nu0 * 2.0**-k for k in range(levels)]
    for nu in nus:
        n_cells = _cells_for(nu, cells, width)
        level_cfg = replace(cfg, nu=nu)
        probe = u0.on_grid(x_min, x_max, n_cells, boundary)
        steps, _ = _step_count(level_cfg, probe)
        work += n_cells * steps * (steps / 2 if cfg.memory_mode == FULL_HISTORY else 1)
        jobs_args.append((level_cfg, u0, x_min, x_max, n_cells, boundary))
    if work > max_work:
        raise ResourceGuard(f"sweep needs ~{work:.3g} cell-updates, limit is {max_work:.3g}")
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_sweep_job, jobs_args))
    else:
        records = [_sweep_job(a) for a in jobs_args]
    gaps = [compare_nested(a.final, b.final) for a, b in zip(records[:-1], records[1:])]
    return SweepResult(nus, records, gaps)


def compare_nested(coarse: GridFunction, fine: GridFunction) -> float:
    """L1 distance after averaging the finer function onto the coarser grid."""
    if fine.n < coarse.n:
        coarse, fine = fine, coarse
    factor = fine.n // coarse.n
    return l1_dist(coarse, restrict(fine, factor) if factor > 1 else fine)


def default_levels(u0: GridFunction, count: int = 9) -> np.ndarray:
    """Kruzkov levels spanning ``[min u0 - 0.1, max u0 + 0.1]``."""
    return np.linspace(float(u0.values.min()) - 0.1, float(u0.values.max()) + 0.1, count)


__all__ = [
    "CFLViolation",
    "MemoryState",
    "ResourceGuard",
    "RunRecord",
    "SolverBlowup",
    "SolverConfig",
    "SweepResult",
    "cfl_timestep",
    "compare_nested",
    "entropy_residual",
    "exponential_memory_update",
    "memory_term",
    "numerical_flux",
    "run",
    "run_divergence_form",
    "sweep_viscosity",
    "viscous_step",
]
