"""Reference solvers for the two singular limits.

* the local law ``u_t + alpha f(u)_x = 0`` reached as the memory relaxes,
* the 2x2 relaxation system equivalent to the exponential kernel,

      u_t + (f(u) - v)_x = 0,   v_t = ((1 - alpha) f(u) - v) / eps,

* the exact Riemann solution of the scaled Burgers equation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .kernel_lab import SubcharacteristicError
from .memsolver import LAX_FRIEDRICHS, CFLViolation, data_speed, interface_fluxes
from .model import FluxModel, GridFunction, l1_dist, pad


@dataclass(frozen=True)
class LocalConfig:
    flux: FluxModel
    alpha: float = 1.0
    cfl: float = 0.5
    t_final: float = 1.0
    numerical_flux: str = LAX_FRIEDRICHS

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")

    def scaled_flux(self) -> FluxModel:
        return _ScaledFlux(self.flux, self.alpha)


class _ScaledFlux:
    """``alpha f`` with the same interface as :class:`FluxModel`."""

    def __init__(self, base: FluxModel, alpha: float):
        self.base, self.alpha = base, alpha

    def f(self, u):
        return self.alpha * self.base.f(u)

    def df(self, u):
        return self.alpha * self.base.df(u)

    def split(self, u):
        fp, fm = self.base.split(u)
        return self.alpha * fp, self.alpha * fm

    def max_speed(self, lo, hi):
        return self.alpha * self.base.max_speed(lo, hi)


def local_step(u: GridFunction, cfg: LocalConfig, dt: float, speed: float | None = None) -> GridFunction:
    """One monotone conservative step of ``u_t + alpha f(u)_x = 0``."""
    flux = cfg.scaled_flux()
    if speed is None:
        speed = flux.max_speed(float(u.values.min()), float(u.values.max()))
    if dt * speed / u.dx > 1.0 + 1e-12:
        raise CFLViolation(f"dt={dt:g} violates alpha a dt/dx <= 1")
    fl = interface_fluxes(flux, u.values, u.boundary, speed, cfg.numerical_flux)
    return u.with_values(u.values - (dt / u.dx) * (fl[1:] - fl[:-1]))


def run_local(cfg: LocalConfig, u0: GridFunction, dt: float | None = None):
    """March the local law to ``t_final``; returns ``(final, dt)``."""
    flux = cfg.scaled_flux()
    speed = flux.max_speed(float(u0.values.min()), float(u0.values.max()))
    if dt is None:
        dt = cfg.cfl * u0.dx / speed if speed > 0 else cfg.cfl * u0.dx
    steps = max(1, int(math.ceil(cfg.t_final / dt - 1e-9)))
    dt = cfg.t_final / steps
    u = u0
    for _ in range(steps):
        u = local_step(u, cfg, dt, speed)
    return u, dt


def burgers_riemann_exact(u_left: float, u_right: float, alpha: float, t: float, x) -> np.ndarray:
    """Entropy solution of ``u_t + alpha (u^2/2)_x = 0`` with a jump at ``x = 0``."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    x = np.asarray(x, dtype=float)
    if t == 0 or u_left == u_right:
        return np.where(x < 0, u_left, u_right).astype(float)
    if u_left > u_right:
        sigma = alpha * 0.5 * (u_left + u_right)
        return np.where(x < sigma * t, u_left, u_right).astype(float)
    return np.clip(x / (alpha * t), u_left, u_right)


def shock_speed(u_left: float, u_right: float, alpha: float, flux: FluxModel | None = None) -> float:
    """Rankine-Hugoniot speed of the scaled law."""
    flux = flux or FluxModel.burgers()
    return float(alpha * (flux.f(u_left) - flux.f(u_right)) / (u_left - u_right))


# ---------------------------------------------------------------------------
# relaxation system
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class RelaxState:
    u: GridFunction
    v: GridFunction
    eps: float
    alpha: float
    t: float = 0.0

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        if not 0 < self.alpha < 1:
            raise SubcharacteristicError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not self.u.same_grid(self.v):
            raise ValueError("u and v must share a grid")

    @classmethod
    def initial(cls, u0: GridFunction, eps: float, alpha: float, flux: FluxModel | None = None,
                equilibrium: bool = False) -> RelaxState:
        """``v(0) = 0`` (empty history) unless ``equilibrium`` asks for ``(1-alpha) f(u0)``."""
        v = (1 - alpha) * flux.f(u0.values) if equilibrium else np.zeros(u0.n)
        return cls(u0, u0.with_values(v), eps, alpha)


def relax_step(state: RelaxState, flux: FluxModel, dt: float, speed: float | None = None) -> RelaxState:
    """Transport ``u`` with flux ``f(u) - v``, then relax ``v`` exactly.

    The Lax-Friedrichs dissipation acts on ``u`` only; ``v`` has no flux.
    The source substep uses the integrating factor, so it is stable for any
    ``dt / eps``.
    """
    u, v = state.u, state.v
    if speed is None:
        speed = max(data_speed(flux, u), 1.0)
    if dt * speed / u.dx > 1.0 + 1e-12:
        raise CFLViolation(f"dt={dt:g} violates dt max(|f'|, 1)/dx <= 1")
    pu, pv = pad(u.values, u.boundary), pad(v.values, v.boundary)
    g = flux.f(pu) - pv
    fl = 0.5 * (g[:-1] + g[1:]) - 0.5 * speed * (pu[1:] - pu[:-1])
    un = u.values - (dt / u.dx) * (fl[1:] - fl[:-1])
    decay = math.exp(-dt / state.eps)
    vn = v.values * decay + (1.0 - decay) * (1.0 - state.alpha) * flux.f(un)
    return replace(state, u=u.with_values(un), v=v.with_values(vn), t=state.t + dt)


def run_relaxation(u0: GridFunction, eps: float, alpha: float, flux: FluxModel, t_final: float,
                   dt: float, equilibrium: bool = False, snapshot_times=None):
    """March the relaxation system with a fixed step; returns ``(states, times)``."""
    state = RelaxState.initial(u0, eps, alpha, flux, equilibrium)
    steps = max(1, int(math.ceil(t_final / dt - 1e-9)))
    dt = t_final / steps
    speed = max(data_speed(flux, u0), 1.0)
    keep = {steps} if snapshot_times is None else {min(steps, round(t / dt)) for t in snapshot_times} | {steps}
    states, times = [state], [0.0]
    for n in range(steps):
        state = relax_step(state, flux, dt, speed)
        if (n + 1) in keep:
            states.append(state)
            times.append(state.t)
    return states, np.array(times)


def relax_gap(memory_final: GridFunction, relax_final: RelaxState) -> float:
    return l1_dist(memory_final, relax_final.u)


__all__ = [
    "LocalConfig",
    "RelaxState",
    "burgers_riemann_exact",
    "local_step",
    "relax_step",
    "run_local",
    "run_relaxation",
    "shock_speed",
]
