"""Experiment configuration files.

One experiment per INI-style file (``[section]`` headers, ``key = value``
lines). Validation collects every problem before anything runs.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field
from pathlib import Path

from .kernel_lab import KernelSpec, ResolventTable, kernel_from_table, resolvent_exponential, resolvent_numeric
from .memsolver import (
    ENGQUIST_OSHER,
    FULL_HISTORY,
    LAX_FRIEDRICHS,
    RECURSION,
    SolverConfig,
    cfl_timestep,
)
from .model import BOUNDARIES, FluxModel, GridFunction, InitialData, mollify

CHECKS = ("max_principle", "bv_bound", "time_lipschitz", "entropy")
_ID = re.compile(r"^[A-Za-z0-9_.-]+$")


class ConfigError(ValueError):
    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


@dataclass
class ExperimentConfig:
    id: str
    source: Path | None = None
    output: str = "out"
    flux: dict = field(default_factory=lambda: {"kind": "burgers"})
    initial: dict = field(default_factory=dict)
    kernel: dict = field(default_factory=lambda: {"family": "zero"})
    grid: dict = field(default_factory=dict)
    solver: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    resolvent: dict = field(default_factory=dict)
    sweep: dict = field(default_factory=dict)
    relax: dict = field(default_factory=dict)

    # -- typed accessors -------------------------------------------------

    def _num(self, section: str, key: str, default=None) -> float | None:
        raw = getattr(self, section).get(key)
        return default if raw is None else float(raw)

    @property
    def alpha(self) -> float | None:
        return self._num("kernel", "alpha")

    @property
    def eps(self) -> float | None:
        return self._num("kernel", "eps")

    @property
    def snapshot_times(self) -> list[float] | None:
        raw = self.solver.get("snapshot_times")
        if not raw:
            return None
        return [float(x) for x in raw.replace(";", ",").split(",") if x.strip()]

    @property
    def check_list(self) -> list[str]:
        raw = self.checks.get("run", "")
        return [c.strip() for c in raw.split(",") if c.strip()]

    def path_of(self, raw: str) -> Path:
        p = Path(raw)
        if not p.is_absolute() and self.source is not None:
            p = self.source.parent / p
        return p

    # -- builders ----------------------------------------------------------

    def build_flux(self) -> FluxModel:
        kind = self.flux.get("kind", "burgers")
        if kind == "linear":
            return FluxModel.linear(float(self.flux.get("a", 1.0)))
        if kind == "poly":
            return FluxModel.poly([float(c) for c in self.flux["coefficients"].split(",")])
        return FluxModel(kind)

    def build_initial(self) -> InitialData:
        if not self.initial:
            return InitialData.riemann(1.0, 0.0)
        p = dict(self.initial)
        profile = p.pop("profile", "riemann")
        p.pop("mollify", None)
        if profile == "constant":
            return InitialData.constant(float(p.get("value", 0.0)))
        if profile == "sampled":
            return InitialData.sampled([float(v) for v in p["values"].split(",")])
        return getattr(InitialData, profile)(**{k: float(v) for k, v in p.items()})

    def grid_tuple(self, refine: int = 1) -> tuple:
        g = self.grid
        return (float(g.get("x_min", -1.0)), float(g.get("x_max", 1.0)),
                int(g.get("cells", 400)) * refine, g.get("boundary", "periodic"))

    def build_u0(self, refine: int = 1) -> GridFunction:
        x_min, x_max, cells, bnd = self.grid_tuple(refine)
        data = self.build_initial()
        u0 = data.on_grid(x_min, x_max, cells, bnd)
        width = self.initial.get("mollify")
        if width:
            u0 = mollify(data, float(width), u0)
        return u0

    def build_kernel(self) -> KernelSpec:
        fam = self.kernel.get("family", "zero")
        if fam == "exponential":
            return KernelSpec.exponential(self.eps, self.alpha)
        if fam == "sampled":
            return kernel_from_table(self.path_of(self.kernel["path"]))
        return KernelSpec.zero()

    def build_resolvent(self, t_final: float | None = None) -> ResolventTable | None:
        fam = self.kernel.get("family", "zero")
        if fam == "zero":
            return None
        if fam == "exponential":
            return resolvent_exponential(self.eps, self.alpha, 1e-3, 2)
        k = self.build_kernel()
        return resolvent_numeric(k, k.dt, k.values.size)

    def build_solver(self, **overrides) -> SolverConfig:
        s = self.solver
        kw = dict(
            flux=self.build_flux(),
            resolvent=self.build_resolvent(),
            nu=float(s.get("nu", 0.0)),
            cfl=float(s.get("cfl", 0.5)),
            t_final=float(s.get("t_final", 1.0)),
            memory_mode=s.get("memory_mode", FULL_HISTORY),
            numerical_flux=s.get("numerical_flux", LAX_FRIEDRICHS),
            kernel=self.build_kernel() if self.kernel.get("family") == "sampled" else None,
            dt=float(s["dt"]) if s.get("dt") else None,
        )
        kw.update(overrides)
        return SolverConfig(**kw)

    # -- validation ----------------------------------------------------------

    def problems(self) -> list[str]:
        out = []

        def num(section, key, cond, msg, required=False):
            raw = getattr(self, section).get(key)
            if raw is None:
                if required:
                    out.append(f"[{section}] {key} is required")
                return None
            try:
                val = float(raw)
            except ValueError:
                out.append(f"[{section}] {key}={raw!r} is not a number")
                return None
            if not cond(val):
                out.append(f"[{section}] {key}={raw} {msg}")
            return val

        if not self.id or not _ID.match(self.id):
            out.append(f"[experiment] id={self.id!r} must be nonempty and use only [A-Za-z0-9_.-]")

        kind = self.flux.get("kind", "burgers")
        if kind not in ("linear", "burgers", "cubic", "poly"):
            out.append(f"[flux] kind={kind!r} is unknown")
        if kind == "poly" and not self.flux.get("coefficients"):
            out.append("[flux] poly flux needs coefficients")

        profile = self.initial.get("profile", "riemann")
        if profile not in ("riemann", "square", "smooth", "sampled", "constant"):
            out.append(f"[initial] profile={profile!r} is unknown")
        elif profile == "riemann" and self.initial:
            for key in ("u_left", "u_right"):
                num("initial", key, lambda v: True, "", required=True)
        num("initial", "mollify", lambda v: v > 0, "must be positive")

        fam = self.kernel.get("family", "zero")
        if fam not in ("exponential", "sampled", "zero"):
            out.append(f"[kernel] family={fam!r} is unknown")
        if fam == "exponential":
            num("kernel", "eps", lambda v: v > 0, "must be positive", required=True)
            num("kernel", "alpha", lambda v: 0 < v < 1, "must lie in (0, 1)", required=True)
        if fam == "sampled":
            raw = self.kernel.get("path")
            if not raw:
                out.append("[kernel] sampled kernel needs a path")
            elif not self.path_of(raw).is_file():
                out.append(f"[kernel] path {raw} does not exist")
            else:
                try:
                    k = self.build_kernel()
                    t_final = float(self.solver.get("t_final", 1.0))
                    if k.horizon < t_final * (1 - 1e-12):
                        out.append(f"[kernel] table covers [0, {k.horizon:g}], shorter than t_final={t_final:g}")
                except (ValueError, OSError) as exc:
                    out.append(f"[kernel] cannot read {raw}: {exc}")

        x_min = num("grid", "x_min", lambda v: True, "")
        x_max = num("grid", "x_max", lambda v: True, "")
        if x_min is not None and x_max is not None and not x_max > x_min:
            out.append("[grid] x_max must exceed x_min")
        num("grid", "cells", lambda v: v >= 4 and v == int(v), "must be an integer >= 4")
        if self.grid.get("boundary", "periodic") not in BOUNDARIES:
            out.append(f"[grid] boundary={self.grid.get('boundary')!r} is unknown")

        num("solver", "nu", lambda v: v >= 0, "must be nonnegative")
        num("solver", "cfl", lambda v: 0 < v <= 1, "must lie in (0, 1]")
        num("solver", "t_final", lambda v: v > 0, "must be positive")
        dt = num("solver", "dt", lambda v: v > 0, "must be positive")
        mode = self.solver.get("memory_mode", FULL_HISTORY)
        if mode not in (FULL_HISTORY, RECURSION):
            out.append(f"[solver] memory_mode={mode!r} is unknown")
        elif mode == RECURSION and fam != "exponential":
            out.append("[solver] recursion memory mode needs the exponential kernel")
        if self.solver.get("numerical_flux", LAX_FRIEDRICHS) not in (LAX_FRIEDRICHS, ENGQUIST_OSHER):
            out.append(f"[solver] numerical_flux={self.solver.get('numerical_flux')!r} is unknown")
        try:
            times = self.snapshot_times or []
            if any(b <= a for a, b in zip(times[:-1], times[1:])):
                out.append("[solver] snapshot_times must be strictly increasing")
        except ValueError:
            out.append("[solver] snapshot_times must be a comma-separated list of numbers")

        for c in self.check_list:
            if c not in CHECKS:
                out.append(f"[checks] unknown check {c!r}")

        num("sweep", "nu0", lambda v: v > 0, "must be positive")
        num("sweep", "eps0", lambda v: v > 0, "must be positive")
        num("sweep", "levels", lambda v: v >= 2 and v == int(v), "must be an integer >= 2")
        relax_alpha = num("relax", "alpha", lambda v: 0 < v <= 1, "must lie in (0, 1]")
        if relax_alpha is not None and fam == "exponential" and self.alpha is not None \
                and relax_alpha != self.alpha:
            out.append(f"[relax] alpha={relax_alpha} does not match [kernel] alpha={self.alpha}")
        num("resolvent", "dt", lambda v: v > 0, "must be positive")
        num("resolvent", "horizon", lambda v: v > 0, "must be positive")

        # CFL can only be judged once everything else is sane
        if not out and dt is not None:
            try:
                cfg = self.build_solver(dt=None)
                limit = 1.0 / (cfg.r0 + 2 * cfg.nu / self.build_u0().dx**2
                               + cfg.flux.max_speed(*_range(self.build_u0())) / self.build_u0().dx)
                if dt > limit * (1 + 1e-12):
                    out.append(f"[solver] dt={dt} exceeds the stability limit {limit:.6g} "
                               f"(cfl step would be {cfl_timestep(cfg, self.build_u0()):.6g})")
            except (ValueError, KeyError) as exc:
                out.append(f"configuration cannot be built: {exc}")
        return out

    def validate(self):
        problems = self.problems()
        if problems:
            raise ConfigError(problems)
        return self


def _range(u: GridFunction):
    return float(u.values.min()), float(u.values.max())


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError([f"config file {path} does not exist"])
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read(path)
    except configparser.Error as exc:
        raise ConfigError([f"cannot parse {path}: {exc}"]) from exc
    sections = {name: dict(parser[name]) for name in parser.sections()}
    exp = sections.pop("experiment", {})
    known = {"flux", "initial", "kernel", "grid", "solver", "checks", "resolvent", "sweep", "relax"}
    unknown = set(sections) - known
    if unknown:
        raise ConfigError([f"unknown section [{name}]" for name in sorted(unknown)])
    return ExperimentConfig(
        id=exp.get("id", ""),
        source=path,
        output=exp.get("output", "out"),
        **{name: sections.get(name, {}) for name in known if name in sections},
    )
