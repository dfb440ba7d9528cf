"""Command-line experiment driver.

    fadmem resolvent     --config exp.ini [--tol X] [--require-admissible]
    fadmem run           --config exp.ini
    fadmem sweep         --config exp.ini --kind nu|eps --levels N [--jobs N]
    fadmem compare-relax --config exp.ini
    fadmem report        --out DIR

Exit status: 0 pass, 1 check failure, 2 validation error, 3 runtime or
resource failure. Every file written starts with a ``# fadmem <version>
id=<id>`` line; identical configs give byte-identical outputs.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, ExperimentConfig, load_config
from .kernel_lab import (
    check_admissible,
    resolvent_exponential,
    resolvent_numeric,
    resolvent_residual,
)
from .memsolver import (
    CFLViolation,
    ResourceGuard,
    SolverBlowup,
    run,
    sweep_viscosity,
)
from .model import l1_dist, l1_norm
from .reference import LocalConfig, run_local, run_relaxation
from .verify import (
    check_bv_bound,
    check_max_principle,
    check_relaxation_limit,
    check_time_lipschitz,
    check_viscosity_cauchy,
    entropy_production,
)

EXIT_PASS, EXIT_CHECK, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2, 3
DEFAULT_RESOLVENT_TOL = 1e-5
RELAX_HALVING = (0.375, 0.625)


def _fmt(v: float) -> str:
    return f"{float(v):.17g}"


class Writer:
    """Writes output files into one directory, each with the identifying header."""

    def __init__(self, out: Path, exp_id: str):
        self.out, self.id = out, exp_id
        out.mkdir(parents=True, exist_ok=True)
        self.written: list[Path] = []

    def header(self, extra: str = "") -> str:
        line = f"# fadmem {__version__} id={self.id}"
        return f"{line} {extra}".rstrip() + "\n"

    def text(self, name: str, body: str, extra: str = "") -> Path:
        path = self.out / name
        path.write_text(self.header(extra) + body)
        self.written.append(path)
        return path

    def csv(self, name: str, columns: dict, extra: str = "") -> Path:
        cols = list(columns)
        rows = zip(*(np.asarray(columns[c], dtype=float) for c in cols))
        body = ",".join(cols) + "\n" + "".join(",".join(_fmt(v) for v in row) + "\n" for row in rows)
        return self.text(name, body, extra)

    def report(self, rep):
        stem = f"{self.id}_{rep.name}"
        self.text(f"{stem}_report.txt", rep.to_text())
        cols = {k: v for k, v in rep.details.items() if np.ndim(v) == 1}
        self.csv(f"{stem}_margins.csv", cols)

    def sub(self, name: str) -> Writer:
        return Writer(self.out / name, self.id)


def _writer(exp: ExperimentConfig, args) -> Writer:
    out = Path(args.out) if args.out else exp.path_of(exp.output)
    return Writer(out, exp.id)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_resolvent(exp: ExperimentConfig, args) -> int:
    w = _writer(exp, args)
    tol = args.tol if args.tol is not None else float(exp.resolvent.get("tol", DEFAULT_RESOLVENT_TOL))
    k = exp.build_kernel()
    fam = exp.kernel.get("family", "zero")
    if fam == "sampled":
        dt, n = k.dt, k.values.size
    else:
        dt = float(exp.resolvent.get("dt", 1e-3))
        horizon = float(exp.resolvent.get("horizon", 5.0))
        n = int(round(horizon / dt)) + 1
    r = resolvent_numeric(k, dt, n)
    residual = resolvent_residual(k, r)
    adm = check_admissible(r)
    lines = [f"residual={_fmt(residual)}", f"tolerance={_fmt(tol)}", f"family={fam}",
             f"dt={_fmt(dt)}", f"samples={n}", f"l1_norm={_fmt(r.l1_norm)}"]
    if fam == "exponential":
        exact = resolvent_exponential(exp.eps, exp.alpha, dt, n)
        lines += [f"closed_form_error={_fmt(np.max(np.abs(r.values - exact.values)))}",
                  f"closed_form_residual={_fmt(resolvent_residual(k, exact))}"]
    w.csv(f"{exp.id}_kernel.csv", {"t": r.times, "k": k.sample(dt, n)})
    w.csv(f"{exp.id}_resolvent.csv", {"t": r.times, "r": r.values})
    ok = residual <= tol and (adm.admissible or not args.require_admissible)
    lines.insert(0, f"passed={str(ok).lower()}")
    w.text(f"{exp.id}_resolvent_report.txt", "\n".join(lines) + "\n" + adm.to_text())
    print(f"resolvent residual={residual:.3g} tol={tol:.3g} admissible={adm.admissible}")
    return EXIT_PASS if ok else EXIT_CHECK


def cmd_run(exp: ExperimentConfig, args) -> int:
    w = _writer(exp, args)
    cfg = exp.build_solver()
    u0 = exp.build_u0()
    checks = exp.check_list
    dense = "entropy" in checks
    rec = run(cfg, u0, exp.snapshot_times, dense=dense)

    want = exp.snapshot_times or [cfg.t_final]
    picks = sorted({int(np.argmin(np.abs(rec.times - t))) for t in [0.0, *want]})
    for j, i in enumerate(picks):
        u = rec.snapshots[i]
        w.csv(f"{exp.id}_t{j:03d}.csv", {"x": u.centers, "u": u.values}, f"t={_fmt(rec.times[i])}")
    w.csv(f"{exp.id}_diagnostics.csv", rec.diagnostics, f"dt={_fmt(rec.dt)}")

    reports = []
    for name in checks:
        if name == "max_principle":
            reports.append(check_max_principle(rec))
        elif name == "bv_bound":
            reports.append(check_bv_bound(rec))
        elif name == "time_lipschitz":
            reports.append(check_time_lipschitz(rec))
        elif name == "entropy":
            reports.append(entropy_production(rec, C=float(exp.checks.get("entropy_C", 1.0))))
    for rep in reports:
        w.report(rep)
        print(f"{rep.name}: {'PASS' if rep.passed else 'FAIL'} worst_margin={rep.worst_margin:.3g}")
    return EXIT_PASS if all(r.passed for r in reports) else EXIT_CHECK


def cmd_sweep(exp: ExperimentConfig, args) -> int:
    w = _writer(exp, args)
    levels = args.levels if args.levels is not None else int(exp.sweep.get("levels", 5))
    if levels < 2:
        raise ConfigError([f"a sweep needs at least 2 levels, got {levels}"])
    cfg = exp.build_solver()
    if args.kind == "nu":
        nu0 = float(exp.sweep.get("nu0", 0.02))
        x_min, x_max, cells, bnd = exp.grid_tuple()
        res = sweep_viscosity(cfg, exp.build_initial(), (x_min, x_max, cells, bnd), nu0, levels, jobs=args.jobs)
        scale = l1_norm(exp.build_u0())
        rep = check_viscosity_cauchy(res.gaps, scale, float(exp.sweep.get("threshold", 0.02)))
        w.csv(f"{exp.id}_sweep_nu.csv", {"level": np.arange(1, levels), "nu": res.nus[1:], "gap": res.gaps})
        for k, (nu, rec) in enumerate(res.pairs()):
            u = rec.final
            w.sub(f"{exp.id}_level{k}").csv(f"{exp.id}_final.csv", {"x": u.centers, "u": u.values},
                                            f"nu={_fmt(nu)} cells={u.n}")
    else:
        alpha = float(exp.sweep.get("alpha", exp.alpha if exp.alpha is not None else 0.5))
        eps0 = float(exp.sweep.get("eps0", 0.4))
        eps_list = [eps0 * 2.0**-k for k in range(levels)]
        threshold = args.tol if args.tol is not None else float(exp.sweep.get("threshold", 0.05))
        rep = check_relaxation_limit(eps_list, replace(cfg, nu=0.0), exp.build_u0(), alpha, threshold)
        w.csv(f"{exp.id}_sweep_eps.csv", {"eps": rep.details["eps"], "distance": rep.details["distance"]},
              f"alpha={_fmt(alpha)}")
    w.report(rep)
    print(f"{rep.name}: {'PASS' if rep.passed else 'FAIL'} worst_margin={rep.worst_margin:.3g}")
    return EXIT_PASS if rep.passed else EXIT_CHECK


def _relax_level(exp: ExperimentConfig, refine: int):
    """Memory run and matching comparison run on the grid refined ``refine`` times."""
    cfg = exp.build_solver()
    u0 = exp.build_u0(refine)
    times = exp.snapshot_times
    rec = run(cfg, u0, times)
    if cfg.resolvent is None:
        local, _ = run_local(LocalConfig(cfg.flux, 1.0, cfg.cfl, cfg.t_final, cfg.numerical_flux), u0, rec.dt)
        return rec, [rec.times[-1]], [l1_dist(rec.final, local)]
    states, _ = run_relaxation(u0, exp.eps, exp.alpha, cfg.flux, cfg.t_final, rec.dt,
                               exp.relax.get("equilibrium", "false").lower() == "true", times)
    by_time = {round(s.t / rec.dt): s for s in states}
    ts, gaps = [], []
    for t, u in zip(rec.times, rec.snapshots):
        s = by_time.get(round(t / rec.dt))
        if s is not None:
            ts.append(t)
            gaps.append(l1_dist(u, s.u))
    return rec, ts, gaps


def cmd_compare_relax(exp: ExperimentConfig, args) -> int:
    w = _writer(exp, args)
    C = float(exp.relax.get("C", 1.0))
    coarse, t1, g1 = _relax_level(exp, 1)
    fine, t2, g2 = _relax_level(exp, 2)
    w.csv(f"{exp.id}_relax_gap.csv", {"t": t1, "gap": g1}, f"cells={coarse.u0.n}")
    w.csv(f"{exp.id}_relax_gap_fine.csv", {"t": t2, "gap": g2}, f"cells={fine.u0.n}")
    bound = C * (coarse.dt + coarse.u0.dx)
    gap, gap_fine = g1[-1], g2[-1]
    if exp.kernel.get("family", "zero") == "zero":
        ok = gap <= 1e-12 and gap_fine <= 1e-12
        ratio = math.nan
    else:
        ratio = gap_fine / gap if gap > 0 else math.nan
        ok = gap <= bound and RELAX_HALVING[0] <= ratio <= RELAX_HALVING[1]
    body = (f"passed={str(ok).lower()}\ngap={_fmt(gap)}\ngap_fine={_fmt(gap_fine)}\n"
            f"bound={_fmt(bound)}\nhalving_ratio={_fmt(ratio)}\n")
    w.text(f"{exp.id}_relax_report.txt", body)
    print(f"relax gap={gap:.3g} fine={gap_fine:.3g} bound={bound:.3g} ratio={ratio:.3g}")
    return EXIT_PASS if ok else EXIT_CHECK


def cmd_report(args) -> int:
    out = None
    if args.out:
        out = Path(args.out)
    elif args.config:
        exp = load_config(args.config).validate()
        out = exp.path_of(exp.output)
    if out is None or not out.is_dir():
        print(f"error: no output directory {out}", file=sys.stderr)
        return EXIT_INVALID
    files = sorted(out.rglob("*_report.txt"))
    if not files:
        print(f"error: no reports under {out}", file=sys.stderr)
        return EXIT_INVALID
    failed = 0
    for path in files:
        fields = dict(line.split("=", 1) for line in path.read_text().splitlines()
                      if "=" in line and not line.startswith("#"))
        status = fields.get("passed", "true")
        failed += status != "true"
        print(f"{'PASS' if status == 'true' else 'FAIL'} {path.relative_to(out)}")
    return EXIT_CHECK if failed else EXIT_PASS


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

COMMANDS = {
    "resolvent": cmd_resolvent,
    "run": cmd_run,
    "sweep": cmd_sweep,
    "compare-relax": cmd_compare_relax,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fadmem", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"fadmem {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in (*COMMANDS, "report"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=name != "report", help="experiment file")
        sp.add_argument("--out", help="output directory (overrides [experiment] output)")
        sp.add_argument("--tol", type=float, help="tolerance override")
        if name == "resolvent":
            sp.add_argument("--require-admissible", action="store_true")
        if name == "sweep":
            sp.add_argument("--kind", choices=("nu", "eps"), default="nu")
            sp.add_argument("--levels", type=int)
            sp.add_argument("--jobs", type=int, default=1)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "report":
            return cmd_report(args)
        exp = load_config(args.config).validate()
        return COMMANDS[args.command](exp, args)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"invalid: {problem}", file=sys.stderr)
        return EXIT_INVALID
    except (ResourceGuard, SolverBlowup, CFLViolation, OSError, ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
