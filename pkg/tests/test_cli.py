import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from fadmem import __version__
from fadmem.cli import EXIT_CHECK, EXIT_INVALID, EXIT_PASS, main
from fadmem.config import ConfigError, load_config
from fadmem.kernel_lab import read_table

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def cli(*args):
    return main([str(a) for a in args])


def columns(path):
    lines = [ln for ln in Path(path).read_text().splitlines() if not ln.startswith("#")]
    names = lines[0].split(",")
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    return {n: data[:, i] for i, n in enumerate(names)}


def write_ini(tmp_path, text, name="exp.ini"):
    path = tmp_path / name
    path.write_text(text)
    return path


# -- resolvent ----------------------------------------------------------------------


def test_resolvent_exam_kernel(tmp_path):
    assert cli("resolvent", "--config", CONFIGS / "exam1_resolvent.ini", "--out", tmp_path) == EXIT_PASS
    report = (tmp_path / "exam1_resolvent_resolvent_report.txt").read_text()
    fields = dict(line.split("=", 1) for line in report.splitlines()[1:])
    assert float(fields["residual"]) <= 1e-5
    assert float(fields["closed_form_error"]) <= 1e-4
    t, r = read_table(tmp_path / "exam1_resolvent_resolvent.csv")
    assert t[-1] == pytest.approx(5.0)
    np.testing.assert_allclose(r, 1.5 * np.exp(-0.5 * t), atol=1e-4)


def test_resolvent_constant_kernel_not_admissible(tmp_path):
    args = ("resolvent", "--config", CONFIGS / "constant_kernel.ini", "--out", tmp_path)
    assert cli(*args) == EXIT_PASS
    assert cli(*args, "--require-admissible") == EXIT_CHECK


def test_resolvent_zero_kernel(tmp_path):
    assert cli("resolvent", "--config", CONFIGS / "zero_resolvent.ini", "--out", tmp_path,
               "--require-admissible") == EXIT_PASS
    _, r = read_table(tmp_path / "zero_resolvent_resolvent.csv")
    assert not np.any(r)


def test_resolvent_tolerance_override(tmp_path):
    # the closed-form comparison is not the exit criterion; the residual is
    assert cli("resolvent", "--config", CONFIGS / "exam1_resolvent.ini", "--out", tmp_path, "--tol", "0") == EXIT_CHECK


# -- run ------------------------------------------------------------------------------


def test_run_constant_data(tmp_path):
    assert cli("run", "--config", CONFIGS / "constant_run.ini", "--out", tmp_path) == EXIT_PASS
    snaps = sorted(tmp_path.glob("constant_run_t*.csv"))
    assert len(snaps) == 3
    _, u = read_table(snaps[-1])
    np.testing.assert_allclose(u, 0.7, atol=1e-14)


def test_run_burgers_reference_passes_every_check(tmp_path):
    assert cli("run", "--config", CONFIGS / "burgers_exam1_run.ini", "--out", tmp_path) == EXIT_PASS
    for name in ("MaxPrinciple", "BVBound", "TimeLipschitz", "EntropyInequality"):
        text = (tmp_path / f"burgers_exam1_{name}_report.txt").read_text()
        assert "passed=true" in text
        assert (tmp_path / f"burgers_exam1_{name}_margins.csv").is_file()
    diag = (tmp_path / "burgers_exam1_diagnostics.csv").read_text().splitlines()
    assert diag[1] == "t,linf,tv,mass,dl1,entropy_max"


def test_run_over_cfl_rejected(tmp_path, capsys):
    assert cli("run", "--config", CONFIGS / "over_cfl.ini", "--out", tmp_path) == EXIT_INVALID
    assert "stability limit" in capsys.readouterr().err
    assert not any(tmp_path.iterdir())


def test_every_output_carries_header(tmp_path):
    cli("run", "--config", CONFIGS / "constant_run.ini", "--out", tmp_path)
    for path in tmp_path.iterdir():
        assert path.read_text().startswith(f"# fadmem {__version__} id=constant_run")


def test_outputs_are_byte_identical(tmp_path):
    for d in ("a", "b"):
        cli("run", "--config", CONFIGS / "burgers_exam1_run.ini", "--out", tmp_path / d)
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert names == sorted(p.name for p in (tmp_path / "b").iterdir())
    for name in names:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


# -- sweeps ---------------------------------------------------------------------------


def test_eps_sweep(tmp_path):
    assert cli("sweep", "--config", CONFIGS / "sweep_eps.ini", "--kind", "eps", "--out", tmp_path) == EXIT_PASS
    _, d = read_table(tmp_path / "sweep_eps_sweep_eps.csv")
    assert d.size == 4 and np.all(np.diff(d) < 0)


def test_nu_sweep_constant_data(tmp_path):
    ini = write_ini(tmp_path, """
[experiment]
id = flat
[initial]
profile = constant
value = 0.5
[kernel]
family = exponential
eps = 0.5
alpha = 0.5
[grid]
cells = 20
[solver]
t_final = 0.1
memory_mode = recursion
[sweep]
nu0 = 0.05
""")
    assert cli("sweep", "--config", ini, "--kind", "nu", "--levels", 3, "--out", tmp_path / "o") == EXIT_PASS
    gaps = columns(tmp_path / "o" / "flat_sweep_nu.csv")["gap"]
    assert gaps.size == 2 and not np.any(gaps)
    assert len(list((tmp_path / "o").glob("flat_level*"))) == 3


def test_sweep_single_level_rejected(tmp_path):
    assert cli("sweep", "--config", CONFIGS / "sweep_nu.ini", "--levels", 1, "--out", tmp_path) == EXIT_INVALID


def test_parallel_sweep_matches_serial(tmp_path):
    base = ("sweep", "--config", CONFIGS / "sweep_nu.ini", "--levels", 3)
    assert cli(*base, "--out", tmp_path / "s") == cli(*base, "--jobs", 3, "--out", tmp_path / "p")
    a = (tmp_path / "s" / "sweep_nu_sweep_nu.csv").read_bytes()
    assert a == (tmp_path / "p" / "sweep_nu_sweep_nu.csv").read_bytes()


# -- relaxation comparison -----------------------------------------------------------


def test_compare_relax_matched(tmp_path):
    assert cli("compare-relax", "--config", CONFIGS / "relax_exam.ini", "--out", tmp_path) == EXIT_PASS
    t, gap = read_table(tmp_path / "relax_exam_relax_gap.csv")
    assert t[-1] == pytest.approx(0.5)
    assert gap[0] == 0.0


def test_compare_relax_zero_kernel_is_exact(tmp_path):
    assert cli("compare-relax", "--config", CONFIGS / "relax_zero.ini", "--out", tmp_path) == EXIT_PASS
    _, gap = read_table(tmp_path / "relax_zero_relax_gap.csv")
    assert gap[-1] <= 1e-12


def test_compare_relax_mismatched_alpha(tmp_path):
    assert cli("compare-relax", "--config", CONFIGS / "relax_mismatch.ini", "--out", tmp_path) == EXIT_INVALID


# -- report -------------------------------------------------------------------------


def test_report_summarises_directory(tmp_path, capsys):
    cli("run", "--config", CONFIGS / "constant_run.ini", "--out", tmp_path)
    cli("resolvent", "--config", CONFIGS / "constant_kernel.ini", "--out", tmp_path, "--require-admissible")
    capsys.readouterr()
    assert cli("report", "--out", tmp_path) == EXIT_CHECK
    out = capsys.readouterr().out
    assert "FAIL constant_kernel_resolvent_report.txt" in out
    assert out.count("PASS") == 3


def test_report_on_empty_directory(tmp_path):
    assert cli("report", "--out", tmp_path) == EXIT_INVALID


# -- validation ------------------------------------------------------------------------


def test_validation_lists_every_problem(tmp_path):
    ini = write_ini(tmp_path, """
[experiment]
id = bad id!
[flux]
kind = quartic
[kernel]
family = exponential
eps = -1
alpha = 1.5
[grid]
x_min = 1
x_max = 0
cells = 2
[solver]
cfl = 2
memory_mode = fancy
""")
    with pytest.raises(ConfigError) as info:
        load_config(ini).validate()
    joined = "\n".join(info.value.problems)
    for fragment in ("id=", "kind=", "eps=", "alpha=", "x_max", "cells=", "cfl=", "memory_mode="):
        assert fragment in joined
    assert len(info.value.problems) >= 8


def test_validation_missing_kernel_file(tmp_path):
    ini = write_ini(tmp_path, "[experiment]\nid = x\n[kernel]\nfamily = sampled\npath = nowhere.csv\n")
    assert cli("resolvent", "--config", ini, "--out", tmp_path) == EXIT_INVALID


def test_validation_recursion_needs_exponential(tmp_path):
    ini = write_ini(tmp_path, "[experiment]\nid = x\n[solver]\nmemory_mode = recursion\n")
    with pytest.raises(ConfigError, match="recursion"):
        load_config(ini).validate()


def test_unknown_section_rejected(tmp_path):
    ini = write_ini(tmp_path, "[experiment]\nid = x\n[extras]\nfoo = 1\n")
    assert cli("run", "--config", ini, "--out", tmp_path) == EXIT_INVALID


def test_missing_config_file(tmp_path):
    assert cli("run", "--config", tmp_path / "none.ini") == EXIT_INVALID


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "fadmem", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and __version__ in proc.stdout
