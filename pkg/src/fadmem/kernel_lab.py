"""Memory kernels, their resolvents, and admissibility checks.

The resolvent ``r`` of a kernel ``k`` solves ``r + k * r = -k`` where ``*``
is the causal convolution on ``[0, t]``. For the exponential relaxation
family

    k(t) = -(1 - alpha)/eps * exp(-t/eps)

the resolvent is known in closed form,

    r(t) = (1 - alpha)/eps * exp(-alpha t/eps),

which serves as the golden pair for the numerical Volterra solver.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

DEFAULT_ADMISSIBLE_TOL = 1e-10
SINGULAR_DIAGONAL = 1e-12


class SubcharacteristicError(ValueError):
    """alpha outside (0, 1)."""


def _check_exponential(eps: float, alpha: float):
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    if not 0.0 < alpha < 1.0:
        raise SubcharacteristicError(f"alpha must lie in (0, 1), got {alpha}")


@dataclass(frozen=True, eq=False)
class KernelSpec:
    """A memory kernel: exponential family, sampled table, or zero.

    Sampled tables are taken at ``t_m = m dt``; between samples the kernel
    is linear, beyond the last sample it is treated as truncated.
    """

    family: str
    eps: float = 1.0
    alpha: float = 0.5
    values: np.ndarray | None = None
    dt: float | None = None

    def __post_init__(self):
        if self.family == "exponential":
            _check_exponential(self.eps, self.alpha)
        elif self.family == "sampled":
            vals = np.array(self.values, dtype=float)
            vals.setflags(write=False)
            object.__setattr__(self, "values", vals)
            if self.dt is None or not self.dt > 0:
                raise ValueError("sampled kernel needs dt > 0")
            if vals.ndim != 1 or vals.size < 2:
                raise ValueError("sampled kernel needs at least 2 samples")
        elif self.family != "zero":
            raise ValueError(f"unknown kernel family {self.family!r}")

    @classmethod
    def exponential(cls, eps: float, alpha: float) -> KernelSpec:
        return cls("exponential", eps=float(eps), alpha=float(alpha))

    @classmethod
    def sampled(cls, values, dt: float) -> KernelSpec:
        return cls("sampled", values=np.asarray(values, dtype=float), dt=float(dt))

    @classmethod
    def zero(cls) -> KernelSpec:
        return cls("zero")

    @property
    def horizon(self) -> float:
        if self.family == "sampled":
            return (self.values.size - 1) * self.dt
        return math.inf

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.family == "zero":
            return np.zeros_like(t)
        if self.family == "exponential":
            return -(1.0 - self.alpha) / self.eps * np.exp(-t / self.eps)
        if np.any(t > self.horizon * (1 + 1e-12)):
            raise ValueError(f"kernel sampled beyond its horizon {self.horizon}")
        grid = np.arange(self.values.size) * self.dt
        return np.interp(t, grid, self.values)

    def sample(self, dt: float, n: int) -> np.ndarray:
        """Values at ``t_m = m dt`` for ``m = 0..n-1``."""
        if self.family == "sampled" and np.isclose(dt, self.dt, rtol=1e-12) and n <= self.values.size:
            return np.array(self.values[:n])
        return self(np.arange(n) * dt)

    def l1_norm(self, horizon: float | None = None) -> float:
        if self.family == "zero":
            return 0.0
        if self.family == "exponential":
            full = 1.0 - self.alpha
            if horizon is None:
                return full
            return full * (1.0 - math.exp(-horizon / self.eps))
        vals = np.abs(self.values)
        if horizon is not None:
            n = min(vals.size, int(round(horizon / self.dt)) + 1)
            vals = vals[:n]
        return float(np.trapezoid(vals, dx=self.dt))


@dataclass(frozen=True, eq=False)
class ResolventTable:
    """Sampled resolvent ``r(t_m)`` with derivative samples.

    ``family`` records the closed form when the table came from the
    exponential family; :meth:`at` then evaluates exactly instead of
    interpolating.
    """

    values: np.ndarray
    derivative: np.ndarray
    dt: float
    l1_norm: float
    r0: float
    family: tuple | None = None

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        der = np.array(self.derivative, dtype=float)
        vals.setflags(write=False)
        der.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "derivative", der)
        if vals.shape != der.shape:
            raise ValueError("values and derivative must have the same length")
        if not self.dt > 0:
            raise ValueError("dt must be positive")

    @classmethod
    def from_values(cls, values, dt: float, derivative=None, family=None) -> ResolventTable:
        values = np.asarray(values, dtype=float)
        if derivative is None:
            derivative = np.gradient(values, dt, edge_order=1) if values.size > 1 else np.zeros_like(values)
        return cls(
            values=values,
            derivative=derivative,
            dt=float(dt),
            l1_norm=float(np.trapezoid(np.abs(values), dx=dt)),
            r0=float(values[0]),
            family=family,
        )

    @classmethod
    def zero(cls, horizon: float = 1.0, dt: float = 1.0) -> ResolventTable:
        n = max(2, int(math.ceil(horizon / dt)) + 1)
        return cls.from_values(np.zeros(n), dt)

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def horizon(self) -> float:
        return (self.n - 1) * self.dt

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n) * self.dt

    @property
    def is_zero(self) -> bool:
        return not np.any(self.values)

    @property
    def lipschitz_constant(self) -> float:
        """``L = 1 + ||r||_L1``."""
        return 1.0 + self.total_l1

    @property
    def total_l1(self) -> float:
        """``||r||_L1`` on the half line: exact for the exponential family."""
        if self.family is not None and self.family[0] == "exponential":
            _, eps, alpha = self.family
            return (1.0 - alpha) / alpha
        return self.l1_norm

    @property
    def tail(self) -> float:
        """Last tabulated ``|r|``: what is dropped by truncating at the horizon."""
        return abs(float(self.values[-1]))

    def at(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.family is not None and self.family[0] == "exponential":
            _, eps, alpha = self.family
            return (1.0 - alpha) / eps * np.exp(-alpha * t / eps)
        if np.any(t > self.horizon * (1 + 1e-12) + 1e-15):
            raise ValueError(f"resolvent table covers [0, {self.horizon}], asked for t={np.max(t)}")
        return np.interp(t, self.times, self.values)


def resolvent_exponential(eps: float, alpha: float, dt: float, n: int) -> ResolventTable:
    """Closed-form resolvent of the exponential relaxation kernel."""
    _check_exponential(eps, alpha)
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if n < 2:
        raise ValueError("need at least 2 samples")
    t = np.arange(n) * dt
    r0 = (1.0 - alpha) / eps
    vals = r0 * np.exp(-alpha * t / eps)
    return ResolventTable.from_values(
        vals, dt, derivative=-(alpha / eps) * vals, family=("exponential", eps, alpha)
    )


def resolvent_numeric(k: KernelSpec, dt: float, n: int) -> ResolventTable:
    """Solve ``r + k * r = -k`` by trapezoidal time marching.

    At step ``m`` the diagonal term of the trapezoid sum is moved to the
    left, ``(1 + dt k_0 / 2) r_m = -k_m - dt (k_m r_0 / 2 + sum_{0<j<m} k_{m-j} r_j)``.
    Derivatives come from centered differences (one-sided at the ends).
    """
    if n < 2:
        raise ValueError("need at least 2 samples")
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    kv = k.sample(dt, n)
    diag = 1.0 + 0.5 * dt * kv[0]
    if abs(diag) < SINGULAR_DIAGONAL:
        raise ZeroDivisionError(f"degenerate diagonal 1 + dt k(0)/2 = {diag:g}")
    r = np.zeros(n)
    r[0] = -kv[0]
    for m in range(1, n):
        # kv[m-1:0:-1] = k_{m-j} for j = 1..m-1
        acc = 0.5 * kv[m] * r[0] + np.dot(kv[m - 1 : 0 : -1], r[1:m])
        r[m] = (-kv[m] - dt * acc) / diag
    return ResolventTable.from_values(r, dt)


def trapezoid_convolution(k: np.ndarray, r: np.ndarray, dt: float) -> np.ndarray:
    """``(k * r)(t_m)`` for every grid time by the composite trapezoid rule."""
    n = k.size
    full = np.convolve(k, r)[:n]
    # remove half of the two endpoint contributions
    full -= 0.5 * (k * r[0] + k[0] * r)
    full[0] = 0.0
    return dt * full


def resolvent_residual(k: KernelSpec, r: ResolventTable) -> float:
    """``max_m |r_m + (k * r)_m + k_m|`` with the trapezoid convolution."""
    if k.family == "sampled" and not np.isclose(k.dt, r.dt, rtol=1e-12):
        raise ValueError(f"kernel dt {k.dt} and resolvent dt {r.dt} differ")
    if k.family == "sampled" and k.values.size != r.n:
        raise ValueError(f"kernel has {k.values.size} samples, resolvent has {r.n}")
    kv = k.sample(r.dt, r.n)
    defect = r.values + trapezoid_convolution(kv, r.values, r.dt) + kv
    return float(np.max(np.abs(defect)))


@dataclass(frozen=True)
class AdmissibilityReport:
    nonnegative: bool
    nonincreasing: bool
    convex: bool
    l1_finite: bool
    max_violation: float
    tol: float = DEFAULT_ADMISSIBLE_TOL

    @property
    def admissible(self) -> bool:
        """Hypotheses of the existence and uniqueness results."""
        return self.nonnegative and self.nonincreasing and self.l1_finite

    def to_text(self) -> str:
        def fmt(v):
            return str(v).lower() if isinstance(v, bool) else repr(float(v))

        lines = [f"admissible={fmt(self.admissible)}"]
        lines += [f"{name}={fmt(getattr(self, name))}" for name in
                  ("nonnegative", "nonincreasing", "convex", "l1_finite", "max_violation", "tol")]
        return "\n".join(lines) + "\n"


def check_admissible(r: ResolventTable, tol: float = DEFAULT_ADMISSIBLE_TOL) -> AdmissibilityReport:
    """Check sign, monotonicity, convexity and tail decay of a resolvent table.

    ``l1_finite`` holds when the last sample is below ``tol`` or when the
    table is nonnegative and still decaying over its last quarter, so the
    truncated tail extrapolates to a finite integral.
    """
    v = r.values
    neg = max(0.0, -float(v.min()))
    d1 = np.diff(v)
    inc = max(0.0, float(d1.max())) if d1.size else 0.0
    d2 = np.diff(v, 2)
    conc = max(0.0, -float(d2.min())) if d2.size else 0.0

    q = max(1, v.size // 4)
    decaying = abs(v[-1]) < abs(v[-1 - q]) * (1.0 - 1e-12)
    l1_finite = bool(abs(v[-1]) <= tol or (neg <= tol and decaying))
    return AdmissibilityReport(
        nonnegative=neg <= tol,
        nonincreasing=inc <= tol,
        convex=conc <= tol,
        l1_finite=l1_finite,
        max_violation=max(neg, inc, conc),
        tol=tol,
    )


def paley_wiener_bound(q: float, T: float, eta: float, k_l1: float) -> float:
    """Explicit bound on ``||r||_L1`` from the Paley-Wiener argument.

    ``(8 ceil(6 q T |k|) ceil(8 |k| / eta) + 6) q |k|`` with ``|k|`` the
    L1 norm of the kernel.
    """
    if not (q > 0 and T > 0 and eta > 0):
        raise ValueError("q, T and eta must be positive")
    if k_l1 < 0:
        raise ValueError("k_l1 must be nonnegative")
    a = math.ceil(6.0 * q * T * k_l1)
    b = math.ceil(8.0 * k_l1 / eta)
    return float((8 * a * b + 6) * q * k_l1)


def default_omegas(eps: float, count: int = 4096) -> np.ndarray:
    """Symmetric frequency grid ``|omega| <= 50/eps``."""
    return np.linspace(-50.0 / eps, 50.0 / eps, count)


def laplace_imaginary_axis(k: KernelSpec, omegas, horizon: float, dt: float | None = None) -> np.ndarray:
    """``k_hat(i omega) = int_0^horizon k(t) exp(-i omega t) dt`` by the trapezoid rule.

    Sampled kernels use their own step; analytic ones default to a step that
    resolves both ``eps`` and the largest frequency.
    """
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    if omegas.size == 0:
        raise ValueError("need at least one frequency")
    if not horizon > 0:
        raise ValueError(f"horizon must be positive, got {horizon}")
    if dt is None:
        if k.family == "sampled":
            dt = k.dt
        else:
            wmax = float(np.max(np.abs(omegas)))
            dt = min(k.eps / 50.0, 0.05 / wmax if wmax > 0 else math.inf, horizon / 16)
    n = int(math.ceil(horizon / dt)) + 1
    t = np.linspace(0.0, horizon, n)
    kv = k(t)
    w = np.full(n, t[1] - t[0])
    w[0] *= 0.5
    w[-1] *= 0.5
    kw = kv * w
    out = np.empty(omegas.size, dtype=complex)
    chunk = max(1, 2_000_000 // n)
    for s in range(0, omegas.size, chunk):
        om = omegas[s : s + chunk]
        out[s : s + chunk] = np.exp(-1j * np.outer(om, t)) @ kw
    return out


def sup_inverse_symbol(k: KernelSpec, omegas, horizon: float) -> float:
    """``sup_omega |1 + k_hat(i omega)|^{-1}`` over the sampled frequencies."""
    kh = laplace_imaginary_axis(k, omegas, horizon)
    return float(np.max(1.0 / np.abs(1.0 + kh)))


def write_table(path, times, values, comment: str | None = None):
    """Two-column CSV ``t,value`` with a one-line header (plus optional comment)."""
    path = Path(path)
    with path.open("w") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        fh.write("t,value\n")
        for t, v in zip(times, values):
            fh.write(f"{t:.17g},{v:.17g}\n")


def read_table(path) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of :func:`write_table`; ``#`` lines and a column-name row are skipped."""
    with Path(path).open(newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
    if rows and not _is_number(rows[0][0]):
        rows = rows[1:]
    if not rows or any(len(r) < 2 for r in rows):
        raise ValueError(f"{path}: expected at least one row of two columns")
    arr = np.array([r[:2] for r in rows], dtype=float)
    return arr[:, 0], arr[:, 1]


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def kernel_from_table(path) -> KernelSpec:
    t, v = read_table(path)
    dts = np.diff(t)
    if dts.size == 0 or not np.allclose(dts, dts[0], rtol=1e-9):
        raise ValueError(f"{path}: kernel table must be uniformly spaced")
    return KernelSpec.sampled(v, float(dts[0]))
