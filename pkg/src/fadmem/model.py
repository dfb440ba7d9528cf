"""Flux models, Kruzkov entropy pairs, grid functions and initial data.

Everything here is a small immutable value type or a pure function over
numpy arrays; the solvers in :mod:`fadmem.memsolver` and
:mod:`fadmem.reference` build on this vocabulary.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy import integrate

PERIODIC = "periodic"
OUTFLOW = "outflow"
BOUNDARIES = (PERIODIC, OUTFLOW)


class GridMismatch(ValueError):
    pass


# ---------------------------------------------------------------------------
# Flux models
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FluxModel:
    """Scalar flux ``f`` with derivative ``f'``.

    ``kind`` is one of ``linear`` (f = a u), ``burgers`` (f = u^2/2),
    ``cubic`` (f = u^3/3) or ``poly`` (f = sum c_j u^j, coefficients in
    increasing degree).
    """

    kind: str
    a: float = 1.0
    coefficients: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in ("linear", "burgers", "cubic", "poly"):
            raise ValueError(f"unknown flux kind {self.kind!r}")
        if self.kind == "poly" and len(self.coefficients) == 0:
            raise ValueError("poly flux needs at least one coefficient")

    @classmethod
    def linear(cls, a: float = 1.0) -> FluxModel:
        return cls("linear", a=float(a))

    @classmethod
    def burgers(cls) -> FluxModel:
        return cls("burgers")

    @classmethod
    def cubic(cls) -> FluxModel:
        return cls("cubic")

    @classmethod
    def poly(cls, coefficients: Sequence[float]) -> FluxModel:
        return cls("poly", coefficients=tuple(float(c) for c in coefficients))

    def f(self, u):
        u = np.asarray(u, dtype=float)
        if self.kind == "linear":
            return self.a * u
        if self.kind == "burgers":
            return 0.5 * u * u
        if self.kind == "cubic":
            return u * u * u / 3.0
        return np.polynomial.polynomial.polyval(u, self.coefficients)

    def df(self, u):
        u = np.asarray(u, dtype=float)
        if self.kind == "linear":
            return np.full_like(u, self.a)
        if self.kind == "burgers":
            return u.copy()
        if self.kind == "cubic":
            return u * u
        der = np.polynomial.polynomial.polyder(self.coefficients)
        return np.polynomial.polynomial.polyval(u, der) + 0.0 * u

    def max_speed(self, lo: float, hi: float) -> float:
        """Upper bound of ``|f'|`` over the interval ``[lo, hi]``."""
        if lo > hi:
            lo, hi = hi, lo
        if self.kind == "linear":
            return abs(self.a)
        if self.kind in ("burgers", "cubic"):
            # |f'| is maximized at an endpoint for both
            return float(np.max(np.abs(self.df(np.array([lo, hi])))))
        pts = np.linspace(lo, hi, 257)
        der2 = np.polynomial.polynomial.polyder(self.coefficients, 2)
        crit = np.roots(der2[::-1]) if len(der2) > 1 else np.array([])
        crit = np.real(crit[np.isreal(crit)])
        crit = crit[(crit >= lo) & (crit <= hi)]
        return float(np.max(np.abs(self.df(np.concatenate([pts, crit])))))

    def split(self, u):
        """Engquist-Osher splitting ``f = f_plus + f_minus`` (with f_plus(0) = f(0)).

        ``f_plus`` is nondecreasing and ``f_minus`` nonincreasing.
        """
        u = np.asarray(u, dtype=float)
        if self.kind == "linear":
            return max(self.a, 0.0) * u, min(self.a, 0.0) * u
        if self.kind == "burgers":
            up, um = np.maximum(u, 0.0), np.minimum(u, 0.0)
            return 0.5 * up * up, 0.5 * um * um
        if self.kind == "cubic":
            return self.f(u), np.zeros_like(u)
        fp = np.vectorize(self._poly_positive_part)(u)
        return self.f(0.0) + fp, self.f(u) - self.f(0.0) - fp

    def _poly_positive_part(self, u: float) -> float:
        # integral of max(f', 0) from 0 to u
        der = np.polynomial.polynomial.polyder(self.coefficients)
        lo, hi = (0.0, u) if u >= 0 else (u, 0.0)
        roots = np.roots(der[::-1]) if len(der) > 1 else np.array([])
        roots = np.real(roots[np.isreal(roots)])
        knots = np.unique(np.concatenate([[lo, hi], roots[(roots > lo) & (roots < hi)]]))
        total = 0.0
        for a, b in zip(knots[:-1], knots[1:]):
            if self.df(0.5 * (a + b)) > 0:
                total += float(self.f(b) - self.f(a))
        return total if u >= 0 else -total


# ---------------------------------------------------------------------------
# Kruzkov entropy pairs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EntropyPair:
    """Kruzkov pair ``eta(u) = |u - c|``, ``q(u) = sign(u - c) (f(u) - f(c))``."""

    c: float
    flux: FluxModel

    def eta(self, u):
        return np.abs(np.asarray(u, dtype=float) - self.c)

    def q(self, u):
        u = np.asarray(u, dtype=float)
        return np.sign(u - self.c) * (self.flux.f(u) - self.flux.f(self.c))


def kruzkov_pair(c: float, flux: FluxModel, u):
    """Return ``(eta, q)`` of the Kruzkov pair at level ``c`` evaluated at ``u``."""
    pair = EntropyPair(float(c), flux)
    return pair.eta(u), pair.q(u)


# ---------------------------------------------------------------------------
# Grid functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Cell averages on a uniform 1-D grid.

    Cell ``i`` covers ``[x_left + i dx, x_left + (i + 1) dx]``.
    """

    values: np.ndarray
    x_left: float
    dx: float
    boundary: str = PERIODIC

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if vals.ndim != 1 or vals.size < 4:
            raise ValueError("grid function needs a 1-D array with at least 4 cells")
        if not self.dx > 0:
            raise ValueError(f"dx must be positive, got {self.dx}")
        if self.boundary not in BOUNDARIES:
            raise ValueError(f"unknown boundary {self.boundary!r}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("grid function values must be finite")

    @classmethod
    def zeros(cls, x_min: float, x_max: float, cells: int, boundary: str = PERIODIC):
        dx = (x_max - x_min) / cells
        return cls(np.zeros(cells), float(x_min), dx, boundary)

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def x_right(self) -> float:
        return self.x_left + self.n * self.dx

    @property
    def centers(self) -> np.ndarray:
        return self.x_left + (np.arange(self.n) + 0.5) * self.dx

    def with_values(self, values) -> GridFunction:
        return replace(self, values=np.asarray(values, dtype=float))

    def same_grid(self, other: GridFunction) -> bool:
        return (
            self.n == other.n
            and self.boundary == other.boundary
            and np.isclose(self.x_left, other.x_left, rtol=0, atol=1e-12 * max(1.0, abs(self.x_left)))
            and np.isclose(self.dx, other.dx, rtol=1e-12, atol=0)
        )


def pad(values: np.ndarray, boundary: str, width: int = 1) -> np.ndarray:
    """Ghost-cell padding: wrap for periodic, copy edge values for outflow."""
    mode = "wrap" if boundary == PERIODIC else "edge"
    return np.pad(values, width, mode=mode)


def _check_same(u: GridFunction, v: GridFunction):
    if not u.same_grid(v):
        raise GridMismatch("grid functions live on different grids")


def tv(u: GridFunction) -> float:
    """Discrete total variation, wrapping around for periodic grids."""
    d = np.diff(u.values)
    total = float(np.sum(np.abs(d)))
    if u.boundary == PERIODIC:
        total += abs(float(u.values[0] - u.values[-1]))
    return total


def l1_dist(u: GridFunction, v: GridFunction) -> float:
    _check_same(u, v)
    return float(u.dx * np.sum(np.abs(u.values - v.values)))


def l1_norm(u: GridFunction) -> float:
    return float(u.dx * np.sum(np.abs(u.values)))


def linf(u: GridFunction) -> float:
    return float(np.max(np.abs(u.values)))


def mass(u: GridFunction) -> float:
    return float(u.dx * np.sum(u.values))


def total_variation_bound(u: GridFunction) -> float:
    """``M(u0) = TV(u0) + 2 ||u0||_inf``, the constant in the BV estimates."""
    return tv(u) + 2.0 * linf(u)


def restrict(u: GridFunction, factor: int) -> GridFunction:
    """Average blocks of ``factor`` cells onto the nested coarse grid."""
    if u.n % factor:
        raise GridMismatch(f"{u.n} cells do not coarsen by {factor}")
    vals = u.values.reshape(-1, factor).mean(axis=1)
    return GridFunction(vals, u.x_left, u.dx * factor, u.boundary)


# ---------------------------------------------------------------------------
# Initial data and mollification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InitialData:
    """Analytic or sampled initial profile ``u0``.

    Profiles: ``riemann`` (u_left, u_right, x0), ``square`` (height, width,
    center, base), ``smooth`` (amplitude, center, radius, base: a C-infinity
    bump), ``sampled`` (values on the target grid).
    """

    profile: str
    params: dict = field(default_factory=dict)
    values: tuple[float, ...] = ()

    @classmethod
    def riemann(cls, u_left: float, u_right: float, x0: float = 0.0) -> InitialData:
        return cls("riemann", {"u_left": u_left, "u_right": u_right, "x0": x0})

    @classmethod
    def square(cls, height: float = 1.0, width: float = 0.5, center: float = 0.0, base: float = 0.0):
        return cls("square", {"height": height, "width": width, "center": center, "base": base})

    @classmethod
    def smooth(cls, amplitude: float = 1.0, center: float = 0.0, radius: float = 0.5, base: float = 0.0):
        return cls("smooth", {"amplitude": amplitude, "center": center, "radius": radius, "base": base})

    @classmethod
    def constant(cls, value: float) -> InitialData:
        return cls("square", {"height": 0.0, "width": 0.0, "center": 0.0, "base": value})

    @classmethod
    def sampled(cls, values: Sequence[float]) -> InitialData:
        return cls("sampled", {}, tuple(float(v) for v in values))

    def __post_init__(self):
        if self.profile not in ("riemann", "square", "smooth", "sampled"):
            raise ValueError(f"unknown initial profile {self.profile!r}")

    def __call__(self, x):
        """Pointwise evaluation (not available for sampled profiles)."""
        x = np.asarray(x, dtype=float)
        p = self.params
        if self.profile == "riemann":
            return np.where(x < p["x0"], p["u_left"], p["u_right"]).astype(float)
        if self.profile == "square":
            inside = np.abs(x - p["center"]) < 0.5 * p["width"]
            return p["base"] + p["height"] * inside
        if self.profile == "smooth":
            return p["base"] + p["amplitude"] * standard_mollifier((x - p["center"]) / p["radius"]) / _BUMP_PEAK
        raise TypeError("sampled initial data has no pointwise formula")

    def on_grid(self, x_min: float, x_max: float, cells: int, boundary: str = PERIODIC) -> GridFunction:
        """Midpoint sampling onto a uniform grid."""
        grid = GridFunction.zeros(x_min, x_max, cells, boundary)
        if self.profile == "sampled":
            if len(self.values) != cells:
                raise ValueError(f"sampled profile has {len(self.values)} values, grid has {cells}")
            return grid.with_values(self.values)
        return grid.with_values(self(grid.centers))


def standard_mollifier(x):
    """Unnormalized bump ``exp(-1/(1 - x^2))`` on ``|x| < 1``."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = np.abs(x) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - x[inside] ** 2))
    return out


_BUMP_PEAK = float(np.exp(-1.0))
# unit-mass normalization of the bump on [-1, 1]
MOLLIFIER_MASS = integrate.quad(lambda s: float(standard_mollifier(s)), -1.0, 1.0, epsabs=1e-14)[0]


def mollifier_weights(nu: float, dx: float) -> np.ndarray:
    """Discrete weights of ``rho_nu`` on offsets ``j dx`` (midpoint rule, unit sum)."""
    half = int(np.ceil(nu / dx))
    offsets = np.arange(-half, half + 1) * dx
    w = standard_mollifier(offsets / nu)
    return w / w.sum()


def mollify(u0: InitialData | GridFunction, nu: float, grid: GridFunction) -> GridFunction:
    """Discrete ``(u0 chi_nu) * rho_nu`` on ``grid``.

    ``chi_nu`` cuts the data off outside ``|x| <= 1/nu``; on periodic grids
    there is no cutoff. The discrete kernel has nonnegative weights with unit
    sum, so constants are preserved and neither TV nor the sup norm grows.
    """
    if not nu > 0:
        raise ValueError(f"mollification width must be positive, got {nu}")
    if grid.dx > nu / 4:
        raise ValueError(f"grid too coarse for nu={nu}: need dx <= nu/4, got dx={grid.dx}")
    if isinstance(u0, GridFunction):
        if not u0.same_grid(grid):
            raise GridMismatch("initial grid function does not match target grid")
        base = u0.values
    else:
        base = u0.on_grid(grid.x_left, grid.x_right, grid.n, grid.boundary).values
    w = mollifier_weights(nu, grid.dx)
    half = (w.size - 1) // 2
    ext = pad(base, grid.boundary, half)
    if grid.boundary != PERIODIC:
        xs = grid.x_left + (np.arange(-half, grid.n + half) + 0.5) * grid.dx
        ext = ext * (np.abs(xs) <= 1.0 / nu)
    out = np.convolve(ext, w[::-1], mode="valid")
    return grid.with_values(out)


def second_difference_l1(u: GridFunction) -> float:
    """Discrete ``||u_xx||_L1`` as ``sum |u_{i+1} - 2 u_i + u_{i-1}| / dx``."""
    p = pad(u.values, u.boundary)
    return float(np.sum(np.abs(p[2:] - 2.0 * p[1:-1] + p[:-2])) / u.dx)
