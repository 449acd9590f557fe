"""Grid model of C0(R): functions, first-order fields, ODE flows and pullbacks.

Functions live on a uniform grid and are extended by zero outside it, which
stands in for "vanishing at infinity".  The pullback along a flow,
``(E_t f)(xi) = f(F(xi, t))``, is evaluated with local 4-point cubic
interpolation.

The second half of the module is the cube-root counterexample: the fields
``(cbrt(x) + 1) d/dx`` and ``(cbrt(x) - 1) d/dx`` generate flows, while
their average ``cbrt(x) d/dx`` has two solutions leaving x = 0.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .reports import CheckResult, MaxTracker

Coefficient = Callable[[np.ndarray], np.ndarray]

DEFAULT_X_MIN = -8.0
DEFAULT_X_MAX = 8.0
DEFAULT_H = 1e-3
DEFAULT_FLOW_STEP = 1e-3


class FlowEscapeError(RuntimeError):
    pass


class GridMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class Grid:
    x_min: float = DEFAULT_X_MIN
    x_max: float = DEFAULT_X_MAX
    h: float = DEFAULT_H

    def __post_init__(self):
        if not self.x_max > self.x_min or not self.h > 0:
            raise ValueError("need x_max > x_min and h > 0")

    @property
    def size(self) -> int:
        return int(round((self.x_max - self.x_min) / self.h)) + 1

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.h * np.arange(self.size)

    def function(self, f: Callable[[np.ndarray], np.ndarray], smooth: bool = True) -> "GridFunction":
        return GridFunction(self, np.asarray(f(self.x), dtype=complex), smooth)

    def zeros(self) -> "GridFunction":
        return GridFunction(self, np.zeros(self.size, dtype=complex))


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Element of the commutative *-algebra of grid functions (sup norm)."""

    grid: Grid
    values: np.ndarray
    smooth: bool = True

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        if v.shape != (self.grid.size,):
            raise GridMismatchError(f"{v.shape} values for a grid of {self.grid.size} nodes")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def _other(self, other):
        if isinstance(other, GridFunction):
            if other.grid != self.grid:
                raise GridMismatchError("functions live on different grids")
            return other.values
        return other

    def __mul__(self, other):
        return GridFunction(self.grid, self.values * self._other(other), self.smooth)

    __rmul__ = __mul__

    def __add__(self, other):
        return GridFunction(self.grid, self.values + self._other(other), self.smooth)

    __radd__ = __add__

    def __sub__(self, other):
        return GridFunction(self.grid, self.values - self._other(other), self.smooth)

    def __neg__(self):
        return GridFunction(self.grid, -self.values, self.smooth)

    def conj(self) -> "GridFunction":
        return GridFunction(self.grid, self.values.conj(), self.smooth)

    def norm(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0

    def derivative(self) -> np.ndarray:
        """Central difference with zero extension past both ends."""
        v = np.concatenate(([0.0], self.values, [0.0]))
        return (v[2:] - v[:-2]) / (2 * self.grid.h)

    def check_c1(self, tol: float = 1e-2) -> bool:
        """Crude C^1 tag: the difference derivative must not jump by more than ``tol`` between nodes."""
        d = self.derivative()
        return bool(np.max(np.abs(np.diff(d))) <= tol) if d.size > 1 else True

    def at(self, points) -> np.ndarray:
        return cubic_interpolate(self, points)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "re", "im"])
            for x, z in zip(self.grid.x, self.values):
                w.writerow([repr(float(x)), repr(float(z.real)), repr(float(z.imag))])

    @classmethod
    def from_csv(cls, path) -> "GridFunction":
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        x = data[:, 0]
        if x.size < 2:
            raise ValueError("need at least two nodes")
        h = float(x[1] - x[0])
        grid = Grid(float(x[0]), float(x[-1]), h)
        if grid.size != x.size or not np.allclose(grid.x, x, atol=1e-9 * max(1.0, abs(h))):
            raise ValueError("CSV nodes are not a uniform grid")
        return cls(grid, data[:, 1] + 1j * data[:, 2])


def cubic_interpolate(f: GridFunction, points) -> np.ndarray:
    """Local 4-point Lagrange interpolation; zero outside the grid."""
    grid = f.grid
    p = np.asarray(points, dtype=float)
    s = (p - grid.x_min) / grid.h
    s = np.where(np.isfinite(s), np.clip(s, -4.0, grid.size + 4.0), -4.0)  # far points land outside the stencil
    i = np.floor(s).astype(np.int64)
    u = s - i
    n = grid.size
    vals = np.concatenate(([0.0, 0.0], f.values, [0.0, 0.0, 0.0]))

    def pick(k):
        idx = np.clip(k + 2, 0, n + 4)
        out = vals[idx]
        return np.where((k >= -2) & (k <= n + 2), out, 0.0)

    with np.errstate(invalid="ignore"):
        w0 = -u * (u - 1) * (u - 2) / 6
        w1 = (u + 1) * (u - 1) * (u - 2) / 2
        w2 = -(u + 1) * u * (u - 2) / 2
        w3 = (u + 1) * u * (u - 1) / 6
        res = w0 * pick(i - 1) + w1 * pick(i) + w2 * pick(i + 1) + w3 * pick(i + 2)
    inside = (p >= grid.x_min) & (p <= grid.x_max) & np.isfinite(p)
    return np.where(inside, res, 0.0)


# -- fields and flows ---------------------------------------------------------


def real_cbrt(x):
    """Sign-preserving real cube root."""
    return np.cbrt(x)


def v_plus(x):
    """Coefficient of V1 = (cbrt(x) + 1) d/dx."""
    return real_cbrt(x) + 1.0


def v_minus(x):
    """Coefficient of V2 = (cbrt(x) - 1) d/dx."""
    return real_cbrt(x) - 1.0


def v_mid(x):
    """Coefficient of (V1 + V2)/2 = cbrt(x) d/dx."""
    return real_cbrt(x)


def v_one(x):
    return np.ones_like(np.asarray(x, dtype=float))


@dataclass(frozen=True, eq=False)
class GridField:
    """First-order field f -> V(x) f'(x) on grid functions."""

    coefficient: Coefficient
    grid: Grid
    domain_label: str = "C0^1"

    @property
    def is_real(self) -> bool:
        return True

    def __call__(self, f: GridFunction) -> GridFunction:
        if not isinstance(f, GridFunction) or f.grid != self.grid:
            raise GridMismatchError("element outside the field's domain grid")
        coef = np.asarray(self.coefficient(self.grid.x), dtype=float)
        return GridFunction(self.grid, coef * f.derivative(), f.smooth)


def flow(V: Coefficient, xi, t: float, step: float = DEFAULT_FLOW_STEP, bounds=None):
    """Fixed-step classical RK4 for dx/dt = V(x), started at ``xi`` (scalar or array).

    The step is shrunk so that an integer number of steps lands exactly on
    ``t``.  With ``bounds=(lo, hi)`` a trajectory leaving the box raises
    :class:`FlowEscapeError`; a non-finite state always does.
    """
    if t < 0:
        raise ValueError("flow time must be non-negative")
    x = np.array(xi, dtype=float)
    if t == 0:
        return x if x.ndim else float(x)
    n = max(1, int(np.ceil(t / step - 1e-9)))
    dt = t / n
    for _ in range(n):
        k1 = V(x)
        k2 = V(x + 0.5 * dt * k1)
        k3 = V(x + 0.5 * dt * k2)
        k4 = V(x + dt * k3)
        x = x + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if bounds is not None and np.any((x < bounds[0]) | (x > bounds[1])):
            raise FlowEscapeError(f"trajectory left the box {bounds}")
    if not np.all(np.isfinite(x)):
        raise FlowEscapeError("trajectory diverged")
    return x if x.ndim else float(x)


def flow_curves(V: Coefficient, seeds, t_max: float, n_out: int = 101, step: float = DEFAULT_FLOW_STEP):
    """Sample integral curves at ``n_out`` equally spaced times; returns ``(times, x[time, seed])``."""
    times = np.linspace(0.0, t_max, n_out)
    out = np.empty((n_out, len(seeds)))
    x = np.array(seeds, dtype=float)
    out[0] = x
    for k in range(1, n_out):
        x = flow(V, x, times[k] - times[k - 1], step)
        out[k] = x
    return times, out


@dataclass(frozen=True, eq=False)
class FlowMap:
    coefficient: Coefficient
    step: float = DEFAULT_FLOW_STEP
    bounds: tuple | None = None

    def __call__(self, xi, t: float):
        return flow(self.coefficient, xi, t, self.step, self.bounds)


@dataclass(frozen=True, eq=False)
class Pullback:
    """Endomorphism f -> f o F(., t) of grid functions."""

    flow: FlowMap
    time: float
    grid: Grid
    _targets: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.time < 0:
            raise ValueError("pullback time must be non-negative")
        object.__setattr__(self, "_targets", np.asarray(self.flow(self.grid.x, self.time)))

    @property
    def targets(self) -> np.ndarray:
        return self._targets

    def __call__(self, f: GridFunction) -> GridFunction:
        if f.grid != self.grid:
            raise GridMismatchError("function lives on a different grid")
        if self.time == 0:
            return f
        return GridFunction(self.grid, cubic_interpolate(f, self._targets), f.smooth)

    def evaluate(self, f: GridFunction, xi) -> np.ndarray:
        """(E_t f)(xi) at arbitrary points, flowing each point separately."""
        return cubic_interpolate(f, self.flow(np.asarray(xi, dtype=float), self.time))


def pullback_semigroup(V: Coefficient, t: float, grid: Grid | None = None, step: float = DEFAULT_FLOW_STEP) -> Pullback:
    return Pullback(FlowMap(V, step), t, grid or Grid())


def standard_test_functions(grid: Grid) -> list[GridFunction]:
    """Smooth complex test functions, negligible at the grid ends."""
    fs = [
        lambda x: np.exp(-x**2),
        lambda x: np.exp(-((x - 1.0) ** 2) / 2) * np.exp(1j * x),
        lambda x: (1 + 0.5j) * np.exp(-((x + 1.5) ** 2)),
        lambda x: np.sin(2 * x) * np.exp(-(x**2) / 4),
        lambda x: 1.0 / np.cosh(x) ** 2 + 0.3j * np.exp(-((x - 0.5) ** 2) * 3),
    ]
    return [grid.function(f) for f in fs]


def endomorphism_suite(E: Pullback, functions: list[GridFunction], tol: float = 1e-4) -> list[CheckResult]:
    """Multiplicativity, *-preservation and sup-norm non-increase of a pullback."""
    mult, star, excess = MaxTracker(), MaxTracker(), MaxTracker()
    for i, f in enumerate(functions):
        Ef = E(f)
        star.update((E(f.conj()) - Ef.conj()).norm(), i)
        excess.update(max(Ef.norm() - f.norm(), 0.0), i)
        for j, g in enumerate(functions):
            mult.update((E(f * g) - Ef * E(g)).norm(), (i, j))
    return [
        mult.result("multiplicativity", tol),
        star.result("star_preservation", tol),
        excess.result("norm_non_increase", tol),
    ]


# -- the y-substitution for V1 --------------------------------------------------


def y_substitution(x):
    """y(x) = 3 (ln(cbrt x + 1) - cbrt x + x^(2/3) / 2), valid for x > -1."""
    c = real_cbrt(np.asarray(x, dtype=float))
    return 3.0 * (np.log1p(c) - c + 0.5 * c * c)


@dataclass
class SubstitutionReport:
    max_residual: float
    witness_x: float
    derivative_at_one: float
    one_sided: list  # rows (delta, right quotient, left quotient)
    near_singular: list  # rows (x, residual) approaching -1, excluded from the verdict
    tolerance: float

    @property
    def c1_at_zero(self) -> bool:
        right = np.array([abs(r[1] - 1) for r in self.one_sided])
        left = np.array([abs(r[2] - 1) for r in self.one_sided])
        return bool(np.all(np.diff(right) < 0) and np.all(np.diff(left) < 0) and right[-1] < 1e-2 and left[-1] < 1e-2)

    def checks(self) -> list[CheckResult]:
        last = self.one_sided[-1]
        return [
            CheckResult("substitution_dy_dx_times_V1", self.max_residual, self.tolerance, {"x": self.witness_x}),
            CheckResult("substitution_dy_dx_at_1", abs(self.derivative_at_one - 0.5), 1e-8),
            CheckResult(
                "substitution_c1_at_0",
                max(abs(last[1] - 1), abs(last[2] - 1)),
                1e-2,
                {"delta": last[0]},
                info={"monotone": self.c1_at_zero},
            ),
        ]


def substitution_check(
    x_max: float = DEFAULT_X_MAX,
    lower_margin: float = 0.1,
    spacing: float = 1e-3,
    fd_step: float = 1e-5,
    tol: float = 1e-6,
) -> SubstitutionReport:
    """Verify dy/dx (cbrt x + 1) = 1 by central differences of the closed form.

    Nodes closer to -1 than ``lower_margin`` are reported separately, and the
    node x = 0 is covered by the one-sided quotients instead: the central
    stencil there straddles the cusp of cbrt.
    """
    xs = np.arange(-1.0 + lower_margin, x_max + 0.5 * spacing, spacing)
    xs = xs[np.abs(xs) > 0.5 * spacing]
    d = np.minimum(fd_step, np.abs(xs) / 10)
    dy = (y_substitution(xs + d) - y_substitution(xs - d)) / (2 * d)
    res = np.abs(dy * v_plus(xs) - 1.0)
    k = int(np.argmax(res))

    d1 = (y_substitution(1 + fd_step) - y_substitution(1 - fd_step)) / (2 * fd_step)

    one_sided = []
    for delta in 10.0 ** -np.arange(2, 9):
        right = (y_substitution(delta) - y_substitution(0.0)) / delta
        left = (y_substitution(0.0) - y_substitution(-delta)) / delta
        one_sided.append((float(delta), float(right), float(left)))

    near = []
    for gap in (1e-1, 1e-2, 1e-3, 1e-4):
        x = -1.0 + gap
        dd = min(fd_step, gap / 10)
        der = (y_substitution(x + dd) - y_substitution(x - dd)) / (2 * dd)
        near.append((x, float(abs(der * v_plus(x) - 1.0))))

    return SubstitutionReport(float(res[k]), float(xs[k]), float(d1), one_sided, near, tol)


# -- non-uniqueness at x = 0 for cbrt(x) d/dx ------------------------------------


def branch_endpoint(t: float) -> float:
    """(2t/3)^(3/2), the endpoint of the '+' solution leaving 0."""
    return (2.0 * t / 3.0) ** 1.5


@dataclass
class NonuniquenessReport:
    t: float
    sweep: list  # rows (eps, x_plus, x_minus)
    limit_plus: float
    limit_minus: float
    degenerate: float  # naive integration from exactly 0
    tolerance: float

    @property
    def expected(self) -> float:
        return branch_endpoint(self.t)

    @property
    def gap_monotone(self) -> bool:
        gaps = [xp - xm for _, xp, xm in self.sweep]
        return all(a > b for a, b in zip(gaps, gaps[1:]))

    def checks(self) -> list[CheckResult]:
        e = self.expected
        return [
            CheckResult("branch_plus_endpoint", abs(self.limit_plus - e), self.tolerance,
                        info={"limit": self.limit_plus, "expected": e}),
            CheckResult("branch_minus_endpoint", abs(self.limit_minus + e), self.tolerance,
                        info={"limit": self.limit_minus, "expected": -e}),
            CheckResult("branch_gap_monotone", 0.0 if self.gap_monotone else 1.0, 0.5),
        ]


def counterexample_nonuniqueness(
    t: float = 1.0,
    eps: float | None = None,
    step: float = 1e-4,
    tol: float = 1e-4,
) -> NonuniquenessReport:
    """Integrate dx/dt = cbrt(x) from +eps and -eps for a sweep of eps.

    The limits eps -> 0 are read off the smallest eps in the sweep.  The
    integrator started at exactly 0 stays at 0; that value is reported as
    ``degenerate`` and is an artifact of the discrete map, not a verdict.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    epss = list(10.0 ** -np.arange(2, 9))
    if eps is not None:
        if eps <= 0:
            raise ValueError("eps must be positive")
        epss = sorted(set(epss) | {float(eps)}, reverse=True)
    seeds = np.concatenate((epss, [-e for e in epss], [0.0]))
    ends = flow(v_mid, seeds, t, step)
    m = len(epss)
    sweep = [(float(e), float(ends[i]), float(ends[m + i])) for i, e in enumerate(epss)]
    return NonuniquenessReport(t, sweep, sweep[-1][1], sweep[-1][2], float(ends[-1]), tol)


def bump(center: float, radius: float):
    """Smooth bump with compact support (center - radius, center + radius), peak 1."""

    def f(x):
        r = (np.asarray(x, dtype=float) - center) / radius
        out = np.zeros_like(r)
        inside = np.abs(r) < 1
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - r[inside] ** 2))
        return out

    return f


@dataclass
class EndomorphismFailureReport:
    t: float
    field: str
    x_left: float
    x_right: float
    violation_plus: float
    violation_minus: float
    product_vanishes: bool

    @property
    def violation(self) -> float:
        return max(self.violation_plus, self.violation_minus)


def counterexample_endomorphism_failure(
    t: float = 1.0,
    V: Coefficient = v_mid,
    field_name: str = "cbrt(x) d/dx",
    radius: float = 0.5,
    delta: float = 1e-8,
    step: float = 1e-4,
    grid: Grid | None = None,
    centers: tuple[float, float] | None = None,
) -> EndomorphismFailureReport:
    """Measure how badly a single-valued pullback at xi = 0 fails to be multiplicative.

    f and g are bumps of fixed radius centred by default at +(2t/3)^(3/2)
    and -(2t/3)^(3/2); pass ``centers`` to place them elsewhere.  The flow is run from -delta and +delta; continuity
    of E_t(h) at 0 forces E_t(h)(0) to agree with h at both one-sided
    endpoints.  Choosing the '+' branch, E_t(fg)(0) = (fg)(x_+) while
    E_t(f)(0) E_t(g)(0) = f(x_+) g(x_-); the '-' branch is symmetric.  For a
    field with a unique flow through 0 the two endpoints coincide and the
    violation is at the level of interpolation error.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    grid = grid or Grid()
    cf, cg = centers if centers is not None else (branch_endpoint(t), -branch_endpoint(t))
    f = grid.function(bump(cf, radius))
    g = grid.function(bump(cg, radius))
    fg = f * g
    x_left, x_right = flow(V, np.array([-delta, delta]), t, step)
    fv = cubic_interpolate(f, [x_left, x_right])
    gv = cubic_interpolate(g, [x_left, x_right])
    fgv = cubic_interpolate(fg, [x_left, x_right])
    cross = fv[1] * gv[0]
    return EndomorphismFailureReport(
        t=t,
        field=field_name,
        x_left=float(x_left),
        x_right=float(x_right),
        violation_plus=float(abs(fgv[1] - cross)),
        violation_minus=float(abs(fgv[0] - cross)),
        product_vanishes=fg.norm() == 0.0,
    )
