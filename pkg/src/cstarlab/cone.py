"""Semigroups parametrized by the forward light cone, and their gauge bundle.

A frame of skew-Hermitian generators g_0..g_{n-1} gives, for each x in the
convex hull of the cone, the inner semigroup of g(x) = sum x^k g_k.  The
gauge group is the full unitary group of the matrix model, so the
curvature c_kl = [g_k, g_l] always lies in the gauge algebra.

A bundle point (base x, fiber u) stands for the endomorphism
Ad_u o E^{x.V}_1 = Ad_{u exp(g(x))}.  Composing along a polyline, later
segments act on the left; the fiber is recovered by right-multiplying
with exp(-g(endpoint)).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import (
    PAULI,
    SIGMA_1,
    SIGMA_2,
    SIGMA_3,
    GaugeAlgebraElement,
    GaugeGroupElement,
    as_matrix,
    commutator,
    cstar_norm,
    expm,
    log_near_identity,
    random_skew,
    random_unit_matrix,
)
from .representation import ParameterMatrix
from .reports import CheckResult, MaxTracker, observed_orders
from .semigroups import InnerSemigroup

CONE_TOL = 1e-12
IDENTITY_2 = np.eye(2, dtype=complex)


class HullError(ValueError):
    pass


def minkowski_square(x) -> float:
    x = np.asarray(x)
    return x[0] ** 2 - x[1] ** 2 - x[2] ** 2 - x[3] ** 2


@dataclass(frozen=True, eq=False)
class ConeVector:
    x: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        if x.shape != (4,):
            raise ValueError(f"cone vectors have 4 components, got shape {x.shape}")
        object.__setattr__(self, "x", x)

    def cone_defect(self) -> float:
        return abs(minkowski_square(self.x)) if self.x[0] >= 0 else np.inf

    def in_cone(self, tol: float = CONE_TOL) -> bool:
        scale = max(1.0, float(self.x[0]) ** 2)
        return bool(self.x[0] >= 0 and abs(minkowski_square(self.x)) <= tol * scale)

    def in_hull(self, tol: float = CONE_TOL) -> bool:
        return in_hull(self.x, tol)


def in_hull(x, tol: float = CONE_TOL) -> bool:
    """Convex hull of the forward cone: x^0 >= |(x^1, x^2, x^3)|."""
    x = np.asarray(x, dtype=float)
    return bool(x[0] + tol * max(1.0, abs(x[0])) >= np.linalg.norm(x[1:]))


def pauli_map(x) -> ParameterMatrix:
    """X = x^0 I + sum_k x^k sigma_k = [[x0 + x3, x1 - i x2], [x1 + i x2, x0 - x3]].

    Complex ``x`` is accepted; the result is Hermitian exactly when x is real.
    """
    x = np.asarray(x)
    X = np.array(
        [[x[0] + x[3], x[1] - 1j * x[2]], [x[1] + 1j * x[2], x[0] - x[3]]],
        dtype=complex,
    )
    return ParameterMatrix(X)


def inverse_pauli_map(X) -> np.ndarray:
    """Coordinates x^mu = tr(X sigma_mu) / 2 with sigma_0 = I; real part only."""
    X = X.X if isinstance(X, ParameterMatrix) else np.asarray(X, dtype=complex)
    x = [np.trace(X).real / 2] + [np.trace(X @ s).real / 2 for s in PAULI]
    return np.array(x)


def spinor_cone_point(phi) -> ConeVector:
    """The cone vector whose Pauli matrix is phi (x) conj(phi)."""
    phi = np.asarray(phi, dtype=complex)
    a, b = phi
    # entries of phi phi^dagger read off directly
    x0 = 0.5 * (abs(a) ** 2 + abs(b) ** 2)
    x3 = 0.5 * (abs(a) ** 2 - abs(b) ** 2)
    off = b * np.conj(a)  # X[1, 0] = x1 + i x2
    return ConeVector(np.array([x0, off.real, off.imag, x3]))


# -- generator frames ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GeneratorFrame:
    generators: tuple

    def __post_init__(self):
        gens = tuple(
            g.value if isinstance(g, GaugeAlgebraElement) else GaugeAlgebraElement(as_matrix(g)).value
            for g in self.generators
        )
        dims = {g.shape for g in gens}
        if len(dims) != 1:
            raise ValueError("frame generators must share one dimension")
        object.__setattr__(self, "generators", gens)

    @property
    def n(self) -> int:
        return len(self.generators)

    @property
    def dim(self) -> int:
        return self.generators[0].shape[0]

    def g(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise ValueError(f"expected {self.n} coordinates, got shape {x.shape}")
        return np.tensordot(x, np.array(self.generators), axes=1)

    def curvature(self, k: int, l: int) -> np.ndarray:
        return commutator(self.generators[k], self.generators[l])


def default_frame(dim: int = 2) -> GeneratorFrame:
    """Four unit-norm skew-Hermitian generators built from Pauli tensor products."""
    if dim == 2:
        mats = [SIGMA_3, SIGMA_1, SIGMA_2, (SIGMA_1 + SIGMA_2 + SIGMA_3) / np.sqrt(3)]
    elif dim == 4:
        mats = [
            np.kron(SIGMA_3, IDENTITY_2),
            np.kron(SIGMA_1, SIGMA_1),
            np.kron(SIGMA_2, SIGMA_3),
            np.kron(IDENTITY_2, SIGMA_2),
        ]
    else:
        raise ValueError("default frames exist for dim 2 and 4; use random_frame otherwise")
    return GeneratorFrame(tuple(1j * m for m in mats))


def random_frame(rng: np.random.Generator, dim: int, n: int = 4) -> GeneratorFrame:
    return GeneratorFrame(tuple(random_skew(rng, dim, norm=1.0) for _ in range(n)))


def direction_semigroup(frame: GeneratorFrame, x) -> InnerSemigroup:
    x = x.x if isinstance(x, ConeVector) else np.asarray(x, dtype=float)
    if not in_hull(x):
        raise HullError(f"{x} is outside the convex hull of the cone")
    return InnerSemigroup(frame.g(x))


# -- interchange and holonomy -----------------------------------------------------


def interchange(frame: GeneratorFrame, x, y, t: float, s: float, samples=None, rng=None):
    """Group commutator u with E^x_t o E^y_s = Ad_u o E^y_s o E^x_t.

    Returns ``(u, residual)`` where the residual is the sup over unit-norm
    samples of the mismatch of that equation.
    """
    if t < 0 or s < 0:
        raise ValueError("t and s must be non-negative")
    x = x.x if isinstance(x, ConeVector) else x
    y = y.x if isinstance(y, ConeVector) else y
    A, B = expm(t * frame.g(x)), expm(s * frame.g(y))
    Ai, Bi = A.conj().T, B.conj().T
    u = GaugeGroupElement(A @ B @ Ai @ Bi)
    if samples is None:
        rng = rng or np.random.default_rng(0)
        samples = [random_unit_matrix(rng, frame.dim) for _ in range(8)]
    worst = 0.0
    U = u.value
    for q in samples:
        lhs = A @ (B @ q @ Bi) @ Ai
        rhs = U @ (B @ (A @ q @ Ai) @ Bi) @ U.conj().T
        worst = max(worst, cstar_norm(lhs - rhs))
    return u, worst


@dataclass(frozen=True, eq=False)
class BundlePoint:
    """Stands for the endomorphism Ad_fiber o E^{base.V}_1."""

    base: np.ndarray
    fiber: GaugeGroupElement

    def unitary(self, frame: GeneratorFrame) -> np.ndarray:
        return self.fiber.value @ expm(frame.g(self.base))

    def apply(self, frame: GeneratorFrame, q) -> np.ndarray:
        W = self.unitary(frame)
        return W @ as_matrix(q) @ W.conj().T


def extract_fiber(frame: GeneratorFrame, base, unitary) -> GaugeGroupElement:
    """u with Ad_unitary = Ad_u o E^{base.V}_1, i.e. u = unitary exp(-g(base))."""
    return GaugeGroupElement(np.asarray(unitary) @ expm(-frame.g(base)), tol=1e-9)


def path_compose(frame: GeneratorFrame, path: Sequence) -> BundlePoint:
    """Compose the segment semigroups along a polyline that starts at 0.

    Every increment must lie in the hull, so the path moves monotonically
    through it.
    """
    pts = [np.asarray(p, dtype=float) for p in path]
    if not pts:
        raise ValueError("empty path")
    if np.any(pts[0] != 0):
        pts.insert(0, np.zeros_like(pts[0]))
    W = np.eye(frame.dim, dtype=complex)
    for a, b in zip(pts, pts[1:]):
        inc = b - a
        if not in_hull(inc):
            raise HullError(f"segment {a} -> {b} leaves the hull")
        W = expm(frame.g(inc)) @ W
    end = pts[-1]
    return BundlePoint(end, extract_fiber(frame, end, W))


def load_path(path_file) -> list[np.ndarray]:
    with open(path_file) as fh:
        data = json.load(fh)
    pts = [np.asarray(p, dtype=float) for p in data]
    if any(p.shape != (4,) for p in pts):
        raise ValueError("paths are lists of 4-vectors")
    return pts


def two_path_consistency(frame: GeneratorFrame, x, y, t: float, s: float, samples=None, rng=None) -> dict:
    """Fibers of 0 -> tx -> tx+sy and 0 -> sy -> tx+sy against the interchange unitary."""
    x = x.x if isinstance(x, ConeVector) else np.asarray(x, dtype=float)
    y = y.x if isinstance(y, ConeVector) else np.asarray(y, dtype=float)
    end = t * x + s * y
    p1 = path_compose(frame, [np.zeros(4), t * x, end])
    p2 = path_compose(frame, [np.zeros(4), s * y, end])
    u_int, _ = interchange(frame, x, y, t, s)
    hol = p2.fiber.value @ p1.fiber.value.conj().T
    if samples is None:
        rng = rng or np.random.default_rng(0)
        samples = [random_unit_matrix(rng, frame.dim) for _ in range(8)]
    endo = 0.0
    for q in samples:
        lhs = p2.apply(frame, q)
        rhs = hol @ p1.apply(frame, q) @ hol.conj().T
        endo = max(endo, cstar_norm(lhs - rhs))
    return {
        "base_mismatch": float(np.max(np.abs(p1.base - p2.base))),
        "fiber_vs_interchange": cstar_norm(hol - u_int.value),
        "left_ad_residual": endo,
        "holonomy": hol,
    }


def rectangle_holonomy(frame: GeneratorFrame, x, y, t: float, s: float) -> dict:
    """Holonomy around the rectangle spanned by tx and sy against its curvature term ts[g(x), g(y)]."""
    x = x.x if isinstance(x, ConeVector) else np.asarray(x, dtype=float)
    y = y.x if isinstance(y, ConeVector) else np.asarray(y, dtype=float)
    hol = two_path_consistency(frame, x, y, t, s)["holonomy"]
    log_u = log_near_identity(hol)
    leading = t * s * commutator(frame.g(x), frame.g(y))
    return {
        "log_norm": cstar_norm(log_u),
        "leading_norm": cstar_norm(leading),
        "defect": cstar_norm(log_u - leading),
    }


def holonomy_sweep(frame: GeneratorFrame, x, y, sizes: Sequence[float]) -> list[dict]:
    rows = []
    for r in sizes:
        d = rectangle_holonomy(frame, x, y, r, r)
        rows.append({"loop_size": r, **d})
    return rows


def holonomy_defect_order(rows: list[dict]) -> float:
    """Smallest observed order of the defect over successive sizes in a sweep."""
    sizes = [row["loop_size"] for row in rows]
    defects = [row["defect"] for row in rows]
    # sizes shrink, so flip to ascending mesh-count form
    orders = observed_orders([1 / s for s in sizes], defects)
    return min(orders)


def bundle_compose(frame: GeneratorFrame, a: BundlePoint, b: BundlePoint) -> BundlePoint:
    """The bundle point of (endomorphism of a) o (endomorphism of b), over a.base + b.base."""
    W = a.unitary(frame) @ b.unitary(frame)
    base = a.base + b.base
    return BundlePoint(base, extract_fiber(frame, base, W))


def bundle_semigroup_check(
    frame: GeneratorFrame,
    points: Sequence[BundlePoint],
    samples=None,
    rng=None,
    tol: float = 1e-9,
) -> list[CheckResult]:
    """Composition of bundle points: base additivity, fiber unitarity, the
    fiber-extraction equation, and the group law on the fiber over 0."""
    rng = rng or np.random.default_rng(0)
    if samples is None:
        samples = [random_unit_matrix(rng, frame.dim) for _ in range(6)]
    base, unit, extract, zero = MaxTracker(), MaxTracker(), MaxTracker(), MaxTracker()
    for i, a in enumerate(points):
        for j, b in enumerate(points):
            c = bundle_compose(frame, a, b)
            base.update(float(np.max(np.abs(c.base - (a.base + b.base)))), (i, j))
            fiber = c.fiber.value
            unit.update(cstar_norm(fiber.conj().T @ fiber - np.eye(frame.dim)), (i, j))
            for q in samples:
                direct = a.apply(frame, b.apply(frame, q))
                extract.update(cstar_norm(direct - c.apply(frame, q)), (i, j))
            if not np.any(a.base) and not np.any(b.base):
                zero.update(cstar_norm(fiber - a.fiber.value @ b.fiber.value), (i, j))
    out = [
        base.result("base_additivity", 0.0),
        unit.result("fiber_unitarity", tol),
        extract.result("fiber_extraction", tol),
    ]
    if zero.count:
        out.append(zero.result("zero_fiber_group_law", 1e-12))
    return out


def random_hull_point(rng: np.random.Generator, on_cone: bool = False) -> np.ndarray:
    v = rng.standard_normal(3)
    r = np.linalg.norm(v)
    x0 = r if on_cone else r * (1 + rng.random())
    return np.concatenate(([x0], v))
