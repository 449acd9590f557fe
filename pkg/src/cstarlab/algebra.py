"""Finite-dimensional matrix model of a unital C*-algebra.

Elements are plain complex ``numpy`` arrays of shape ``(n, n)``.  The two
wrappers :class:`GaugeAlgebraElement` and :class:`GaugeGroupElement` carry
the skew-Hermitian and unitary invariants; every function here accepts them
wherever an element is expected.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

import numpy as np

ALGEBRAIC_TOL = 1e-12
SPECTRAL_TOL = 1e-10
UNITARY_TOL = 1e-10

# scaled norm bound and Taylor degree for the exponential core
_EXP_THETA = 0.5
_EXP_DEGREE = 13

SIGMA_1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_3 = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SIGMA_1, SIGMA_2, SIGMA_3)


class DimensionError(ValueError):
    pass


class DomainError(ValueError):
    pass


class NotUnitaryError(ValueError):
    pass


def as_matrix(a: Any) -> np.ndarray:
    """Return the complex square matrix behind ``a``."""
    if isinstance(a, (GaugeAlgebraElement, GaugeGroupElement)):
        return a.value
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    return m


def _pair(a, b):
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a, b


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=complex)


def mul(a, b) -> np.ndarray:
    a, b = _pair(a, b)
    return a @ b


def involution(a) -> np.ndarray:
    return as_matrix(a).conj().T


def cstar_norm(a) -> float:
    """Operator norm, i.e. the largest singular value."""
    m = as_matrix(a)
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def is_hermitian(a, tol: float = ALGEBRAIC_TOL) -> bool:
    m = as_matrix(a)
    return cstar_norm(m - m.conj().T) <= tol


def is_skew_hermitian(a, tol: float = ALGEBRAIC_TOL) -> bool:
    m = as_matrix(a)
    return cstar_norm(m + m.conj().T) <= tol


def unitarity_defect(u) -> float:
    m = as_matrix(u)
    one = np.eye(m.shape[0])
    return max(cstar_norm(m.conj().T @ m - one), cstar_norm(m @ m.conj().T - one))


def commutator(a, b) -> np.ndarray:
    a, b = _pair(a, b)
    return a @ b - b @ a


@dataclass(frozen=True, eq=False)
class GaugeAlgebraElement:
    """Skew-Hermitian element; the projection ``(g - g*)/2`` is applied on construction."""

    value: np.ndarray

    def __post_init__(self):
        m = as_matrix(self.value)
        object.__setattr__(self, "value", 0.5 * (m - m.conj().T))

    @property
    def dim(self) -> int:
        return self.value.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.value if dtype is None else self.value.astype(dtype)


@dataclass(frozen=True, eq=False)
class GaugeGroupElement:
    """Unitary element, validated to ``tol`` on construction."""

    value: np.ndarray
    tol: float = UNITARY_TOL

    def __post_init__(self):
        m = as_matrix(self.value)
        defect = unitarity_defect(m)
        if not defect <= self.tol:
            raise NotUnitaryError(f"unitarity defect {defect:.3e} exceeds {self.tol:.1e}")
        object.__setattr__(self, "value", m)

    @property
    def dim(self) -> int:
        return self.value.shape[0]

    def inverse(self) -> "GaugeGroupElement":
        return GaugeGroupElement(self.value.conj().T, self.tol)

    def __matmul__(self, other: "GaugeGroupElement") -> "GaugeGroupElement":
        return GaugeGroupElement(self.value @ other.value, max(self.tol, other.tol))

    def __array__(self, dtype=None, copy=None):
        return self.value if dtype is None else self.value.astype(dtype)


def expm(a) -> np.ndarray:
    """Matrix exponential by scaling and squaring around a degree-13 Taylor core.

    Works on a single matrix or on a stack of shape ``(..., n, n)``; the whole
    stack shares the squaring count of its largest member.
    """
    if isinstance(a, (GaugeAlgebraElement, GaugeGroupElement)):
        a = a.value
    m = np.asarray(a, dtype=complex)
    if m.ndim < 2 or m.shape[-1] != m.shape[-2]:
        raise DimensionError(f"expected square matrices, got shape {m.shape}")
    n = m.shape[-1]
    if m.size == 0:
        return m.copy()
    # max(1-norm, inf-norm) bounds the spectral norm from above
    absm = np.abs(m)
    norm = float(max(np.max(np.sum(absm, axis=-1)), np.max(np.sum(absm, axis=-2))))
    squarings = 0
    if norm > _EXP_THETA:
        squarings = int(np.ceil(np.log2(norm / _EXP_THETA)))
    scaled = m / 2.0**squarings
    eye = np.broadcast_to(np.eye(n, dtype=complex), m.shape)
    # Horner: I + X(I + X/2(I + X/3(...)))
    result = eye.copy()
    for k in range(_EXP_DEGREE, 0, -1):
        result = eye + (scaled @ result) / k
    for _ in range(squarings):
        result = result @ result
    return result


def exp(a) -> np.ndarray:
    return expm(a)


def log_near_identity(u, term_tol: float = 1e-14, max_terms: int = 100_000) -> np.ndarray:
    """Principal logarithm from the series ln(1+x) = x - x^2/2 + x^3/3 - ...

    Requires ``||u - 1|| < 1``.
    """
    m = as_matrix(u)
    x = m - np.eye(m.shape[0])
    r = cstar_norm(x)
    if r >= 1.0:
        raise DomainError(f"||u - 1|| = {r:.4g} >= 1; series does not converge")
    total = np.zeros_like(x)
    power = x.copy()
    for k in range(1, max_terms + 1):
        term = power / k
        total = total + term if k % 2 else total - term
        if cstar_norm(term) < term_tol:
            return total
        power = power @ x
    raise DomainError(f"log series did not reach {term_tol:g} in {max_terms} terms")


def random_matrix(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    return scale * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)


def random_unit_matrix(rng: np.random.Generator, n: int) -> np.ndarray:
    a = random_matrix(rng, n)
    return a / cstar_norm(a)


def random_skew(rng: np.random.Generator, n: int, norm: float | None = None) -> GaugeAlgebraElement:
    """Random skew-Hermitian element; rescaled to the given operator norm if one is passed."""
    g = GaugeAlgebraElement(random_matrix(rng, n))
    if norm is not None:
        g = GaugeAlgebraElement(g.value * (norm / cstar_norm(g.value)))
    return g


def random_unitary(rng: np.random.Generator, n: int) -> GaugeGroupElement:
    q, r = np.linalg.qr(random_matrix(rng, n))
    d = np.diag(r)
    return GaugeGroupElement(q * (d / np.abs(d)))


# -- vector fields and endomorphisms of the matrix model ---------------------


@dataclass(frozen=True, eq=False)
class InnerField:
    """Inner derivation q -> [g, q]."""

    generator: np.ndarray
    domain_label: str = "A"

    def __post_init__(self):
        object.__setattr__(self, "generator", as_matrix(self.generator))

    @property
    def dim(self) -> int:
        return self.generator.shape[0]

    @property
    def is_real(self) -> bool:
        return is_skew_hermitian(self.generator)

    def __call__(self, q) -> np.ndarray:
        return commutator(self.generator, q)

    def __add__(self, other: "InnerField") -> "InnerField":
        return InnerField(self.generator + other.generator, self.domain_label)

    def scale(self, lam: float) -> "InnerField":
        return InnerField(lam * self.generator, self.domain_label)

    def bracket(self, other: "InnerField") -> "InnerField":
        """[ad_a, ad_b] = ad_[a,b]."""
        return InnerField(commutator(self.generator, other.generator), self.domain_label)


@dataclass(frozen=True, eq=False)
class Conjugation:
    """The *-automorphism Ad_u(q) = u q u*."""

    u: GaugeGroupElement

    @property
    def dim(self) -> int:
        return self.u.dim

    def __call__(self, q) -> np.ndarray:
        u = self.u.value
        return u @ as_matrix(q) @ u.conj().T

    def compose(self, other: "Conjugation") -> "Conjugation":
        """self o other, which is Ad of the product of the unitaries."""
        return Conjugation(self.u @ other.u)


def ad(g) -> InnerField:
    return InnerField(as_matrix(g))


def Ad(u) -> Conjugation:
    if not isinstance(u, GaugeGroupElement):
        u = GaugeGroupElement(as_matrix(u))
    return Conjugation(u)


# -- JSON matrix literals: rows of [re, im] pairs ----------------------------


def matrix_to_jsonable(a) -> list:
    m = as_matrix(a)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_jsonable(rows: list) -> np.ndarray:
    arr = np.asarray(rows, dtype=float)
    if arr.ndim != 3 or arr.shape[-1] != 2:
        raise ValueError("expected rows of [re, im] pairs")
    return as_matrix(arr[..., 0] + 1j * arr[..., 1])


def dump_matrix(a, path) -> None:
    with open(path, "w") as fh:
        json.dump(matrix_to_jsonable(a), fh)


def load_matrix(path) -> np.ndarray:
    with open(path) as fh:
        return matrix_from_jsonable(json.load(fh))
