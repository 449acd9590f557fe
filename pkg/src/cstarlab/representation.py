"""Vector fields built from a representation, on a periodic grid of N points.

The derivative is the central difference on a periodic grid, an exactly
antisymmetric real matrix, so ``partial + partial* = 0`` holds to the bit.
The transition operator stacks ``D = (1; partial)``; the translation field
is ``V(q) = D* S diag(q, q) D = [q, partial]`` with ``S`` the block swap.

The 2x2-parametrized family replaces the block pattern of ``S`` by a matrix
``X``:  V_X(q) = sum_{L, L'} X[L, L'] D_{L'}* q D_L.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .algebra import DimensionError, as_matrix, cstar_norm, matrix_to_jsonable
from .reports import CheckResult, MaxTracker

DEFAULT_N = 256
SWAP_X = np.array([[0, 1], [1, 0]], dtype=complex)


@dataclass(frozen=True, eq=False)
class DifferenceOperator:
    """Central difference on a periodic grid of ``n`` points over ``[0, length)``."""

    n: int = DEFAULT_N
    length: float = 2 * np.pi

    @property
    def h(self) -> float:
        return self.length / self.n

    @cached_property
    def matrix(self) -> np.ndarray:
        c = 1.0 / (2 * self.h)
        m = np.zeros((self.n, self.n))
        idx = np.arange(self.n)
        m[idx, (idx + 1) % self.n] += c
        m[idx, (idx - 1) % self.n] -= c
        m.setflags(write=False)
        return m

    @property
    def norm(self) -> float:
        """Exact operator norm: max |sin(2 pi k / n)| / h."""
        k = np.arange(self.n)
        return float(np.max(np.abs(np.sin(2 * np.pi * k / self.n)))) / self.h


@dataclass(frozen=True, eq=False)
class TransitionOperator:
    """D = (D_0; D_1) with D_0 = 1 and D_1 = partial, each an N x N block."""

    partial: DifferenceOperator

    @property
    def n(self) -> int:
        return self.partial.n

    @cached_property
    def components(self) -> tuple[np.ndarray, np.ndarray]:
        eye = np.eye(self.n)
        eye.setflags(write=False)
        return eye, self.partial.matrix

    @property
    def component_norms(self) -> tuple[float, float]:
        return 1.0, self.partial.norm

    @property
    def stacked(self) -> np.ndarray:
        return np.vstack(self.components)


def swap_operator(n: int) -> np.ndarray:
    """S = [[0, 1], [1, 0]] on H (+) H."""
    return np.kron(SWAP_X.real, np.eye(n))


def pi(q) -> np.ndarray:
    """diag(q, q) on H (+) H."""
    q = as_matrix(q)
    return np.kron(np.eye(2), q)


@dataclass(frozen=True, eq=False)
class ParameterMatrix:
    X: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.X, dtype=complex)
        if X.shape != (2, 2):
            raise DimensionError(f"parameter matrix must be 2x2, got {X.shape}")
        object.__setattr__(self, "X", X)

    @property
    def hermitian(self) -> bool:
        return bool(np.array_equal(self.X, self.X.conj().T))

    @classmethod
    def from_spinor(cls, phi) -> "ParameterMatrix":
        phi = np.asarray(phi, dtype=complex)
        m = np.outer(phi, phi.conj())
        # the product leaves roundoff imaginary parts on the diagonal; symmetrize exactly
        return cls(0.5 * (m + m.conj().T))


def as_diagonal(q, n: int | None = None) -> np.ndarray:
    """Multiplication operator from diagonal values, a grid function, or a diagonal matrix."""
    values = getattr(q, "values", None)
    if values is not None:
        q = values
    q = np.asarray(q, dtype=complex)
    if q.ndim == 1:
        m = np.diag(q)
    else:
        m = as_matrix(q)
        if np.count_nonzero(m - np.diag(np.diag(m))):
            raise ValueError("expected a diagonal (multiplication) operator")
    if n is not None and m.shape[0] != n:
        raise DimensionError(f"operator of size {m.shape[0]} on a grid of {n} points")
    return m


def translation_field(q, partial: DifferenceOperator | None = None) -> np.ndarray:
    """V(q) = partial* q + q partial = [q, partial]."""
    partial = partial or DifferenceOperator(np.asarray(getattr(q, "values", q)).shape[0])
    Q = as_diagonal(q, partial.n)
    P = partial.matrix
    return Q @ P - P @ Q


def sandwich_field(X, q, transition: TransitionOperator | None = None) -> np.ndarray:
    """V_X(q) = sum X[L, L'] D_{L'}* q D_L."""
    if not isinstance(X, ParameterMatrix):
        X = ParameterMatrix(X)
    if transition is None:
        transition = TransitionOperator(DifferenceOperator(np.asarray(getattr(q, "values", q)).shape[0]))
    qd = np.diag(as_diagonal(q, transition.n))
    D = transition.components
    out = np.zeros((transition.n, transition.n), dtype=complex)
    for L in range(2):
        # sum over L' first: (sum_L' X[L, L'] D_L'*) q, then one product with D_L
        left = sum(X.X[L, Lp] * D[Lp].conj().T for Lp in range(2) if X.X[L, Lp] != 0)
        if np.isscalar(left):
            continue
        left = left * qd[None, :]
        if L == 0:
            out += left  # D_0 = 1
        else:
            out += _times_real(left, D[L])
    return out


def _times_real(a: np.ndarray, r: np.ndarray) -> np.ndarray:
    """a @ r for complex a and real r, as two real products."""
    if np.iscomplexobj(r):
        return a @ r
    return np.ascontiguousarray(a.real) @ r + 1j * (np.ascontiguousarray(a.imag) @ r)


def field_scale(X, q, transition: TransitionOperator) -> float:
    """A priori bound sum |X[L, L']| ||D_L'|| ||D_L|| ||q||_inf on ||V_X(q)||."""
    if isinstance(X, ParameterMatrix):
        X = X.X
    nrm = transition.component_norms
    qn = float(np.max(np.abs(np.asarray(getattr(q, "values", q)))))
    return float(sum(abs(X[L, Lp]) * nrm[L] * nrm[Lp] for L in range(2) for Lp in range(2))) * qn


def reality_residual(X, samples: Sequence, transition: TransitionOperator) -> MaxTracker:
    """||V_X(q*) - V_X(q)*|| relative to :func:`field_scale`, maximized over samples."""
    tr = MaxTracker()
    for k, q in enumerate(samples):
        q = np.asarray(q, dtype=complex)
        r = cstar_norm(sandwich_field(X, q.conj(), transition) - sandwich_field(X, q, transition).conj().T)
        tr.update(r / max(field_scale(X, q, transition), 1e-300), k)
    return tr


def reality_of_family(
    X,
    samples: Sequence,
    transition: TransitionOperator | None = None,
    tol: float = 1e-12,
    threshold: float = 0.1,
) -> CheckResult:
    """max ||V_X(q*) - V_X(q)*|| over diagonal samples, relative to the a priori field bound.

    A Hermitian X must give a real field (residual <= ``tol``); for a
    non-Hermitian X the check is a negative control and passes when the
    residual exceeds ``threshold``.
    """
    if not isinstance(X, ParameterMatrix):
        X = ParameterMatrix(X)
    transition = transition or TransitionOperator(DifferenceOperator(len(samples[0])))
    tr = reality_residual(X, samples, transition)
    if X.hermitian:
        return tr.result("reality_hermitian_X", tol)
    return tr.result("reality_nonhermitian_X_control", threshold, bound="lower")


@dataclass
class SufficiencyReport:
    dsd: float  # ||D* S D||
    cross_term: float  # max ||[u, D*] S [D, v]||
    product_rule: float  # max ||V(uv) - u V(v) - V(u) v||
    audit: float  # max ||product rule residual - (cross term - u D*SD v)||

    def checks(self, tol: float = 1e-12) -> list[CheckResult]:
        return [
            CheckResult("DSD_zero", self.dsd, 0.0),
            CheckResult("cross_term", self.cross_term, tol),
            CheckResult("product_rule_from_conditions", self.product_rule, tol),
            CheckResult("identity_audit", self.audit, tol),
        ]


def sufficiency_conditions_check(
    samples: Sequence[tuple],
    D: np.ndarray | None = None,
    S: np.ndarray | None = None,
) -> SufficiencyReport:
    """Evaluate both sufficient conditions and the product rule they imply.

    ``samples`` are pairs of diagonal values (u, v).  With general ``D``
    (shape 2N x N) and ``S`` (2N x 2N) the audit confirms the identity
    V(uv) - uV(v) - V(u)v = [u, D*] S [D, v] - u (D* S D) v, where
    [u, D*] = u D* - D* pi(u) and [D, v] = D v - pi(v) D.
    """
    n = len(samples[0][0])
    if D is None:
        D = TransitionOperator(DifferenceOperator(n)).stacked
    if S is None:
        S = swap_operator(n)
    Dstar = D.conj().T
    DSD = Dstar @ S @ D

    def V(q):
        return Dstar @ S @ pi(q) @ D

    cross = prod = audit = 0.0
    for u, v in samples:
        U, W = as_diagonal(u, n), as_diagonal(v, n)
        c = (U @ Dstar - Dstar @ pi(U)) @ S @ (D @ W - pi(W) @ D)
        p = V(U @ W) - U @ V(W) - V(U) @ W
        cross = max(cross, cstar_norm(c))
        prod = max(prod, cstar_norm(p))
        audit = max(audit, cstar_norm(p - (c - U @ DSD @ W)))
    return SufficiencyReport(float(np.max(np.abs(DSD))), cross, prod, audit)


def random_diagonal_samples(rng: np.random.Generator, n: int, count: int) -> list[np.ndarray]:
    return [(rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2) for _ in range(count)]


def dump_operator(m, path) -> None:
    with open(path, "w") as fh:
        json.dump(matrix_to_jsonable(m), fh)
