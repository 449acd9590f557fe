"""Ordered exponentials and the gauge formulas they enter.

Convention used throughout: for the integrand ``tau -> E^V_{t-tau}(g)`` the
factor whose semigroup parameter ``t - tau`` is larger sits further to the
right, so the factors near ``tau = 0`` end up adjacent to ``E^V_t``.  With
``h`` generating ``V = ad_h`` this reproduces

    Ad_{exp(t(h + g))} = Ad_{OE} o Ad_{exp(t h)}.

Reversing the order breaks the identity; :func:`verify_tilde_formula`
exposes the reversed product as a negative control.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .algebra import (
    GaugeAlgebraElement,
    as_matrix,
    commutator,
    cstar_norm,
    expm,
    log_near_identity,
    random_unit_matrix,
    unitarity_defect,
)
from .reports import CheckResult, observed_orders

TimeDependentElement = Callable[[np.ndarray], np.ndarray]


def _skew(g) -> np.ndarray:
    if isinstance(g, GaugeAlgebraElement):
        return g.value
    return GaugeAlgebraElement(as_matrix(g)).value


def midpoints(t: float, n_steps: int) -> np.ndarray:
    return (np.arange(n_steps) + 0.5) * (t / n_steps)


def ordered_exp(A: TimeDependentElement, t: float, n_steps: int, ascending: bool = True) -> np.ndarray:
    """Midpoint product integral of ``A`` over [0, t].

    ``A`` maps an array of times, shape (m,), to a stack of matrices, shape
    (m, n, n).  With ``ascending=True`` the product is
    exp(dt A(tau_0)) exp(dt A(tau_1)) ... exp(dt A(tau_{N-1})), later times on
    the right; ``ascending=False`` reverses it.  Second order in dt.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if t < 0:
        raise ValueError("t must be non-negative")
    taus = midpoints(t, n_steps)
    mats = np.asarray(A(taus), dtype=complex)
    n = mats.shape[-1]
    if t == 0:
        return np.eye(n, dtype=complex)
    factors = expm((t / n_steps) * mats)
    order = range(n_steps) if ascending else range(n_steps - 1, -1, -1)
    out = np.eye(n, dtype=complex)
    for k in order:
        out = out @ factors[k]
    return out


def conjugated_path(h, g, t: float) -> TimeDependentElement:
    """tau -> Ad_{exp((t - tau) h)}(g), batched over tau."""
    h, g = _skew(h), _skew(g)

    def A(taus):
        U = expm((t - np.asarray(taus))[:, None, None] * h)
        return U @ g @ np.conj(np.swapaxes(U, -1, -2))

    return A


def tilde_unitary(h, g, t: float, n_steps: int, reverse: bool = False) -> np.ndarray:
    """OE of tau -> E^{ad_h}_{t - tau}(g) on [0, t], higher semigroup parameter on the right."""
    return ordered_exp(conjugated_path(h, g, t), t, n_steps, ascending=reverse)


def _samples(rng, n, count):
    return [random_unit_matrix(rng, n) for _ in range(count)]


@dataclass
class TildeReport:
    residual: float
    reversed_residual: float
    unitarity_defect: float
    witness: int

    def checks(self, tol: float = 1e-6) -> list[CheckResult]:
        return [
            CheckResult("tilde_formula", self.residual, tol, self.witness),
            CheckResult("tilde_unitarity", self.unitarity_defect, 1e-8),
        ]


def verify_tilde_formula(h, g, t: float, n_steps: int, samples=None, rng=None) -> TildeReport:
    """sup_q ||Ad_{exp(t(h+g))} q - Ad_OE(Ad_{exp(th)} q)|| over unit-norm samples."""
    h, g = _skew(h), _skew(g)
    n = h.shape[0]
    if samples is None:
        samples = _samples(rng or np.random.default_rng(0), n, 8)
    lhs_u = expm(t * (h + g))
    base = expm(t * h)
    res = {}
    for rev in (False, True):
        W = tilde_unitary(h, g, t, n_steps, reverse=rev) @ base
        worst, arg = 0.0, 0
        for k, q in enumerate(samples):
            r = cstar_norm(lhs_u @ q @ lhs_u.conj().T - W @ q @ W.conj().T)
            if r > worst:
                worst, arg = r, k
        res[rev] = (worst, arg, W)
    defect = unitarity_defect(res[False][2] @ base.conj().T)
    return TildeReport(res[False][0], res[True][0], defect, res[False][1])


def verify_tilde_splitting(h, g, t: float, s: float, n_steps: int) -> float:
    """Residual of OE_t = OE_s(tau -> E_{s-tau} g) . OE_{t-s}(tau -> E_{t-tau} g).

    Each factor gets a share of ``n_steps`` proportional to its interval.
    """
    if not 0 <= s <= t:
        raise ValueError("need 0 <= s <= t")
    h, g = _skew(h), _skew(g)
    full = tilde_unitary(h, g, t, n_steps)
    n_left = int(round(n_steps * s / t)) if t > 0 else 0
    n_right = n_steps - n_left
    left = tilde_unitary(h, g, s, max(1, n_left))
    right = ordered_exp(conjugated_path(h, g, t), t - s, max(1, n_right), ascending=False)
    return cstar_norm(full - left @ right)


def tilde_convergence(h, g, t: float, ns: Sequence[int], samples=None, rng=None) -> tuple[list[float], list[float]]:
    """Residuals of the tilde formula at each mesh size, and the observed orders."""
    res = [verify_tilde_formula(h, g, t, n, samples=samples, rng=rng).residual for n in ns]
    return res, observed_orders(list(ns), res)


def ordered_exp_self_convergence(A: TimeDependentElement, t: float, ns: Sequence[int]) -> list[float]:
    """Distances of OE at each n from a Richardson limit built on the two finest meshes."""
    vals = [ordered_exp(A, t, n) for n in ns]
    limit = (4 * vals[-1] - vals[-2]) / 3
    return [cstar_norm(v - limit) for v in vals[:-1]]


# -- commutator integral ------------------------------------------------------


@dataclass
class CommutatorLemmaReport:
    residual: float
    corollary_residual: float
    lhs_norm: float
    witness: int

    def checks(self, tol: float = 1e-6) -> list[CheckResult]:
        return [
            CheckResult("commutator_lemma", self.residual, tol, self.witness),
            CheckResult("commutator_corollary", self.corollary_residual, tol, self.witness),
        ]


def verify_commutator_lemma(g1, g2, t: float, n_quad: int, samples=None, rng=None) -> CommutatorLemmaReport:
    """Compare [E^{V1}_t, V2] q with the midpoint quadrature of
    int_0^t E^{V1}_tau [V1, V2] E^{V1}_{t-tau} q dtau, where V_i = ad_{g_i}.

    The corollary form ad_{int_0^t E^{V1}_tau(c) dtau} E^{V1}_t q with
    c = [g1, g2] is compared against the same left-hand side.
    """
    g1, g2 = _skew(g1), _skew(g2)
    n = g1.shape[0]
    if samples is None:
        samples = _samples(rng or np.random.default_rng(0), n, 8)
    c = commutator(g1, g2)
    dt = t / n_quad
    taus = midpoints(t, n_quad)
    U_tau = expm(taus[:, None, None] * g1)
    U_rest = expm((t - taus)[:, None, None] * g1)
    U_t = expm(t * g1)
    Ut_dag = U_t.conj().T
    c_int = dt * np.sum(U_tau @ c @ np.conj(np.swapaxes(U_tau, -1, -2)), axis=0)

    worst = worst_c = lhs_norm = 0.0
    arg = 0
    for k, q in enumerate(samples):
        Etq = U_t @ q @ Ut_dag
        lhs = U_t @ commutator(g2, q) @ Ut_dag - commutator(g2, Etq)
        inner = U_rest @ q @ np.conj(np.swapaxes(U_rest, -1, -2))
        bracket = c @ inner - inner @ c
        rhs = dt * np.sum(U_tau @ bracket @ np.conj(np.swapaxes(U_tau, -1, -2)), axis=0)
        r = cstar_norm(lhs - rhs)
        if r > worst:
            worst, arg = r, k
        worst_c = max(worst_c, cstar_norm(lhs - commutator(c_int, Etq)))
        lhs_norm = max(lhs_norm, cstar_norm(lhs))
    return CommutatorLemmaReport(worst, worst_c, lhs_norm, arg)


def commutator_lemma_convergence(g1, g2, t: float, ns: Sequence[int], samples=None, rng=None):
    res = [verify_commutator_lemma(g1, g2, t, n, samples=samples, rng=rng).residual for n in ns]
    return res, observed_orders(list(ns), res)


def intertwining_unitary(h, u_tilde, t: float) -> np.ndarray:
    """u = exp(E^{ad_h}_t(ln u~)), so that Ad_u o E_t = E_t o Ad_{u~}; needs ||u~ - 1|| < 1."""
    h = _skew(h)
    U = expm(t * h)
    return expm(U @ log_near_identity(u_tilde) @ U.conj().T)
