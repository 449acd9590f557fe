"""One-parameter *-endomorphism semigroups and the property checks run on them.

A family is an evaluator ``t -> Endomorphism``, so composition laws can be
tested at arbitrary ``(s, t)`` rather than along a stored trajectory.  The
checks work on either model: matrices with Ad-conjugations, or grid
functions with pullbacks.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .algebra import (
    Conjugation,
    GaugeAlgebraElement,
    GaugeGroupElement,
    InnerField,
    as_matrix,
    cstar_norm,
    expm,
)
from .flows import (
    DEFAULT_FLOW_STEP,
    FlowMap,
    Grid,
    GridField,
    GridFunction,
    GridMismatchError,
    Pullback,
)
from .reports import CheckResult, MaxTracker

VectorField = Union[InnerField, GridField]
Endomorphism = Union[Conjugation, Pullback]


def norm(a) -> float:
    if isinstance(a, GridFunction):
        return a.norm()
    return cstar_norm(a)


def star(a):
    if isinstance(a, GridFunction):
        return a.conj()
    return as_matrix(a).conj().T


def _product(a, b):
    if isinstance(a, GridFunction):
        return a * b
    return as_matrix(a) @ as_matrix(b)


class InnerSemigroup:
    """t -> Ad_{exp(t g)} for skew-Hermitian g; its derivative at 0 is ad_g.

    Being a group, it also accepts negative ``t``.
    """

    def __init__(self, g):
        if not isinstance(g, GaugeAlgebraElement):
            g = GaugeAlgebraElement(as_matrix(g))
        self.generator = g
        self.field = InnerField(g.value)

    def evaluate_at(self, t: float) -> Conjugation:
        if t == 0:
            return Conjugation(GaugeGroupElement(np.eye(self.generator.dim, dtype=complex)))
        return Conjugation(GaugeGroupElement(expm(t * self.generator.value)))

    __call__ = evaluate_at


class PullbackSemigroup:
    """t -> pullback along the flow of V(x) d/dx on a grid."""

    def __init__(self, coefficient, grid: Grid | None = None, step: float = DEFAULT_FLOW_STEP):
        self.grid = grid or Grid()
        self.flow = FlowMap(coefficient, step)
        self.field = GridField(coefficient, self.grid)

    def evaluate_at(self, t: float) -> Pullback:
        if t < 0:
            raise ValueError("pullback semigroups are defined for t >= 0 only")
        return Pullback(self.flow, t, self.grid)

    __call__ = evaluate_at


SemigroupFamily = Union[InnerSemigroup, PullbackSemigroup]


def generate_inner_semigroup(g) -> InnerSemigroup:
    return InnerSemigroup(g)


def _check_domain(V, q):
    if isinstance(V, GridField):
        if not isinstance(q, GridFunction) or q.grid != V.grid:
            raise GridMismatchError("sample outside the field's domain")
    elif isinstance(q, GridFunction):
        raise GridMismatchError("grid function given to a matrix-model field")


def check_product_rule(V: VectorField, samples: Iterable[tuple], tol: float = 1e-12) -> CheckResult:
    """max ||V(uv) - u V(v) - V(u) v|| over the sample pairs."""
    tr = MaxTracker()
    for k, (u, v) in enumerate(samples):
        _check_domain(V, u)
        _check_domain(V, v)
        res = V(_product(u, v)) - (_product(u, V(v)) + _product(V(u), v))
        tr.update(norm(res), k)
    return tr.result("product_rule", tol)


def check_reality(V: VectorField, samples: Iterable, tol: float = 1e-12) -> CheckResult:
    """max ||V(q*) - V(q)*||."""
    tr = MaxTracker()
    for k, q in enumerate(samples):
        _check_domain(V, q)
        tr.update(norm(V(star(q)) - star(V(q))), k)
    return tr.result("reality", tol)


@dataclass
class SemigroupLawReport:
    semigroup_law: CheckResult
    multiplicativity: CheckResult
    star_preservation: CheckResult
    norm_non_increase: CheckResult
    identity_at_zero: CheckResult

    def checks(self) -> list[CheckResult]:
        return [self.identity_at_zero, self.semigroup_law, self.multiplicativity,
                self.star_preservation, self.norm_non_increase]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks())


def check_semigroup_laws(
    F: SemigroupFamily,
    times: Sequence[float],
    samples: Sequence,
    tol: float = 1e-9,
) -> SemigroupLawReport:
    """Semigroup law, E_0 = Id, and the *-endomorphism invariants over ``times``.

    Multiplicativity is checked on consecutive sample pairs.
    """
    if any(t < 0 for t in times):
        raise ValueError("times must be non-negative")
    times = list(times)
    law, mult, starr, excess, ident = (MaxTracker() for _ in range(5))
    E = {t: F.evaluate_at(t) for t in set(times) | {s + t for s in times for t in times} | {0.0}}
    for k, q in enumerate(samples):
        ident.update(norm(E[0.0](q) - q), k)
    for t in times:
        Et = E[t]
        for k, q in enumerate(samples):
            Eq = Et(q)
            starr.update(norm(Et(star(q)) - star(Eq)), (t, k))
            excess.update(max(norm(Eq) - norm(q), 0.0), (t, k))
            nxt = samples[(k + 1) % len(samples)]
            mult.update(norm(Et(_product(q, nxt)) - _product(Eq, Et(nxt))), (t, k))
            for s in times:
                law.update(norm(E[s](Eq) - E[s + t](q)), (s, t, k))
    return SemigroupLawReport(
        semigroup_law=law.result("semigroup_law", tol),
        multiplicativity=mult.result("multiplicativity", tol),
        star_preservation=starr.result("star_preservation", tol),
        norm_non_increase=excess.result("norm_non_increase", tol),
        identity_at_zero=ident.result("identity_at_zero", tol),
    )


def check_field_commutes_with_semigroup(
    V: VectorField,
    F: SemigroupFamily,
    times: Sequence[float],
    samples: Sequence,
    tol: float = 1e-10,
    bound: str = "upper",
) -> CheckResult:
    """max ||V(E_t q) - E_t(V q)||.

    Passing a family generated by a different field turns this into a
    negative control; use ``bound="lower"`` for that.
    """
    tr = MaxTracker()
    for t in times:
        Et = F.evaluate_at(t)
        for k, q in enumerate(samples):
            tr.update(norm(V(Et(q)) - Et(V(q))), (t, k))
    name = "field_commutes_with_semigroup" if bound == "upper" else "noncommuting_control"
    return tr.result(name, tol, bound=bound)


def derivative_at_zero_residual(F: InnerSemigroup, q, h: float, central: bool = True) -> float:
    """||difference quotient of t -> E_t(q) at 0 - [g, q]||."""
    q = as_matrix(q)
    if central:
        dq = (F.evaluate_at(h)(q) - F.evaluate_at(-h)(q)) / (2 * h)
    else:
        dq = (F.evaluate_at(h)(q) - q) / h
    return cstar_norm(dq - F.field(q))


def check_cone_rescaling(g, lams: Sequence[float], times: Sequence[float], samples, tol: float = 1e-10) -> CheckResult:
    """E^{lam V}_t = E^V_{lam t} for lam >= 0."""
    base = InnerSemigroup(g)
    tr = MaxTracker()
    for lam in lams:
        if lam < 0:
            raise ValueError("cone rescaling needs lam >= 0")
        scaled = InnerSemigroup(lam * base.generator.value)
        for t in times:
            A, B = scaled.evaluate_at(t), base.evaluate_at(lam * t)
            for k, q in enumerate(samples):
                tr.update(cstar_norm(A(q) - B(q)), (lam, t, k))
    return tr.result("cone_rescaling", tol)


def check_continuity(F: InnerSemigroup, t: float, deltas: Sequence[float], samples) -> CheckResult:
    """Worst ratio ||E_{t+d} q - E_t q|| / (d ||ad_g|| ||q||); Lipschitz bound says <= 1."""
    ad_norm = 2 * cstar_norm(F.generator.value)
    tr = MaxTracker()
    Et = F.evaluate_at(t)
    for d in deltas:
        Ed = F.evaluate_at(t + d)
        for k, q in enumerate(samples):
            bound = d * ad_norm * cstar_norm(q)
            step = cstar_norm(Ed(q) - Et(q))
            tr.update(step / bound if bound > 0 else 0.0, (d, k))
    return tr.result("continuity_lipschitz_ratio", 1.0 + 1e-9)
