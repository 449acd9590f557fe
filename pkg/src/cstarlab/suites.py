"""Named experiment suites.

Each suite takes an :class:`ExperimentConfig` and returns a
:class:`SuiteResult`: the list of checks plus CSV-ready plot tables.  All
randomness flows from ``numpy.random.default_rng(cfg.seed)``, so a seed
fixes every sample.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import algebra as alg
from . import cone, flows, ordered, representation as rep, semigroups as sg
from .config import ExperimentConfig
from .reports import CheckResult, MaxTracker, observed_orders


@dataclass
class SuiteResult:
    suite: str
    checks: list[CheckResult]
    plots: dict = field(default_factory=dict)  # name -> (header, rows)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _map(fn: Callable, items, parallel: bool) -> list:
    items = list(items)
    if not parallel or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor() as pool:
        return list(pool.map(fn, items))


def _rename(c: CheckResult, name: str) -> CheckResult:
    c.check = name
    return c


def _merge(name: str, results: list[CheckResult], tol: float, bound: str = "upper") -> CheckResult:
    """Worst case over several results of the same check."""
    if bound == "lower":
        worst = min(results, key=lambda r: r.max_residual)
    else:
        worst = max(results, key=lambda r: r.max_residual)
    return CheckResult(name, worst.max_residual, tol, worst.witness,
                       sum(r.samples for r in results), bound=bound)


# -- algebra-laws ------------------------------------------------------------------


def power_iteration_norm(a: np.ndarray, iters: int = 5000, tol: float = 1e-15) -> float:
    """sqrt of the top eigenvalue of a*a by power iteration; independent of the SVD."""
    m = a.conj().T @ a
    v = np.ones(m.shape[0], dtype=complex) / np.sqrt(m.shape[0])
    lam = 0.0
    for _ in range(iters):
        w = m @ v
        nw = np.linalg.norm(w)
        if nw == 0:
            return 0.0
        v = w / nw
        new = float(np.real(np.vdot(v, m @ v)))
        if abs(new - lam) <= tol * max(1.0, new):
            lam = new
            break
        lam = new
    return float(np.sqrt(max(lam, 0.0)))


def algebra_laws(cfg: ExperimentConfig) -> SuiteResult:
    rng = np.random.default_rng(cfg.seed)
    n_samples = cfg.get("n_samples", 1000)
    max_dim = cfg.get("max_dim", 16)
    dims = rng.integers(1, max_dim + 1, size=n_samples)
    mats = [alg.random_matrix(rng, int(n)) * rng.uniform(0.1, 10) for n in dims]
    partners = [alg.random_matrix(rng, int(n)) for n in dims]
    lams = rng.standard_normal(n_samples) + 1j * rng.standard_normal(n_samples)

    def one(k):
        a, b = mats[k], partners[k]
        na = alg.cstar_norm(a)
        cstar = abs(na**2 - alg.cstar_norm(alg.involution(a) @ a)) / na**2
        anti = alg.cstar_norm(alg.involution(alg.mul(a, b)) - alg.involution(b) @ alg.involution(a))
        anti /= na * alg.cstar_norm(b)
        lin = alg.cstar_norm(alg.involution(lams[k] * a) - np.conj(lams[k]) * alg.involution(a))
        lin /= abs(lams[k]) * na
        return cstar, anti, lin, na

    rows = _map(one, range(n_samples), cfg.parallel)
    cst, anti, lin = MaxTracker(), MaxTracker(), MaxTracker()
    for k, (c, a, l, _) in enumerate(rows):
        cst.update(c, k)
        anti.update(a, k)
        lin.update(l, k)

    power = MaxTracker()
    for k in range(min(50, n_samples)):
        power.update(abs(alg.cstar_norm(mats[k]) - power_iteration_norm(mats[k])) / rows[k][3], k)

    jac, der = MaxTracker(), MaxTracker()
    for k in range(min(200, n_samples)):
        n = int(dims[k])
        a, b, c = (alg.random_unit_matrix(rng, n) for _ in range(3))
        C = alg.commutator
        jac.update(alg.cstar_norm(C(a, C(b, c)) + C(b, C(c, a)) + C(c, C(a, b))), k)
        V = alg.ad(a)
        der.update(alg.cstar_norm(V(b @ c) - b @ V(c) - V(b) @ c), k)

    unit, roundtrip = MaxTracker(), MaxTracker()
    for k in range(min(200, n_samples)):
        n = int(dims[k])
        g = alg.random_skew(rng, n, norm=rng.uniform(0.0, 10.0))
        unit.update(alg.unitarity_defect(alg.expm(g)), k)
        g_small = alg.random_skew(rng, n, norm=rng.uniform(0.0, 0.5))
        roundtrip.update(alg.cstar_norm(alg.log_near_identity(alg.expm(g_small)) - g_small.value), k)

    checks = [
        cst.result("cstar_identity", cfg.tol("cstar_identity")),
        anti.result("involution_antihomomorphism", cfg.tol("involution_antihomomorphism")),
        lin.result("involution_antilinear", cfg.tol("involution_antilinear")),
        power.result("norm_vs_power_iteration", cfg.tol("norm_vs_power_iteration")),
        jac.result("commutator_jacobi", cfg.tol("commutator_jacobi")),
        der.result("ad_derivation", cfg.tol("ad_derivation")),
        unit.result("exp_unitary", cfg.tol("exp_unitary")),
        roundtrip.result("log_exp_roundtrip", cfg.tol("log_exp_roundtrip")),
    ]
    plot = (["dim", "cstar_residual"], [(int(dims[k]), rows[k][0]) for k in range(n_samples)])
    return SuiteResult("algebra-laws", checks, {"cstar_identity": plot})


# -- semigroup-laws ----------------------------------------------------------------


def semigroup_laws(cfg: ExperimentConfig) -> SuiteResult:
    rng = np.random.default_rng(cfg.seed)
    n_trials = cfg.get("n_trials", 20)
    max_dim = cfg.get("max_dim", 8)
    n_samples = cfg.get("n_samples", 6)
    tol = cfg.tol

    trials = []
    for _ in range(n_trials):
        n = int(rng.integers(2, max_dim + 1))
        g = alg.random_skew(rng, n, norm=rng.uniform(0.1, 2.0))
        times = [0.0] + sorted(rng.uniform(0.0, 10.0, size=3).tolist()) + [10.0]
        samples = [alg.random_unit_matrix(rng, n) for _ in range(n_samples)]
        trials.append((g, times, samples))

    def run(trial):
        g, times, samples = trial
        F = sg.generate_inner_semigroup(g)
        law = sg.check_semigroup_laws(F, times, samples, tol=tol("semigroup_law"))
        comm = sg.check_field_commutes_with_semigroup(F.field, F, times, samples, tol("field_commutes_with_semigroup"))
        cone_r = sg.check_cone_rescaling(g, [0.0, 0.5, 2.0], times[:3], samples[:2], tol("cone_rescaling"))
        return law, comm, cone_r

    out = _map(run, trials, cfg.parallel)
    laws = [o[0] for o in out]
    checks = []
    for name in ("identity_at_zero", "semigroup_law", "multiplicativity", "star_preservation", "norm_non_increase"):
        checks.append(_merge(name, [getattr(r, name) for r in laws], tol(name)))
    checks.append(_merge("field_commutes_with_semigroup", [o[1] for o in out], tol("field_commutes_with_semigroup")))
    checks.append(_merge("cone_rescaling", [o[2] for o in out], tol("cone_rescaling")))

    # central difference of t -> E_t(q) at 0 against ad_g
    g, _, samples = trials[0]
    F = sg.InnerSemigroup(g)
    hs = [4e-2, 2e-2, 1e-2]
    res = [sg.derivative_at_zero_residual(F, samples[0], h) for h in hs]
    orders = observed_orders([1 / h for h in hs], res)
    checks.append(CheckResult("derivative_order", min(orders), tol("derivative_order"),
                              bound="lower", info={"h": hs, "residuals": res}))

    # negative control: ad_g against the semigroup of a generator not commuting with g
    n = g.dim
    g2 = alg.random_skew(rng, n, norm=1.0)
    ctrl = sg.check_field_commutes_with_semigroup(F.field, sg.InnerSemigroup(g2), [1.0], samples,
                                                  tol("noncommuting_control"), bound="lower")
    checks.append(ctrl)

    # grid model: translation V = d/dx
    grid = flows.Grid(cfg.get("grid_min", -8.0), cfg.get("grid_max", 8.0), cfg.get("grid_h", 1e-3))
    PF = sg.PullbackSemigroup(flows.v_one, grid, cfg.get("flow_step", 1e-3))
    fns = flows.standard_test_functions(grid)
    glaw = sg.check_semigroup_laws(PF, [0.3, 0.7], fns, tol=tol("grid_semigroup_law"))
    checks.append(_rename(glaw.semigroup_law, "grid_semigroup_law"))
    gend = [glaw.multiplicativity, glaw.star_preservation, glaw.norm_non_increase]
    checks.append(_merge("grid_endomorphism", gend, tol("grid_endomorphism")))

    trace = [(t, sg.norm(F.evaluate_at(t)(samples[0]) - samples[0])) for t in np.linspace(0, 10, 41)]
    return SuiteResult("semigroup-laws", checks, {"trajectory": (["t", "distance_from_q"], trace)})


# -- nonconvexity ------------------------------------------------------------------


def nonconvexity(cfg: ExperimentConfig) -> SuiteResult:
    t = cfg.get("t", 1.0)
    grid = flows.Grid(cfg.get("grid_min", -8.0), cfg.get("grid_max", 8.0), cfg.get("grid_h", 1e-3))
    step = cfg.get("flow_step", 1e-3)
    tol = cfg.tol
    fns = flows.standard_test_functions(grid)
    checks = []

    for label, V in (("V1", flows.v_plus), ("V2", flows.v_minus)):
        F = sg.PullbackSemigroup(V, grid, step)
        law = sg.check_semigroup_laws(F, [0.4 * t, 0.6 * t], fns, tol=tol("pullback_semigroup_law"))
        for c in flows.endomorphism_suite(F.evaluate_at(t), fns, tol("pullback_endomorphism")):
            checks.append(_rename(c, f"{label}_{c.check}"))
        checks.append(_rename(law.semigroup_law, f"{label}_semigroup_law"))

    nu = flows.counterexample_nonuniqueness(t, tol=tol("branch_endpoint"))
    checks.extend(nu.checks())
    checks.append(CheckResult("degenerate_zero_solution", abs(nu.degenerate), 0.0,
                              info={"note": "integrator-dependent third solution"}))

    mid = flows.counterexample_endomorphism_failure(t, grid=grid)
    checks.append(CheckResult("midpoint_violation", mid.violation, tol("midpoint_violation"), bound="lower",
                              info={"x_left": mid.x_left, "x_right": mid.x_right,
                                    "violation_plus": mid.violation_plus,
                                    "violation_minus": mid.violation_minus,
                                    "fg_vanishes": mid.product_vanishes}))
    for label, V in (("V1", flows.v_plus), ("V2", flows.v_minus)):
        xc = flows.flow(V, 0.0, t, 1e-4)
        r = flows.counterexample_endomorphism_failure(t, V=V, field_name=label, grid=grid,
                                                      centers=(xc + 0.25, xc - 0.25))
        checks.append(CheckResult(f"{label}_control_violation", r.violation, tol("control_violation"),
                                  info={"endpoint": xc}))

    sub = flows.substitution_check(tol=tol("substitution"))
    checks.extend(sub.checks())

    x_end = flows.flow(flows.v_plus, 0.0, t, 1e-4)
    ydev = abs(flows.y_substitution(x_end) - flows.y_substitution(0.0) - t)
    checks.append(CheckResult("V1_flow_y_coordinate", float(ydev), tol("flow_y_coordinate"), info={"x_end": x_end}))

    plots = {
        "field_graph": emit_field_graph(grid),
        "integral_curves": emit_integral_curves(),
        "branch_sweep": (["eps", "x_plus", "x_minus"], nu.sweep),
    }
    return SuiteResult("nonconvexity", checks, plots)


def emit_field_graph(grid: flows.Grid | None = None, stride: int = 100):
    grid = grid or flows.Grid()
    x = grid.x[::stride]
    return (["x", "V1", "V2"], list(zip(x.tolist(), flows.v_plus(x).tolist(), flows.v_minus(x).tolist())))


def emit_integral_curves(fields=None, seeds=None, t_max: float = 2.0, n_out: int = 41, step: float = 1e-3):
    """Rows (field, seed, t, x) sampled from :func:`flows.flow_curves`."""
    fields = fields or {"V1": flows.v_plus, "V2": flows.v_minus}
    seeds = list(seeds if seeds is not None else np.linspace(-4.0, 4.0, 17))
    rows = []
    for name, V in fields.items():
        times, xs = flows.flow_curves(V, seeds, t_max, n_out, step)
        for j, s in enumerate(seeds):
            for k, tt in enumerate(times):
                rows.append((name, float(s), float(tt), float(xs[k, j])))
    return (["field", "seed", "t", "x"], rows)


# -- tilde-formula -----------------------------------------------------------------


SIGMA_H = 1j * alg.SIGMA_3
SIGMA_G = 1j * alg.SIGMA_1


def tilde_formula(cfg: ExperimentConfig) -> SuiteResult:
    rng = np.random.default_rng(cfg.seed)
    n_final = cfg.get("n_steps", 4096)
    ns = [n_final // 8, n_final // 4, n_final // 2, n_final]
    n_trials = cfg.get("n_trials", 5)
    max_dim = cfg.get("max_dim", 4)
    tol = cfg.tol

    instances = [(SIGMA_H, SIGMA_G, 1.0)]
    for _ in range(n_trials):
        n = int(rng.integers(2, max_dim + 1))
        instances.append((alg.random_skew(rng, n, norm=rng.uniform(0.2, 1.0)),
                          alg.random_skew(rng, n, norm=rng.uniform(0.2, 1.0)),
                          float(rng.uniform(0.5, 2.0))))

    def run(inst):
        h, g, t = inst
        samples = [alg.random_unit_matrix(np.random.default_rng(cfg.seed + 1), np.asarray(h).shape[0]) for _ in range(4)]
        res = [ordered.verify_tilde_formula(h, g, t, n, samples=samples) for n in ns]
        return res

    out = _map(run, instances, cfg.parallel)
    final, orders, unit = MaxTracker(), MaxTracker(), MaxTracker()
    min_order, arg_order = np.inf, None
    for i, res in enumerate(out):
        final.update(res[-1].residual, i)
        unit.update(res[-1].unitarity_defect, i)
        o = observed_orders(ns, [r.residual for r in res])
        if min(o) < min_order:
            min_order, arg_order = min(o), i
    sigma_reversed = out[0][-1].reversed_residual

    h, g = alg.random_skew(rng, 3, norm=1.0), None
    g = alg.GaugeAlgebraElement(0.5 * h.value + 0.3 * h.value @ h.value @ h.value)
    commuting = ordered.verify_tilde_formula(h, g, 1.5, 64).residual

    split, ends = MaxTracker(), MaxTracker()
    for i, (h, g, t) in enumerate(instances):
        split.update(ordered.verify_tilde_splitting(h, g, t, t / 2, n_final), i)
        ends.update(ordered.verify_tilde_splitting(h, g, t, 0.0, n_final), (i, "s=0"))
        ends.update(ordered.verify_tilde_splitting(h, g, t, t, n_final), (i, "s=t"))

    a = alg.random_skew(rng, 3, norm=1.0).value
    const = alg.cstar_norm(ordered.ordered_exp(lambda taus: np.broadcast_to(a, (len(taus), 3, 3)), 1.3, 2000)
                           - alg.expm(1.3 * a))

    checks = [
        final.result("tilde_formula", tol("tilde_formula")),
        CheckResult("tilde_order", float(min_order), tol("tilde_order"), arg_order, bound="lower"),
        CheckResult("reversed_control", sigma_reversed, tol("reversed_control"), "sigma3/sigma1", bound="lower"),
        CheckResult("commuting_case", commuting, tol("commuting_case")),
        split.result("splitting", tol("splitting")),
        ends.result("splitting_endpoints", tol("splitting_endpoints")),
        unit.result("tilde_unitarity", tol("tilde_unitarity")),
        CheckResult("constant_integrand", const, tol("constant_integrand")),
    ]
    conv = (["n", "residual"], [(n, r.residual) for n, r in zip(ns, out[0])])
    return SuiteResult("tilde-formula", checks, {"convergence": conv})


# -- commutator-lemma --------------------------------------------------------------


def commutator_lemma(cfg: ExperimentConfig) -> SuiteResult:
    rng = np.random.default_rng(cfg.seed)
    n_final = cfg.get("n_quad", 2048)
    ns = [n_final // 8, n_final // 4, n_final // 2, n_final]
    n_trials = cfg.get("n_trials", 5)
    max_dim = cfg.get("max_dim", 4)
    tol = cfg.tol

    instances = [(SIGMA_H, SIGMA_G, 1.0)]
    for _ in range(n_trials):
        n = int(rng.integers(2, max_dim + 1))
        instances.append((alg.random_skew(rng, n, norm=rng.uniform(0.2, 1.0)),
                          alg.random_skew(rng, n, norm=rng.uniform(0.2, 1.0)),
                          float(rng.uniform(0.5, 2.0))))

    def run(inst):
        g1, g2, t = inst
        samples = [alg.random_unit_matrix(np.random.default_rng(cfg.seed + 1), np.asarray(g1).shape[0]) for _ in range(4)]
        return [ordered.verify_commutator_lemma(g1, g2, t, n, samples=samples) for n in ns]

    out = _map(run, instances, cfg.parallel)
    final, cor = MaxTracker(), MaxTracker()
    min_order, arg_order = np.inf, None
    for i, res in enumerate(out):
        final.update(res[-1].residual, i)
        cor.update(res[-1].corollary_residual, i)
        o = observed_orders(ns, [r.residual for r in res])
        if min(o) < min_order:
            min_order, arg_order = min(o), i

    g1 = alg.random_skew(rng, 3, norm=1.0)
    g2 = alg.GaugeAlgebraElement(g1.value @ g1.value @ g1.value)
    comm = ordered.verify_commutator_lemma(g1, g2, 1.0, 64)

    checks = [
        final.result("commutator_lemma", tol("commutator_lemma")),
        CheckResult("commutator_order", float(min_order), tol("commutator_order"), arg_order, bound="lower"),
        cor.result("commutator_corollary", tol("commutator_corollary")),
        CheckResult("commuting_case", max(comm.residual, comm.lhs_norm), tol("commuting_case")),
    ]
    conv = (["n", "residual"], [(n, r.residual) for n, r in zip(ns, out[0])])
    return SuiteResult("commutator-lemma", checks, {"convergence": conv})


# -- representation-fields ---------------------------------------------------------


def representation_fields(cfg: ExperimentConfig) -> SuiteResult:
    rng = np.random.default_rng(cfg.seed)
    N = cfg.get("max_dim", rep.DEFAULT_N)
    n_samples = cfg.get("n_samples", 100)
    tol = cfg.tol
    partial = rep.DifferenceOperator(N)
    T = rep.TransitionOperator(partial)
    qs = rep.random_diagonal_samples(rng, N, n_samples)
    P = partial.matrix
    checks = [CheckResult("DSD_zero", float(np.max(np.abs(T.stacked.T @ rep.swap_operator(N) @ T.stacked))), 0.0)]

    prod, real_t = MaxTracker(), MaxTracker()
    for k in range(n_samples):
        u, v = qs[k], qs[(k + 1) % n_samples]
        lhs = rep.translation_field(u * v, partial)
        rhs = np.diag(u) @ rep.translation_field(v, partial) + rep.translation_field(u, partial) @ np.diag(v)
        prod.update(alg.cstar_norm(lhs - rhs), k)
        r = qs[k].real
        real_t.update(alg.cstar_norm(rep.translation_field(r, partial).conj().T - rep.translation_field(r.conj(), partial)), k)
    checks.append(prod.result("product_rule", tol("product_rule")))
    checks.append(real_t.result("translation_reality", tol("translation_reality")))

    exact = max(float(np.max(np.abs(rep.sandwich_field(rep.SWAP_X, q, T) - rep.translation_field(q, partial))))
                for q in qs[:10])
    checks.append(CheckResult("sandwich_reproduces_translation", exact, 0.0))

    bil = MaxTracker()
    for k in range(min(20, n_samples)):
        X, Y = rng.standard_normal((2, 2, 2)) + 1j * rng.standard_normal((2, 2, 2))
        a, b = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        q = qs[k]
        lhs = rep.sandwich_field(a * X + b * Y, q, T)
        rhs = a * rep.sandwich_field(X, q, T) + b * rep.sandwich_field(Y, q, T)
        bil.update(alg.cstar_norm(lhs - rhs) / (1 + alg.cstar_norm(lhs)), k)
    checks.append(bil.result("bilinearity", tol("bilinearity")))

    herm_X = {
        "identity": np.eye(2),
        "swap": rep.SWAP_X,
        "spinor": rep.ParameterMatrix.from_spinor(rng.standard_normal(2) + 1j * rng.standard_normal(2)).X,
        "pauli_real_x": cone.pauli_map(rng.standard_normal(4)).X,
    }
    pos = [_rename(rep.reality_of_family(X, qs, T, tol=tol("reality_hermitian_X")), f"reality_{k}")
           for k, X in herm_X.items()]
    checks.append(_merge("reality_hermitian_X", pos, tol("reality_hermitian_X")))
    nonherm = {
        "upper_nilpotent": np.array([[0, 1], [0, 0]]),
        "pauli_complex_x": cone.pauli_map(rng.standard_normal(4) + 1j * rng.standard_normal(4)).X,
    }
    thr = tol("reality_nonhermitian_X_control")
    neg = [rep.reality_of_family(X, qs, T, threshold=thr) for X in nonherm.values()]
    neg_min = min(neg, key=lambda r: r.max_residual)
    checks.append(CheckResult("reality_nonhermitian_X_control", neg_min.max_residual, thr,
                              bound="lower", samples=sum(r.samples for r in neg)))

    pairs = [(qs[k], qs[k + 1]) for k in range(0, min(20, n_samples - 1), 2)]
    suff = rep.sufficiency_conditions_check(pairs)
    for c in suff.checks(tol("sufficiency")):
        if c.check != "DSD_zero":
            checks.append(c)

    rows = [(k, float(pos[0].max_residual), float(neg[0].max_residual)) for k in range(1)]
    return SuiteResult("representation-fields", checks,
                       {"reality": (["sample_set", "hermitian_residual", "nonhermitian_residual"], rows)})


# -- cone-bundle -------------------------------------------------------------------


def sigma_instance_frame() -> cone.GeneratorFrame:
    """Frame (0, i s3, i s1, i s2): x = (1,1,0,0) gives i s3 and y = (1,0,1,0) gives i s1."""
    return cone.GeneratorFrame((np.zeros((2, 2)), SIGMA_H, SIGMA_G, 1j * alg.SIGMA_2))


def cone_bundle(cfg: ExperimentConfig) -> SuiteResult:
    rng = np.random.default_rng(cfg.seed)
    n_samples = cfg.get("n_samples", 1000)
    n_trials = cfg.get("n_trials", 10)
    tol = cfg.tol
    checks = []

    det, trace = MaxTracker(), MaxTracker()
    for k in range(n_samples):
        x = rng.standard_normal(4)
        X = cone.pauli_map(x).X
        d = X[0, 0] * X[1, 1] - X[0, 1] * X[1, 0]
        det.update(abs(d - cone.minkowski_square(x)), k)
        trace.update(abs(np.trace(X) - 2 * x[0]), k)
    checks.append(det.result("pauli_det_identity", tol("pauli_det_identity")))
    checks.append(trace.result("pauli_trace", 1e-14))

    closure, phase, roundtrip = MaxTracker(), MaxTracker(), MaxTracker()
    for k in range(n_samples):
        phi = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        p = cone.spinor_cone_point(phi)
        closure.update(max(p.cone_defect() / max(p.x[0] ** 2, 1e-300), 0.0 if p.x[0] >= 0 else np.inf), k)
        theta = rng.uniform(0, 2 * np.pi)
        for w in (1j, np.exp(1j * theta)):
            phase.update(float(np.max(np.abs(cone.spinor_cone_point(w * phi).x - p.x))) / max(1.0, p.x[0]), k)
        roundtrip.update(float(np.max(np.abs(cone.pauli_map(p.x).X - np.outer(phi, phi.conj())))), k)
    checks.append(closure.result("cone_closure", tol("cone_closure")))
    checks.append(phase.result("spinor_phase_invariance", tol("spinor_phase_invariance")))
    checks.append(roundtrip.result("spinor_pauli_roundtrip", 1e-12))

    frames = {
        "2x2": cone.default_frame(2),
        "4x4": cone.default_frame(4),
        "2x2_random": cone.random_frame(rng, 2),
        "4x4_random": cone.random_frame(rng, 4),
    }
    inter, paths, left_ad, straight, scaling = (MaxTracker() for _ in range(5))
    for name, fr in frames.items():
        for k in range(n_trials):
            x = cone.random_hull_point(rng, on_cone=True)
            y = cone.random_hull_point(rng, on_cone=True)
            t, s = rng.uniform(0.0, 2.0, size=2)
            _, r = cone.interchange(fr, x, y, t, s, rng=rng)
            inter.update(r, (name, k))
            tp = cone.two_path_consistency(fr, x, y, t, s, rng=rng)
            paths.update(max(tp["fiber_vs_interchange"], tp["base_mismatch"]), (name, k))
            left_ad.update(tp["left_ad_residual"], (name, k))
            for path in ([x], [np.zeros(4), 0.5 * x, x]):
                bp = cone.path_compose(fr, path)
                straight.update(alg.cstar_norm(bp.fiber.value - np.eye(fr.dim)), (name, k))
            q = alg.random_unit_matrix(rng, fr.dim)
            E1 = cone.direction_semigroup(fr, 2 * x).evaluate_at(t)
            E2 = cone.direction_semigroup(fr, x).evaluate_at(2 * t)
            scaling.update(max(alg.cstar_norm(E1(q) - E2(q)),
                               alg.cstar_norm(E1(q.conj().T) - E1(q).conj().T)), (name, k))
    _, sigma_r = cone.interchange(sigma_instance_frame(), [1, 1, 0, 0], [1, 0, 1, 0], 1.0, 1.0, rng=rng)
    inter.update(sigma_r, "sigma3/sigma1")
    checks.append(inter.result("interchange", tol("interchange")))
    checks.append(paths.result("two_path_fiber", tol("two_path_fiber")))
    checks.append(left_ad.result("two_path_left_ad", tol("two_path_fiber")))
    checks.append(straight.result("straight_path_fiber", tol("straight_path_fiber")))
    checks.append(scaling.result("direction_scaling", tol("direction_scaling")))

    hol_rows = []
    worst_order, hol_witness = np.inf, None
    for name in ("2x2", "4x4"):
        fr = frames[name]
        x = np.array([1.0, 0.6, 0.8, 0.0])
        y = np.array([1.0, 0.0, 0.6, -0.8])
        rows = cone.holonomy_sweep(fr, x, y, [0.2, 0.1, 0.05])
        o = cone.holonomy_defect_order(rows)
        if o < worst_order:
            worst_order, hol_witness = o, name
        hol_rows += [(name, r["loop_size"], r["log_norm"], r["leading_norm"], r["defect"]) for r in rows]
    checks.append(CheckResult("holonomy_order", float(worst_order), tol("holonomy_order"), hol_witness, bound="lower"))

    fr = frames["2x2"]
    pts = [cone.BundlePoint(np.zeros(4), alg.random_unitary(rng, 2)) for _ in range(2)]
    for _ in range(3):
        x = cone.random_hull_point(rng)
        pts.append(cone.path_compose(fr, [np.zeros(4), 0.5 * x, x + 0.3 * cone.random_hull_point(rng, True)]))
    bs = cone.bundle_semigroup_check(fr, pts, rng=rng, tol=tol("bundle_semigroup"))
    checks.extend(bs)

    if cfg.path_file:
        bp = cone.path_compose(fr, cone.load_path(cfg.path_file))
        checks.append(CheckResult("path_file_fiber_unitarity", alg.unitarity_defect(bp.fiber), tol("bundle_semigroup"),
                                  info={"base": bp.base}))

    plot = (["frame", "loop_size", "norm_log_u", "predicted_leading_term", "defect"], hol_rows)
    return SuiteResult("cone-bundle", checks, {"holonomy": plot})


SUITE_FUNCS = {
    "algebra-laws": algebra_laws,
    "semigroup-laws": semigroup_laws,
    "nonconvexity": nonconvexity,
    "tilde-formula": tilde_formula,
    "commutator-lemma": commutator_lemma,
    "representation-fields": representation_fields,
    "cone-bundle": cone_bundle,
}


def run(cfg: ExperimentConfig) -> SuiteResult:
    return SUITE_FUNCS[cfg.suite](cfg)


# -- standalone plot data --------------------------------------------------------


PLOT_KINDS = ("field-graph", "integral-curves", "convergence")


def emit_plot_data(kind: str, **params):
    """(header, rows) for one of :data:`PLOT_KINDS`."""
    if kind == "field-graph":
        return emit_field_graph(params.get("grid"), params.get("stride", 100))
    if kind == "integral-curves":
        return emit_integral_curves(params.get("fields"), params.get("seeds"), params.get("t_max", 2.0),
                                    params.get("n_out", 41), params.get("step", 1e-3))
    if kind == "convergence":
        ns = params.get("ns", [512, 1024, 2048, 4096])
        res, _ = ordered.tilde_convergence(SIGMA_H, SIGMA_G, params.get("t", 1.0), ns)
        return (["n", "residual"], list(zip(ns, res)))
    raise ValueError(f"unknown plot kind {kind!r}; choose from {', '.join(PLOT_KINDS)}")
