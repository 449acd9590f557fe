import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cstarlab import algebra as alg
from cstarlab import flows
from cstarlab import semigroups as sg

seeds = st.integers(0, 2**32 - 1)


def _setup(seed, n=None, g_norm=None):
    rng = np.random.default_rng(seed)
    n = n or int(rng.integers(2, 9))
    g = alg.random_skew(rng, n, norm=g_norm if g_norm is not None else rng.uniform(0.1, 2.0))
    samples = [alg.random_unit_matrix(rng, n) for _ in range(4)]
    return rng, g, samples


def test_zero_generator_gives_identity_family(rng):
    F = sg.generate_inner_semigroup(np.zeros((3, 3)))
    q = alg.random_matrix(rng, 3)
    for t in (0.0, 1.0, 7.5):
        np.testing.assert_allclose(F.evaluate_at(t)(q), q, atol=1e-15)


@given(seeds, st.lists(st.floats(0.0, 10.0), min_size=1, max_size=3))
def test_inner_semigroup_laws(seed, times):
    _, g, samples = _setup(seed)
    rep = sg.check_semigroup_laws(sg.InnerSemigroup(g), times, samples, tol=1e-9)
    assert rep.passed, [c.line() for c in rep.checks()]
    assert rep.identity_at_zero.max_residual == 0.0


@given(seeds, st.lists(st.floats(0.0, 10.0), min_size=1, max_size=3))
def test_field_commutes_with_its_semigroup(seed, times):
    _, g, samples = _setup(seed)
    F = sg.InnerSemigroup(g)
    assert sg.check_field_commutes_with_semigroup(F.field, F, times, samples, 1e-10).passed


def test_field_commutes_at_zero_exactly(rng):
    _, g, samples = _setup(7)
    F = sg.InnerSemigroup(g)
    assert sg.check_field_commutes_with_semigroup(F.field, F, [0.0], samples).max_residual == 0.0


def test_noncommuting_control():
    V = alg.ad(1j * alg.SIGMA_3)
    F = sg.InnerSemigroup(1j * alg.SIGMA_1)
    r = sg.check_field_commutes_with_semigroup(V, F, [0.5, 1.0], [alg.SIGMA_1, alg.SIGMA_2, alg.SIGMA_3],
                                               tol=1e-3, bound="lower")
    assert r.check == "noncommuting_control"
    assert r.passed
    assert r.max_residual > 0.5


def test_derivative_at_zero_is_ad(rng):
    _, g, samples = _setup(3)
    F = sg.InnerSemigroup(g)
    hs = [1e-1, 5e-2, 2.5e-2]
    res = [sg.derivative_at_zero_residual(F, samples[0], h) for h in hs]
    assert res[-1] < 1e-3
    assert 3.8 < res[0] / res[1] < 4.2
    fwd = [sg.derivative_at_zero_residual(F, samples[0], h, central=False) for h in hs]
    assert 1.8 < fwd[0] / fwd[1] < 2.2


@given(seeds, st.floats(0.0, 5.0), st.floats(0.0, 2.0))
def test_cone_rescaling(seed, lam, t):
    _, g, samples = _setup(seed)
    assert sg.check_cone_rescaling(g, [lam], [t], samples, 1e-10).passed


def test_cone_rescaling_rejects_negative(rng):
    with pytest.raises(ValueError):
        sg.check_cone_rescaling(alg.random_skew(rng, 2), [-1.0], [1.0], [np.eye(2)])


def test_continuity_lipschitz(rng):
    _, g, samples = _setup(11)
    r = sg.check_continuity(sg.InnerSemigroup(g), 2.0, [1e-1, 1e-3, 1e-6], samples)
    assert r.passed


def test_negative_time_is_inverse():
    _, g, samples = _setup(5)
    F = sg.InnerSemigroup(g)
    q = samples[0]
    np.testing.assert_allclose(F.evaluate_at(-1.3)(F.evaluate_at(1.3)(q)), q, atol=1e-12)


def test_product_rule_checks():
    rng, g, samples = _setup(2)
    pairs = list(zip(samples, samples[1:]))
    assert sg.check_product_rule(alg.ad(g.value), pairs).max_residual <= 1e-12
    h = alg.random_skew(rng, g.dim)
    a = sg.check_product_rule(alg.ad(g.value) + alg.ad(h.value), pairs).max_residual
    b = sg.check_product_rule(alg.ad(g.value + h.value), pairs).max_residual
    assert a == b
    assert sg.check_reality(alg.ad(g.value), samples).passed


def test_domain_errors(rng):
    grid = flows.Grid(-1, 1, 0.01)
    V = flows.GridField(flows.v_one, grid)
    with pytest.raises(flows.GridMismatchError):
        sg.check_product_rule(V, [(np.eye(2), np.eye(2))])
    with pytest.raises(flows.GridMismatchError):
        sg.check_reality(alg.ad(np.eye(2)), [grid.function(np.sin)])
    with pytest.raises(ValueError):
        sg.check_semigroup_laws(sg.InnerSemigroup(np.zeros((2, 2))), [-1.0], [np.eye(2)])


def test_pullback_semigroup_translation():
    grid = flows.Grid()
    F = sg.PullbackSemigroup(flows.v_one, grid)
    rep = sg.check_semigroup_laws(F, [0.3, 0.7], flows.standard_test_functions(grid), tol=1e-4)
    assert rep.passed
    with pytest.raises(ValueError):
        F.evaluate_at(-0.1)


def test_pullback_semigroup_v1():
    grid = flows.Grid()
    F = sg.PullbackSemigroup(flows.v_plus, grid)
    rep = sg.check_semigroup_laws(F, [0.4, 0.6], flows.standard_test_functions(grid), tol=1e-3)
    assert rep.passed
    assert rep.multiplicativity.max_residual <= 1e-10
