import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cstarlab import algebra as alg
from cstarlab import cone
from cstarlab.suites import sigma_instance_frame

seeds = st.integers(0, 2**32 - 1)
coords = st.lists(st.floats(-10, 10), min_size=4, max_size=4)


# -- Pauli correspondence -------------------------------------------------------


def test_pauli_map_examples():
    np.testing.assert_array_equal(cone.pauli_map([1, 0, 0, 0]).X, np.eye(2))
    np.testing.assert_array_equal(cone.pauli_map([1, 0, 0, 1]).X, [[2, 0], [0, 0]])


@given(coords)
def test_pauli_det_is_minkowski_square(x):
    X = cone.pauli_map(x).X
    det = X[0, 0] * X[1, 1] - X[0, 1] * X[1, 0]
    assert abs(det - cone.minkowski_square(x)) <= 1e-12 * max(1.0, float(np.dot(x, x)))


@given(coords)
def test_pauli_roundtrip_and_hermiticity(x):
    P = cone.pauli_map(x)
    assert P.hermitian
    np.testing.assert_allclose(cone.inverse_pauli_map(P), x, atol=1e-12)


def test_pauli_complex_input_is_not_hermitian():
    assert not cone.pauli_map([1, 1j, 0, 0]).hermitian


def test_spinor_examples():
    np.testing.assert_array_equal(cone.spinor_cone_point([1, 0]).x, [0.5, 0, 0, 0.5])
    np.testing.assert_array_equal(cone.spinor_cone_point([0, 0]).x, np.zeros(4))
    assert cone.spinor_cone_point([0, 0]).in_cone()


@given(seeds)
def test_spinor_point_on_cone_and_phase_invariant(seed):
    rng = np.random.default_rng(seed)
    phi = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    p = cone.spinor_cone_point(phi)
    assert p.in_cone() and p.in_hull()
    np.testing.assert_allclose(cone.pauli_map(p.x).X, np.outer(phi, phi.conj()), atol=1e-12)
    for w in (1j, np.exp(1j * rng.uniform(0, 2 * np.pi))):
        assert np.max(np.abs(cone.spinor_cone_point(w * phi).x - p.x)) <= 1e-14 * max(1.0, p.x[0])


def test_hull_predicate():
    assert cone.in_hull([1, 0.6, 0.8, 0])
    assert cone.in_hull([2, 0.6, 0.8, 0])
    assert not cone.in_hull([1, 1, 1, 0])
    assert not cone.in_hull([-1, 0, 0, 0])
    assert cone.ConeVector([1, 0, 0, 1]).in_cone()
    assert not cone.ConeVector([2, 0, 0, 1]).in_cone()
    with pytest.raises(ValueError):
        cone.ConeVector([1, 0, 0])


# -- direction semigroups and interchange ------------------------------------------


def test_direction_semigroup_examples(rng):
    fr = cone.default_frame(2)
    q = alg.random_matrix(rng, 2)
    F0 = cone.direction_semigroup(fr, np.zeros(4))
    np.testing.assert_allclose(F0.evaluate_at(3.0)(q), q, atol=1e-15)
    with pytest.raises(cone.HullError):
        cone.direction_semigroup(fr, [1, 2, 0, 0])


@given(seeds, st.floats(0.0, 3.0))
def test_direction_scaling_and_star(seed, t):
    rng = np.random.default_rng(seed)
    fr = cone.default_frame(4)
    x = cone.random_hull_point(rng)
    q = alg.random_unit_matrix(rng, 4)
    E2 = cone.direction_semigroup(fr, 2 * x).evaluate_at(t)
    E1 = cone.direction_semigroup(fr, x).evaluate_at(2 * t)
    assert alg.cstar_norm(E2(q) - E1(q)) <= 1e-10
    assert alg.cstar_norm(E1(q.conj().T) - E1(q).conj().T) <= 1e-12


def test_frames_are_skew_and_normalized(rng):
    for fr in (cone.default_frame(2), cone.default_frame(4), cone.random_frame(rng, 3)):
        for g in fr.generators:
            assert alg.is_skew_hermitian(g)
            assert alg.cstar_norm(g) == pytest.approx(1.0, rel=1e-12)
        assert alg.is_skew_hermitian(fr.curvature(0, 1))
    with pytest.raises(ValueError):
        cone.default_frame(3)
    with pytest.raises(ValueError):
        cone.default_frame(2).g([1, 0])


def test_interchange_commuting_case():
    d = np.diag([1j, -1j, 0.5j])
    fr = cone.GeneratorFrame((d, 2 * d, np.zeros((3, 3)), np.zeros((3, 3))))
    u, r = cone.interchange(fr, [1, 1, 0, 0], [1, 0, 1, 0], 0.7, 1.3)
    np.testing.assert_allclose(u.value, np.eye(3), atol=1e-12)
    assert r <= 1e-12


def test_interchange_sigma_instance():
    fr = sigma_instance_frame()
    np.testing.assert_allclose(fr.g([1, 1, 0, 0]), 1j * alg.SIGMA_3)
    np.testing.assert_allclose(fr.g([1, 0, 1, 0]), 1j * alg.SIGMA_1)
    u, r = cone.interchange(fr, [1, 1, 0, 0], [1, 0, 1, 0], 1.0, 1.0)
    assert r <= 1e-9
    assert alg.unitarity_defect(u) <= 1e-12
    assert alg.cstar_norm(u.value - np.eye(2)) > 0.1


@given(seeds, st.sampled_from([2, 4]))
def test_interchange_random(seed, dim):
    rng = np.random.default_rng(seed)
    fr = cone.default_frame(dim)
    x, y = cone.random_hull_point(rng, True), cone.random_hull_point(rng, True)
    t, s = rng.uniform(0, 2, size=2)
    _, r = cone.interchange(fr, x, y, t, s, rng=rng)
    assert r <= 1e-9


def test_interchange_rejects_negative_time():
    with pytest.raises(ValueError):
        cone.interchange(cone.default_frame(2), [1, 0, 0, 0], [1, 0, 0, 0], -1.0, 1.0)


# -- bundle points --------------------------------------------------------------------


def test_straight_segment_has_trivial_fiber():
    fr = cone.default_frame(2)
    x = np.array([1.0, 0.3, -0.4, 0.5])
    for path in ([x], [np.zeros(4), x], [np.zeros(4), 0.25 * x, 0.6 * x, x]):
        bp = cone.path_compose(fr, path)
        np.testing.assert_array_equal(bp.base, x)
        assert alg.cstar_norm(bp.fiber.value - np.eye(2)) <= 1e-12


def test_path_must_stay_monotone():
    fr = cone.default_frame(2)
    with pytest.raises(cone.HullError):
        cone.path_compose(fr, [np.zeros(4), [1, 0, 0, 0], [1, 0.5, 0, 0]])
    with pytest.raises(ValueError):
        cone.path_compose(fr, [])


@given(seeds, st.sampled_from([2, 4]))
def test_two_paths_differ_by_interchange(seed, dim):
    rng = np.random.default_rng(seed)
    fr = cone.default_frame(dim)
    x, y = cone.random_hull_point(rng, True), cone.random_hull_point(rng, True)
    t, s = rng.uniform(0, 2, size=2)
    d = cone.two_path_consistency(fr, x, y, t, s, rng=rng)
    assert d["base_mismatch"] <= 1e-12
    assert d["fiber_vs_interchange"] <= 1e-9
    assert d["left_ad_residual"] <= 1e-9


@pytest.mark.parametrize("dim", [2, 4])
def test_rectangle_holonomy_is_curvature_to_third_order(dim):
    fr = cone.default_frame(dim)
    x = np.array([1.0, 0.6, 0.8, 0.0])
    y = np.array([1.0, 0.0, 0.6, -0.8])
    rows = cone.holonomy_sweep(fr, x, y, [0.2, 0.1, 0.05])
    assert cone.holonomy_defect_order(rows) >= 2.8
    # the relative defect is O(size): it halves with the loop
    rel = [row["defect"] / row["leading_norm"] for row in rows]
    assert all(1.8 < a / b < 2.2 for a, b in zip(rel, rel[1:]))


def test_bundle_composition_over_zero_is_group_law(rng):
    fr = cone.default_frame(2)
    u, v = alg.random_unitary(rng, 2), alg.random_unitary(rng, 2)
    a, b = cone.BundlePoint(np.zeros(4), u), cone.BundlePoint(np.zeros(4), v)
    c = cone.bundle_compose(fr, a, b)
    np.testing.assert_array_equal(c.base, np.zeros(4))
    np.testing.assert_allclose(c.fiber.value, u.value @ v.value, atol=1e-15)


def test_bundle_composition_with_zero_base(rng):
    fr = cone.default_frame(2)
    u = alg.random_unitary(rng, 2)
    x = cone.random_hull_point(rng)
    c = cone.bundle_compose(fr, cone.BundlePoint(np.zeros(4), u), cone.path_compose(fr, [x]))
    np.testing.assert_array_equal(c.base, x)
    np.testing.assert_allclose(c.fiber.value, u.value, atol=1e-12)


def test_bundle_semigroup_check(rng):
    fr = cone.default_frame(4)
    pts = [cone.BundlePoint(np.zeros(4), alg.random_unitary(rng, 4)) for _ in range(2)]
    x = cone.random_hull_point(rng)
    pts.append(cone.path_compose(fr, [x, x + cone.random_hull_point(rng, True)]))
    checks = {c.check: c for c in cone.bundle_semigroup_check(fr, pts, rng=rng)}
    assert set(checks) == {"base_additivity", "fiber_unitarity", "fiber_extraction", "zero_fiber_group_law"}
    assert all(c.passed for c in checks.values())


def test_load_path(tmp_path):
    path = tmp_path / "p.json"
    path.write_text(json.dumps([[0, 0, 0, 0], [1, 0.5, 0, 0], [2, 0.5, 0.5, 0]]))
    pts = cone.load_path(path)
    bp = cone.path_compose(cone.default_frame(2), pts)
    np.testing.assert_array_equal(bp.base, [2, 0.5, 0.5, 0])
    path.write_text(json.dumps([[0, 0, 0]]))
    with pytest.raises(ValueError):
        cone.load_path(path)
