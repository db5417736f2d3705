import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from felldeform.deform import (CommutingAction, GradedElement, ambient_product, axiom_residuals,
                               deformed_product, deformed_star, extend_action, l1_distance,
                               support_sum)
from felldeform.fiber import Fiber, pullback
from felldeform.grading import GroupIndex
from felldeform.models import build_torus


def phase(x):
    return np.exp(2j * np.pi * x)


def test_graded_element_accumulates(torus):
    U = torus.generator("U")
    a = U + U + torus.unit()
    assert a.support == [GroupIndex([0]), GroupIndex([1])]
    assert np.allclose(a.term([1]).samples, 2 * U.term([1]).samples)
    assert len(U - U) == 0
    assert np.all(a.term([5]).samples == 0)


def test_graded_element_rejects_mismatch(torus, sphere):
    with pytest.raises(ValueError):
        GradedElement({GroupIndex([2]): torus.generator("U").term([1])}, torus.geometry)
    with pytest.raises(ValueError):
        torus.generator("U") + sphere.generator("Z")


@pytest.mark.parametrize("theta, want", [(0.0, 1.0), (0.5, -1.0), (0.25, 1j)])
def test_torus_commutation_phase(theta, want):
    m = build_torus(theta)
    U, V = m.generator("U"), m.generator("V")
    assert l1_distance(m.product(V, U), m.product(U, V).scale(want)) < 1e-12


def test_torus_square_phase():
    m = build_torus(0.25)
    U, V = m.generator("U"), m.generator("V")
    VU, UV = m.product(V, U), m.product(U, V)
    lhs = m.product(VU, VU)
    rhs = m.product(UV, UV).scale(phase(0.5))
    assert lhs.support == [GroupIndex([2])]
    assert l1_distance(lhs, rhs) < 1e-12


def test_zero_hbar_is_ambient(sphere, rng):
    a, b = sphere.random_element(rng), sphere.random_element(rng)
    assert l1_distance(deformed_product(a, b, sphere.theta, 0.0), ambient_product(a, b)) == 0.0


def test_product_lands_in_sum_of_supports(sphere, rng):
    a = sphere.random_element(rng, support=[[1], [2]])
    b = sphere.random_element(rng, support=[[-1], [0]])
    assert set(sphere.product(a, b).support) <= support_sum(a, b)


@given(st.integers(0, 10_000), st.floats(-1, 1))
def test_torus_axioms_property(seed, hbar):
    m = build_torus(0.0, n=16)
    rng = np.random.default_rng(seed)
    a, b, c = (m.random_element(rng) for _ in range(3))
    r = axiom_residuals(a, b, c, m.theta, hbar)
    assert r.associativity < 1e-10
    assert r.anti_multiplicativity < 1e-10
    assert r.cstar_identity < 1e-10


@given(st.integers(0, 10_000), st.floats(-1, 1))
def test_deformed_star_is_involutive(seed, hbar):
    m = build_torus(0.0, n=16)
    a = m.random_element(np.random.default_rng(seed))
    back = deformed_star(deformed_star(a, m.theta, hbar), m.theta, hbar)
    assert l1_distance(back, a) < 1e-12


def test_submultiplicative_on_aligned_shifts():
    m = build_torus(0.0, n=16)
    rng = np.random.default_rng(3)
    a, b, c = (m.random_element(rng) for _ in range(3))
    assert axiom_residuals(a, b, c, m.theta, 0.25).submultiplicativity == 0.0


def test_commuting_action_validation(torus, rng):
    probes = [torus.random_fiber([k], rng) for k in (-1, 0, 1)]
    rot = CommutingAction(lambda f: pullback(f, {"p2": 0.125}), "rotate")
    with pytest.raises(ValueError, match="validated"):
        extend_action(rot, torus.generator("V"))
    rot.validate(probes, torus.gauge, torus.theta, gauge_points=[[0.3]])
    out = extend_action(rot, torus.generator("V"))
    assert np.allclose(out.term([0]).samples, torus.generator("V").term([0]).samples * np.exp(2j * np.pi / 8))

    def mix(f):  # multiplies by a p2-dependent function: breaks commutation with theta
        P2 = f.geometry.mesh("p2")
        return Fiber(f.grading, f.samples * np.cos(2 * np.pi * P2), f.geometry)

    bad = CommutingAction(mix, "mix")
    with pytest.raises(ValueError, match="does not commute"):
        bad.validate(probes, torus.gauge, torus.theta)

    def regrade(f):
        return Fiber(f.grading + GroupIndex([1]), f.samples, f.geometry)

    with pytest.raises(ValueError, match="grading"):
        CommutingAction(regrade).validate(probes, torus.gauge, torus.theta)
