import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
import reference_data as ref
from motionfactor.algebra import DualQuaternion, axis_of
from motionfactor.errors import BraceDegenerate, NoQuadraticFactorization, NonGeneric
from motionfactor.factor import factor_with_order, is_generic
from motionfactor.linkage import linkage_residuals, loop_residual, trajectory
from motionfactor.mpoly import MotionPolynomial, coefficient_distance
from motionfactor.special import (
    TranslationMotionSpec,
    brace_chain,
    brace_with_retries,
    circular_factorization,
    circular_translation_factors,
    darboux_factorization,
    darboux_motion,
    elliptic_translation,
    multiplication_trick_planar,
    multiplication_trick_spatial,
    random_brace_start,
    right_multiply,
)

Q = MotionPolynomial(np.array([[1.0, 0, 0, 0, 0, 0, 0, 0], [0.0] * 8, [1.0, 0, 0, 0, 0, 0, 0, 0]]))
INF = float("inf")


def test_spec_validation():
    assert TranslationMotionSpec(1, 1).circular
    assert not TranslationMotionSpec(2, 1).circular
    with pytest.raises(ValueError):
        TranslationMotionSpec(1, 2)
    with pytest.raises(ValueError):
        TranslationMotionSpec(1, 0)


def test_elliptic_coefficients():
    C = elliptic_translation(TranslationMotionSpec(2, 1))
    assert np.array_equal(C.array, ref.elliptic_array(2, 1))
    assert C.valid and not is_generic(C)


def test_circular_family_closed_form():
    h1, h2 = circular_translation_factors(1.0, 0.0, 0.0)
    assert h1.isclose(DualQuaternion(0, 0, 0, 1, 0, 0, -1, 0)) and h2.isclose(DualQuaternion(0, 0, 0, -1))
    rng = np.random.default_rng(0)
    for _ in range(20):
        a = rng.uniform(0.2, 4)
        lam, mu = rng.normal(size=2) * 3
        h1, h2 = circular_translation_factors(a, lam, mu)
        C = MotionPolynomial.from_factors([h1, h2])
        assert coefficient_distance(C, MotionPolynomial(ref.elliptic_array(a, a))) < 1e-12


def test_circular_criterion_matches_coefficient_system():
    rng = np.random.default_rng(1)
    for _ in range(10):
        b = rng.uniform(0.1, 3)
        a = b + rng.uniform(0.01, 3)
        assert not oracles.circular_system_solvable(a, b)
        with pytest.raises(NoQuadraticFactorization):
            circular_factorization(elliptic_translation(TranslationMotionSpec(a, b)))
    for a in (0.5, 1.0, 3.0):
        assert oracles.circular_system_solvable(a, a)
        F = circular_factorization(elliptic_translation(TranslationMotionSpec(a, a)))
        assert F.product().isclose(MotionPolynomial(ref.elliptic_array(a, a)), 1e-12)


@settings(max_examples=40)
@given(st.integers(0, 10**6))
def test_general_circular_factorization(seed):
    rng = np.random.default_rng(seed)
    # rotate a circular translation into a random orientation
    e1 = rng.normal(size=3)
    e0 = np.cross(rng.normal(size=3), e1)
    e0 *= np.linalg.norm(e1) / np.linalg.norm(e0)
    c = np.zeros((3, 8))
    c[0, 0] = c[2, 0] = 1
    c[1, 5:], c[0, 5:] = e1, e0
    C = MotionPolynomial(c)
    p = np.cross(e0, e1)
    d1 = np.cross(p, rng.normal(size=3))
    for F in (circular_factorization(C), circular_factorization(C, d1)):
        assert F.product().isclose(C, 1e-9)
        assert all(axis_of(h) for h in F.factors)


def test_circular_factorization_bad_inputs():
    with pytest.raises(ValueError):
        circular_factorization(MotionPolynomial.from_factors(ref.BENNETT_H))
    with pytest.raises(ValueError):
        circular_factorization(elliptic_translation(TranslationMotionSpec(1, 1)), d1=[0, 0, 1])


def test_planar_trick_values():
    F = multiplication_trick_planar(TranslationMotionSpec(2, 1))
    want = (
        DualQuaternion(0, 0, 0, 1, 0, -1 / 3, 0, 0),
        DualQuaternion(0, 0, 0, -1, 0, 2 / 6, -9 / 6, 0),
        DualQuaternion(0, 0, 0, -1, 0, -1, 0.5, 0),
        DualQuaternion(0, 0, 0, 1, 0, 1, 0, 0),
    )
    for h, w in zip(F.factors, want):
        assert h.isclose(w, 1e-15)


def test_spatial_trick_values():
    F = multiplication_trick_spatial(TranslationMotionSpec(2, 1))
    assert F.factors[0].isclose(DualQuaternion(0, -0.6, 0, 0.8, 0, 0, -0.6, 0), 1e-15)
    assert F.factors[3].isclose(DualQuaternion(0, 1, 0, 0, 0, 0, -1, 0), 1e-15)


def test_trick_reconstruction_random():
    rng = np.random.default_rng(2)
    pairs = [(2.0, 1.0)] + [tuple(sorted(rng.uniform(0.2, 5, 2), reverse=True)) for _ in range(10)]
    for a, b in pairs:
        spec = TranslationMotionSpec(a, b)
        target = oracles.poly_mul(Q.array, ref.elliptic_array(a, b))
        for F, want in ((multiplication_trick_planar(spec), ref.elliptic_planar_factors(a, b)),
                        (multiplication_trick_spatial(spec), ref.elliptic_spatial_factors(a, b))):
            assert all(h.isclose(w, 1e-14) for h, w in zip(F.factors, want))
            got = oracles.product_of_linear([h.coords for h in F.factors])
            assert np.max(np.abs(got - target)) < 1e-10


def test_trick_axes():
    spec = TranslationMotionSpec(3, 1.5)
    for h in multiplication_trick_planar(spec).factors:
        d = axis_of(h).d
        assert np.allclose(np.abs(d / np.linalg.norm(d)), [0, 0, 1])
    dirs = [axis_of(h).d / np.linalg.norm(axis_of(h).d) for h in multiplication_trick_spatial(spec).factors]
    assert np.allclose(dirs[0], -dirs[1]) and np.allclose(dirs[2], -dirs[3])
    assert np.linalg.norm(np.cross(dirs[0], dirs[2])) > 0.1


def test_trick_at_circular_warns():
    with pytest.warns(UserWarning):
        F = multiplication_trick_planar(TranslationMotionSpec(1, 1))
    assert coefficient_distance(F.product(), Q * elliptic_translation(TranslationMotionSpec(1, 1))) < 1e-12


def test_trick_is_projectively_the_same_motion():
    spec = TranslationMotionSpec(2.5, 1)
    C = elliptic_translation(spec)
    QC = multiplication_trick_planar(spec).product()
    rng = np.random.default_rng(4)
    ts = [-3.0, -0.5, 0.0, 0.7, 2.0, 40.0, INF]
    for _ in range(5):
        x = rng.normal(size=3)
        for p, q in zip(trajectory(C, x, ts), trajectory(QC, x, ts)):
            assert np.allclose(p, q, atol=1e-9)


def test_right_multiply():
    spec = TranslationMotionSpec(2, 1)
    C = elliptic_translation(spec)
    assert right_multiply(C, MotionPolynomial.constant(1.0)).isclose(C)
    H = MotionPolynomial.linear(DualQuaternion(0, 0, 0, 1))
    CH = right_multiply(C, H)
    assert CH.degree == 3 and CH.valid
    # the primal part keeps the real factor t^2 + 1, so CH is not generic
    assert not is_generic(CH)
    with pytest.raises(NonGeneric):
        factor_with_order(CH)
    ts = list(np.linspace(-5, 5, 50))
    for p, q in zip(trajectory(C, [0, 0, 0], ts), trajectory(CH, [0, 0, 0], ts)):
        assert np.allclose(p, q, atol=1e-10)
    unit = MotionPolynomial.constant(DualQuaternion(0.6, 0, 0.8, 0))
    for p, q in zip(trajectory(C, [0, 0, 0], ts), trajectory(right_multiply(C, unit), [0, 0, 0], ts)):
        assert np.allclose(p, q, atol=1e-10)
    with pytest.raises(ValueError):
        right_multiply(C, MotionPolynomial.constant(DualQuaternion(1, 0, 0, 0, 0, 1, 0, 0)))


@pytest.mark.parametrize("axis", [(1, 0, 0), (0, 0, 1), (1, 2, 3)])
def test_darboux_factorization(axis):
    spec = TranslationMotionSpec(2, 1)
    CH = darboux_motion(spec, axis)
    F = darboux_factorization(spec, axis)
    assert coefficient_distance(F.product(), CH) < 1e-12
    assert all(axis_of(h) for h in F.factors)


def test_brace_planar_chain():
    F = multiplication_trick_planar(TranslationMotionSpec(2, 1))
    L = brace_with_retries(F, seed=3)
    assert len(L.joints) == 13 and len(L.links) == 10
    assert all(r < 1e-8 for r in linkage_residuals(L))
    assert max(L.metadata["cell_residuals"]) < 1e-9
    # cells share the joints of the link graph
    n = 4
    for i in range(1, n):
        h_i, h_next, m_i = i - 1, i, 2 * n + i
        assert {h_i, m_i, h_next} in [set(link) for link in L.links]
        assert {n + i - 1, m_i, n + i} in [set(link) for link in L.links]
    # terminal link moves by the input chain relative to the base link
    base, term = L.links[L.metadata["base_link"]], L.links[L.metadata["terminal_link"]]
    assert set(base) == {0, 2 * n} and set(term) == {n - 1, 3 * n}


def test_brace_single_factor():
    h = DualQuaternion(0, 0, 0, 1, 0, 1, 0, 0)
    m0 = DualQuaternion(0.5, 0, 0, 2, 0, 0, -3, 0)
    L = brace_chain([h], m0)
    assert len(L.joints) == 4 and len(L.loops) == 1
    assert loop_residual(L) < 1e-9


def test_brace_degenerate():
    h = DualQuaternion(0, 0, 0, 1, 0, 1, 0, 0)
    with pytest.raises(BraceDegenerate):
        brace_chain([h], DualQuaternion(0, 0, 0, 1, 0, 0, -3, 0))


def test_brace_darboux_chain():
    F = darboux_factorization(TranslationMotionSpec(2, 1))
    L = brace_with_retries(F, seed=0)
    assert len(L.joints) == 10 and len(L.links) == 8
    assert all(r < 1e-8 for r in linkage_residuals(L))


def test_brace_start():
    rng = np.random.default_rng(0)
    m = random_brace_start(rng, planar=True)
    d = axis_of(m).d
    assert np.allclose(d[:2], 0)
