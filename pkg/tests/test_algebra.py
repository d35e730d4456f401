import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import dq_arrays, random_displacement, random_rotation
from motionfactor import algebra
from motionfactor.algebra import (
    EPS,
    I,
    J,
    K,
    ONE,
    DualQuaternion,
    GeneratorKind,
    Line,
    act_on_point,
    axis_of,
    classify_generator,
    dq_inverse,
    rotation_angle,
    rotation_angle_from_norm,
    rotation_generator,
)
from motionfactor.errors import NotADisplacement, NotARotation, NotInvertible


def test_unit_products():
    assert (I * J).isclose(K)
    assert (J * K).isclose(I)
    assert (K * I).isclose(J)
    assert (I * I).isclose(-ONE)
    assert (EPS * EPS).isclose(DualQuaternion(0))
    assert (EPS * I).isclose(I * EPS)


@given(dq_arrays, dq_arrays)
def test_product_matches_matrix_model(x, y):
    got = (DualQuaternion(x) * DualQuaternion(y)).coords
    assert np.allclose(got, oracles.dq_mul(x, y), atol=1e-9)


@given(dq_arrays, dq_arrays, dq_arrays)
def test_associative(x, y, z):
    a, b, c = DualQuaternion(x), DualQuaternion(y), DualQuaternion(z)
    assert ((a * b) * c).isclose(a * (b * c), 1e-9)


@given(dq_arrays, dq_arrays)
def test_conjugation_reverses_products(x, y):
    a, b = DualQuaternion(x), DualQuaternion(y)
    assert (a * b).conj().isclose(b.conj() * a.conj(), 1e-9)


@given(dq_arrays)
def test_norm_is_dual_number(x):
    h = DualQuaternion(x)
    n = (h * h.conj()).coords
    assert np.allclose(n[[1, 2, 3, 5, 6, 7]], 0, atol=1e-9)
    nd = h.norm()
    assert math.isclose(nd.re, n[0], abs_tol=1e-9) and math.isclose(nd.du, n[4], abs_tol=1e-9)


@given(dq_arrays)
def test_inverse(x):
    h = DualQuaternion(x)
    if np.linalg.norm(x[:4]) < 1e-3:
        with pytest.raises(NotInvertible):
            dq_inverse(DualQuaternion(np.r_[0, 0, 0, 0, x[4:]] + np.r_[0, 0, 0, 0, 1, 0, 0, 0]))
        return
    inv = dq_inverse(h)
    scale = max(1.0, float(np.max(np.abs(x)))) ** 2 / float(x[:4] @ x[:4])
    assert (h * inv).isclose(ONE, 1e-9 * scale * 10)
    assert (inv * h).isclose(ONE, 1e-9 * scale * 10)


def test_not_invertible():
    with pytest.raises(NotInvertible):
        dq_inverse(EPS)


def test_act_on_point_examples():
    # half turn about z at t = 0 for t - k
    assert np.allclose(act_on_point(-K, [1, 0, 0]), [-1, 0, 0])
    # 1 + eps q translates by -2q
    assert np.allclose(act_on_point(DualQuaternion(1, 0, 0, 0, 0, 0.5, 0, 0), [0, 0, 0]), [-1, 0, 0])
    with pytest.raises(NotADisplacement):
        act_on_point(EPS, [0, 0, 0])
    with pytest.raises(NotADisplacement):
        act_on_point(DualQuaternion(1, 0, 0, 0, 1, 0, 0, 0), [0, 0, 0])


@settings(max_examples=50)
@given(st.integers(0, 10**6))
def test_action_is_a_rigid_motion_and_composes(seed):
    rng = np.random.default_rng(seed)
    g, h = random_displacement(rng), random_displacement(rng)
    x, y = rng.normal(size=3), rng.normal(size=3)
    gx, gy = act_on_point(g, x), act_on_point(g, y)
    assert np.allclose(gx, oracles.act(g.coords, x), atol=1e-9)
    assert math.isclose(np.linalg.norm(gx - gy), np.linalg.norm(x - y), rel_tol=1e-9)
    assert np.allclose(act_on_point(g * h, x), act_on_point(g, act_on_point(h, x)), atol=1e-8)
    # projective: real multiples act identically
    assert np.allclose(act_on_point(g * -3.5, x), gx, atol=1e-9)


def test_classify_generator():
    assert classify_generator(K) is GeneratorKind.ROTATION
    assert classify_generator(DualQuaternion(1, 0, 0, 0, 0, 1, 3, -1)) is GeneratorKind.TRANSLATION
    assert classify_generator(DualQuaternion(0, 1, 0, 0, 0, 1, 0, 0)) is GeneratorKind.INVALID  # Study violated
    assert classify_generator(DualQuaternion(0, 1, 0, 0, 1, 0, 0, 0)) is GeneratorKind.INVALID  # h4 != 0
    assert classify_generator(DualQuaternion(2.0)) is GeneratorKind.INVALID


@settings(max_examples=50)
@given(st.integers(0, 10**6))
def test_rotation_factor_fixes_its_axis(seed):
    rng = np.random.default_rng(seed)
    h = random_rotation(rng)
    L = axis_of(h)
    pt = L.point() + 0.7 * L.d
    t = rng.normal()
    pose = ONE * t - h
    assert np.allclose(act_on_point(pose, pt), pt, atol=1e-9)


def test_rotation_generator_axis():
    h = rotation_generator((0, 0, 2), (1, 0, 5), 0.3)
    L = axis_of(h).canonical()
    assert np.allclose(L.d, [0, 0, 1])
    assert np.allclose(L.point(), [1, 0, 0])
    assert h[0] == 0.3
    with pytest.raises(NotARotation):
        axis_of(DualQuaternion(1, 0, 0, 0, 0, 1, 0, 0))


def test_rotation_angle():
    h = DualQuaternion(0.5, 0, 0, 2)
    for t in (-3.0, 0.0, 0.5, 4.0):
        assert math.isclose(rotation_angle(h, t), rotation_angle_from_norm(-1.0, 0.25 + 4.0, t), abs_tol=1e-12)
    assert rotation_angle(h, 0.5) == 0.0
    assert rotation_angle(h, math.inf) == math.pi
    # differences of the angle match the turning realised by the poses t - h
    x = np.array([1.0, 0, 0])
    turn = [math.atan2(*act_on_point(ONE * t - h, x)[1::-1]) for t in (1.7, -0.4)]
    diff = rotation_angle(h, 1.7) - rotation_angle(h, -0.4)
    assert math.isclose(math.remainder(turn[0] - turn[1] - diff, 2 * math.pi), 0.0, abs_tol=1e-12)


def test_line_validation_and_canonical():
    with pytest.raises(ValueError):
        Line((0, 0, 0), (0, 0, 0))
    with pytest.raises(ValueError):
        Line((1, 0, 0), (1, 0, 0))
    a = Line((0, 0, -2), (0, 2, 0))
    assert a.isclose(Line((0, 0, 1), (0, -1, 0)))
    assert np.allclose(a.point(), [1, 0, 0])


def test_tolerance_context():
    before = algebra.get_tol()
    with algebra.tolerance(1e-4):
        assert algebra.get_tol() == 1e-4
    assert algebra.get_tol() == before
    with pytest.raises(ValueError):
        algebra.set_tol(0.0)


def test_canonical_projective():
    h = DualQuaternion(1, -1, 2, 0, 0.5, 0, 0, 0.25)
    assert h.projectively_close(h * -4.0)
    assert not h.projectively_close(h + EPS)
