import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from motionfactor.errors import OddDegree, RealRootFound
from motionfactor.rpoly import (
    QuadraticFactor,
    RealPoly,
    greatest_real_factor,
    is_irreducible_quadratic,
    poly_gcd,
    quadratic_factorization,
    real_roots_of,
    reconstruct,
    repeated_quadratic,
    roots_with_multiplicity,
)


def quad(rng):
    re, im = rng.uniform(-3, 3), rng.uniform(0.2, 3)
    return QuadraticFactor(-2 * re, re * re + im * im)


def test_known_split():
    N = RealPoly([4, 4, 4, 2, 1])  # (t^2 + 2)(t^2 + 2t + 2)
    qs = quadratic_factorization(N)
    assert len(qs) == 2
    assert qs[0].isclose(QuadraticFactor(0, 2)) and qs[1].isclose(QuadraticFactor(2, 2))


@settings(max_examples=60)
@given(st.integers(0, 10**6), st.integers(1, 4))
def test_factorization_reconstructs(seed, n):
    rng = np.random.default_rng(seed)
    qs = sorted(quad(rng) for _ in range(n))
    lead = rng.uniform(0.5, 3)
    N = reconstruct(lead, qs)
    got = quadratic_factorization(N)
    assert got == sorted(got)
    assert reconstruct(lead, got).isclose(N, 1e-8)


def test_errors():
    with pytest.raises(OddDegree):
        quadratic_factorization(RealPoly([1, 0, 0, 1]))
    with pytest.raises(RealRootFound) as err:
        quadratic_factorization(RealPoly([-1, 0, 1]))
    assert abs(abs(err.value.t0) - 1) < 1e-9


def test_real_pairs_allowed():
    N = RealPoly([1, -2, 1]) * RealPoly([2, 0, 1])
    qs = quadratic_factorization(N, allow_real_pairs=True)
    assert qs[0].isclose(QuadraticFactor(-2, 1)) and qs[1].isclose(QuadraticFactor(0, 2))
    with pytest.raises(RealRootFound):
        quadratic_factorization(N)


def test_multiple_root_refinement():
    M = QuadraticFactor(2, 5)
    N = reconstruct(1.0, [M, M, M])
    roots = roots_with_multiplicity(N)
    assert sorted(m for _, m in roots) == [3, 3]
    assert all(abs(z - complex(-1, 2 * np.sign(z.imag))) < 1e-7 for z, _ in roots)


def test_gcd_and_repeated():
    a = RealPoly([1, 0, 1]) * RealPoly([2, 1])
    b = RealPoly([1, 0, 1]) * RealPoly([-3, 1])
    assert poly_gcd(a, b).isclose(RealPoly([1, 0, 1]))
    assert poly_gcd(RealPoly([1, 1]), RealPoly([2, 1])).degree == 0
    N = reconstruct(2.0, [QuadraticFactor(0, 1)] * 2 + [QuadraticFactor(1, 3)])
    assert repeated_quadratic(N).isclose(RealPoly([1, 0, 1]), 1e-7)
    assert repeated_quadratic(reconstruct(1.0, [QuadraticFactor(0, 1), QuadraticFactor(1, 3)])).degree == 0


def test_greatest_real_factor():
    # primal part (t - 1)(t - i) has real factor t - 1
    P = np.zeros((3, 4))
    P[:, 0] = [0, -1, 1]
    P[:, 1] = [1, -1, 0]
    assert greatest_real_factor(P).isclose(RealPoly([-1, 1]))
    P = np.zeros((3, 4))
    P[:, 0] = [2, 0, 1]
    assert greatest_real_factor(P).degree == 2


@settings(max_examples=40)
@given(st.integers(0, 10**6))
def test_discriminant_sign_matches_oracle(seed):
    rng = np.random.default_rng(seed)
    qs = [quad(rng), quad(rng)]
    N = reconstruct(1.0, qs)
    d = oracles.discriminant_from_roots(N.coeffs)
    # distinct complex pairs: a nonzero discriminant, positive for degree 4 with no real roots
    assert d > 0


def test_helpers():
    assert is_irreducible_quadratic(QuadraticFactor(0, 1))
    assert not is_irreducible_quadratic(QuadraticFactor(0, -1))
    assert sorted(real_roots_of(RealPoly([-2, 1]) * RealPoly([1, 0, 1]))) == pytest.approx([2.0])
    p = RealPoly([1, 2, 0, 0])
    assert p.degree == 1
    assert p.trim(3).is_zero()
    q, r = divmod(RealPoly([1, 0, 1]), RealPoly([1, 1]))
    assert (q * RealPoly([1, 1]) + r).isclose(RealPoly([1, 0, 1]))
