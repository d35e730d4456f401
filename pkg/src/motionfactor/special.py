"""Exceptional factorizations of translational motions.

Covers the circular and elliptic translations ``t^2 + 1 + eps (b j t + a i)``,
factorizations of ``(t^2 + 1) C`` with four linear factors, linkages braced
from such factor chains, and right multiplication that keeps the origin's
trajectory (Darboux motions).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import algebra
from .algebra import DualQuaternion, rotation_generator
from .errors import BraceDegenerate, MotionFactorError, NoQuadraticFactorization
from .factor import factor_with_order, linear_norm
from .linkage import Joint, Linkage, LoopEntry, factor_loop_residual
from .mpoly import Factorization, MotionPolynomial, make_monic, mp_new

BRACE_RETRIES = 10


@dataclass(frozen=True)
class TranslationMotionSpec:
    """Semi-axes of the elliptic translation ``t^2 + 1 + eps (b j t + a i)``."""

    a: float
    b: float

    def __post_init__(self):
        if not self.a >= self.b > 0:
            raise ValueError(f"need a >= b > 0, got a={self.a}, b={self.b}")

    @property
    def circular(self) -> bool:
        return abs(self.a - self.b) < algebra.get_tol() * max(1.0, self.a)


def elliptic_translation(spec: TranslationMotionSpec) -> MotionPolynomial:
    a, b = spec.a, spec.b
    c = np.zeros((3, 8))
    c[0, 0], c[0, 5] = 1.0, a
    c[1, 6] = b
    c[2, 0] = 1.0
    return MotionPolynomial(c)


def circular_translation_factors(a: float, lam: float, mu: float) -> tuple[DualQuaternion, DualQuaternion]:
    """Two-parameter family of factorizations of the circular translation with radius ``a``."""
    if not a > 0:
        raise ValueError("a must be positive")
    h1 = DualQuaternion(0, 0, 0, 1, 0, lam, mu - a, 0)
    h2 = DualQuaternion(0, 0, 0, -1, 0, -lam, -mu, 0)
    return h1, h2


def circular_factorization(C: MotionPolynomial, d1=None, tol: float = 1e-9) -> Factorization:
    """Factor a quadratic translation ``t^2 + 1 + eps (e1 t + e0)`` into two rotations.

    Such a factorization exists iff ``e0`` and ``e1`` are orthogonal and of
    equal length. Then ``h1 = p + eps d1``, ``h2 = -p - eps (e1 + d1)`` with
    ``p = e0 x e1 / |e1|^2`` and any ``d1`` orthogonal to ``p`` (default ``-e1``).
    """
    monic = make_monic(C)
    if monic.degree != 2:
        raise ValueError("expected a quadratic motion polynomial")
    c = monic.array
    primal = c[:, :4]
    expect = np.zeros((3, 4))
    expect[0, 0] = expect[2, 0] = 1.0
    if np.max(np.abs(primal - expect)) > tol:
        raise ValueError("primal part must be t^2 + 1")
    e1, e0 = c[1, 5:], c[0, 5:]
    scale = max(1.0, float(np.max(np.abs(c))))
    n1 = float(e1 @ e1)
    if n1 <= tol * scale or abs(float(e1 @ e0)) > tol * scale * scale or abs(n1 - float(e0 @ e0)) > tol * scale * scale:
        raise NoQuadraticFactorization("translation is not circular: no factorization into two rotations")
    p = np.cross(e0, e1) / n1
    d1 = -e1 if d1 is None else np.asarray(d1, float)
    if abs(float(d1 @ p)) > tol * max(1.0, float(np.linalg.norm(d1))):
        raise ValueError("d1 must be orthogonal to the rotation axis")
    d2 = -e1 - d1
    h1 = DualQuaternion(0.0, *p, 0.0, *d1)
    h2 = DualQuaternion(0.0, *(-p), 0.0, *d2)
    return Factorization((h1, h2), (linear_norm(h1), linear_norm(h2)))


def _warn_circular(spec: TranslationMotionSpec) -> None:
    if spec.circular:
        warnings.warn("a = b: circular translation also factors with two factors (circular_translation_factors)", stacklevel=3)


def multiplication_trick_planar(spec: TranslationMotionSpec) -> Factorization:
    """Planar factorization ``(t^2 + 1) C = (t-h1)(t-h2)(t-h3)(t-h4)``, all axes parallel to ``k``."""
    _warn_circular(spec)
    a, b = spec.a, spec.b
    s, d = a + b, a - b
    hs = (
        DualQuaternion(0, 0, 0, 1, 0, -d / s, 0, 0),
        DualQuaternion(0, 0, 0, -1, 0, d / s, -s / 2, 0),
        DualQuaternion(0, 0, 0, -1, 0, -1, d / 2, 0),
        DualQuaternion(0, 0, 0, 1, 0, 1, 0, 0),
    )
    return Factorization(hs, tuple(linear_norm(h) for h in hs))


def multiplication_trick_spatial(spec: TranslationMotionSpec) -> Factorization:
    """Spatial factorization of ``(t^2 + 1) C``; axes 1, 2 and axes 3, 4 are parallel."""
    _warn_circular(spec)
    a, b = spec.a, spec.b
    A, B = a * a - b * b, a * a + b * b
    hs = (
        DualQuaternion(0, -A / B, 0, 2 * a * b / B, 0, 0, -A / B, 0),
        DualQuaternion(0, A / B, 0, -2 * a * b / B, 0, 0, -(B * B - 2 * b * A) / (2 * b * B), 0),
        DualQuaternion(0, -1, 0, 0, 0, 0, (A + 2 * b) / (2 * b), 0),
        DualQuaternion(0, 1, 0, 0, 0, 0, -1, 0),
    )
    return Factorization(hs, tuple(linear_norm(h) for h in hs))


def right_multiply(C: MotionPolynomial, H: MotionPolynomial) -> MotionPolynomial:
    """``C H`` for a quaternion polynomial ``H``; the origin's trajectory is unchanged."""
    if np.any(H.dual_array):
        raise ValueError("H must have quaternion (non-dual) coefficients")
    if not np.any(H.array[-1, :4]):
        raise ValueError("H needs an invertible leading coefficient")
    return mp_new(C * H)


def darboux_motion(spec: TranslationMotionSpec, axis=(1.0, 0.0, 0.0)) -> MotionPolynomial:
    """``C (t - h)`` with ``h`` the unit vector quaternion along ``axis``."""
    u = np.asarray(axis, float)
    h = DualQuaternion(0.0, *(u / np.linalg.norm(u)))
    return right_multiply(elliptic_translation(spec), MotionPolynomial.linear(h))


def darboux_factorization(spec: TranslationMotionSpec, axis=(1.0, 0.0, 0.0)) -> Factorization:
    """Three rotation factors of :func:`darboux_motion`.

    The right factor is ``t - h - eps x`` with ``x`` orthogonal to ``h``,
    chosen so that the remaining quadratic is a circular translation,
    which then splits by :func:`circular_factorization`.
    """
    a, b = spec.a, spec.b
    u = np.asarray(axis, float)
    u = u / np.linalg.norm(u)
    # orthonormal basis of the plane orthogonal to u
    _, _, vt = np.linalg.svd(u[None, :])
    basis = vt[1:]
    ei, ej = np.eye(3)[0], np.eye(3)[1]
    w1 = b * np.cross(u, ej) + a * ei
    w2 = b * ej - a * np.cross(u, ei)
    M = np.array([[w1 @ v for v in basis], [w2 @ v for v in basis]])
    rhs = np.array([0.0, (a * a - b * b) / 2.0])
    coef, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    if np.max(np.abs(M @ coef - rhs)) > 1e-9 * max(1.0, a * a):
        raise NoQuadraticFactorization(f"no Darboux completion for axis {tuple(u)}")
    x = coef @ basis
    e1 = b * ej + x
    e0 = a * ei + np.cross(x, u)
    Cq = np.zeros((3, 8))
    Cq[0, 0] = Cq[2, 0] = 1.0
    Cq[1, 5:], Cq[0, 5:] = e1, e0
    F = circular_factorization(MotionPolynomial(Cq))
    h3 = DualQuaternion(0.0, *u, 0.0, *x)
    hs = F.factors + (h3,)
    return Factorization(hs, tuple(linear_norm(h) for h in hs))


# -- bracing ---------------------------------------------------------------------------

def _planar(hs: Sequence[DualQuaternion], tol: float = 1e-9) -> bool:
    return all(np.max(np.abs(h.coords[[1, 2, 7]])) <= tol * max(1.0, float(np.max(np.abs(h.coords)))) for h in hs)


def random_brace_start(rng: np.random.Generator, planar: bool) -> DualQuaternion:
    """Random ``m0``: a rotation about ``k`` through a random point of the xy-plane, or a random spatial rotation."""
    h0 = rng.uniform(-1.0, 1.0)
    if planar:
        speed = rng.uniform(0.5, 1.5)
        pt = (*rng.uniform(-2.0, 2.0, 2), 0.0)
        return rotation_generator((0.0, 0.0, speed), pt, h0)
    d = rng.uniform(-1.0, 1.0, 3)
    return rotation_generator(d, rng.uniform(-2.0, 2.0, 3), h0)


def brace_chain(factors: Factorization | Sequence[DualQuaternion], m0: DualQuaternion, tol: float = 1e-9) -> Linkage:
    """Brace an open chain ``(t-h1)...(t-hn)`` into a one-parameter closed linkage.

    Each cell solves ``(t - m̄_{i-1})(t - h_i) = (t - k_i)(t - m̄_i)``, so the
    joints ``m_{i-1}, h_i, m_i, k_i`` close a four-bar (an anti-parallelogram
    in the planar case, a Bennett linkage otherwise). Links are
    ``L_0 = {h1, m0}``, ``L_i = {h_i, m_i, h_{i+1}}``, ``L_n = {h_n, m_n}`` and the
    same with ``k`` for ``K_i``; ``L_n`` moves by the product relative to ``L_0``.
    """
    hs = list(factors.factors if isinstance(factors, Factorization) else factors)
    n = len(hs)
    if n == 0:
        raise ValueError("nothing to brace")
    Mm = linear_norm(m0)
    ms = [m0]
    ks: list[DualQuaternion] = []
    residuals = []
    for i, h in enumerate(hs, start=1):
        Mh = linear_norm(h)
        if Mh.isclose(Mm):
            raise BraceDegenerate(f"cell {i}: m has the same norm as h{i}")
        prev = ms[-1].conj()
        D = MotionPolynomial.from_factors([prev, h])
        try:
            F = factor_with_order(D, [Mh, Mm])
        except MotionFactorError as exc:
            raise BraceDegenerate(f"cell {i}: {type(exc).__name__}: {exc}") from exc
        k, mbar = F.factors
        m = mbar.conj()
        res = factor_loop_residual([prev, h, m, k.conj()])
        if res > 1e-8:
            raise BraceDegenerate(f"cell {i}: closure residual {res:.3e}")
        ks.append(k)
        ms.append(m)
        residuals.append(res)
    H = lambda i: i - 1  # noqa: E731
    Kj = lambda i: n + i - 1  # noqa: E731
    Mj = lambda i: 2 * n + i  # noqa: E731
    joints = (
        [Joint.from_generator(h, f"h{i}") for i, h in enumerate(hs, 1)]
        + [Joint.from_generator(k, f"k{i}") for i, k in enumerate(ks, 1)]
        + [Joint.from_generator(m, f"m{i}") for i, m in enumerate(ms)]
    )
    links = [(H(1), Mj(0))]
    links += [(H(i), Mj(i), H(i + 1)) for i in range(1, n)]
    links += [(H(n), Mj(n))]
    links += [(Mj(0), Kj(1))]
    links += [(Kj(i), Mj(i), Kj(i + 1)) for i in range(1, n)]
    links += [(Kj(n), Mj(n))]
    loops = [
        [LoopEntry(Mj(i - 1), True), LoopEntry(H(i)), LoopEntry(Mj(i)), LoopEntry(Kj(i), True)]
        for i in range(1, n + 1)
    ]
    meta = {"base_link": 0, "terminal_link": n, "cell_residuals": residuals}
    return Linkage(joints, links, loops, "braced chain", meta)


def brace_with_retries(factors: Factorization | Sequence[DualQuaternion], seed: int = 0, retries: int = BRACE_RETRIES) -> Linkage:
    """:func:`brace_chain` with random ``m0`` (planar if all factors are), redrawn on failure."""
    hs = list(factors.factors if isinstance(factors, Factorization) else factors)
    rng = np.random.default_rng(seed)
    planar = _planar(hs)
    last: Exception | None = None
    for _ in range(retries):
        m0 = random_brace_start(rng, planar)
        try:
            L = brace_chain(hs, m0)
        except BraceDegenerate as exc:
            last = exc
            continue
        L.metadata["seed"] = seed
        return L
    raise BraceDegenerate(f"no usable m0 after {retries} draws: {last}")


__all__ = [
    "TranslationMotionSpec",
    "elliptic_translation",
    "circular_translation_factors",
    "circular_factorization",
    "multiplication_trick_planar",
    "multiplication_trick_spatial",
    "right_multiply",
    "darboux_motion",
    "darboux_factorization",
    "random_brace_start",
    "brace_chain",
    "brace_with_retries",
]
