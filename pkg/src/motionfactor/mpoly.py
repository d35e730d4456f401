"""Polynomials over the dual quaternions and motion polynomials.

The indeterminate ``t`` commutes with all coefficients; evaluation at a
dual quaternion ``h`` substitutes on the right (``C(h) = sum c_i h^i``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import algebra
from .algebra import DualQuaternion, dqconj_array, dqmul_array
from .errors import LeadingNotInvertible, NotInvertible, NotMonic, NotMotionPolynomial
from .rpoly import QuadraticFactor, RealPoly

INF = math.inf


def _convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    prods = dqmul_array(a[:, None, :], b[None, :, :])
    out = np.zeros((len(a) + len(b) - 1, 8))
    for i in range(len(a)):
        out[i : i + len(b)] += prods[i]
    return out


class MotionPolynomial:
    """Polynomial with dual quaternion coefficients, ascending degree.

    Any coefficient list is accepted; ``valid`` reports whether the
    polynomial is a motion polynomial (invertible leading coefficient and
    real norm polynomial). Use :func:`mp_new` to construct with validation.
    """

    __slots__ = ("_c", "__dict__")

    def __init__(self, coeffs: Iterable[DualQuaternion] | np.ndarray):
        if isinstance(coeffs, np.ndarray):
            c = np.array(coeffs, dtype=float).reshape(-1, 8)
        else:
            rows = [h.coords if isinstance(h, DualQuaternion) else np.asarray(h, float) for h in coeffs]
            c = np.array(rows, dtype=float).reshape(-1, 8)
        if len(c) == 0:
            c = np.zeros((1, 8))
        nz = np.nonzero(np.any(c != 0.0, axis=1))[0]
        c = c[: nz[-1] + 1] if nz.size else c[:1] * 0.0
        c.flags.writeable = False
        self._c = c

    # -- constructors ----------------------------------------------------------
    @classmethod
    def linear(cls, h: DualQuaternion) -> MotionPolynomial:
        """The linear polynomial ``t - h``."""
        return cls(np.stack([-h.coords, algebra.ONE.coords]))

    @classmethod
    def constant(cls, h: DualQuaternion | float) -> MotionPolynomial:
        if not isinstance(h, DualQuaternion):
            h = DualQuaternion(float(h))
        return cls([h])

    @classmethod
    def from_real(cls, poly: RealPoly) -> MotionPolynomial:
        c = np.zeros((poly.degree + 1, 8))
        c[:, 0] = poly.coeffs
        return cls(c)

    @classmethod
    def from_factors(cls, factors: Sequence[DualQuaternion], leading: DualQuaternion | None = None) -> MotionPolynomial:
        out = cls.constant(leading if leading is not None else algebra.ONE)
        for h in factors:
            out = out * cls.linear(h)
        return out

    # -- access ---------------------------------------------------------------
    @property
    def array(self) -> np.ndarray:
        return self._c

    @property
    def coeffs(self) -> tuple[DualQuaternion, ...]:
        return tuple(DualQuaternion.from_array(r) for r in self._c)

    @property
    def primal_array(self) -> np.ndarray:
        return self._c[:, :4]

    @property
    def dual_array(self) -> np.ndarray:
        return self._c[:, 4:]

    @property
    def degree(self) -> int:
        return len(self._c) - 1

    @property
    def leading(self) -> DualQuaternion:
        return DualQuaternion.from_array(self._c[-1])

    def is_zero(self) -> bool:
        return len(self._c) == 1 and not np.any(self._c[0])

    def max_norm(self) -> float:
        return float(np.max(np.abs(self._c)))

    def coordinate(self, i: int) -> RealPoly:
        return RealPoly(self._c[:, i])

    @cached_property
    def valid(self) -> bool:
        try:
            _check_motion(self)
        except (NotMotionPolynomial, LeadingNotInvertible):
            return False
        return True

    # -- arithmetic ------------------------------------------------------------
    def __mul__(self, other):
        if isinstance(other, MotionPolynomial):
            return mp_mul(self, other)
        if isinstance(other, DualQuaternion):
            return MotionPolynomial(dqmul_array(self._c, other.coords))
        if isinstance(other, (int, float)):
            return MotionPolynomial(self._c * other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, DualQuaternion):
            return MotionPolynomial(dqmul_array(other.coords, self._c))
        if isinstance(other, (int, float)):
            return MotionPolynomial(self._c * other)
        return NotImplemented

    def __add__(self, other):
        if not isinstance(other, MotionPolynomial):
            return NotImplemented
        n = max(len(self._c), len(other._c))
        out = np.zeros((n, 8))
        out[: len(self._c)] += self._c
        out[: len(other._c)] += other._c
        return MotionPolynomial(out)

    def __neg__(self):
        return MotionPolynomial(-self._c)

    def __sub__(self, other):
        if not isinstance(other, MotionPolynomial):
            return NotImplemented
        return self + (-other)

    def conj(self) -> MotionPolynomial:
        return MotionPolynomial(dqconj_array(self._c))

    def __call__(self, t: float) -> DualQuaternion:
        """Value at a real parameter; ``t = inf`` yields the leading coefficient."""
        if math.isinf(t):
            return self.leading
        acc = np.zeros(8)
        for row in self._c[::-1]:
            acc = acc * t + row
        return DualQuaternion.from_array(acc)

    def trimmed(self, tol: float | None = None) -> MotionPolynomial:
        """Drop trailing coefficients that are negligible relative to the largest one."""
        tol = algebra.get_tol() if tol is None else tol
        c = self._c
        cutoff = tol * self.max_norm()
        n = len(c)
        while n > 1 and np.max(np.abs(c[n - 1])) <= cutoff:
            n -= 1
        return MotionPolynomial(c[:n])

    def isclose(self, other: MotionPolynomial, tol: float = 1e-9) -> bool:
        return coefficient_distance(self, other) <= tol * max(1.0, self.max_norm(), other.max_norm())

    def __eq__(self, other):
        if not isinstance(other, MotionPolynomial):
            return NotImplemented
        return self._c.shape == other._c.shape and bool(np.array_equal(self._c, other._c))

    def __hash__(self):
        return hash(self._c.tobytes())

    def __repr__(self):
        return f"MotionPolynomial(degree={self.degree}, coeffs={self._c.tolist()})"


def coefficient_distance(a: MotionPolynomial, b: MotionPolynomial) -> float:
    """Max absolute coefficient difference."""
    n = max(len(a.array), len(b.array))
    x = np.zeros((n, 8))
    y = np.zeros((n, 8))
    x[: len(a.array)] = a.array
    y[: len(b.array)] = b.array
    return float(np.max(np.abs(x - y)))


@dataclass(frozen=True)
class Factorization:
    """``C = leading * (t - h_1) ... (t - h_n)`` with the norm quadratic of each factor."""

    factors: tuple[DualQuaternion, ...]
    norms: tuple[QuadraticFactor, ...]
    leading: DualQuaternion = field(default=algebra.ONE)
    order: tuple[int, ...] = ()

    def product(self) -> MotionPolynomial:
        return MotionPolynomial.from_factors(self.factors, self.leading)

    def __len__(self):
        return len(self.factors)


# -- operations -------------------------------------------------------------------

def _check_motion(C: MotionPolynomial, tol: float | None = None) -> None:
    tol = algebra.get_tol() if tol is None else tol
    lead = C.array[-1]
    if np.linalg.norm(lead[:4]) <= tol * max(float(np.max(np.abs(lead))), 1e-300):
        raise LeadingNotInvertible("leading coefficient has vanishing primal part")
    primal, dual = norm_parts(C)
    bound = tol * (1.0 + primal.max_norm())
    worst = dual.max_norm()
    if worst >= bound:
        raise NotMotionPolynomial(f"dual part of the norm polynomial is {worst:.3e} (bound {bound:.3e})")


def mp_new(coeffs: MotionPolynomial | Iterable[DualQuaternion] | np.ndarray, tol: float | None = None) -> MotionPolynomial:
    """Validated motion polynomial; negligible trailing coefficients are removed."""
    if isinstance(coeffs, MotionPolynomial):
        coeffs = coeffs.array
    C = MotionPolynomial(coeffs).trimmed(tol)
    _check_motion(C, tol)
    return C


def mp_mul(A: MotionPolynomial, B: MotionPolynomial) -> MotionPolynomial:
    return MotionPolynomial(_convolve(A.array, B.array))


def mp_eval(C: MotionPolynomial, h: DualQuaternion | float) -> DualQuaternion:
    """Right substitution ``sum c_i h^i``; a real ``h`` (including ``inf``) is a parameter value."""
    if not isinstance(h, DualQuaternion):
        return C(float(h))
    acc = np.zeros(8)
    power = algebra.ONE.coords
    for row in C.array:
        acc = acc + dqmul_array(row, power)
        power = dqmul_array(power, h.coords)
    return DualQuaternion.from_array(acc)


def norm_parts(C: MotionPolynomial) -> tuple[RealPoly, RealPoly]:
    """Primal and dual scalar parts of ``C C̄`` as real polynomials."""
    prod = _convolve(C.array, dqconj_array(C.array))
    return RealPoly(prod[:, 0]), RealPoly(prod[:, 4])


def mp_norm(C: MotionPolynomial, tol: float | None = None) -> RealPoly:
    """Norm polynomial ``C C̄``; raises if its dual part does not vanish."""
    primal, dual = norm_parts(C)
    tol = algebra.get_tol() if tol is None else tol
    if dual.max_norm() >= tol * (1.0 + primal.max_norm()):
        raise NotMotionPolynomial(f"dual part of the norm polynomial is {dual.max_norm():.3e}")
    return primal


def mp_div(A: MotionPolynomial, B: MotionPolynomial, tol: float | None = None) -> tuple[MotionPolynomial, MotionPolynomial]:
    """Right division ``A = Q B + R`` with ``deg R < deg B``; ``B`` must be monic.

    Only coefficient products are used. Each step subtracts ``c t^n B``
    with the leading coefficient ``c`` of the running remainder on the left.
    """
    tol = algebra.get_tol() if tol is None else tol
    b = B.array
    if np.max(np.abs(b[-1] - algebra.ONE.coords)) > tol * max(1.0, B.max_norm()):
        raise NotMonic("divisor must have leading coefficient 1")
    db = B.degree
    R = A.array.copy()
    da = A.degree
    if da < db:
        return MotionPolynomial.constant(0.0), A
    Q = np.zeros((da - db + 1, 8))
    for d in range(da, db - 1, -1):
        c = R[d].copy()
        n = d - db
        Q[n] = c
        R[n : d + 1] -= dqmul_array(c, b)
        R[d] = 0.0
    return MotionPolynomial(Q), MotionPolynomial(R[: max(db, 1)] if db > 0 else np.zeros((1, 8)))


def make_monic(C: MotionPolynomial, *, with_leading: bool = False):
    """Left-multiply by the inverse of the leading coefficient.

    For a non-real leading coefficient the result describes the motion seen
    from a transformed fixed frame; ``with_leading=True`` also returns the
    leading coefficient so callers can undo that.
    """
    lead = C.leading
    try:
        inv = lead.inverse()
    except NotInvertible as exc:
        raise LeadingNotInvertible(str(exc)) from exc
    monic = MotionPolynomial(dqmul_array(inv.coords, C.array))
    c = monic.array.copy()
    c[-1] = algebra.ONE.coords
    monic = MotionPolynomial(c)
    return (monic, lead) if with_leading else monic


def real_leading(C: MotionPolynomial, tol: float | None = None) -> bool:
    """True if the leading coefficient is a real scalar (make_monic is projective)."""
    tol = algebra.get_tol() if tol is None else tol
    lead = C.array[-1]
    return bool(np.max(np.abs(lead[1:])) <= tol * abs(lead[0]))
