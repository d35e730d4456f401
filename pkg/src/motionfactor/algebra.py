"""Quaternion and dual quaternion arithmetic.

Coordinates follow the order ``h0..h7``: ``h0 + h1 i + h2 j + h3 k`` is the
primal part, ``h4 + h5 i + h6 j + h7 k`` the dual part (coefficient of eps).
All values are immutable; arithmetic is done on small numpy arrays.
"""
from __future__ import annotations

import contextlib
import enum
import math
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .errors import NotADisplacement, NotARotation, NotInvertible

_TOL = 1e-9


def get_tol() -> float:
    return _TOL


def set_tol(value: float) -> None:
    global _TOL
    if not value > 0:
        raise ValueError("tolerance must be positive")
    _TOL = float(value)


@contextlib.contextmanager
def tolerance(value: float):
    """Temporarily override the global zero tolerance."""
    old = _TOL
    set_tol(value)
    try:
        yield
    finally:
        set_tol(old)


def is_small(value: float, scale: float = 1.0, tol: float | None = None) -> bool:
    """True if ``|value| <= tol * scale``, with scale floored at 1e-300."""
    tol = _TOL if tol is None else tol
    return abs(value) <= tol * max(scale, 1e-300)


# -- array kernels -----------------------------------------------------------
# These operate on the trailing axis and broadcast over leading ones; the
# polynomial code relies on that.

def qmul_array(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a0, a1, a2, a3 = np.moveaxis(a, -1, 0)
    b0, b1, b2, b3 = np.moveaxis(b, -1, 0)
    return np.stack(
        [
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        ],
        axis=-1,
    )


def dqmul_array(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ap, ad = a[..., :4], a[..., 4:]
    bp, bd = b[..., :4], b[..., 4:]
    return np.concatenate([qmul_array(ap, bp), qmul_array(ap, bd) + qmul_array(ad, bp)], axis=-1)


_CONJ = np.array([1.0, -1.0, -1.0, -1.0, 1.0, -1.0, -1.0, -1.0])


def dqconj_array(a: np.ndarray) -> np.ndarray:
    return a * _CONJ


def canonical_sign(coords: np.ndarray, tol: float | None = None) -> np.ndarray:
    """Flip sign so that the first non-negligible coordinate is positive."""
    c = np.asarray(coords, dtype=float)
    scale = np.max(np.abs(c)) if c.size else 0.0
    tol = _TOL if tol is None else tol
    for x in c.ravel():
        if abs(x) > tol * scale:
            return -c if x < 0 else c.copy()
    return c.copy()


def _frozen(values, n: int) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(n)
    arr.flags.writeable = False
    return arr


# -- value types -------------------------------------------------------------

class Quaternion:
    __slots__ = ("_c",)

    def __init__(self, q0: float = 0.0, q1: float = 0.0, q2: float = 0.0, q3: float = 0.0):
        self._c = _frozen((q0, q1, q2, q3), 4)

    @classmethod
    def from_array(cls, arr) -> Quaternion:
        q = cls.__new__(cls)
        q._c = _frozen(arr, 4)
        return q

    @property
    def coords(self) -> np.ndarray:
        return self._c

    @property
    def scalar(self) -> float:
        return float(self._c[0])

    @property
    def vector(self) -> np.ndarray:
        return self._c[1:]

    def __iter__(self) -> Iterator[float]:
        return iter(float(x) for x in self._c)

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return quat_mul(self, other)
        if isinstance(other, (int, float)):
            return Quaternion.from_array(self._c * other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return Quaternion.from_array(self._c * other)
        return NotImplemented

    def __add__(self, other):
        if isinstance(other, Quaternion):
            return Quaternion.from_array(self._c + other._c)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, Quaternion):
            return Quaternion.from_array(self._c - other._c)
        return NotImplemented

    def __neg__(self):
        return Quaternion.from_array(-self._c)

    def conj(self) -> Quaternion:
        return Quaternion.from_array(self._c * _CONJ[:4])

    def norm(self) -> float:
        """The squared Euclidean length q q̄ (not its square root)."""
        return float(self._c @ self._c)

    def isclose(self, other: Quaternion, tol: float | None = None) -> bool:
        scale = max(1.0, float(np.max(np.abs(self._c))), float(np.max(np.abs(other._c))))
        return bool(np.all(np.abs(self._c - other._c) <= (_TOL if tol is None else tol) * scale))

    def __eq__(self, other):
        if not isinstance(other, Quaternion):
            return NotImplemented
        return bool(np.array_equal(self._c, other._c))

    def __hash__(self):
        return hash(tuple(self._c))

    def __repr__(self):
        return f"Quaternion({', '.join(repr(float(x)) for x in self._c)})"


@dataclass(frozen=True)
class DualNumber:
    re: float
    du: float

    def __mul__(self, other: DualNumber) -> DualNumber:
        return DualNumber(self.re * other.re, self.re * other.du + self.du * other.re)

    def __add__(self, other: DualNumber) -> DualNumber:
        return DualNumber(self.re + other.re, self.du + other.du)

    def isclose(self, other: DualNumber, rel: float = 1e-12) -> bool:
        scale = max(1.0, abs(self.re), abs(self.du), abs(other.re), abs(other.du))
        return abs(self.re - other.re) <= rel * scale and abs(self.du - other.du) <= rel * scale


class DualQuaternion:
    """Element ``p + eps q`` of the dual quaternions.

    Doubles as a rigid body pose (projectively), a joint generator and a
    polynomial coefficient.
    """

    __slots__ = ("_c",)

    def __init__(self, *coords: float):
        if len(coords) == 1 and not isinstance(coords[0], (int, float)):
            coords = tuple(coords[0])
        if len(coords) > 8:
            raise ValueError("a dual quaternion has 8 coordinates")
        padded = list(coords) + [0.0] * (8 - len(coords))
        self._c = _frozen(padded, 8)

    @classmethod
    def from_array(cls, arr) -> DualQuaternion:
        h = cls.__new__(cls)
        h._c = _frozen(arr, 8)
        return h

    @classmethod
    def from_parts(cls, primal: Iterable[float], dual: Iterable[float] = (0.0, 0.0, 0.0, 0.0)) -> DualQuaternion:
        return cls.from_array(np.concatenate([np.asarray(list(primal), float), np.asarray(list(dual), float)]))

    @classmethod
    def scalar(cls, value: float) -> DualQuaternion:
        return cls(value)

    @property
    def coords(self) -> np.ndarray:
        return self._c

    @property
    def primal(self) -> Quaternion:
        return Quaternion.from_array(self._c[:4])

    @property
    def dual(self) -> Quaternion:
        return Quaternion.from_array(self._c[4:])

    def __iter__(self) -> Iterator[float]:
        return iter(float(x) for x in self._c)

    def __getitem__(self, idx):
        return float(self._c[idx])

    def __mul__(self, other):
        if isinstance(other, DualQuaternion):
            return dq_mul(self, other)
        if isinstance(other, (int, float)):
            return DualQuaternion.from_array(self._c * other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return DualQuaternion.from_array(self._c * other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float)):
            return DualQuaternion.from_array(self._c / other)
        return NotImplemented

    def __add__(self, other):
        if isinstance(other, DualQuaternion):
            return DualQuaternion.from_array(self._c + other._c)
        if isinstance(other, (int, float)):
            c = self._c.copy()
            c[0] += other
            return DualQuaternion.from_array(c)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, DualQuaternion):
            return DualQuaternion.from_array(self._c - other._c)
        if isinstance(other, (int, float)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return DualQuaternion.from_array(-self._c)

    def conj(self) -> DualQuaternion:
        return dq_conj(self)

    def norm(self) -> DualNumber:
        return dq_norm(self)

    def inverse(self) -> DualQuaternion:
        return dq_inverse(self)

    def canonical(self) -> DualQuaternion:
        """Projective representative: unit primal length, first nonzero coordinate positive."""
        c = self._c
        n = math.sqrt(float(c[:4] @ c[:4]))
        if n == 0.0:
            n = float(np.max(np.abs(c))) or 1.0
        return DualQuaternion.from_array(canonical_sign(c / n))

    def isclose(self, other: DualQuaternion, tol: float | None = None) -> bool:
        scale = max(1.0, float(np.max(np.abs(self._c))), float(np.max(np.abs(other._c))))
        return bool(np.all(np.abs(self._c - other._c) <= (_TOL if tol is None else tol) * scale))

    def projectively_close(self, other: DualQuaternion, tol: float | None = None) -> bool:
        return self.canonical().isclose(other.canonical(), tol)

    def __eq__(self, other):
        if not isinstance(other, DualQuaternion):
            return NotImplemented
        return bool(np.array_equal(self._c, other._c))

    def __hash__(self):
        return hash(tuple(self._c))

    def __repr__(self):
        return f"DualQuaternion({', '.join(repr(float(x)) for x in self._c)})"

    def __str__(self):
        names = ("", "i", "j", "k", "e", "ei", "ej", "ek")
        terms = [f"{x:+.6g}{n}" for x, n in zip(self._c, names) if x != 0.0]
        return " ".join(terms) if terms else "0"


ONE = DualQuaternion(1.0)
I, J, K = DualQuaternion(0, 1), DualQuaternion(0, 0, 1), DualQuaternion(0, 0, 0, 1)
EPS = DualQuaternion(0, 0, 0, 0, 1)


# -- operations ---------------------------------------------------------------

def quat_mul(a: Quaternion, b: Quaternion) -> Quaternion:
    return Quaternion.from_array(qmul_array(a.coords, b.coords))


def dq_mul(a: DualQuaternion, b: DualQuaternion) -> DualQuaternion:
    return DualQuaternion.from_array(dqmul_array(a.coords, b.coords))


def dq_conj(h: DualQuaternion) -> DualQuaternion:
    return DualQuaternion.from_array(dqconj_array(h.coords))


def dq_norm(h: DualQuaternion) -> DualNumber:
    """``h h̄ = p p̄ + eps (p q̄ + q p̄)`` as a dual number."""
    p, q = h.coords[:4], h.coords[4:]
    return DualNumber(float(p @ p), 2.0 * float(p @ q))


def dq_inverse(h: DualQuaternion, tol: float | None = None) -> DualQuaternion:
    p, q = h.coords[:4], h.coords[4:]
    pp = float(p @ p)
    scale = float(np.max(np.abs(h.coords)))
    if scale == 0.0 or math.sqrt(pp) <= (_TOL if tol is None else tol) * scale:
        raise NotInvertible(f"{h} has vanishing primal part")
    pq = 2.0 * float(p @ q)
    # (a + eps b)^-1 = 1/a - eps b/a^2 for the dual number h h̄
    inv_norm = DualQuaternion(1.0 / pp, 0, 0, 0, -pq / pp**2)
    return dq_mul(inv_norm, dq_conj(h))


def study_residual(h: DualQuaternion) -> float:
    """Scale-free violation of the Study condition ``p·q = 0``."""
    p, q = h.coords[:4], h.coords[4:]
    denom = float(np.linalg.norm(p) * max(np.linalg.norm(q), np.linalg.norm(p)))
    return abs(float(p @ q)) / denom if denom else 0.0


def act_on_point(h: DualQuaternion, x) -> np.ndarray:
    """Apply the displacement ``h`` to the affine point ``x``: ``(p x p̄ + 2 p q̄) / p p̄``."""
    p, q = h.coords[:4], h.coords[4:]
    pp = float(p @ p)
    if pp == 0.0 or math.sqrt(pp) <= _TOL * float(np.max(np.abs(h.coords))):
        raise NotADisplacement("primal part vanishes")
    if study_residual(h) > _TOL * 1e3:
        raise NotADisplacement(f"Study condition violated ({study_residual(h):.2e})")
    xq = np.array([0.0, *np.asarray(x, dtype=float)])
    pc = p * _CONJ[:4]
    y = qmul_array(qmul_array(p, xq), pc) + 2.0 * qmul_array(p, q * _CONJ[:4])
    return y[1:] / pp


class GeneratorKind(enum.Enum):
    ROTATION = "Rotation"
    TRANSLATION = "Translation"
    INVALID = "Invalid"


def classify_generator(h: DualQuaternion, tol: float | None = None) -> GeneratorKind:
    """Classify ``t - h`` as a rotation, a translation or neither.

    Requires ``h + h̄`` and ``h h̄`` to be real. A purely real ``h`` makes
    ``t - h`` a real polynomial (no motion) and is reported as invalid.
    """
    tol = _TOL if tol is None else tol
    c = h.coords
    scale = float(np.max(np.abs(c)))
    if scale == 0.0:
        return GeneratorKind.INVALID
    if abs(c[4]) > tol * scale:
        return GeneratorKind.INVALID
    if abs(float(c[1:4] @ c[5:8])) > tol * scale * scale:
        return GeneratorKind.INVALID
    if np.max(np.abs(c[1:4])) > tol * scale:
        return GeneratorKind.ROTATION
    if np.max(np.abs(c[5:8])) > tol * scale:
        return GeneratorKind.TRANSLATION
    return GeneratorKind.INVALID


@dataclass(frozen=True)
class Line:
    """Spatial line in Plücker coordinates (direction, moment)."""

    direction: tuple[float, float, float]
    moment: tuple[float, float, float]

    def __post_init__(self):
        d = np.asarray(self.direction, float)
        m = np.asarray(self.moment, float)
        nd = float(np.linalg.norm(d))
        if nd == 0.0:
            raise ValueError("line direction must be nonzero")
        if abs(float(d @ m)) > 1e-7 * nd * max(nd, float(np.linalg.norm(m))):
            raise ValueError("Plücker condition violated")

    @property
    def d(self) -> np.ndarray:
        return np.asarray(self.direction, float)

    @property
    def m(self) -> np.ndarray:
        return np.asarray(self.moment, float)

    def canonical(self) -> Line:
        """Unit direction with positive first nonzero coordinate."""
        d, m = self.d, self.m
        n = float(np.linalg.norm(d))
        d, m = d / n, m / n
        lead = d[np.argmax(np.abs(d) > 1e-12)]
        s = -1.0 if lead < 0 else 1.0
        return Line(tuple(float(x) for x in s * d), tuple(float(x) for x in s * m))

    def point(self) -> np.ndarray:
        """Point on the line closest to the origin."""
        d = self.d
        return np.cross(d, self.m) / float(d @ d)

    def isclose(self, other: Line, tol: float = 1e-9) -> bool:
        a, b = self.canonical(), other.canonical()
        return bool(np.allclose(a.d, b.d, atol=tol) and np.allclose(a.m, b.m, atol=tol * max(1.0, np.linalg.norm(a.m))))


def axis_of(h: DualQuaternion) -> Line:
    """Rotation axis of ``t - h``: Plücker coordinates ``[h1, h2, h3, -h5, -h6, -h7]``."""
    if classify_generator(h) is not GeneratorKind.ROTATION:
        raise NotARotation(f"{h} is not a rotation generator")
    c = h.coords
    d = c[1:4]
    m = -c[5:8]
    # remove round-off so that the Plücker condition holds exactly enough
    m = m - (d @ m) / (d @ d) * d
    return Line(tuple(float(x) for x in d), tuple(float(x) for x in m))


def rotation_generator(direction, point=(0.0, 0.0, 0.0), h0: float = 0.0) -> DualQuaternion:
    """Generator ``h`` of a rotation about the line through ``point`` with ``direction``.

    ``|direction|`` and ``h0`` fix the speed: ``t - h`` has norm ``(t - h0)^2 + |direction|^2``.
    """
    d = np.asarray(direction, float)
    m = np.cross(np.asarray(point, float), d)
    return DualQuaternion(h0, *d, 0.0, *(-m))


def rotation_angle(h: DualQuaternion, t: float) -> float:
    """Rotation angle of ``t - h`` at parameter ``t`` (``tan(phi/2) = (t - h0)/|h_vec|``).

    ``t = inf`` gives the limit value pi.
    """
    if classify_generator(h) is not GeneratorKind.ROTATION:
        raise NotARotation(f"{h} is not a rotation generator")
    if math.isinf(t):
        return math.pi
    c = h.coords
    return 2.0 * math.atan2(t - c[0], float(np.linalg.norm(c[1:4])))


def rotation_angle_from_norm(a: float, b: float, t: float) -> float:
    """Same angle from the norm polynomial ``t^2 + a t + b`` alone."""
    return 2.0 * math.atan2(2.0 * t + a, math.sqrt(4.0 * b - a * a))
