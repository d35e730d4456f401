"""Real polynomial numerics: roots, irreducible quadratic factors, approximate gcd."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import algebra
from .errors import OddDegree, RealRootFound

# A root counts as real when |Im| < REAL_ROOT_TOL * (1 + |Re|).
REAL_ROOT_TOL = 1e-7
# Roots closer than this (relative) are treated as one multiple root.
CLUSTER_TOL = 1e-3


class RealPoly:
    """Real polynomial with ascending coefficients.

    Exact trailing zeros are stripped on construction; ``trim`` removes
    coefficients that are merely small.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs: Sequence[float] | np.ndarray):
        c = np.array(coeffs, dtype=float).ravel()
        nz = np.nonzero(c)[0]
        c = c[: nz[-1] + 1] if nz.size else np.zeros(1)
        c.flags.writeable = False
        self._c = c

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def degree(self) -> int:
        return len(self._c) - 1

    @property
    def leading(self) -> float:
        return float(self._c[-1])

    def is_zero(self) -> bool:
        return self.degree == 0 and self._c[0] == 0.0

    def trim(self, cutoff: float) -> RealPoly:
        c = self._c.copy()
        n = len(c)
        while n > 1 and abs(c[n - 1]) <= cutoff:
            n -= 1
        c = c[:n]
        if n == 1 and abs(c[0]) <= cutoff:
            c = np.zeros(1)
        return RealPoly(c)

    def monic(self) -> RealPoly:
        return RealPoly(self._c / self._c[-1])

    def deriv(self, order: int = 1) -> RealPoly:
        return RealPoly(np.polynomial.polynomial.polyder(self._c, order)) if self.degree >= order else RealPoly([0.0])

    def __call__(self, t):
        return np.polynomial.polynomial.polyval(t, self._c)

    def __mul__(self, other):
        if isinstance(other, RealPoly):
            return RealPoly(np.polynomial.polynomial.polymul(self._c, other._c))
        return RealPoly(self._c * float(other))

    __rmul__ = __mul__

    def __add__(self, other: RealPoly) -> RealPoly:
        return RealPoly(np.polynomial.polynomial.polyadd(self._c, other._c))

    def __sub__(self, other: RealPoly) -> RealPoly:
        return RealPoly(np.polynomial.polynomial.polysub(self._c, other._c))

    def __divmod__(self, other: RealPoly):
        q, r = np.polynomial.polynomial.polydiv(self._c, other._c)
        return RealPoly(q), RealPoly(r)

    def __mod__(self, other: RealPoly) -> RealPoly:
        return divmod(self, other)[1]

    def max_norm(self) -> float:
        return float(np.max(np.abs(self._c)))

    def isclose(self, other: RealPoly, rel: float = 1e-9) -> bool:
        n = max(len(self._c), len(other._c))
        a = np.pad(self._c, (0, n - len(self._c)))
        b = np.pad(other._c, (0, n - len(other._c)))
        scale = max(1.0, float(np.max(np.abs(a))), float(np.max(np.abs(b))))
        return bool(np.max(np.abs(a - b)) <= rel * scale)

    def __eq__(self, other):
        if not isinstance(other, RealPoly):
            return NotImplemented
        return bool(np.array_equal(self._c, other._c))

    def __hash__(self):
        return hash(tuple(self._c))

    def __repr__(self):
        return f"RealPoly({[float(x) for x in self._c]})"


@dataclass(frozen=True, order=True)
class QuadraticFactor:
    """Monic quadratic ``t^2 + a t + b``."""

    a: float
    b: float

    @property
    def poly(self) -> RealPoly:
        return RealPoly([self.b, self.a, 1.0])

    @property
    def discriminant(self) -> float:
        return self.a * self.a - 4.0 * self.b

    def isclose(self, other: QuadraticFactor, tol: float = 1e-8) -> bool:
        scale = max(1.0, abs(self.a), abs(self.b))
        return abs(self.a - other.a) <= tol * scale and abs(self.b - other.b) <= tol * scale

    def __str__(self):
        return f"t^2 {self.a:+.12g} t {self.b:+.12g}"


# -- roots --------------------------------------------------------------------

def _refine(poly: RealPoly, z: complex, mult: int, steps: int = 8) -> complex:
    """Newton on the (mult-1)-th derivative, where a root of multiplicity ``mult`` is simple."""
    f = poly.deriv(mult - 1) if mult > 1 else poly
    df = f.deriv()
    best, best_val = z, abs(f(z))
    for _ in range(steps):
        d = df(z)
        if d == 0:
            break
        z = z - f(z) / d
        val = abs(f(z))
        if val < best_val:
            best, best_val = z, val
        else:
            break
    return best


def roots_with_multiplicity(poly: RealPoly) -> list[tuple[complex, int]]:
    """Roots of ``poly`` (companion eigenvalues), clustered and Newton-refined."""
    if poly.degree < 1:
        return []
    raw = list(np.roots(poly.coeffs[::-1]))
    clusters: list[list[complex]] = []
    for z in sorted(raw, key=lambda w: (w.real, w.imag)):
        for cl in clusters:
            c = np.mean(cl)
            if abs(z - c) <= CLUSTER_TOL * (1.0 + abs(c)):
                cl.append(z)
                break
        else:
            clusters.append([z])
    out = []
    for cl in clusters:
        m = len(cl)
        z = complex(np.mean(cl))
        out.append((_refine(poly, z, m), m))
    return out


def _is_real(z: complex) -> bool:
    return abs(z.imag) < REAL_ROOT_TOL * (1.0 + abs(z.real))


def quadratic_factorization(N: RealPoly, *, allow_real_pairs: bool = False) -> list[QuadraticFactor]:
    """Split ``N`` into monic irreducible quadratics, sorted by ``(a, b)``.

    ``N`` must have even degree and no real roots. With ``allow_real_pairs``
    a real root of even multiplicity ``2m`` contributes ``m`` factors
    ``(t - t0)^2`` instead of raising; this is the norm of a translation
    factor.
    """
    N = N.trim(algebra.get_tol() * N.max_norm())
    if N.degree % 2:
        raise OddDegree(f"degree {N.degree} is odd")
    factors: list[QuadraticFactor] = []
    upper: list[tuple[complex, int]] = []
    lower: list[tuple[complex, int]] = []
    for z, m in roots_with_multiplicity(N):
        if _is_real(z):
            if not allow_real_pairs or m % 2:
                raise RealRootFound(z.real)
            factors += [QuadraticFactor(float(-2.0 * z.real), float(z.real * z.real))] * (m // 2)
        elif z.imag > 0:
            upper.append((z, m))
        else:
            lower.append((z, m))
    for z, m in upper:
        # nearest-conjugate partner
        k = min(range(len(lower)), key=lambda i: abs(lower[i][0] - z.conjugate()))
        w, mw = lower.pop(k)
        if mw != m:
            raise RealRootFound(z.real)  # pairing inconsistent: treat as ill-conditioned
        s, p = z + w, z * w
        factors += [QuadraticFactor(float(-s.real), float(p.real))] * m
    return sorted(factors)


def reconstruct(leading: float, factors: Sequence[QuadraticFactor]) -> RealPoly:
    out = RealPoly([leading])
    for f in factors:
        out = out * f.poly
    return out


# -- gcd ----------------------------------------------------------------------

def poly_gcd(a: RealPoly, b: RealPoly, tol: float | None = None) -> RealPoly:
    """Approximate monic gcd via Euclidean remainders.

    Coefficients below ``tol`` times the inputs' max-norm count as zero.
    """
    tol = algebra.get_tol() if tol is None else tol
    if a.is_zero():
        return b.monic() if not b.is_zero() else RealPoly([1.0])
    if b.is_zero():
        return a.monic()
    a, b = a.monic(), b.monic()
    if a.degree < b.degree:
        a, b = b, a
    while True:
        cutoff = tol * max(a.max_norm(), b.max_norm())
        r = (a % b).trim(cutoff)
        if r.is_zero():
            return b.monic()
        if r.degree == 0:
            return RealPoly([1.0])
        a, b = b, r.monic()


def greatest_real_factor(P, tol: float | None = None) -> RealPoly:
    """Monic gcd of the four coordinate polynomials of a quaternion polynomial.

    ``P`` is an array of shape ``(n+1, 4)`` (ascending degree) or anything
    with a ``primal_array`` attribute, such as a motion polynomial.
    """
    arr = np.asarray(P.primal_array if hasattr(P, "primal_array") else P, dtype=float)
    scale = float(np.max(np.abs(arr)))
    tol = algebra.get_tol() if tol is None else tol
    polys = [RealPoly(arr[:, i]).trim(tol * scale) for i in range(4)]
    polys = [p for p in polys if not p.is_zero()]
    if not polys:
        raise ValueError("zero polynomial has no greatest real factor")
    g = polys[0].monic()
    for p in polys[1:]:
        if g.degree == 0:
            break
        g = poly_gcd(g, p, tol)
    return g


def repeated_quadratic(N: RealPoly, tol: float | None = None) -> RealPoly:
    """Approximate ``gcd(N, N')``; degree >= 2 signals a repeated quadratic factor."""
    N = N.monic()
    return poly_gcd(N, N.deriv(), tol)


def real_roots_of(poly: RealPoly) -> list[float]:
    return [z.real for z, m in roots_with_multiplicity(poly) for _ in range(m) if _is_real(z)]


def is_irreducible_quadratic(q: QuadraticFactor, tol: float | None = None) -> bool:
    tol = algebra.get_tol() if tol is None else tol
    return q.discriminant < tol * max(1.0, q.a * q.a, abs(q.b))


__all__ = [
    "RealPoly",
    "QuadraticFactor",
    "quadratic_factorization",
    "greatest_real_factor",
    "repeated_quadratic",
    "poly_gcd",
    "reconstruct",
    "roots_with_multiplicity",
    "real_roots_of",
    "is_irreducible_quadratic",
]
