"""Factorization of generic motion polynomials into linear rotation factors."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from . import algebra
from .algebra import DualQuaternion, dqmul_array
from .errors import MotionFactorError, NonGeneric, NotInvertible, RemainderNotInvertible, ResidualTooLarge
from .mpoly import (
    Factorization,
    MotionPolynomial,
    coefficient_distance,
    make_monic,
    mp_div,
    mp_norm,
)
from .rpoly import QuadraticFactor, greatest_real_factor, quadratic_factorization

RESIDUAL_TOL = 1e-8


def is_generic(C: MotionPolynomial) -> bool:
    return greatest_real_factor(C).degree == 0


def linear_norm(h: DualQuaternion) -> QuadraticFactor:
    """Norm quadratic ``t^2 - 2 h0 t + |primal(h)|^2`` of ``t - h``."""
    c = h.coords
    return QuadraticFactor(-2.0 * float(c[0]), float(c[:4] @ c[:4]))


def norm_quadratics(C: MotionPolynomial, *, allow_real_pairs: bool = False) -> list[QuadraticFactor]:
    """Sorted irreducible quadratic factors of the norm polynomial of ``make_monic(C)``."""
    return quadratic_factorization(mp_norm(make_monic(C)), allow_real_pairs=allow_real_pairs)


def right_zero(R: MotionPolynomial, tol: float | None = None) -> DualQuaternion:
    """Unique zero ``-r1^-1 r0`` of a linear polynomial ``R = r1 t + r0``."""
    c = R.array
    if R.degree != 1:
        raise RemainderNotInvertible(R, f"remainder has degree {R.degree}, expected 1")
    r0, r1 = c[0], c[1]
    tol = algebra.get_tol() if tol is None else tol
    try:
        inv = algebra.dq_inverse(DualQuaternion.from_array(r1), tol=tol)
    except NotInvertible as exc:
        raise RemainderNotInvertible(R) from exc
    return DualQuaternion.from_array(-dqmul_array(inv.coords, r0))


def _peel(C: MotionPolynomial, M: QuadraticFactor) -> tuple[DualQuaternion, MotionPolynomial]:
    """One step: right factor ``t - h`` with norm ``M`` and the quotient."""
    R = mp_div(C, MotionPolynomial.from_real(M.poly))[1]
    if R.degree < 1:
        raise RemainderNotInvertible(R)
    h = right_zero(R)
    Q, _ = mp_div(C, MotionPolynomial.linear(h))
    return h, Q


def _resolve_order(C: MotionPolynomial, order, quads) -> tuple[tuple[QuadraticFactor, ...], tuple[int, ...]]:
    if order is None:
        return tuple(quads), tuple(range(len(quads)))
    order = list(order)
    if order and all(isinstance(o, QuadraticFactor) for o in order):
        return tuple(order), ()
    idx = tuple(int(o) for o in order)
    if sorted(idx) != list(range(len(quads))):
        raise ValueError(f"order {idx} is not a permutation of 0..{len(quads) - 1}")
    return tuple(quads[i] for i in idx), idx


def factor_with_order(
    C: MotionPolynomial,
    order: Sequence[int] | Sequence[QuadraticFactor] | None = None,
    *,
    check_generic: bool = True,
    allow_real_pairs: bool = False,
    residual_tol: float = RESIDUAL_TOL,
) -> Factorization:
    """Factor ``C = c_n (t - h_1) ... (t - h_n)`` with ``(t - h_i)(t - h̄_i) = M_order[i]``.

    ``order`` is a permutation of indices into the sorted norm quadratics,
    or the quadratics themselves. Factors are peeled off from the right:
    ``h_n`` is the zero of ``C mod M_n``.
    """
    monic, lead = make_monic(C, with_leading=True)
    if check_generic and not is_generic(monic):
        raise NonGeneric(f"primal part has real factor {greatest_real_factor(monic)}")
    if order is not None and list(order) and all(isinstance(o, QuadraticFactor) for o in order):
        quads = list(order)
    else:
        quads = quadratic_factorization(mp_norm(monic), allow_real_pairs=allow_real_pairs)
    Ms, idx = _resolve_order(monic, order, quads)
    if len(Ms) != monic.degree:
        raise ValueError(f"need {monic.degree} quadratic factors, got {len(Ms)}")
    hs: list[DualQuaternion] = []
    cur = monic
    for M in reversed(Ms):
        h, cur = _peel(cur, M)
        hs.insert(0, h)
    F = Factorization(tuple(hs), tuple(Ms), lead, idx)
    res = coefficient_distance(MotionPolynomial.from_factors(hs), monic) / max(1.0, monic.max_norm())
    if res > residual_tol:
        raise ResidualTooLarge(res)
    return F


@dataclass
class FactorizationSet:
    """Result of sweeping all orders of the norm quadratics."""

    factorizations: list[Factorization]
    quadratics: list[QuadraticFactor]
    failures: list[tuple[tuple[int, ...], MotionFactorError]] = field(default_factory=list)
    coincident: bool = False

    def __len__(self):
        return len(self.factorizations)

    def __iter__(self):
        return iter(self.factorizations)

    def __getitem__(self, i):
        return self.factorizations[i]


def same_factorization(a: Factorization, b: Factorization, tol: float = 1e-8) -> bool:
    if len(a.factors) != len(b.factors):
        return False
    return all(x.canonical().isclose(y.canonical(), tol) for x, y in zip(a.factors, b.factors))


def all_factorizations(C: MotionPolynomial, *, check_generic: bool = True, allow_real_pairs: bool = False) -> FactorizationSet:
    """Factorizations for every permutation of the norm quadratics, lexicographic order.

    Factorizations equal up to sign are collapsed; if that happens (repeated
    norm quadratic) ``coincident`` is set. Per-permutation failures are
    collected instead of raised.
    """
    monic = make_monic(C)
    if check_generic and not is_generic(monic):
        raise NonGeneric(f"primal part has real factor {greatest_real_factor(monic)}")
    quads = quadratic_factorization(mp_norm(monic), allow_real_pairs=allow_real_pairs)
    out = FactorizationSet([], quads)
    # suffix memo: the right-most factors only depend on the tail of the order
    memo: dict[tuple[int, ...], tuple[list[DualQuaternion], MotionPolynomial]] = {(): ([], monic)}

    def tail(suffix: tuple[int, ...]):
        if suffix not in memo:
            hs, cur = tail(suffix[1:])
            h, cur = _peel(cur, quads[suffix[0]])
            memo[suffix] = ([h] + hs, cur)
        return memo[suffix]

    lead = C.leading
    for perm in itertools.permutations(range(len(quads))):
        try:
            hs, _ = tail(perm)
            res = coefficient_distance(MotionPolynomial.from_factors(hs), monic) / max(1.0, monic.max_norm())
            if res > RESIDUAL_TOL:
                raise ResidualTooLarge(res)
        except MotionFactorError as exc:
            out.failures.append((perm, exc))
            continue
        F = Factorization(tuple(hs), tuple(quads[i] for i in perm), lead, perm)
        if any(same_factorization(F, G) for G in out.factorizations):
            out.coincident = True
            continue
        out.factorizations.append(F)
    return out


def verify_factorization(C: MotionPolynomial, F: Factorization) -> float:
    """Max coefficient deviation of ``prod (t - h_i)`` from ``make_monic(C)``.

    Also folds in the deviation of each factor's norm from its recorded quadratic.
    """
    if C.degree == 0 and not F.factors:
        return 0.0
    monic = make_monic(C)
    res = coefficient_distance(MotionPolynomial.from_factors(F.factors), monic)
    for h, M in zip(F.factors, F.norms):
        c = h.coords
        a, b = -2.0 * c[0], float(c[:4] @ c[:4])
        res = max(res, abs(a - M.a), abs(b - M.b))
    return res
