"""Bennett synthesis from three poses, degenerate cases, flips and replacement linkages."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import algebra
from .algebra import DualQuaternion
from .errors import (
    DegenerateZeroParameter,
    FamilyOfSolutions,
    FlipDegenerate,
    MotionFactorError,
    NoSolution,
    NotADisplacement,
)
from .factor import all_factorizations, factor_with_order, linear_norm
from .linkage import Joint, Linkage, LoopEntry, axes_coincide, loop_residual
from .mpoly import Factorization, MotionPolynomial, make_monic, mp_norm, norm_parts
from .rpoly import greatest_real_factor, repeated_quadratic

FLIP_RETRIES = 10


@dataclass(frozen=True)
class Pose:
    """Projective representative of a rigid displacement."""

    value: DualQuaternion

    def __post_init__(self):
        c = self.value.coords
        if not np.any(c[:4]):
            raise NotADisplacement("pose has zero primal part")
        if algebra.study_residual(self.value) > 1e-9:
            raise NotADisplacement("pose violates the Study condition")


class DiagnosisKind(enum.Enum):
    BENNETT_4R = "Bennett4R"
    COINCIDENT_DYADS = "CoincidentDyads"
    RPRP = "RPRP"
    CURVILINEAR_TRANSLATION = "CurvilinearTranslation"
    LINE_MOTION = "LineMotion"
    PLANAR_OR_SPHERICAL_FAMILY = "PlanarOrSphericalFamily"
    NO_SOLUTION = "NoSolution"


@dataclass
class SynthesisDiagnosis:
    """Outcome of :func:`synthesize_bennett`; ``linkage`` is set when one could be built."""

    kind: DiagnosisKind
    motion: MotionPolynomial | None = None
    lam: float | None = None
    mu: float | None = None
    linkage: Linkage | None = None
    payload: dict[str, Any] = field(default_factory=dict)


def _dq(p) -> DualQuaternion:
    if isinstance(p, Pose):
        return p.value
    if isinstance(p, DualQuaternion):
        return p
    return DualQuaternion(p)


def _bilinear(x: np.ndarray, y: np.ndarray) -> float:
    """Scalar dual part of ``x ȳ`` symmetrized: ``x_p . y_d + x_d . y_p``."""
    return float(x[:4] @ y[4:] + x[4:] @ y[:4])


def _reduce(p0: DualQuaternion, p1: DualQuaternion, p2: DualQuaternion):
    """Right-multiply by ``p2^-1`` so that the third pose becomes 1."""
    inv = algebra.dq_inverse(p2)
    return p0 * inv, p1 * inv


def interpolate_poses(p0, p1, p2) -> tuple[MotionPolynomial, float, float]:
    """Quadratic ``C`` on the Study quadric with ``C(0) ~ p0``, ``C(1) ~ p1``, ``C(inf) ~ p2``.

    Returns ``(C, lam, mu)``. For ``p2 = 1`` the interpolant is
    ``t^2 + (lam p1 - 1 - mu p0) t + mu p0``; otherwise it is computed
    for the reduced poses and right-multiplied by ``p2``.
    """
    p0, p1, p2 = _dq(p0), _dq(p1), _dq(p2)
    q0, q1 = _reduce(p0, p1, p2)
    a0, a1 = q0.coords, q1.coords
    one = algebra.ONE.coords
    b0, b1, g = _bilinear(a0, one), _bilinear(a1, one), _bilinear(a0, a1)
    scale = max(1.0, float(np.linalg.norm(a0))) * max(1.0, float(np.linalg.norm(a1)))
    tol = algebra.get_tol() * scale
    small = [abs(v) <= tol for v in (b0, b1, g)]
    if all(small):
        raise FamilyOfSolutions("dual part of the norm vanishes for every (lambda, mu)")
    if small[2]:
        # mu (lam g - b0) = 0 forces b0 = 0, then lam b1 = 0
        if not small[0]:
            raise NoSolution("interpolation equations are inconsistent")
        raise DegenerateZeroParameter("only lambda = 0 solves the interpolation equations")
    lam, mu = b0 / g, b1 / g
    if abs(lam) <= algebra.get_tol() or abs(mu) <= algebra.get_tol():
        raise DegenerateZeroParameter(f"lambda = {lam!r}, mu = {mu!r}")
    c = np.zeros((3, 8))
    c[2] = one
    c[1] = lam * a1 - one - mu * a0
    c[0] = mu * a0
    C = MotionPolynomial(c)
    if not np.allclose(p2.coords, one):
        C = C * p2
    _, dual = norm_parts(C)
    primal, _ = norm_parts(C)
    if dual.max_norm() > 1e-7 * max(1.0, primal.max_norm()):
        raise NoSolution(f"interpolant off the Study quadric (residual {dual.max_norm():.3e})")
    return C, lam, mu


def _rank(poses: list[DualQuaternion]) -> int:
    M = np.array([p.coords / np.linalg.norm(p.coords) for p in poses])
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s > 1e-9 * s[0]))


def four_bar(first: Factorization, second: Factorization, type_: str = "Bennett 4R", **metadata) -> Linkage:
    """Closed chain ``(t-h1)(t-h2)(t-k̄2)(t-k̄1)`` from two factorizations ``h``, ``k`` of one motion."""
    h1, h2 = first.factors
    k1, k2 = second.factors
    joints = [Joint.from_generator(h1, "h1"), Joint.from_generator(h2, "h2"),
              Joint.from_generator(k2, "k2"), Joint.from_generator(k1, "k1")]
    links = [(3, 0), (0, 1), (1, 2), (2, 3)]
    loop = [LoopEntry(0), LoopEntry(1), LoopEntry(2, True), LoopEntry(3, True)]
    L = Linkage(joints, links, [loop], type_, dict(metadata))
    L.metadata["loop_residual"] = loop_residual(L)
    return L


def synthesize_bennett(p0, p1, p2) -> SynthesisDiagnosis:
    """Interpolate three poses and classify the result, building a 4R linkage when possible.

    The third pose is factored out as an end-effector offset; the joints
    are those of the reduced motion through the identity.
    """
    p0, p1, p2 = _dq(p0), _dq(p1), _dq(p2)
    rank = _rank([p0, p1, p2])
    if rank <= 2:
        return SynthesisDiagnosis(DiagnosisKind.LINE_MOTION, payload={"rank": rank})
    q0, q1 = _reduce(p0, p1, p2)
    if all(np.max(np.abs(q.coords[1:4])) <= algebra.get_tol() * abs(q.coords[0]) for q in (q0, q1)):
        # relative translations: every interpolant is a curvilinear translation
        return SynthesisDiagnosis(DiagnosisKind.CURVILINEAR_TRANSLATION, payload={"reason": "poses differ by translations"})
    try:
        Cfull, lam, mu = interpolate_poses(p0, p1, p2)
    except FamilyOfSolutions as exc:
        return SynthesisDiagnosis(DiagnosisKind.PLANAR_OR_SPHERICAL_FAMILY, payload={"reason": str(exc)})
    except (NoSolution, DegenerateZeroParameter) as exc:
        return SynthesisDiagnosis(DiagnosisKind.NO_SOLUTION, payload={"reason": str(exc), "error": type(exc).__name__})
    # joints come from the motion through the identity
    C = make_monic(Cfull * algebra.dq_inverse(p2)) if not np.allclose(p2.coords, algebra.ONE.coords) else Cfull
    extra = {"end_effector": [float(x) for x in p2.coords]}
    out = SynthesisDiagnosis(DiagnosisKind.NO_SOLUTION, Cfull, lam, mu, payload=dict(extra))
    P = C.primal_array
    if np.max(np.abs(P[:, 1:])) <= algebra.get_tol() * max(1.0, float(np.max(np.abs(P)))):
        out.kind = DiagnosisKind.CURVILINEAR_TRANSLATION
        return out
    g = greatest_real_factor(C)
    if g.degree == 1:
        out.kind = DiagnosisKind.RPRP
        out.payload["real_factor"] = [float(x) for x in g.coeffs]
        fs = all_factorizations(C, check_generic=False, allow_real_pairs=True)
        out.payload["factorizations"] = list(fs)
        if len(fs) == 2:
            out.linkage = four_bar(fs[0], fs[1], "RPRP", **extra)
        return out
    N = mp_norm(C)
    rep = repeated_quadratic(N)
    if rep.degree >= 2:
        out.kind = DiagnosisKind.COINCIDENT_DYADS
        out.payload["repeated_factor"] = [float(x) for x in rep.coeffs]
        fs = all_factorizations(C)
        out.payload["factorizations"] = list(fs)
        return out
    fs = all_factorizations(C)
    out.payload["factorizations"] = list(fs)
    if len(fs) != 2:
        out.payload["reason"] = f"{len(fs)} factorizations found"
        return out
    out.kind = DiagnosisKind.BENNETT_4R
    norms = [[q.a, q.b] for q in fs.quadratics]
    out.linkage = four_bar(fs[0], fs[1], "Bennett 4R", norms=norms, **extra)
    return out


# -- line-symmetric motions -----------------------------------------------------------

def line_symmetric_motion(a: float, b: float, c: float) -> MotionPolynomial:
    """Motion line-symmetric to the rulings of ``x^2 b^2 c^2 + y^2 a^2 c^2 - z^2 a^2 b^2 = a^2 b^2 c^2``."""
    if 0.0 in (a, b, c):
        raise ValueError("a, b, c must be nonzero")
    c2 = np.zeros(8)
    c2[0] = b * b + c * c
    c1 = np.zeros(8)
    c1[2], c1[3] = 2 * a * c, 2 * a * b
    c1[6] = -2 * (a * a * b - b * c * c)
    c1[7] = -2 * (-a * a * c - b * b * c)
    c0 = np.zeros(8)
    c0[0] = c * c - b * b
    c0[1] = 2 * b * c
    c0[5] = -2 * a * (b * b - c * c)
    c0[4] = -4 * a * b * c
    return MotionPolynomial(np.stack([c0, c1, c2]))


def line_symmetric_discriminant(a: float, b: float, c: float) -> float:
    """Closed-form discriminant of the norm polynomial of :func:`line_symmetric_motion`."""
    return 4096.0 * (b * b + c * c) ** 8 * (a * a + c * c) ** 2 * (a + b) ** 2 * (a - b) ** 2


def line_symmetric_report(a: float, b: float, c: float) -> tuple[float, bool]:
    """Discriminant and whether the norm polynomial is a square."""
    N = mp_norm(line_symmetric_motion(a, b, c))
    return line_symmetric_discriminant(a, b, c), repeated_quadratic(N).degree >= 2


# -- Bennett flips ------------------------------------------------------------------

def random_rotation(rng: np.random.Generator) -> DualQuaternion:
    """Rotation generator with coordinates uniform in [-1, 1], dual part projected onto the Study quadric."""
    c = rng.uniform(-1.0, 1.0, 8)
    c[4] = 0.0
    v = c[1:4]
    c[5:8] -= (v @ c[5:8]) / (v @ v) * v
    return DualQuaternion(c)


def _alternative(h: DualQuaternion, p: DualQuaternion) -> tuple[DualQuaternion, DualQuaternion]:
    """Factor ``(t-h)(t-p) = (t-x)(t-y)`` with ``x`` sharing the norm of ``p``."""
    Mh, Mp = linear_norm(h), linear_norm(p)
    if Mh.isclose(Mp):
        raise FlipDegenerate("flip factor has the same norm as the joint it replaces")
    D = MotionPolynomial.from_factors([h, p])
    try:
        F = factor_with_order(D, [Mp, Mh])
    except MotionFactorError as exc:
        raise FlipDegenerate(f"{type(exc).__name__}: {exc}") from exc
    return F.factors


def bennett_flip(h1: DualQuaternion, h2: DualQuaternion, p: DualQuaternion) -> tuple[DualQuaternion, ...]:
    """Return ``(f, g, r, q)`` with ``(t-h1)(t-p) = (t-f)(t-g)`` and ``(t-h̄2)(t-p) = (t-q)(t-r̄)``."""
    f, g = _alternative(h1, p)
    q, rbar = _alternative(h2.conj(), p)
    r = rbar.conj()
    for lhs, rhs in (([h1, p], [f, g]), ([h2.conj(), p], [q, rbar])):
        A = MotionPolynomial.from_factors(lhs)
        B = MotionPolynomial.from_factors(rhs)
        if not A.isclose(B, 1e-9):
            raise FlipDegenerate("flip identity not satisfied")
    return f, g, r, q


def build_replacement_linkage(h1: DualQuaternion, h2: DualQuaternion, p: DualQuaternion) -> Linkage:
    """6R hybrid ``h1, h2, q, r̄, ḡ, f̄``, collapsed to a 5R Goldberg linkage when ``g`` and ``r`` share an axis."""
    f, g, r, q = bennett_flip(h1, h2, p)
    gens = [h1, h2, q, r.conj(), g.conj(), f.conj()]
    labels = ["h1", "h2", "q", "r*", "g*", "f*"]
    meta = {"p": [float(x) for x in p.coords]}
    if axes_coincide(algebra.axis_of(g), algebra.axis_of(r)):
        joints = [Joint.from_generator(x, lab) for x, lab in zip(gens[:4], labels[:3] + ["r*=g*"])]
        joints.append(Joint.from_generator(gens[5], labels[5]))
        links = [(4, 0), (0, 1), (1, 2), (2, 3), (3, 4)]
        override = None if gens[4].isclose(gens[3]) else gens[4]
        loop = [LoopEntry(0), LoopEntry(1), LoopEntry(2), LoopEntry(3), LoopEntry(3, False, override), LoopEntry(4)]
        L = Linkage(joints, links, [loop], "Goldberg 5R", meta)
    else:
        joints = [Joint.from_generator(x, lab) for x, lab in zip(gens, labels)]
        links = [(5, 0), (0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]
        L = Linkage(joints, links, [[LoopEntry(i) for i in range(6)]], "Waldron double Bennett hybrid 6R", meta)
    L.metadata["coupler_link"] = 2  # the link joining h2 and q performs the input motion
    L.metadata["loop_residual"] = loop_residual(L)
    return L


def replacement_with_retries(h1: DualQuaternion, h2: DualQuaternion, seed: int = 0, retries: int = FLIP_RETRIES) -> Linkage:
    """:func:`build_replacement_linkage` with a random ``p``, redrawn on :class:`FlipDegenerate`."""
    rng = np.random.default_rng(seed)
    last: Exception | None = None
    for _ in range(retries):
        p = random_rotation(rng)
        try:
            L = build_replacement_linkage(h1, h2, p)
        except FlipDegenerate as exc:
            last = exc
            continue
        L.metadata["seed"] = seed
        return L
    raise FlipDegenerate(f"no usable p after {retries} draws: {last}")


__all__ = [
    "Pose",
    "DiagnosisKind",
    "SynthesisDiagnosis",
    "interpolate_poses",
    "synthesize_bennett",
    "four_bar",
    "line_symmetric_motion",
    "line_symmetric_discriminant",
    "line_symmetric_report",
    "random_rotation",
    "bennett_flip",
    "build_replacement_linkage",
    "replacement_with_retries",
]
