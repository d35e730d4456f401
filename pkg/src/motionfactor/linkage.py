"""Linkage data model, loop closure, DH parameters, trajectories and file formats."""
from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import algebra
from .algebra import DualQuaternion, GeneratorKind, Line, classify_generator, dqmul_array
from .errors import IdenticalAxes, InvalidLoop, NotADisplacement, ParseError, PoleAtParameter
from .mpoly import Factorization, MotionPolynomial, mp_new
from .rpoly import QuadraticFactor

# {±10^k : k = -2..2} ∪ {0, ∞}
STANDARD_SWEEP: tuple[float, ...] = tuple(
    sorted({s * 10.0**k for k in range(-2, 3) for s in (-1.0, 1.0)} | {0.0})
) + (math.inf,)


class JointKind(enum.Enum):
    REVOLUTE = "Revolute"
    PRISMATIC = "Prismatic"


_KIND_OF = {GeneratorKind.ROTATION: JointKind.REVOLUTE, GeneratorKind.TRANSLATION: JointKind.PRISMATIC}


@dataclass(frozen=True)
class Joint:
    kind: JointKind
    generator: DualQuaternion
    label: str = ""

    @classmethod
    def from_generator(cls, h: DualQuaternion, label: str = "") -> Joint:
        kind = classify_generator(h)
        if kind not in _KIND_OF:
            raise ValueError(f"{h} is neither a rotation nor a translation generator")
        return cls(_KIND_OF[kind], h, label)


@dataclass(frozen=True)
class LoopEntry:
    """Use of a joint in a closure loop: factor ``t - g`` or ``t - ḡ``.

    ``generator`` overrides the joint's generator; it is set when two
    factors with the same axis but different speeds share a merged joint.
    """

    joint: int
    conjugate: bool = False
    generator: DualQuaternion | None = None


@dataclass
class Linkage:
    joints: list[Joint]
    links: list[tuple[int, ...]]
    loops: list[list[LoopEntry]]
    type: str = ""
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.links = [tuple(sorted(set(link))) for link in self.links]
        n = len(self.joints)
        for li, loop in enumerate(self.loops):
            if not loop:
                raise InvalidLoop(f"loop {li} is empty")
            for e in loop:
                if not 0 <= e.joint < n:
                    raise InvalidLoop(f"loop {li} references joint {e.joint} (have {n})")
        counts = [0] * n
        for link in self.links:
            for j in link:
                if not 0 <= j < n:
                    raise ValueError(f"link references joint {j} (have {n})")
                counts[j] += 1
        bad = [j for j, c in enumerate(counts) if c != 2]
        if bad:
            raise ValueError(f"joints {bad} do not belong to exactly two links")
        if not self._connected():
            raise ValueError("link graph is not connected")

    def _connected(self) -> bool:
        if not self.links:
            return True
        adj: dict[int, set[int]] = {i: set() for i in range(len(self.links))}
        by_joint: dict[int, list[int]] = {}
        for i, link in enumerate(self.links):
            for j in link:
                by_joint.setdefault(j, []).append(i)
        for pair in by_joint.values():
            for a in pair:
                adj[a].update(pair)
        seen, stack = {0}, [0]
        while stack:
            for b in adj[stack.pop()]:
                if b not in seen:
                    seen.add(b)
                    stack.append(b)
        return len(seen) == len(self.links)

    def entry_generator(self, e: LoopEntry) -> DualQuaternion:
        g = e.generator if e.generator is not None else self.joints[e.joint].generator
        return g.conj() if e.conjugate else g

    def loop_factors(self, loop: int | Sequence[LoopEntry]) -> list[DualQuaternion]:
        entries = self.loops[loop] if isinstance(loop, int) else loop
        return [self.entry_generator(e) for e in entries]

    def loop_polynomial(self, loop: int | Sequence[LoopEntry]) -> MotionPolynomial:
        return MotionPolynomial.from_factors(self.loop_factors(loop))

    def link_graph_edges(self) -> list[tuple[int, int, int]]:
        """(link_a, link_b, joint) for every joint."""
        by_joint: dict[int, list[int]] = {}
        for i, link in enumerate(self.links):
            for j in link:
                by_joint.setdefault(j, []).append(i)
        return [(a, b, j) for j, (a, b) in sorted(by_joint.items())]


def single_loop_linkage(entries: Sequence[tuple[DualQuaternion, bool]], labels: Sequence[str], type_: str, **metadata) -> Linkage:
    """Closed chain with one joint per entry; consecutive joints share a link."""
    joints = [Joint.from_generator(h, lab) for (h, _), lab in zip(entries, labels)]
    n = len(joints)
    links = [(i, (i + 1) % n) for i in range(n)]
    loop = [LoopEntry(i, conj) for i, (_, conj) in enumerate(entries)]
    return Linkage(joints, links, [loop], type_, dict(metadata))


# -- loop closure -----------------------------------------------------------------

def product_residual(poses: Sequence[DualQuaternion]) -> float | None:
    """Deviation of ``prod poses`` from a real multiple of 1, relative to its scalar part.

    Each pose is divided by its primal length first, so rescaling any
    factor by a nonzero real leaves the value unchanged. Returns None when a
    pose has vanishing primal part.
    """
    acc = algebra.ONE.coords.copy()
    for h in poses:
        x = h.coords
        n = math.sqrt(float(x[:4] @ x[:4]))
        if n <= algebra.get_tol() * max(1.0, float(np.max(np.abs(x)))):
            return None
        acc = dqmul_array(acc, x / n)
    s = abs(acc[0])
    if s == 0.0:
        return math.inf
    return float(np.max(np.abs(acc[1:]))) / s


def loop_residual(linkage: Linkage, loop: int | Sequence[LoopEntry] = 0, ts: Iterable[float] = STANDARD_SWEEP) -> float:
    """Max over ``ts`` of the deviation of the loop product from a real multiple of 1.

    Each linear factor is normalized before multiplying, so the value is
    relative to the scalar part. Parameters where a prismatic factor
    degenerates (primal part zero) are skipped.
    """
    if isinstance(loop, int):
        if not 0 <= loop < len(linkage.loops):
            raise InvalidLoop(f"no loop {loop}")
    else:
        for e in loop:
            if not 0 <= e.joint < len(linkage.joints):
                raise InvalidLoop(f"joint {e.joint} out of range")
    factors = linkage.loop_factors(loop)
    return factor_loop_residual(factors, ts)


def factor_loop_residual(factors: Sequence[DualQuaternion], ts: Iterable[float] = STANDARD_SWEEP) -> float:
    """:func:`loop_residual` for a bare list of generators."""
    worst = 0.0
    for t in ts:
        if math.isinf(t):
            continue  # every normalised factor tends to 1
        res = product_residual([algebra.ONE * t - h for h in factors])
        if res is not None:
            worst = max(worst, res)
    return worst


def linkage_residuals(linkage: Linkage, ts: Iterable[float] = STANDARD_SWEEP) -> list[float]:
    ts = list(ts)
    return [loop_residual(linkage, i, ts) for i in range(len(linkage.loops))]


# -- DH parameters -------------------------------------------------------------------

@dataclass(frozen=True)
class DHParams:
    """Common normal of two axes.

    ``twist`` is measured from L1 to L2 about the normal oriented by
    ``dir(L1) x dir(L2)`` (hence in ``[0, pi]``); ``offset1``/``offset2``
    locate the normal's feet along each axis, measured from the point of
    the axis closest to the origin.
    """

    distance: float
    twist: float
    offset1: float
    offset2: float


def dh_from_axes(L1: Line, L2: Line, tol: float = 1e-9) -> DHParams:
    u1 = L1.d / np.linalg.norm(L1.d)
    u2 = L2.d / np.linalg.norm(L2.d)
    p1, p2 = L1.point(), L2.point()
    cross = np.cross(u1, u2)
    sin = float(np.linalg.norm(cross))
    cos = float(u1 @ u2)
    w = p2 - p1
    scale = max(1.0, float(np.linalg.norm(p1)), float(np.linalg.norm(p2)))
    if sin <= tol:
        # parallel: normal from L1's base point towards L2
        perp = w - (w @ u1) * u1
        dist = float(np.linalg.norm(perp))
        if dist <= tol * scale:
            raise IdenticalAxes("axes coincide")
        twist = 0.0 if cos > 0 else math.pi
        return DHParams(dist, twist, 0.0, float(-(w @ u2)))
    dist = abs(float(w @ cross)) / sin
    # feet of the common normal: p1 + s1 u1, p2 + s2 u2
    A = np.array([[1.0, -cos], [cos, -1.0]])
    s1, s2 = np.linalg.solve(A, np.array([w @ u1, w @ u2]))
    twist = math.atan2(sin, cos)
    if dist <= tol * scale:
        dist = 0.0
    return DHParams(dist, twist, float(s1), float(s2))


def axes_coincide(L1: Line, L2: Line, tol: float = 1e-9) -> bool:
    try:
        dh_from_axes(L1, L2, tol)
    except IdenticalAxes:
        return True
    return False


# -- trajectories -----------------------------------------------------------------------

def trajectory(C: MotionPolynomial, x, ts: Iterable[float]) -> list[np.ndarray]:
    """Points ``(P x P̄ + 2 P Q̄) / P P̄`` along the motion; ``inf`` uses the leading coefficient."""
    out = []
    for t in ts:
        pose = C(t)
        try:
            out.append(algebra.act_on_point(pose, x))
        except NotADisplacement as exc:
            p = pose.coords[:4]
            if math.sqrt(float(p @ p)) <= algebra.get_tol() * max(1.0, float(np.max(np.abs(pose.coords)))):
                raise PoleAtParameter(t) from exc
            raise
    return out


# -- serialization ---------------------------------------------------------------------

def _vec(values, n: int, where: str) -> list[float]:
    if not isinstance(values, list) or len(values) != n:
        raise ParseError(f"expected a list of {n} numbers", where)
    try:
        return [float(v) for v in values]
    except (TypeError, ValueError) as exc:
        raise ParseError("non-numeric entry", where) from exc


def _dq_list(h: DualQuaternion) -> list[float]:
    return [float(x) for x in h.coords]


def linkage_to_dict(L: Linkage) -> dict:
    loops = []
    for loop in L.loops:
        entries = []
        for e in loop:
            d = {"joint": e.joint, "conjugate": e.conjugate}
            if e.generator is not None:
                d["g"] = _dq_list(e.generator)
            entries.append(d)
        loops.append(entries)
    out = {
        "joints": [{"kind": j.kind.value, "label": j.label, "g": _dq_list(j.generator)} for j in L.joints],
        "links": [list(link) for link in L.links],
        "loops": loops,
        "type": L.type,
    }
    if L.metadata:
        out["metadata"] = L.metadata
    return out


def linkage_from_dict(data: dict) -> Linkage:
    if not isinstance(data, dict):
        raise ParseError("linkage file must contain a JSON object")
    for key in ("joints", "links", "loops"):
        if key not in data:
            raise ParseError(f"missing field {key!r}")
    joints = []
    for i, jd in enumerate(data["joints"]):
        where = f"joints[{i}]"
        try:
            kind = JointKind(jd["kind"])
        except (KeyError, ValueError, TypeError) as exc:
            raise ParseError("unknown or missing joint kind", where + ".kind") from exc
        g = DualQuaternion(_vec(jd.get("g"), 8, where + ".g"))
        found = classify_generator(g)
        if _KIND_OF.get(found) is not kind:
            raise ParseError(f"generator classifies as {found.value}, declared {kind.value}", where + ".g")
        joints.append(Joint(kind, g, str(jd.get("label", ""))))
    links = []
    for i, link in enumerate(data["links"]):
        if not isinstance(link, list) or not all(isinstance(j, int) for j in link):
            raise ParseError("link must be a list of joint indices", f"links[{i}]")
        links.append(tuple(link))
    loops = []
    for i, loop in enumerate(data["loops"]):
        entries = []
        for k, e in enumerate(loop):
            where = f"loops[{i}][{k}]"
            if not isinstance(e, dict) or not isinstance(e.get("joint"), int):
                raise ParseError("loop entry needs an integer 'joint'", where)
            g = DualQuaternion(_vec(e["g"], 8, where + ".g")) if "g" in e else None
            entries.append(LoopEntry(e["joint"], bool(e.get("conjugate", False)), g))
        loops.append(entries)
    try:
        return Linkage(joints, links, loops, str(data.get("type", "")), dict(data.get("metadata", {})))
    except (InvalidLoop, ValueError) as exc:
        raise ParseError(str(exc), "links/loops") from exc


def export_linkage(L: Linkage, path: str | Path) -> None:
    Path(path).write_text(json.dumps(linkage_to_dict(L), indent=2) + "\n")


def import_linkage(path: str | Path) -> Linkage:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"{path}:{exc.lineno}:{exc.colno}") from exc
    return linkage_from_dict(data)


def motion_to_dict(C: MotionPolynomial) -> dict:
    return {"coeffs": [[float(x) for x in row] for row in C.array]}


def motion_from_dict(data: dict, validate: bool = True) -> MotionPolynomial:
    if not isinstance(data, dict) or "coeffs" not in data:
        raise ParseError("motion file needs a 'coeffs' list")
    rows = [_vec(r, 8, f"coeffs[{i}]") for i, r in enumerate(data["coeffs"])]
    if not rows:
        raise ParseError("empty coefficient list", "coeffs")
    arr = np.array(rows)
    return mp_new(arr) if validate else MotionPolynomial(arr)


def load_motion(path: str | Path, validate: bool = True) -> MotionPolynomial:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"{path}:{exc.lineno}:{exc.colno}") from exc
    return motion_from_dict(data, validate)


def save_motion(C: MotionPolynomial, path: str | Path) -> None:
    Path(path).write_text(json.dumps(motion_to_dict(C)) + "\n")


def factorization_to_dict(F: Factorization, residual: float | None = None) -> dict:
    out = {
        "factors": [_dq_list(h) for h in F.factors],
        "norms": [[M.a, M.b] for M in F.norms],
        "leading": _dq_list(F.leading),
    }
    if F.order:
        out["order"] = list(F.order)
    if residual is not None:
        out["residual"] = residual
    return out


def factorization_from_dict(data: dict) -> Factorization:
    try:
        factors = tuple(DualQuaternion(_vec(h, 8, f"factors[{i}]")) for i, h in enumerate(data["factors"]))
        norms = tuple(QuadraticFactor(*_vec(m, 2, f"norms[{i}]")) for i, m in enumerate(data["norms"]))
    except KeyError as exc:
        raise ParseError(f"missing field {exc.args[0]!r}") from exc
    lead = DualQuaternion(_vec(data["leading"], 8, "leading")) if "leading" in data else algebra.ONE
    return Factorization(factors, norms, lead, tuple(data.get("order", ())))


def trajectory_csv(ts: Sequence[float], points: Sequence[np.ndarray]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "x", "y", "z"])
    for t, p in zip(ts, points):
        w.writerow(["inf" if math.isinf(t) else repr(float(t)), *(repr(float(v)) for v in p)])
    return buf.getvalue()


def export_trajectory(path: str | Path, ts: Sequence[float], points: Sequence[np.ndarray]) -> None:
    Path(path).write_text(trajectory_csv(ts, points))


def read_trajectory(path: str | Path) -> tuple[list[float], list[np.ndarray]]:
    ts, pts = [], []
    with open(path, newline="") as fh:
        rows = csv.reader(fh)
        header = next(rows, None)
        if header != ["t", "x", "y", "z"]:
            raise ParseError("header must be t,x,y,z", f"{path}:1")
        for lineno, row in enumerate(rows, start=2):
            try:
                ts.append(math.inf if row[0] == "inf" else float(row[0]))
                pts.append(np.array([float(v) for v in row[1:4]]))
            except (ValueError, IndexError) as exc:
                raise ParseError("malformed row", f"{path}:{lineno}") from exc
    return ts, pts


__all__ = [
    "STANDARD_SWEEP",
    "JointKind",
    "Joint",
    "LoopEntry",
    "Linkage",
    "single_loop_linkage",
    "loop_residual",
    "factor_loop_residual",
    "product_residual",
    "linkage_residuals",
    "DHParams",
    "dh_from_axes",
    "axes_coincide",
    "trajectory",
    "linkage_to_dict",
    "linkage_from_dict",
    "export_linkage",
    "import_linkage",
    "motion_to_dict",
    "motion_from_dict",
    "load_motion",
    "save_motion",
    "factorization_to_dict",
    "factorization_from_dict",
    "trajectory_csv",
    "export_trajectory",
    "read_trajectory",
]
