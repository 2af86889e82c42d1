"""Cyclic contraction of arrows into indegree-1 vertices, and the
cancellativity checks that decide whether the contracted quiver qualifies.

Path equality in the dimer algebra is decided by bounded rewriting: for each
arrow ``a`` the two paths completing ``a`` to its two unit cycles are
interchangeable as subpaths.  Rewriting never changes the image of a path in
the monomial impression, so an equivalence class is finite whenever arrows of
trivial image cannot form long chains.
"""
from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .matchings import require_valid, simple_matchings
from .quiver import Arrow, DimerQuiver, Face, Path, PathError, indegree, validate

DEFAULT_REWRITE_BOUND = 64


class ContractionError(ValueError):
    """Contracting produced something that is not a valid dimer quiver."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


def star_arrows(q: DimerQuiver) -> frozenset[int]:
    """Arrows whose head has indegree 1."""
    return frozenset(a.id for a in q.arrows if indegree(q, a.head) == 1)


def tail_arrows(q: DimerQuiver) -> frozenset[int]:
    """Arrows whose tail has indegree 1."""
    return frozenset(a.id for a in q.arrows if indegree(q, a.tail) == 1)


def check_assumption_B(q: DimerQuiver) -> bool:
    return not any(indegree(q, a.head) == 1 and indegree(q, a.tail) == 1 for a in q.arrows)


@dataclass(frozen=True)
class Contraction:
    source: DimerQuiver
    target: DimerQuiver
    vertex_map: dict[int, int]
    arrow_map: dict[int, int]
    contracted: frozenset[int] = frozenset()

    def psi(self, p: Path) -> Path:
        """Image of a path: contracted arrows become trivial."""
        kept = tuple(a for a in p.arrows if a in self.arrow_map)
        return Path(self.vertex_map[p.tail], self.vertex_map[p.head], kept)

    def to_dict(self) -> dict:
        return {
            "contracted_arrows": sorted(self.contracted),
            "vertex_map": {str(k): v for k, v in sorted(self.vertex_map.items())},
            "arrow_map": {str(k): v for k, v in sorted(self.arrow_map.items())},
        }


def contract(q: DimerQuiver) -> Contraction:
    require_valid(q)
    star = star_arrows(q)
    # offset of each vertex from its class representative, following contracted arrows
    rep = {v: v for v in q.vertices}
    offset = {v: (0, 0) for v in q.vertices}
    adj = defaultdict(list)
    for a_id in star:
        a = q.arrow(a_id)
        adj[a.tail].append((a.head, a.displacement))
        adj[a.head].append((a.tail, (-a.displacement[0], -a.displacement[1])))
    seen = set()
    for root in q.vertices:
        if root in seen:
            continue
        seen.add(root)
        todo = deque([root])
        while todo:
            v = todo.popleft()
            for w, d in adj[v]:
                off = (offset[v][0] + d[0], offset[v][1] + d[1])
                if w in seen:
                    if offset[w] != off:
                        raise ContractionError(f"contracted arrows around vertex {w} wrap around the torus")
                    continue
                seen.add(w)
                rep[w] = root
                offset[w] = off
                todo.append(w)

    roots = sorted(set(rep.values()))
    new_id = {r: k for k, r in enumerate(roots)}
    vertex_map = {v: new_id[rep[v]] for v in q.vertices}
    arrows = []
    for a in q.arrows:
        if a.id in star:
            continue
        ot, oh = offset[a.tail], offset[a.head]
        d = (a.displacement[0] + ot[0] - oh[0], a.displacement[1] + ot[1] - oh[1])
        arrows.append(Arrow(a.id, vertex_map[a.tail], vertex_map[a.head], d))
    faces = [Face(f.orientation, tuple(a for a in f.boundary if a not in star)) for f in q.faces]
    target = DimerQuiver(len(roots), tuple(arrows), tuple(faces))
    report = validate(target)
    if not report.ok:
        raise ContractionError("contraction is not a valid dimer quiver: "
                               + "; ".join(map(str, report.violations)), report)
    return Contraction(q, target, vertex_map, {a.id: a.id for a in arrows}, star)


# -- path equality modulo the dimer relations ---------------------------------

class RelationSystem:
    """Rewrite rules of the dimer relations, on walks (traversal order)."""

    def __init__(self, q: DimerQuiver):
        self.quiver = q
        sides = defaultdict(list)
        for a in q.arrows:
            completions = []
            for k in q.faces_of_arrow[a.id]:
                b = q.faces[k].boundary
                i = b.index(a.id)
                completions.append(b[i + 1:] + b[:i])
            for s in completions:
                for t in completions:
                    if s != t and t not in sides[s]:
                        sides[s].append(t)
        self.rules = {s: tuple(ts) for s, ts in sides.items()}
        self.lengths = sorted({len(s) for s in self.rules})

    def neighbours(self, walk: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
        n = len(walk)
        for ell in self.lengths:
            for i in range(n - ell + 1):
                alts = self.rules.get(walk[i:i + ell])
                if alts:
                    for t in alts:
                        yield walk[:i] + t + walk[i + ell:]

    def closure(self, walk: tuple[int, ...], bound: int, stop_at=None):
        """Breadth-first closure of ``walk`` under rewriting, at most ``bound`` steps deep.

        Returns ``(members, saturated)``.  With ``stop_at`` given, returns as
        soon as that walk is reached.
        """
        seen = {walk}
        frontier = [walk]
        depth = 0
        while frontier:
            if stop_at is not None and stop_at in seen:
                return seen, True
            if depth >= bound:
                nxt = [w for f in frontier for w in self.neighbours(f) if w not in seen]
                return seen, not nxt
            nxt = []
            for f in frontier:
                for w in self.neighbours(f):
                    if w not in seen:
                        seen.add(w)
                        nxt.append(w)
            frontier = nxt
            depth += 1
        return seen, True


def paths_equal_mod_I(q: DimerQuiver, p: Path, r: Path, bound: int = DEFAULT_REWRITE_BOUND,
                      relations: RelationSystem | None = None) -> Optional[bool]:
    """Decide ``p == r`` in the dimer algebra; ``None`` means the step bound was hit."""
    if (p.tail, p.head) != (r.tail, r.head):
        raise PathError("paths have different endpoints")
    if p == r:
        return True
    if p.is_trivial or r.is_trivial:
        return False
    relations = relations or RelationSystem(q)
    members, saturated = relations.closure(p.walk, bound, stop_at=r.walk)
    if r.walk in members:
        return True
    return False if saturated else None


# -- cancellativity -----------------------------------------------------------

CANCELLATIVE = "cancellative"
NON_CANCELLATIVE = "non-cancellative"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class Witness:
    """Paths ``p != q`` with ``r p == r q`` (side "left") or ``p r == q r`` (side "right")."""
    p: Path
    q: Path
    r: Path
    side: str

    def products(self) -> tuple[Path, Path]:
        from .quiver import compose
        if self.side == "left":
            return compose(self.r, self.p), compose(self.r, self.q)
        return compose(self.p, self.r), compose(self.q, self.r)

    def to_dict(self) -> dict:
        return {"p": list(self.p.arrows), "q": list(self.q.arrows), "r": list(self.r.arrows),
                "side": self.side, "endpoints": [self.p.tail, self.p.head],
                "order": "right-to-left"}


@dataclass(frozen=True)
class CancellativityVerdict:
    kind: str
    witness: Optional[Witness] = None
    reasons: tuple[str, ...] = ()
    path_bound: int = 0
    rewrite_bound: int = 0
    uncovered_arrows: tuple[int, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "verdict": self.kind,
            "witness": self.witness.to_dict() if self.witness else None,
            "reasons": list(self.reasons),
            "arrows_in_no_simple_matching": list(self.uncovered_arrows),
            "path_bound": self.path_bound,
            "rewrite_bound": self.rewrite_bound,
        }


def _walks(q: DimerQuiver, length: int) -> Iterator[tuple[int, ...]]:
    def extend(walk, v):
        if len(walk) == length:
            yield walk
            return
        for a in q.out_arrows[v]:
            yield from extend(walk + (a.id,), a.head)
    for v in q.vertices:
        yield from extend((), v)


class _ClassIndex:
    """Memoised equivalence classes of walks under the relations."""

    def __init__(self, relations: RelationSystem, bound: int):
        self.relations = relations
        self.bound = bound
        self.class_of: dict[tuple[int, ...], int] = {}
        self.members: list[frozenset] = []
        self.unsaturated = False

    def of(self, walk: tuple[int, ...], vertex: int):
        """Class id of a walk; trivial walks are keyed by vertex, ``None`` if unsaturated."""
        if not walk:
            return ("e", vertex)
        if walk in self.class_of:
            return self.class_of[walk]
        members, saturated = self.relations.closure(walk, self.bound)
        if not saturated:
            self.unsaturated = True
            return None
        cid = len(self.members)
        self.members.append(frozenset(members))
        for m in members:
            self.class_of[m] = cid
        return cid


def is_cancellative(q: DimerQuiver, path_bound: int, rewrite_bound: int = DEFAULT_REWRITE_BOUND
                    ) -> CancellativityVerdict:
    """Bounded search for a non-cancellative pair.

    A non-cancellative pair exists iff one exists whose cancelled factor is a
    single arrow, so every class of walks up to ``path_bound`` arrows is
    inspected for two members sharing a first (or last) arrow whose
    remainders are inequivalent.
    """
    require_valid(q)
    covered = set()
    for m in simple_matchings(q):
        covered |= m.arrows
    uncovered = tuple(a for a in q.arrow_ids if a not in covered)
    reasons = []
    if uncovered:
        reasons.append("necessary-condition failure: arrows in no simple matching")
    bounds = dict(path_bound=path_bound, rewrite_bound=rewrite_bound, uncovered_arrows=uncovered)
    if path_bound < 1:
        if uncovered:
            return CancellativityVerdict(NON_CANCELLATIVE, None, tuple(reasons), **bounds)
        return CancellativityVerdict(UNKNOWN, None, ("path bound 0: nothing searched",), **bounds)

    index = _ClassIndex(RelationSystem(q), rewrite_bound)
    witness = None
    inspected = set()
    for length in range(1, path_bound + 1):
        for walk in _walks(q, length):
            cid = index.of(walk, None)
            if cid is None or cid in inspected:
                continue
            inspected.add(cid)
            witness = _find_witness(q, index, index.members[cid])
            if witness:
                break
        if witness:
            break

    if witness:
        reasons.append("non-cancellative pair found")
        return CancellativityVerdict(NON_CANCELLATIVE, witness, tuple(reasons), **bounds)
    if uncovered:
        return CancellativityVerdict(NON_CANCELLATIVE, None, tuple(reasons), **bounds)
    if index.unsaturated:
        return CancellativityVerdict(UNKNOWN, None, ("rewrite bound hit",), **bounds)
    return CancellativityVerdict(CANCELLATIVE, None, ("search exhausted within bounds",), **bounds)


def _find_witness(q: DimerQuiver, index: _ClassIndex, members) -> Optional[Witness]:
    ordered = sorted(members, key=lambda w: (len(w), w))
    for side in ("left", "right"):
        groups: dict[int, dict] = defaultdict(dict)
        for m in ordered:
            if side == "left":
                a, rest, v = m[-1], m[:-1], q.arrow(m[-1]).tail
            else:
                a, rest, v = m[0], m[1:], q.arrow(m[0]).head
            c = index.of(rest, v)
            if c is not None:
                groups[a].setdefault(c, (rest, v))
        for a in sorted(groups):
            reps = list(groups[a].values())
            if len(reps) > 1:
                (w1, v), (w2, _) = reps[0], reps[1]
                return Witness(q.walk_path(w1, None if w1 else v), q.walk_path(w2, None if w2 else v),
                               q.path([a]), side)
    return None


def verify_witness(q: DimerQuiver, w: Witness, bound: int = DEFAULT_REWRITE_BOUND) -> bool:
    rel = RelationSystem(q)
    lhs, rhs = w.products()
    return (paths_equal_mod_I(q, w.p, w.q, bound, rel) is False
            and paths_equal_mod_I(q, lhs, rhs, bound, rel) is True)


HOLDS, FAILS = "holds", "fails"


@dataclass(frozen=True)
class AssumptionAVerdict:
    status: str
    contraction: Optional[Contraction]
    cancellativity: Optional[CancellativityVerdict]
    reason: str = ""

    def to_dict(self) -> dict:
        return {"status": self.status, "reason": self.reason,
                "target_cancellativity": self.cancellativity.to_dict() if self.cancellativity else None}


def check_assumption_A(q: DimerQuiver, path_bound: int | None = None,
                       rewrite_bound: int = DEFAULT_REWRITE_BOUND) -> AssumptionAVerdict:
    try:
        c = contract(q)
    except ContractionError as exc:
        return AssumptionAVerdict(FAILS, None, None, str(exc))
    if path_bound is None:
        path_bound = 2 * len(q.arrows)
    verdict = is_cancellative(c.target, path_bound, rewrite_bound)
    status = {CANCELLATIVE: HOLDS, NON_CANCELLATIVE: FAILS}.get(verdict.kind, UNKNOWN)
    return AssumptionAVerdict(status, c, verdict)
