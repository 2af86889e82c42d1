"""Quivers embedded on a two-torus, their faces (unit cycles) and paths.

A quiver is given by vertices ``0..n-1``, arrows carrying the lattice
displacement of their lift to the universal cover, and oriented faces whose
boundaries are listed in walking order (each arrow's head is the next arrow's
tail).

Paths follow the algebra convention: ``Path.arrows`` is read right to left,
so ``arrows[-1]`` is traversed first and ``arrows[0]`` last.  Use
``Path.walk`` for the traversal order.
"""
from __future__ import annotations

from collections import Counter, defaultdict, deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence


class QuiverParseError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno
        self.message = message


class PathError(ValueError):
    """Raised for non-composable arrow sequences or endpoint mismatches."""


@dataclass(frozen=True)
class Arrow:
    id: int
    tail: int
    head: int
    displacement: tuple[int, int] = (0, 0)


@dataclass(frozen=True)
class Face:
    orientation: int  # +1 or -1
    boundary: tuple[int, ...]

    @property
    def sign(self) -> str:
        return "+" if self.orientation > 0 else "-"


@dataclass(frozen=True)
class Path:
    tail: int
    head: int
    arrows: tuple[int, ...] = ()

    @property
    def walk(self) -> tuple[int, ...]:
        return self.arrows[::-1]

    @property
    def is_trivial(self) -> bool:
        return not self.arrows

    @property
    def is_cycle(self) -> bool:
        return self.tail == self.head

    def __len__(self) -> int:
        return len(self.arrows)

    @classmethod
    def trivial(cls, vertex: int) -> "Path":
        return cls(vertex, vertex, ())


def compose(p: Path, r: Path) -> Path:
    """Return ``p r``: first ``r``, then ``p``."""
    if r.head != p.tail:
        raise PathError(f"cannot compose: head of right factor is {r.head}, tail of left factor is {p.tail}")
    return Path(r.tail, p.head, p.arrows + r.arrows)


@dataclass(frozen=True)
class Violation:
    invariant: str
    element: str

    def __str__(self) -> str:
        return f"{self.invariant}: {self.element}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def invariants(self) -> set[str]:
        return {v.invariant for v in self.violations}

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [{"invariant": v.invariant, "element": v.element} for v in self.violations],
        }


# invariant names used in violation reports
ARROW_ENDPOINTS = "arrow endpoints are valid vertices"
DUPLICATE_ARROW = "arrow ids are unique"
FACE_INCIDENCE = "arrow in exactly one +face and one -face"
EULER = "Euler characteristic"
CONNECTED = "underlying graph is connected"
BALANCED = "indegree equals outdegree"
FACE_LENGTH = "face length >= 2"
FACE_UNKNOWN_ARROW = "face arrows exist"
FACE_CLOSED = "face boundary is a closed walk"
FACE_HOMOLOGY = "face displacements sum to zero"
DISPLACEMENT_BOUND = "displacement within bound"


@dataclass(frozen=True)
class DimerQuiver:
    num_vertices: int
    arrows: tuple[Arrow, ...]
    faces: tuple[Face, ...]

    def __post_init__(self):
        object.__setattr__(self, "arrows", tuple(sorted(self.arrows, key=lambda a: a.id)))

    @property
    def vertices(self) -> range:
        return range(self.num_vertices)

    @cached_property
    def arrow_by_id(self) -> dict[int, Arrow]:
        return {a.id: a for a in self.arrows}

    @property
    def arrow_ids(self) -> tuple[int, ...]:
        return tuple(a.id for a in self.arrows)

    def arrow(self, arrow_id: int) -> Arrow:
        try:
            return self.arrow_by_id[arrow_id]
        except KeyError:
            raise KeyError(f"unknown arrow id {arrow_id}") from None

    @cached_property
    def out_arrows(self) -> dict[int, tuple[Arrow, ...]]:
        out = defaultdict(list)
        for a in self.arrows:
            out[a.tail].append(a)
        return {v: tuple(out[v]) for v in self.vertices}

    @cached_property
    def in_arrows(self) -> dict[int, tuple[Arrow, ...]]:
        inc = defaultdict(list)
        for a in self.arrows:
            inc[a.head].append(a)
        return {v: tuple(inc[v]) for v in self.vertices}

    @cached_property
    def faces_of_arrow(self) -> dict[int, tuple[int, ...]]:
        """Face indices containing each arrow (with multiplicity)."""
        res = defaultdict(list)
        for k, f in enumerate(self.faces):
            for a in f.boundary:
                res[a].append(k)
        return {a: tuple(res[a]) for a in self.arrow_ids}

    def path(self, arrows: Sequence[int] = (), vertex: int | None = None) -> Path:
        """Build a path from arrows written right to left (last traversed first)."""
        return self.walk_path(tuple(arrows)[::-1], vertex)

    def walk_path(self, walk: Sequence[int], vertex: int | None = None) -> Path:
        """Build a path from arrows in traversal order."""
        walk = tuple(walk)
        if not walk:
            if vertex is None or not 0 <= vertex < self.num_vertices:
                raise PathError(f"trivial path needs a valid vertex, got {vertex!r}")
            return Path.trivial(vertex)
        for a, b in zip(walk, walk[1:]):
            if self.arrow(a).head != self.arrow(b).tail:
                raise PathError(f"arrows {a} and {b} do not compose")
        first, last = self.arrow(walk[0]), self.arrow(walk[-1])
        if vertex is not None and vertex != first.tail:
            raise PathError(f"path does not start at vertex {vertex}")
        return Path(first.tail, last.head, walk[::-1])

    def check_path(self, p: Path) -> None:
        rebuilt = self.path(p.arrows, p.tail if p.is_trivial else None)
        if (rebuilt.tail, rebuilt.head) != (p.tail, p.head):
            raise PathError(f"path endpoints ({p.tail}, {p.head}) inconsistent with arrows")

    def face_paths(self) -> list[Path]:
        return [self.walk_path(f.boundary) for f in self.faces]

    def to_text(self) -> str:
        return format_quiver(self)


def indegree(q: DimerQuiver, v: int) -> int:
    if not 0 <= v < q.num_vertices:
        raise KeyError(f"unknown vertex id {v}")
    return len(q.in_arrows[v])


def outdegree(q: DimerQuiver, v: int) -> int:
    if not 0 <= v < q.num_vertices:
        raise KeyError(f"unknown vertex id {v}")
    return len(q.out_arrows[v])


def homology_class(q: DimerQuiver, p: Path) -> tuple[int, int]:
    q.check_path(p)
    dx = dy = 0
    for a in p.arrows:
        d = q.arrow(a).displacement
        dx += d[0]
        dy += d[1]
    return (dx, dy)


def validate(q: DimerQuiver) -> ValidationReport:
    violations: list[Violation] = []
    n = q.num_vertices
    ids = [a.id for a in q.arrows]
    for a_id, count in sorted(Counter(ids).items()):
        if count > 1:
            violations.append(Violation(DUPLICATE_ARROW, f"arrow {a_id}"))
    bound = max(len(q.arrows), 1)
    for a in q.arrows:
        if not (0 <= a.tail < n and 0 <= a.head < n):
            violations.append(Violation(ARROW_ENDPOINTS, f"arrow {a.id}"))
        if any(abs(c) > bound for c in a.displacement):
            violations.append(Violation(DISPLACEMENT_BOUND, f"arrow {a.id}"))

    known = set(ids)
    plus, minus = Counter(), Counter()
    for k, f in enumerate(q.faces):
        if len(f.boundary) < 2:
            violations.append(Violation(FACE_LENGTH, f"face {k}"))
        missing = [a for a in f.boundary if a not in known]
        if missing:
            violations.append(Violation(FACE_UNKNOWN_ARROW, f"face {k} (arrows {missing})"))
            continue
        (plus if f.orientation > 0 else minus).update(f.boundary)
        if f.boundary:
            arrows = [q.arrow(a) for a in f.boundary]
            closed = all(x.head == y.tail for x, y in zip(arrows, arrows[1:] + arrows[:1]))
            if not closed:
                violations.append(Violation(FACE_CLOSED, f"face {k}"))
            dx = sum(a.displacement[0] for a in arrows)
            dy = sum(a.displacement[1] for a in arrows)
            if (dx, dy) != (0, 0):
                violations.append(Violation(FACE_HOMOLOGY, f"face {k} sums to ({dx}, {dy})"))

    for a_id in sorted(known):
        if plus[a_id] != 1 or minus[a_id] != 1:
            violations.append(Violation(
                FACE_INCIDENCE, f"arrow {a_id} (in {plus[a_id]} +faces, {minus[a_id]} -faces)"))

    euler = n - len(q.arrows) + len(q.faces)
    if euler != 0:
        violations.append(Violation(EULER, f"|Q0| - |Q1| + |F| = {euler}"))

    valid_arrows = [a for a in q.arrows if 0 <= a.tail < n and 0 <= a.head < n]
    if n and not _connected(n, valid_arrows):
        violations.append(Violation(CONNECTED, "quiver"))
    indeg, outdeg = Counter(a.head for a in valid_arrows), Counter(a.tail for a in valid_arrows)
    for v in range(n):
        if indeg[v] != outdeg[v]:
            violations.append(Violation(BALANCED, f"vertex {v} (in {indeg[v]}, out {outdeg[v]})"))
    return ValidationReport(tuple(violations))


def _connected(n: int, arrows: Iterable[Arrow]) -> bool:
    adj = defaultdict(set)
    for a in arrows:
        adj[a.tail].add(a.head)
        adj[a.head].add(a.tail)
    seen = {0}
    todo = deque([0])
    while todo:
        v = todo.popleft()
        for w in adj[v] - seen:
            seen.add(w)
            todo.append(w)
    return len(seen) == n


def strongly_connected(n: int, arrows: Iterable[Arrow]) -> bool:
    """True iff every vertex reaches and is reached from vertex 0."""
    if n == 0:
        return True
    fwd, bwd = defaultdict(list), defaultdict(list)
    for a in arrows:
        fwd[a.tail].append(a.head)
        bwd[a.head].append(a.tail)
    for adj in (fwd, bwd):
        seen = {0}
        todo = [0]
        while todo:
            v = todo.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        if len(seen) != n:
            return False
    return True


def parse_quiver(text: str) -> DimerQuiver:
    num_vertices = None
    arrows: list[Arrow] = []
    faces: list[Face] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        kw, *args = line.split()
        try:
            if kw == "vertices":
                if len(args) != 1:
                    raise QuiverParseError(lineno, "expected 'vertices N'")
                if num_vertices is not None:
                    raise QuiverParseError(lineno, "duplicate 'vertices' statement")
                num_vertices = int(args[0])
                if num_vertices < 0:
                    raise QuiverParseError(lineno, "vertex count must be non-negative")
            elif kw == "arrow":
                if len(args) != 5:
                    raise QuiverParseError(lineno, "expected 'arrow <id> <tail> <head> <dx> <dy>'")
                a_id, t, h, dx, dy = map(int, args)
                if a_id < 0:
                    raise QuiverParseError(lineno, "arrow id must be non-negative")
                arrows.append(Arrow(a_id, t, h, (dx, dy)))
            elif kw == "face":
                if not args or args[0] not in ("+", "-"):
                    raise QuiverParseError(lineno, "expected 'face <+|-> <arrow-id> ...'")
                faces.append(Face(1 if args[0] == "+" else -1, tuple(map(int, args[1:]))))
            else:
                raise QuiverParseError(lineno, f"unknown statement {kw!r}")
        except ValueError as exc:
            if isinstance(exc, QuiverParseError):
                raise
            raise QuiverParseError(lineno, f"expected integers: {line!r}") from None
    if num_vertices is None:
        raise QuiverParseError(0, "missing 'vertices N' statement")
    return DimerQuiver(num_vertices, tuple(arrows), tuple(faces))


def format_quiver(q: DimerQuiver) -> str:
    lines = [f"vertices {q.num_vertices}"]
    for a in q.arrows:
        lines.append(f"arrow {a.id} {a.tail} {a.head} {a.displacement[0]} {a.displacement[1]}")
    for f in q.faces:
        lines.append(" ".join(["face", f.sign, *map(str, f.boundary)]))
    return "\n".join(lines) + "\n"


def load_quiver(path) -> DimerQuiver:
    with open(path) as fh:
        return parse_quiver(fh.read())


def canonical_faces(q: DimerQuiver) -> tuple[tuple[int, tuple[int, ...]], ...]:
    """Faces as (orientation, boundary rotated to start at its smallest arrow), sorted."""
    out = []
    for f in q.faces:
        b = f.boundary
        if b:
            k = b.index(min(b))
            b = b[k:] + b[:k]
        out.append((f.orientation, b))
    return tuple(sorted(out))


def same_quiver(p: DimerQuiver, q: DimerQuiver) -> bool:
    """Equality up to face listing order and cyclic rotation of boundaries."""
    return (p.num_vertices == q.num_vertices and p.arrows == q.arrows
            and canonical_faces(p) == canonical_faces(q))
