"""Perfect and simple matchings of a dimer quiver."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from .quiver import DimerQuiver, strongly_connected, validate


class InvalidQuiverError(ValueError):
    def __init__(self, report):
        super().__init__("invalid dimer quiver: " + "; ".join(map(str, report.violations)))
        self.report = report


def require_valid(q: DimerQuiver) -> None:
    report = validate(q)
    if not report.ok:
        raise InvalidQuiverError(report)


@dataclass(frozen=True)
class Matching:
    arrows: frozenset[int]
    is_perfect: bool = True
    is_simple: bool = False

    @property
    def sorted_arrows(self) -> tuple[int, ...]:
        return tuple(sorted(self.arrows))

    def __contains__(self, arrow_id: int) -> bool:
        return arrow_id in self.arrows

    def to_dict(self) -> dict:
        return {"arrows": list(self.sorted_arrows), "perfect": self.is_perfect, "simple": self.is_simple}


def is_perfect(q: DimerQuiver, arrows: Iterable[int]) -> bool:
    chosen = set(arrows)
    return all(sum(a in chosen for a in f.boundary) == 1 for f in q.faces)


def _exact_covers(columns: dict, rows: dict, partial: list) -> Iterator[list]:
    # Knuth's Algorithm X on dict-of-sets
    if not columns:
        yield list(partial)
        return
    col = min(columns, key=lambda c: (len(columns[c]), c))
    for row in sorted(columns[col]):
        partial.append(row)
        removed = _select(columns, rows, row)
        yield from _exact_covers(columns, rows, partial)
        _deselect(columns, rows, row, removed)
        partial.pop()


def _select(columns, rows, row):
    removed = []
    for c in rows[row]:
        for other in columns[c]:
            for c2 in rows[other]:
                if c2 != c:
                    columns[c2].discard(other)
        removed.append(columns.pop(c))
    return removed


def _deselect(columns, rows, row, removed):
    for c in reversed(rows[row]):
        columns[c] = removed.pop()
        for other in columns[c]:
            for c2 in rows[other]:
                if c2 != c:
                    columns[c2].add(other)


def perfect_matchings(q: DimerQuiver) -> list[Matching]:
    require_valid(q)
    rows = {a.id: list(q.faces_of_arrow[a.id]) for a in q.arrows}
    columns = {k: set() for k in range(len(q.faces))}
    for a_id, faces in rows.items():
        for k in faces:
            columns[k].add(a_id)
    found = {tuple(sorted(cover)) for cover in _exact_covers(columns, rows, [])}
    return [Matching(frozenset(m), True, _simple(q, m)) for m in sorted(found)]


def _simple(q: DimerQuiver, arrows: Iterable[int]) -> bool:
    removed = set(arrows)
    return strongly_connected(q.num_vertices, (a for a in q.arrows if a.id not in removed))


def is_simple(q: DimerQuiver, d: Matching | Iterable[int]) -> bool:
    """True iff removing ``d`` leaves a subquiver strongly connected through all vertices."""
    arrows = d.arrows if isinstance(d, Matching) else frozenset(d)
    if not is_perfect(q, arrows):
        raise ValueError(f"arrow set {sorted(arrows)} is not a perfect matching")
    return _simple(q, arrows)


def simple_matchings(q: DimerQuiver) -> list[Matching]:
    return [m for m in perfect_matchings(q) if m.is_simple]
