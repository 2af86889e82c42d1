"""Monomial images of arrows and paths, corner rings, the cycle algebra and the center.

Arrows of the contracted quiver map to the product of the variables x_D over
the simple matchings D containing them; contracted arrows map to 1.  Path
images are found by a breadth-first search over (vertex, image) states, which
is exact for image sets up to the degree and length bounds.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .contraction import Contraction, contract
from .matchings import Matching, simple_matchings
from .monomial import (
    DEFAULT_TRUNCATION,
    Monomial,
    MonomialAlgebra,
    MonomialModule,
    canonical_order,
    minimal_generators,
    multiply,
    product,
)
from .quiver import DimerQuiver, Path, indegree


class ImpressionError(ValueError):
    pass


def default_length_bound(q: DimerQuiver) -> int:
    return 4 * len(q.arrows)


@dataclass(frozen=True)
class Impression:
    contraction: Contraction
    variables: tuple[Matching, ...]
    arrow_images: dict[int, Monomial]
    sigma: Monomial
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def quiver(self) -> DimerQuiver:
        return self.contraction.source

    @property
    def target(self) -> DimerQuiver:
        return self.contraction.target

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def image(self, arrow_id: int) -> Monomial:
        return self.arrow_images[arrow_id]

    def unit(self) -> Monomial:
        return Monomial.unit(self.nvars)

    def var(self, i: int) -> Monomial:
        return Monomial.var(i, self.nvars)

    def to_dict(self, fmt=None) -> dict:
        fmt = fmt or (lambda m: list(m))
        return {
            "variables": [list(m.sorted_arrows) for m in self.variables],
            "arrow_images": {str(a): fmt(m) for a, m in sorted(self.arrow_images.items())},
            "sigma": fmt(self.sigma),
        }


def build_impression(c: Contraction) -> Impression:
    variables = tuple(simple_matchings(c.target))
    if not variables:
        raise ImpressionError("contracted quiver has no simple matchings")
    n = len(variables)
    images = {}
    for a in c.source.arrows:
        if a.id in c.arrow_map:
            b = c.arrow_map[a.id]
            images[a.id] = Monomial(1 if b in d else 0 for d in variables)
        else:
            images[a.id] = Monomial.unit(n)
    sigma = Monomial((1,) * n)
    imp = Impression(c, variables, images, sigma)
    for a in c.source.arrows:
        if images[a.id].is_unit != (indegree(c.source, a.head) == 1):
            raise ImpressionError(f"arrow {a.id}: image is 1 but head has indegree != 1 (or conversely)")
    for f in c.source.faces:
        if product((images[a] for a in f.boundary), n) != sigma:
            raise ImpressionError(f"face {f.sign}{list(f.boundary)} does not map to sigma")
    return imp


def impression_of(q: DimerQuiver) -> Impression:
    return build_impression(contract(q))


def path_image(imp: Impression, p: Path) -> Monomial:
    return product((imp.arrow_images[a] for a in p.arrows), imp.nvars)


# -- path search --------------------------------------------------------------

@dataclass(frozen=True)
class PathSearch:
    """Images of all paths out of ``source`` of degree <= ``degree_bound`` and length <= ``length_bound``.

    ``found[j]`` maps each image to the arrows (traversal order) of one
    shortest path realising it.
    """
    source: int
    degree_bound: int
    length_bound: int
    found: dict[int, dict[Monomial, tuple[int, ...]]]
    length_binding: bool

    def images(self, j: int) -> frozenset[Monomial]:
        return frozenset(self.found.get(j, {}))

    def walk(self, j: int, image: Monomial) -> Optional[tuple[int, ...]]:
        return self.found.get(j, {}).get(image)


def search_paths(q: DimerQuiver, images: dict[int, Monomial], source: int, degree_bound: int,
                 length_bound: int, allowed=None) -> PathSearch:
    n = len(next(iter(images.values())))
    unit = Monomial.unit(n)
    parent: dict[tuple[int, Monomial], Optional[tuple]] = {(source, unit): None}
    frontier = deque([((source, unit), 0)])
    binding = False
    while frontier:
        state, length = frontier.popleft()
        v, m = state
        for a in q.out_arrows[v]:
            if allowed is not None and a.id not in allowed:
                continue
            nm = multiply(m, images[a.id])
            if nm.degree > degree_bound:
                continue
            nxt = (a.head, nm)
            if nxt in parent:
                continue
            if length >= length_bound:
                binding = True
                continue
            parent[nxt] = (state, a.id)
            frontier.append((nxt, length + 1))
    found: dict[int, dict] = {}
    for state in parent:
        walk = []
        s = state
        while parent[s] is not None:
            s, a = parent[s]
            walk.append(a)
        found.setdefault(state[0], {})[state[1]] = tuple(reversed(walk))
    return PathSearch(source, degree_bound, length_bound, found, binding)


def _search(imp: Impression, source: int, truncation: int, length_bound: int, on_target=False) -> PathSearch:
    key = ("target" if on_target else "source", source, truncation, length_bound)
    if key not in imp._cache:
        if on_target:
            q = imp.target
            images = {a: imp.arrow_images[a] for a in imp.contraction.arrow_map}
        else:
            q, images = imp.quiver, imp.arrow_images
        imp._cache[key] = search_paths(q, images, source, truncation, length_bound)
    return imp._cache[key]


def path_images(imp: Impression, i: int, j: int, truncation: int = DEFAULT_TRUNCATION,
                length_bound: int | None = None) -> frozenset[Monomial]:
    """Images of paths from ``i`` to ``j`` in the source quiver."""
    length_bound = length_bound or default_length_bound(imp.quiver)
    return _search(imp, i, truncation, length_bound).images(j)


@dataclass(frozen=True)
class CornerImage:
    vertex: int
    monoid: frozenset[Monomial]
    generators: tuple[Monomial, ...]
    truncation: int
    length_bound: int
    length_binding: bool

    def to_dict(self, fmt=None) -> dict:
        fmt = fmt or (lambda m: list(m))
        return {"vertex": self.vertex, "generators": [fmt(g) for g in self.generators],
                "truncation": self.truncation, "length_bound": self.length_bound,
                "length_bound_binding": self.length_binding}


def corner_image(imp: Impression, v: int, length_bound: int | None = None,
                 truncation: int = DEFAULT_TRUNCATION, on_target: bool = False) -> CornerImage:
    q = imp.target if on_target else imp.quiver
    length_bound = length_bound or default_length_bound(imp.quiver)
    search = _search(imp, v, truncation, length_bound, on_target)
    monoid = search.images(v)
    gens = tuple(canonical_order(minimal_generators(monoid)))
    if v not in q.vertices:
        raise ImpressionError(f"unknown vertex {v}")
    return CornerImage(v, monoid, gens, truncation, length_bound, search.length_binding)


def cycle_algebra(imp: Impression, length_bound: int | None = None,
                  truncation: int = DEFAULT_TRUNCATION) -> MonomialAlgebra:
    """The algebra generated by cycle images; the corners of the contracted quiver must agree."""
    corners = [corner_image(imp, v, length_bound, truncation, on_target=True) for v in imp.target.vertices]
    for c in corners[1:]:
        if c.monoid != corners[0].monoid:
            raise ImpressionError(f"contracted corners at vertices {corners[0].vertex} and {c.vertex} differ")
    gens = minimal_generators(corners[0].monoid)
    return MonomialAlgebra.from_generators(gens, imp.nvars, truncation)


def full_corners(imp: Impression, length_bound: int | None = None,
                 truncation: int = DEFAULT_TRUNCATION) -> dict[int, bool]:
    """For each source vertex of indegree >= 2, whether its corner ring equals S."""
    s = cycle_algebra(imp, length_bound, truncation)
    return {v: corner_image(imp, v, length_bound, truncation).monoid == s.elements
            for v in imp.quiver.vertices if indegree(imp.quiver, v) >= 2}


@dataclass(frozen=True)
class Center:
    """The center R presented as ``S`` when it is all of S, else ``k + M`` with M an ideal of S."""
    cycle_algebra: MonomialAlgebra
    elements: frozenset[Monomial]
    maximal: MonomialModule
    is_full: bool
    is_ideal_of_S: bool
    length_binding: bool

    @property
    def shape(self) -> str:
        return "S" if self.is_full else "k+M"

    def to_dict(self, fmt=None) -> dict:
        fmt = fmt or (lambda m: list(m))
        return {
            "shape": self.shape,
            "M_generators": [fmt(g) for g in self.maximal.generators],
            "M_is_ideal_of_S": self.is_ideal_of_S,
            "truncation": self.maximal.truncation,
            "length_bound_binding": self.length_binding,
        }


def center(imp: Impression, length_bound: int | None = None,
           truncation: int = DEFAULT_TRUNCATION) -> Center:
    """Intersection of the corner images over every source vertex."""
    s = cycle_algebra(imp, length_bound, truncation)
    corners = [corner_image(imp, v, length_bound, truncation) for v in imp.quiver.vertices]
    elements = frozenset.intersection(*(c.monoid for c in corners))
    nonconstant = [m for m in elements if not m.is_unit]
    module = MonomialModule.from_elements(nonconstant, s)
    closed = module.is_saturated()
    return Center(s, elements, module, elements == s.elements, closed,
                  any(c.length_binding for c in corners))
