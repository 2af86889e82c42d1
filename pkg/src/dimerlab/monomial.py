"""Monomials in B = k[x_0, ..., x_{n-1}], truncated monomial algebras and modules,
and the divisibility ideals q_g of a monomial algebra.

Every set-valued object here is truncated at a total degree bound; claims
about minimality, membership and primality are exact up to that bound.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Iterable, Mapping, Optional, Sequence

DEFAULT_TRUNCATION = 12


class Monomial(tuple):
    """Exponent vector; the variable order is the canonical simple-matching order."""

    def __new__(cls, exponents: Iterable[int] = ()):
        exps = tuple(int(e) for e in exponents)
        if any(e < 0 for e in exps):
            raise ValueError(f"negative exponent in {exps}")
        return super().__new__(cls, exps)

    @classmethod
    def unit(cls, nvars: int) -> "Monomial":
        return cls((0,) * nvars)

    @classmethod
    def var(cls, i: int, nvars: int) -> "Monomial":
        return cls(1 if k == i else 0 for k in range(nvars))

    @property
    def nvars(self) -> int:
        return len(self)

    @property
    def degree(self) -> int:
        return sum(self)

    @property
    def is_unit(self) -> bool:
        return not any(self)

    def support(self) -> tuple[int, ...]:
        return tuple(i for i, e in enumerate(self) if e)

    def __mul__(self, other):
        return multiply(self, other)

    def __truediv__(self, other):
        return quotient(self, other)

    def __repr__(self) -> str:
        return f"Monomial({tuple(self)})"


def _check_len(a: Sequence[int], b: Sequence[int]) -> None:
    if len(a) != len(b):
        raise ValueError(f"monomials over different variable counts: {len(a)} vs {len(b)}")


def multiply(a: Monomial, b: Monomial) -> Monomial:
    _check_len(a, b)
    return Monomial(x + y for x, y in zip(a, b))


def product(items: Iterable[Monomial], nvars: int) -> Monomial:
    out = Monomial.unit(nvars)
    for m in items:
        out = multiply(out, m)
    return out


def divides(a: Monomial, b: Monomial) -> bool:
    _check_len(a, b)
    return all(x <= y for x, y in zip(a, b))


def quotient(b: Monomial, a: Monomial) -> Monomial:
    """``b / a``; raises ValueError unless ``a`` divides ``b``."""
    if not divides(a, b):
        raise ValueError(f"{tuple(a)} does not divide {tuple(b)}")
    return Monomial(y - x for x, y in zip(a, b))


def canonical_order(ms: Iterable[Monomial]) -> list[Monomial]:
    """Degree ascending, then exponent vector descending (x0 before x1 ...)."""
    return sorted(ms, key=lambda m: (m.degree, tuple(-e for e in m)))


# -- truncated sets -----------------------------------------------------------

def truncated_monoid(gens: Iterable[Monomial], degree_bound: int, nvars: int | None = None
                     ) -> frozenset[Monomial]:
    """All products of ``gens`` of total degree at most ``degree_bound``, unit included."""
    gens = [g for g in set(gens) if not g.is_unit]
    if nvars is None:
        if not gens:
            raise ValueError("nvars is required when there are no nonconstant generators")
        nvars = len(gens[0])
    unit = Monomial.unit(nvars)
    seen = {unit}
    frontier = [unit]
    while frontier:
        nxt = []
        for m in frontier:
            for g in gens:
                p = multiply(m, g)
                if p.degree <= degree_bound and p not in seen:
                    seen.add(p)
                    nxt.append(p)
        frontier = nxt
    return frozenset(seen)


def minimal_generators(elements: Iterable[Monomial]) -> frozenset[Monomial]:
    """Nonconstant elements that are not a product of two nonconstant elements of the set."""
    pool = {m for m in elements if not m.is_unit}
    out = set()
    for m in pool:
        if not any(f != m and divides(f, m) and quotient(m, f) in pool for f in pool):
            out.add(m)
    return frozenset(out)


def module_generators(elements: Iterable[Monomial], algebra: Iterable[Monomial]) -> frozenset[Monomial]:
    """Minimal generators of a monomial module over the monoid ``algebra``."""
    pool = set(elements)
    alg = set(algebra)
    out = set()
    for m in pool:
        if not any(f != m and divides(f, m) and quotient(m, f) in alg for f in pool):
            out.add(m)
    return frozenset(out)


def intersect_monoids(a: Iterable[Monomial], b: Iterable[Monomial]) -> frozenset[Monomial]:
    return frozenset(a) & frozenset(b)


@dataclass(frozen=True)
class MonomialAlgebra:
    nvars: int
    generators: tuple[Monomial, ...]
    truncation: int
    elements: frozenset[Monomial] = field(repr=False, compare=False)

    @classmethod
    def from_generators(cls, gens: Iterable[Monomial], nvars: int, truncation: int) -> "MonomialAlgebra":
        elements = truncated_monoid(gens, truncation, nvars)
        return cls(nvars, tuple(canonical_order(minimal_generators(elements))), truncation, elements)

    @classmethod
    def from_elements(cls, elements: Iterable[Monomial], nvars: int, truncation: int) -> "MonomialAlgebra":
        elements = frozenset(m for m in elements if m.degree <= truncation)
        return cls(nvars, tuple(canonical_order(minimal_generators(elements))), truncation,
                   elements | {Monomial.unit(nvars)})

    def __contains__(self, m: Monomial) -> bool:
        if m.degree > self.truncation:
            raise ValueError(f"degree {m.degree} exceeds truncation {self.truncation}")
        return m in self.elements

    def is_saturated(self) -> bool:
        """Regenerating from the minimal generators reproduces the truncated set."""
        return truncated_monoid(self.generators, self.truncation, self.nvars) == self.elements


@dataclass(frozen=True)
class MonomialModule:
    algebra: MonomialAlgebra
    generators: tuple[Monomial, ...]
    truncation: int
    elements: frozenset[Monomial] = field(repr=False, compare=False)

    @classmethod
    def from_elements(cls, elements: Iterable[Monomial], algebra: MonomialAlgebra) -> "MonomialModule":
        t = algebra.truncation
        elements = frozenset(m for m in elements if m.degree <= t)
        gens = module_generators(elements, algebra.elements)
        return cls(algebra, tuple(canonical_order(gens)), t, elements)

    @classmethod
    def from_generators(cls, gens: Iterable[Monomial], algebra: MonomialAlgebra) -> "MonomialModule":
        t = algebra.truncation
        elements = frozenset(multiply(g, s) for g in gens for s in algebra.elements
                             if g.degree + s.degree <= t)
        return cls.from_elements(elements, algebra)

    def __contains__(self, m: Monomial) -> bool:
        return m in self.elements

    def is_saturated(self) -> bool:
        return MonomialModule.from_generators(self.generators, self.algebra).elements == self.elements


@dataclass(frozen=True)
class DivisibilityIdeal:
    g: Monomial
    ambient: MonomialAlgebra
    generators: MonomialModule

    @property
    def is_proper(self) -> bool:
        return not self.g.is_unit

    @property
    def elements(self) -> frozenset[Monomial]:
        return self.generators.elements


def divisibility_ideal(ambient: MonomialAlgebra, g: Monomial, bound: int | None = None) -> DivisibilityIdeal:
    """Ideal of ``ambient`` spanned by its monomials divisible by ``g`` in B."""
    if bound is not None and bound != ambient.truncation:
        ambient = MonomialAlgebra.from_generators(ambient.generators, ambient.nvars, bound)
    elements = [m for m in ambient.elements if divides(g, m)]
    return DivisibilityIdeal(g, ambient, MonomialModule.from_elements(elements, ambient))


class PrimalityDisagreement(AssertionError):
    pass


def prime_oracle(ideal: DivisibilityIdeal) -> Optional[tuple[Monomial, Monomial]]:
    """First pair ``h1, h2`` outside the ideal with ``h1 h2`` inside, in canonical order."""
    g = ideal.g
    t = ideal.ambient.truncation
    outside = [m for m in canonical_order(ideal.ambient.elements) if not divides(g, m)]
    for i, h1 in enumerate(outside):
        for h2 in outside[i:]:
            if h1.degree + h2.degree > t:
                break
            if divides(g, multiply(h1, h2)):
                return h1, h2
    return None


def is_prime_divisibility_ideal(ideal: DivisibilityIdeal, bound: int | None = None
                                ) -> tuple[bool, Optional[tuple[Monomial, Monomial]]]:
    """Primality of q_g: ``g`` must be a single variable.

    The brute-force oracle is run alongside; a disagreement within the bound
    raises PrimalityDisagreement.
    """
    if not ideal.is_proper:
        raise ValueError("improper divisibility ideal (g is the unit)")
    if bound is not None and bound != ideal.ambient.truncation:
        ideal = divisibility_ideal(ideal.ambient, ideal.g, bound)
    closed = ideal.g.degree == 1
    witness = prime_oracle(ideal)
    if closed != (witness is None):
        raise PrimalityDisagreement(
            f"closed form says prime={closed} but oracle witness is {witness} for g={tuple(ideal.g)}")
    return closed, witness


# -- integer lattices ---------------------------------------------------------

def _echelon(rows: Iterable[Sequence[int]]) -> list[list[int]]:
    """Integer row echelon form spanning the same lattice (gcd row operations)."""
    rows = [list(r) for r in rows]
    if not rows:
        return []
    ncols = len(rows[0])
    basis = []
    col = 0
    while rows and col < ncols:
        live = [r for r in rows if r[col] != 0]
        rest = [r for r in rows if r[col] == 0]
        if not live:
            col += 1
            continue
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[col]))
            pivot = live[0]
            reduced = [pivot]
            for r in live[1:]:
                f = r[col] // pivot[col]
                r = [x - f * y for x, y in zip(r, pivot)]
                (reduced if r[col] != 0 else rest).append(r)
            live = reduced
        pivot = live[0]
        if pivot[col] < 0:
            pivot = [-x for x in pivot]
        basis.append(pivot)
        rows = [r for r in rest if any(r)]
        col += 1
    return basis


def lattice_dim(gens: Iterable[Sequence[int]]) -> int:
    """Rank of the integer lattice spanned by the exponent vectors."""
    return len(_echelon(gens))


def in_lattice(v: Sequence[int], gens: Iterable[Sequence[int]]) -> bool:
    basis = _echelon(gens)
    v = list(v)
    for row in basis:
        col = next(i for i, x in enumerate(row) if x)
        if v[col] % row[col]:
            return False
        f = v[col] // row[col]
        v = [x - f * y for x, y in zip(v, row)]
    return not any(v)


def height_of_divisibility_prime(ambient: MonomialAlgebra, q: DivisibilityIdeal) -> int:
    """Lattice-rank codimension of the face of ``ambient`` avoiding x_D."""
    if q.g.degree != 1:
        raise ValueError("height is only computed for primes q_D with g a single variable")
    kept = [m for m in ambient.generators if not divides(q.g, m)]
    return lattice_dim(ambient.generators) - lattice_dim(kept)


def _all_monomials(nvars: int, degree_bound: int):
    for d in range(degree_bound + 1):
        for combo in combinations_with_replacement(range(nvars), d):
            e = [0] * nvars
            for i in combo:
                e[i] += 1
            yield Monomial(e)


def _in_cone(v: Sequence[int], gens: Sequence[Sequence[int]]) -> bool:
    from scipy.optimize import linprog

    a_eq = [[g[i] for g in gens] for i in range(len(v))]
    res = linprog([0] * len(gens), A_eq=a_eq, b_eq=list(v), bounds=[(0, None)] * len(gens),
                  method="highs")
    return res.status == 0


def normality_gaps(ambient: MonomialAlgebra) -> list[Monomial]:
    """Monomials up to truncation in the group and cone of ``ambient`` but missing from it.

    An empty result is evidence that the truncated semigroup is saturated
    (normal), which the lattice-rank height formula presumes.
    """
    gens = list(ambient.generators)
    if not gens:
        return []
    gaps = []
    for m in _all_monomials(ambient.nvars, ambient.truncation):
        if m in ambient.elements or not in_lattice(m, gens):
            continue
        if _in_cone(m, gens):
            gaps.append(m)
    return canonical_order(gaps)


# -- formatting ---------------------------------------------------------------

def format_monomial(m: Monomial, aliases: Mapping[int, str] | None = None) -> str:
    """``x0^1 x2^1`` style, or with aliases ``x^1 z^1``; the unit prints as ``1``."""
    if m.is_unit:
        return "1"
    names = aliases or {}
    return " ".join(f"{names.get(i, f'x{i}')}^{e}" for i, e in enumerate(m) if e)


def compact_monomial(m: Monomial, aliases: Mapping[int, str] | None = None) -> str:
    """``x^2zw`` style."""
    if m.is_unit:
        return "1"
    names = aliases or {}
    parts = []
    for i, e in enumerate(m):
        if e:
            name = names.get(i, f"x{i}")
            parts.append(name if e == 1 else f"{name}^{e}")
    sep = "" if aliases and all(len(names.get(i, "xx")) == 1 for i in m.support()) else "*"
    return sep.join(parts)


def parse_monomial(text: str, aliases: Mapping[int, str], nvars: int | None = None) -> Monomial:
    """Inverse of ``compact_monomial`` for alias labels (``x^2zw``, ``1``)."""
    nvars = nvars if nvars is not None else len(aliases)
    text = text.replace("*", "").replace(" ", "")
    exps = [0] * nvars
    if text == "1":
        return Monomial(exps)
    index = {label: i for i, label in aliases.items()}
    labels = sorted(index, key=len, reverse=True)
    pattern = re.compile("(" + "|".join(map(re.escape, labels)) + r")(?:\^(\d+))?")
    pos = 0
    while pos < len(text):
        m = pattern.match(text, pos)
        if not m:
            raise ValueError(f"cannot parse monomial {text!r} at position {pos}")
        exps[index[m.group(1)]] += int(m.group(2) or 1)
        pos = m.end()
    return Monomial(exps)


def parse_aliases(text: str) -> dict[int, str]:
    """Alias table lines: ``<variable index> <label>``; '#' starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2 or not parts[0].isdigit():
            raise ValueError(f"alias line {lineno}: expected '<index> <label>'")
        out[int(parts[0])] = parts[1]
    return out


def load_aliases(path) -> dict[int, str]:
    with open(path, encoding="utf-8") as fh:
        return parse_aliases(fh.read())

