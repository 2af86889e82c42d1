from __future__ import annotations

import itertools

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from dimerlab.monomial import (
    Monomial,
    MonomialAlgebra,
    PrimalityDisagreement,
    canonical_order,
    compact_monomial,
    divides,
    divisibility_ideal,
    format_monomial,
    height_of_divisibility_prime,
    in_lattice,
    intersect_monoids,
    is_prime_divisibility_ideal,
    lattice_dim,
    minimal_generators,
    multiply,
    normality_gaps,
    parse_aliases,
    parse_monomial,
    prime_oracle,
    truncated_monoid,
)

from .conftest import ALIASES, mono, monos

monomials = st.lists(st.integers(0, 4), min_size=4, max_size=4).map(Monomial)


@pytest.fixture(scope="module")
def S():
    return MonomialAlgebra.from_generators(monos("xz", "yz", "xw", "yw"), 4, 12)


def test_multiply_examples():
    assert multiply(Monomial((1, 0, 0, 0)), Monomial((0, 0, 1, 0))) == (1, 0, 1, 0)
    s = Monomial((1, 1, 1, 1))
    assert multiply(s, Monomial.unit(4)) == s
    assert multiply(s, s) == (2, 2, 2, 2)


def test_divides_examples():
    assert divides(Monomial.unit(4), mono("x^3y"))
    assert divides(mono("xz"), mono("xyzw"))
    assert not divides(mono("xz"), mono("yw"))


@given(monomials, monomials, monomials)
def test_multiply_commutative_associative_unital(a, b, c):
    assert multiply(a, b) == multiply(b, a)
    assert multiply(multiply(a, b), c) == multiply(a, multiply(b, c))
    assert multiply(a, Monomial.unit(4)) == a


@given(monomials, monomials, monomials)
def test_divides_partial_order(a, b, c):
    assert divides(a, a)
    if divides(a, b) and divides(b, a):
        assert a == b
    if divides(a, b) and divides(b, c):
        assert divides(a, c)
    assert divides(a, multiply(a, b))


def test_minimal_generators_examples():
    assert minimal_generators(monos("xz", "yz", "x^2z^2")) == monos("xz", "yz")
    assert minimal_generators(set()) == frozenset()
    assert minimal_generators(monos("xz", "yz", "xw", "yw")) == monos("xz", "yz", "xw", "yw")


@settings(max_examples=100, deadline=None)
@given(st.sets(monomials, max_size=8))
def test_minimal_generators_idempotent(elements):
    once = minimal_generators(elements)
    assert minimal_generators(once) == once


def brute_force_monoid(gens, bound):
    """Oracle: multiply out every exponent combination."""
    gens = list(gens)
    out = set()
    for exps in itertools.product(range(bound + 1), repeat=len(gens)):
        m = Monomial.unit(4)
        for g, e in zip(gens, exps):
            for _ in range(e):
                m = multiply(m, g)
        if m.degree <= bound:
            out.add(m)
    return out


def test_truncated_monoid_matches_brute_force():
    gens = monos("xz", "yz", "xw", "yw")
    assert truncated_monoid(gens, 6) == brute_force_monoid(gens, 6)


def test_conifold_algebra_saturated_and_sizes(S):
    assert set(S.generators) == monos("xz", "yz", "xw", "yw")
    assert S.is_saturated()
    # monomials x^a y^b z^c w^d with a+b = c+d, total degree <= 12
    expected = sum((k + 1) ** 2 for k in range(7))
    assert len(S.elements) == expected


def test_intersect_monoids():
    assert intersect_monoids(monos("xz", "yz"), monos("yz", "yw")) == monos("yz")


def test_divisibility_ideal_examples(S):
    assert set(divisibility_ideal(S, mono("z")).generators.generators) == monos("xz", "yz")
    assert set(divisibility_ideal(S, mono("xz")).generators.generators) == monos("xz")
    whole = divisibility_ideal(S, Monomial.unit(4))
    assert not whole.is_proper
    assert whole.elements == S.elements


def test_divisibility_ideal_contains_every_divisible_monomial(S):
    q = divisibility_ideal(S, mono("w"))
    assert all(divides(mono("w"), g) for g in q.generators.generators)
    assert {m for m in S.elements if divides(mono("w"), m)} == q.elements
    assert q.generators.is_saturated()


def test_primality_examples(S):
    assert is_prime_divisibility_ideal(divisibility_ideal(S, mono("z"))) == (True, None)
    prime, witness = is_prime_divisibility_ideal(divisibility_ideal(S, mono("xz")))
    assert not prime
    assert witness == (mono("xw"), mono("yz"))
    assert not is_prime_divisibility_ideal(divisibility_ideal(S, mono("zw")))[0]
    with pytest.raises(ValueError):
        is_prime_divisibility_ideal(divisibility_ideal(S, Monomial.unit(4)))


def test_primality_disagreement_is_raised():
    # in k[x^2] the multiples of g = x^2 form a prime ideal although g is not a variable,
    # so the closed form only applies to algebras like the cycle algebras here
    ambient = MonomialAlgebra.from_generators([Monomial((2,))], 1, 8)
    with pytest.raises(PrimalityDisagreement):
        is_prime_divisibility_ideal(divisibility_ideal(ambient, Monomial((2,))))
    assert prime_oracle(divisibility_ideal(ambient, Monomial((2,)))) is None


def test_lattice_dim_examples(S):
    assert lattice_dim(S.generators) == 3
    assert lattice_dim([mono("xz")]) == 1
    assert lattice_dim([]) == 0


@settings(max_examples=100, deadline=None)
@given(st.lists(st.lists(st.integers(-5, 5), min_size=4, max_size=4), max_size=6))
def test_lattice_dim_matches_sympy_rank(rows):
    expected = sympy.Matrix(rows).rank() if rows else 0
    assert lattice_dim(rows) == expected


def test_lattice_membership():
    gens = [(2, 0), (0, 3)]
    assert in_lattice((4, 3), gens)
    assert not in_lattice((1, 0), gens)
    assert in_lattice((1, 1), [(1, 2), (0, 1)])


def test_heights(S):
    assert height_of_divisibility_prime(S, divisibility_ideal(S, mono("z"))) == 1
    assert height_of_divisibility_prime(S, divisibility_ideal(S, mono("w"))) == 1
    line = MonomialAlgebra.from_generators([Monomial((1, 1))], 2, 6)
    q = divisibility_ideal(line, Monomial((1, 0)))
    assert height_of_divisibility_prime(line, q) == lattice_dim(line.generators) == 1


def test_conifold_algebra_is_normal_at_truncation(S):
    assert normality_gaps(S) == []


def test_normality_gap_detected():
    # k[x^2, x^3] misses x, which lies in its group and cone
    ambient = MonomialAlgebra.from_generators([Monomial((2,)), Monomial((3,))], 1, 6)
    assert normality_gaps(ambient) == [Monomial((1,))]


def test_formatting():
    m = Monomial((1, 0, 1, 0))
    assert format_monomial(m) == "x0^1 x2^1"
    assert format_monomial(m, ALIASES) == "x^1 z^1"
    assert format_monomial(Monomial.unit(4)) == "1"
    assert compact_monomial(mono("x^2zw"), ALIASES) == "x^2zw"
    assert parse_monomial("x^2zw", ALIASES) == (2, 0, 1, 1)
    assert parse_aliases("0 x\n# comment\n1 y\n") == {0: "x", 1: "y"}


def test_canonical_order():
    assert canonical_order(monos("yw", "xz", "xw", "yz")) == [mono(t) for t in ("xz", "xw", "yz", "yw")]
