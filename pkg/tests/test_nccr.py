from __future__ import annotations

import json

import pytest

from dimerlab.config import RunConfig
from dimerlab.impression import cycle_algebra, impression_of, path_image
from dimerlab.monomial import divides, divisibility_ideal
from dimerlab.nccr import (
    ASSUMPTIONS_FAIL,
    INCONCLUSIVE,
    NONNOETHERIAN_NCCR,
    NotApplicable,
    certify,
    entry_generator,
    entry_generator_admissible,
    epsilon_D,
    heights_report,
    ideal_m_a,
    origin_ideal,
    pairwise_coprime,
    principal_check,
    simple_count,
    tiled_presentation,
    vertex_invertible,
)
from dimerlab.quiver import Path

from .conftest import ALIASES, fixture_quiver, mono, monos

X, Y, Z, W = 0, 1, 2, 3


@pytest.fixture(scope="module")
def imp1():
    return impression_of(fixture_quiver("example1"))


@pytest.fixture(scope="module")
def imp2():
    return impression_of(fixture_quiver("example2"))


def test_m_a(imp1, imp2):
    assert set(ideal_m_a(imp1, 2).module.generators) == monos("xz", "yz")
    a2z, a2w = ideal_m_a(imp2, 2), ideal_m_a(imp2, 3)
    assert set(a2z.module.generators) == monos("xz", "yz")
    assert set(a2w.module.generators) == monos("xw", "yw")
    assert a2z.matches_divisibility_ideal and a2w.matches_divisibility_ideal
    with pytest.raises(ValueError):
        ideal_m_a(imp1, 4)


@pytest.mark.parametrize("name", ["example1", "example2"])
def test_every_m_a_is_a_divisibility_ideal(name):
    imp = impression_of(fixture_quiver(name))
    for a in imp.contraction.arrow_map:
        assert ideal_m_a(imp, a).matches_divisibility_ideal


def test_origin_ideal_example1(imp1):
    oi = origin_ideal(imp1)
    assert set(oi.m0.generators) == monos("xz", "yz")
    assert [d for d, _ in oi.primes] == [Z]
    assert oi.prime(Z).elements == oi.m0.elements
    assert oi.decomposition_verified and oi.matches_center


def test_origin_ideal_example2(imp2):
    oi = origin_ideal(imp2)
    assert set(oi.m0.generators) == monos("x^2zw", "xyzw", "y^2zw")
    assert [d for d, _ in oi.primes] == [Z, W]
    assert set(oi.prime(Z).generators.generators) == monos("xz", "yz")
    assert set(oi.prime(W).generators.generators) == monos("xw", "yw")
    assert oi.decomposition_verified
    assert all(oi.m0.elements <= q.elements for _, q in oi.primes)


def test_origin_ideal_not_applicable_on_conifold():
    with pytest.raises(NotApplicable):
        origin_ideal(impression_of(fixture_quiver("conifold")))


def test_heights(imp1, imp2):
    for imp in (imp1, imp2):
        h = heights_report(imp, origin_ideal(imp))
        assert (h.ht_S_m0, h.ght_m0, h.ht_R_m0) == (1, 1, 3)
        assert all(v == 1 for v in h.prime_heights.values())
        assert all(h.primes_pass_oracle.values())


def test_pairwise_coprime(imp1, imp2):
    assert pairwise_coprime(imp2) == (True, None)
    assert pairwise_coprime(imp1) == (True, None)
    # the same arrow twice shares every variable
    assert pairwise_coprime(imp2, [2, 2]) == (False, (2, 2))


def test_epsilon_and_simple_counts(imp1, imp2):
    assert epsilon_D(imp1, Z) == {0, 1}
    assert epsilon_D(imp2, Z) == {0, 1, 3}
    assert epsilon_D(imp2, W) == {0, 1, 2}
    assert epsilon_D(imp1, X) == {0, 1, 2}
    assert simple_count(imp1, Z) == 2
    assert simple_count(imp2, Z) == simple_count(imp2, W) == 2
    assert simple_count(imp1, X) == 1


def test_vertex_invertible(imp1):
    q = imp1.quiver
    assert vertex_invertible(imp1, Z, Path.trivial(0))
    assert not vertex_invertible(imp1, Z, q.path([2]))
    assert not vertex_invertible(imp1, Z, q.path([4]))
    assert vertex_invertible(imp1, Z, q.path([3]))
    s = cycle_algebra(imp1)
    assert not vertex_invertible(imp1, divisibility_ideal(s, mono("z")), q.path([4]))


def test_entry_generators(imp1, imp2):
    assert entry_generator(imp1, Z, 1, 1) == Path.trivial(1)
    p = entry_generator(imp1, Z, 0, 1)
    assert not divides(mono("z"), path_image(imp1, p)) and vertex_invertible(imp1, Z, p)
    # j is the tail of the z arrow: the generator ends with the contracted arrow
    g = entry_generator(imp2, Z, 1, 2)
    assert g.arrows[0] == 4 and (g.tail, g.head) == (1, 2)
    assert entry_generator_admissible(imp2, Z, 2, g)
    with pytest.raises(ValueError):
        entry_generator(imp1, Z, 2, 0)


@pytest.mark.parametrize("name", ["example1", "example2"])
def test_entry_generators_recheck(name):
    imp = impression_of(fixture_quiver(name))
    for d, _ in origin_ideal(imp).primes:
        for i in epsilon_D(imp, d):
            for j in imp.quiver.vertices:
                assert entry_generator_admissible(imp, d, j, entry_generator(imp, d, i, j))


@pytest.mark.parametrize("name", ["example1", "example2"])
def test_principal_check(name):
    imp = impression_of(fixture_quiver(name))
    for _, q in origin_ideal(imp).primes:
        factors = principal_check(imp, q)
        assert factors and all(f.ok for f in factors)
        assert len(factors) == len(q.generators.generators)


def _gens(entry):
    return {g for g in entry.generators}


S_, I_, J_ = monos("1"), monos("x", "y"), monos("z", "w")


def test_tiled_presentation_example1(imp1):
    rows = tiled_presentation(imp1)
    expected = [[S_, I_, monos("xz", "yz")],
                [J_, S_, monos("z")],
                [S_, I_, monos("xz", "yz")]]
    assert [[_gens(e) for e in row] for row in rows] == expected
    assert [rows[k][k].shape for k in range(3)] == ["S", "S", "k+M"]


def test_tiled_presentation_conifold():
    rows = tiled_presentation(impression_of(fixture_quiver("conifold")))
    assert [[_gens(e) for e in row] for row in rows] == [[S_, I_], [J_, S_]]


def test_certify_verdicts():
    assert certify(fixture_quiver("example1")).verdict == NONNOETHERIAN_NCCR
    assert certify(fixture_quiver("example2")).verdict == NONNOETHERIAN_NCCR
    r = certify(fixture_quiver("conifold"))
    assert r.verdict == ASSUMPTIONS_FAIL and r.reason == "already cancellative / Q1* empty"
    assert r.exit_code == 1


def test_certify_inconclusive_on_tight_bounds():
    r = certify(fixture_quiver("example1"), RunConfig(truncation=12, cycle_bound=3))
    assert r.verdict == INCONCLUSIVE and r.exit_code == 2


def test_certify_deterministic_and_records_bounds():
    q = fixture_quiver("example2")
    a = json.dumps(certify(q).to_dict(ALIASES), sort_keys=True)
    b = json.dumps(certify(q).to_dict(ALIASES), sort_keys=True)
    assert a == b
    d = json.loads(a)
    assert d["schema_version"] == 1
    assert d["bounds"] == {"truncation": 12, "cycle_bound": 24, "rewrite_bound": 64, "path_bound": 12}
    assert d["heights"]["ht_R_m0"] == 3
