import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from chevlab.rings import (
    DualNumbers,
    RingError,
    Zmod,
    has_F2_residue_field,
    ideal_generated,
    ideal_product,
    ideal_sum,
    ideals_of,
    maximal_ideals,
    parse_ideal,
    parse_ring,
    quotient_map,
    theta_condition,
    unit_ideal,
    zmod_ideal,
)

SMALL_RINGS = [Zmod(n) for n in (2, 3, 4, 6, 8, 9, 12, 16, 27, 32)] + [DualNumbers(2), DualNumbers(3), DualNumbers(5)]


@pytest.mark.parametrize("ring", SMALL_RINGS, ids=str)
def test_ring_axioms_exhaustive(ring):
    e = np.arange(ring.size)
    a, b, c = np.meshgrid(e, e, e, indexing="ij")
    assert (ring.add(a, b) == ring.add(b, a)).all()
    assert (ring.mul(a, b) == ring.mul(b, a)).all()
    assert (ring.add(ring.add(a, b), c) == ring.add(a, ring.add(b, c))).all()
    assert (ring.mul(ring.mul(a, b), c) == ring.mul(a, ring.mul(b, c))).all()
    assert (ring.mul(a, ring.add(b, c)) == ring.add(ring.mul(a, b), ring.mul(a, c))).all()
    assert (ring.add(e, ring.neg(e)) == 0).all()
    assert (ring.mul(e, ring.one) == e).all()


@pytest.mark.parametrize("ring", SMALL_RINGS, ids=str)
def test_units_are_invertible(ring):
    units = set(ring.units)
    brute = {u for u in ring.elements if any(ring.mul(u, v) == ring.one for v in ring.elements)}
    assert units == brute
    for u in units:
        assert ring.mul(u, ring.inverse(u)) == ring.one


@pytest.mark.parametrize("ring", SMALL_RINGS, ids=str)
def test_ideals_are_ideals(ring):
    for i in ideals_of(ring):
        assert 0 in i
        for a, b in itertools.product(i.carrier, repeat=2):
            assert int(ring.add(a, b)) in i
        for a, r in itertools.product(i.carrier, ring.elements):
            assert int(ring.mul(a, r)) in i


def test_zmod_ideals_are_divisors():
    assert [i.generator for i in ideals_of(Zmod(8))] == [0, 4, 2, 1]
    assert sorted(str(i) for i in ideals_of(Zmod(6))) == ["(0)", "(1)", "(2)", "(3)"]
    assert len(ideals_of(Zmod(7))) == 2


def test_product_and_sum():
    r = Zmod(8)
    two, four = zmod_ideal(r, 2), zmod_ideal(r, 4)
    assert ideal_product(two, two) == four
    assert ideal_product(two, four).is_zero
    assert ideal_product(two, unit_ideal(r)) == two
    assert ideal_sum(four, two) == two
    with pytest.raises(RingError):
        ideal_sum(two, zmod_ideal(Zmod(4), 2))


@pytest.mark.parametrize("ring", SMALL_RINGS, ids=str)
def test_lattice_laws(ring):
    ids = ideals_of(ring)
    for i, j in itertools.product(ids, repeat=2):
        p, s = ideal_product(i, j), ideal_sum(i, j)
        assert p <= i and p <= j
        assert i <= s and j <= s
        assert p == ideal_product(j, i) and s == ideal_sum(j, i)
        assert all(not (i <= k and j <= k) or s <= k for k in ids)
        if s.is_unit and isinstance(ring, Zmod):
            assert p.carrier == i.carrier & j.carrier


def test_residue_fields_and_theta():
    assert has_F2_residue_field(Zmod(6))
    assert not has_F2_residue_field(Zmod(9))
    assert has_F2_residue_field(Zmod(2))
    assert not theta_condition(Zmod(4))
    assert theta_condition(Zmod(9))
    assert theta_condition(Zmod(27))
    assert theta_condition(DualNumbers(3))
    assert not theta_condition(DualNumbers(2))


@given(st.integers(2, 64))
def test_f2_residue_iff_even(n):
    assert has_F2_residue_field(Zmod(n)) == (n % 2 == 0)


@given(st.integers(3, 64).filter(lambda n: n % 2))
def test_theta_when_two_is_unit(n):
    assert theta_condition(Zmod(n))


def test_maximal_ideals():
    assert sorted(m.generator for m in maximal_ideals(Zmod(12))) == [2, 3]
    assert [str(m) for m in maximal_ideals(DualNumbers(5))] == ["(t)"]


@pytest.mark.parametrize("n,d,q", [(8, 2, 2), (8, 1, 1), (12, 4, 4), (8, 0, 8), (6, 3, 3)])
def test_quotient_map_examples(n, d, q):
    quot, table = quotient_map(Zmod(n), zmod_ideal(Zmod(n), d))
    assert quot == Zmod(q)
    assert len(set(table.tolist())) == q


@pytest.mark.parametrize("ring", SMALL_RINGS, ids=str)
def test_quotient_map_is_homomorphism(ring):
    e = np.arange(ring.size)
    a, b = np.meshgrid(e, e, indexing="ij")
    for i in ideals_of(ring):
        try:
            quot, t = quotient_map(ring, i)
        except RingError:
            continue
        assert (t[ring.add(a, b)] == quot.add(t[a], t[b])).all()
        assert (t[ring.mul(a, b)] == quot.mul(t[a], t[b])).all()
        assert set(np.nonzero(t == 0)[0].tolist()) == set(i.carrier)


def test_parsing():
    assert parse_ring("Z/8") == Zmod(8)
    assert parse_ring(" F3[t]/t2 ") == DualNumbers(3)
    assert parse_ring("F3[t]/t^2") == DualNumbers(3)
    for bad in ("Z/1", "Q", "F4[t]/t2"):
        with pytest.raises(RingError):
            parse_ring(bad)
    d = DualNumbers(3)
    assert parse_ideal(d, "t") == ideal_generated(d, [3])
    assert parse_ideal(d, "1").is_unit
    assert parse_ideal(Zmod(8), "(2)").generator == 2
    assert parse_ideal(Zmod(8), "6").generator == 2
    with pytest.raises(RingError):
        parse_ideal(d, "2t")
    with pytest.raises(RingError):
        parse_ideal(Zmod(8), "x")


def test_dual_number_formatting():
    d = DualNumbers(3)
    assert d.format(0) == "0"
    assert d.format(3) == "t"
    assert d.format(1 + 2 * 3) == "1+2t"
    assert str(parse_ideal(d, "t")) == "(t)"
