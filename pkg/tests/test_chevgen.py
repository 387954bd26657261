import copy
import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from chevlab.chevgen import (
    ChevgenError,
    Representation,
    generator_set_E,
    generator_set_X,
    generator_set_Y,
    generator_set_Z,
    h,
    torus_relation_holds,
    validate_relations,
    w,
    x,
    z,
)
from chevlab.engine import level, level_mask
from chevlab.rings import DualNumbers, Zmod, ideal_product, ideals_of, zmod_ideal, zero_ideal
from chevlab.rootsys import KINDS, roots_of

RINGS = [Zmod(2), Zmod(3), Zmod(4), Zmod(8), Zmod(9), DualNumbers(2), DualNumbers(3)]


def int_det(m):
    return int(round(np.linalg.det(m.astype(float))))


@pytest.mark.parametrize("kind,dim", [("A2", 3), ("A3", 4), ("C2", 4), ("G2", 7)])
def test_dimensions(kind, dim):
    assert Representation(kind, Zmod(5)).dim == dim


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("n", [5, 7])
def test_generators_unimodular_and_faithful(kind, n):
    rep = Representation(kind, Zmod(n))
    for a in rep.system.roots:
        assert x(rep, a, 0).is_identity()
        for t in range(1, n):
            g = x(rep, a, t)
            assert not g.is_identity()
            assert int_det(g.mat.astype(np.int64)) % n == 1
            assert (g * x(rep, a, n - t)).is_identity()


@pytest.mark.parametrize("kind", KINDS)
def test_positive_roots_upper_triangular(kind):
    rep = Representation(kind, Zmod(7))
    for a in rep.system.positive:
        m = x(rep, a, 1).mat
        assert not np.tril(m, -1).any()
        assert not np.triu(x(rep, -a, 1).mat, 1).any()


def test_sl3_root_unipotent():
    rep = Representation("A2", Zmod(8))
    expected = np.eye(3, dtype=np.uint8)
    expected[0, 1] = 5
    assert np.array_equal(x(rep, rep.system.root((1, 0)), 5).mat, expected)


def test_z_examples():
    rep = Representation("A2", Zmod(4))
    a = rep.system.root((1, 0))
    assert z(rep, a, 3, 0) == x(rep, a, 3)
    assert z(rep, a, 0, 2).is_identity()
    # direct integer product oracle: x_-a(1) x_a(2) x_-a(-1) mod 4
    e12 = np.zeros((3, 3), dtype=np.int64)
    e12[0, 1] = 1
    f = e12.T
    one = np.eye(3, dtype=np.int64)
    oracle = (one + f) @ (one + 2 * e12) @ (one - f) % 4
    assert np.array_equal(z(rep, a, 2, 1).mat, oracle)


@given(st.sampled_from(KINDS), st.integers(0, 8), st.integers(0, 8), st.integers(0, 8), st.data())
def test_z_additive_in_first_argument(kind, p, q, eta, data):
    rep = Representation(kind, Zmod(9))
    a = data.draw(st.sampled_from(rep.system.roots))
    assert z(rep, a, (p + q) % 9, eta) == z(rep, a, p, eta) * z(rep, a, q, eta)


def test_torus_and_weyl():
    rep = Representation("C2", Zmod(9))
    a = rep.system.simple[0]
    assert h(rep, a, 1).is_identity()
    assert (w(rep, a, 2) * w(rep, a, 2).inverse()).is_identity()
    with pytest.raises(ChevgenError):
        h(rep, a, 3)
    with pytest.raises(ChevgenError):
        w(rep, a, 0)
    assert torus_relation_holds(rep)


def test_h_is_diagonal():
    for kind in KINDS:
        rep = Representation(kind, Zmod(7))
        for a in rep.system.simple:
            m = h(rep, a, 3).mat
            assert not (m - np.diag(np.diag(m))).any()


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("ring", RINGS, ids=str)
def test_validate_relations(kind, ring):
    report = validate_relations(Representation(kind, ring))
    assert report.verdict == "holds"
    assert report.details["torus_multiplicative"]


def test_validate_relations_catches_sign_error():
    rep = Representation("G2", Zmod(5))
    system = copy.copy(rep.system)
    key = next(k for k, v in system.constants.items() if len(v) == 4)
    table = dict(system.constants)
    i, j, n = table[key][0]
    table[key] = ((i, j, -n),) + table[key][1:]
    system.constants = table
    rep.system = system
    report = validate_relations(rep)
    assert report.verdict == "fails"
    assert report.witness["relation"] == "R2"
    assert len(report.witness["matrix"]) == 7


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("ring", [Zmod(8), Zmod(9), DualNumbers(3)], ids=str)
def test_level_of_root_unipotent(kind, ring):
    rep = Representation(kind, ring)
    for a in rep.system.roots:
        for t in ring.elements:
            lev = level(x(rep, a, t))
            expected = [i for i in ideals_of(ring) if t in i][0]
            assert lev == expected


def test_generator_set_sizes():
    rep = Representation("A2", Zmod(4))
    two = zmod_ideal(rep.ring, 2)
    assert len(generator_set_E(rep, two)) == 7
    gz = generator_set_Z(rep, two)
    assert len(gz) <= 6 * 2 * 4
    assert sum(len(l) for l in gz.labels) == 6 * 2 * 4
    x0 = generator_set_X(rep, zero_ideal(rep.ring), two)
    assert len(x0) == 1 and x0[0].is_identity()


def test_labels_keep_provenance():
    rep = Representation("A2", Zmod(4))
    gz = generator_set_Z(rep, zmod_ideal(rep.ring, 2))
    ident = [k for k, g in enumerate(gz) if g.is_identity()]
    assert len(ident) == 1
    assert len(gz.labels[ident[0]]) == 6 * 4


@pytest.mark.parametrize("kind,n,i,j", [("A2", 8, 2, 2), ("A2", 16, 2, 4), ("C2", 9, 3, 3), ("G2", 9, 3, 3)])
def test_birelative_generators_have_level_ij(kind, n, i, j):
    rep = Representation(kind, Zmod(n))
    ii, jj = zmod_ideal(rep.ring, i), zmod_ideal(rep.ring, j)
    ij = ideal_product(ii, jj)
    for gens in (generator_set_X(rep, ii, jj), generator_set_Y(rep, ii, jj)):
        assert level_mask(rep, gens.mats, ij).all()
        assert (rep.matmul(gens.mats, gens.invs) == rep.identity).all()


def test_y_contains_x_third_family():
    rep = Representation("A2", Zmod(8))
    two = zmod_ideal(rep.ring, 2)
    gx, gy = generator_set_X(rep, two, two), generator_set_Y(rep, two, two)
    third = [g for g, labels in zip(gx, gx.labels) if any(l[0] == "x" for l in labels)]
    assert third and all(g in gy for g in third)
    assert all(g in gy for g in gx)
