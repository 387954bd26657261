import itertools

import numpy as np
import pytest

from chevlab.rootsys import (
    GRAM,
    KINDS,
    Root,
    RootSystemError,
    _frozen_data,
    rank2_subsystem,
    root_sum,
    roots_of,
    structure_constant,
)


def lattice_roots(kind):
    """Independent oracle: lattice vectors whose norm is a root length."""
    gram = np.array(GRAM[kind])
    rank = len(gram)
    lengths = {int(gram[k, k]) for k in range(rank)}
    out = set()
    for v in itertools.product(range(-3, 4), repeat=rank):
        v = np.array(v)
        if v.any() and int(v @ gram @ v) in lengths:
            out.add(tuple(int(c) for c in v))
    return out


@pytest.mark.parametrize("kind,count", [("A2", 6), ("A3", 12), ("C2", 8), ("G2", 12)])
def test_root_counts_match_lattice_oracle(kind, count):
    system = roots_of(kind)
    assert len(system) == count
    assert {r.coords for r in system} == lattice_roots(kind)
    assert len(system.positive) == count // 2
    assert {(-r).coords for r in system.positive} == {r.coords for r in system.negative}


@pytest.mark.parametrize("kind,short", [("C2", 4), ("G2", 6), ("A2", 0)])
def test_length_classes(kind, short):
    assert sum(r.length_class == "short" for r in roots_of(kind)) == short


def test_root_validation():
    with pytest.raises(RootSystemError):
        Root((0, 0))
    with pytest.raises(RootSystemError):
        Root((1, -1))


def test_root_sum():
    a2 = roots_of("A2")
    a1, a2_ = a2.root((1, 0)), a2.root((0, 1))
    assert root_sum(a1, a2_) == a2.root((1, 1))
    assert root_sum(a1, a1) is None
    assert root_sum(a1, -a1) is None


def x_int(kind, root, t):
    entry = _frozen_data()["kinds"][kind]["roots"][",".join(map(str, root.coords))]
    n1, n2 = np.array(entry["X"]), np.array(entry["X2"])
    return np.eye(len(n1), dtype=np.int64) + t * n1 + t * t * n2


@pytest.mark.parametrize("kind", KINDS)
def test_constants_match_brute_force_search(kind):
    """Search N in [-3, 3] for every term of the commutator formula over Z
    and compare with the frozen table."""
    system = roots_of(kind)
    for a, b in itertools.permutations(system.roots, 2):
        if a == -b:
            continue
        terms = system.commutator_terms(a, b)
        lhs = x_int(kind, a, 1) @ x_int(kind, b, 1) @ x_int(kind, a, -1) @ x_int(kind, b, -1)
        found = None
        for ns in itertools.product([n for n in range(-3, 4) if n], repeat=len(terms)):
            rhs = np.eye(lhs.shape[0], dtype=np.int64)
            for (i, j, g), n in zip(terms, ns):
                rhs = rhs @ x_int(kind, g, n)
            if np.array_equal(lhs, rhs):
                found = ns
                break
        if not terms:
            assert np.array_equal(lhs, np.eye(lhs.shape[0]))
            continue
        assert found is not None, (a, b)
        assert tuple(structure_constant(system, a, b, i, j) for i, j, _ in terms) == found


@pytest.mark.parametrize("kind", KINDS)
def test_constant_magnitudes(kind):
    values = {abs(n) for rows in roots_of(kind).constants.values() for _, _, n in rows}
    assert values <= {1, 2, 3}
    if kind.startswith("A"):
        assert values == {1}
    if kind == "G2":
        assert {2, 3} <= values


def test_term_counts():
    limits = {"A2": 1, "A3": 1, "C2": 2, "G2": 4}
    for kind, lim in limits.items():
        system = roots_of(kind)
        for a, b in itertools.permutations(system.roots, 2):
            if a != -b:
                assert len(system.commutator_terms(a, b)) <= lim


def test_g2_examples():
    system = roots_of("G2")
    rows = [(i, j, n) for v in system.constants.values() for i, j, n in v]
    assert any(i == 3 and j == 1 and abs(n) == 1 for i, j, n in rows)
    assert any(i == 2 and j == 1 and abs(n) <= 3 for i, j, n in rows)


def test_c2_long_short_term():
    system = roots_of("C2")
    beta, gamma = system.root((0, 1)), system.root((1, 0))
    assert system.root((0, 1)).length_class == "long"
    assert structure_constant(system, beta, gamma, 1, 2) != 0


def test_structure_constant_domain():
    system = roots_of("A2")
    a = system.root((1, 0))
    with pytest.raises(RootSystemError):
        structure_constant(system, a, -a, 1, 1)
    with pytest.raises(RootSystemError):
        structure_constant(system, a, a, 1, 1)
    with pytest.raises(RootSystemError):
        structure_constant(system, a, system.root((0, 1)), 0, 1)


def test_rank2_subsystem():
    assert rank2_subsystem(roots_of("A2"), *roots_of("A2").simple) == "A2"
    assert rank2_subsystem(roots_of("C2"), *roots_of("C2").simple) == "C2"
    assert rank2_subsystem(roots_of("G2"), *roots_of("G2").simple) == "G2"
    a3 = roots_of("A3")
    assert rank2_subsystem(a3, a3.root((1, 0, 0)), a3.root((0, 0, 1))) == "A1xA1"
    with pytest.raises(RootSystemError):
        rank2_subsystem(a3, a3.root((1, 0, 0)), a3.root((-1, 0, 0)))


def test_frozen_data_matches_derivation():
    pytest.importorskip("sympy")
    from chevlab.derive import derive_all

    assert derive_all() == _frozen_data()
