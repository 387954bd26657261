"""Root systems A2, A3, C2, G2 and their Chevalley structure constants.

Roots are integer coordinate vectors in the basis of simple roots.  The
structure constants are not computed here: they are read from the frozen
data file produced by :mod:`chevlab.derive`, so that every consumer sees
exactly the signs fixed by the matrix representations.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

KINDS = ("A2", "A3", "C2", "G2")

# Gram matrices of the simple roots; short roots have squared length 2.
GRAM: Dict[str, Tuple[Tuple[int, ...], ...]] = {
    "A2": ((2, -1), (-1, 2)),
    "A3": ((2, -1, 0), (-1, 2, -1), (0, -1, 2)),
    "C2": ((2, -2), (-2, 4)),
    "G2": ((2, -3), (-3, 6)),
}

DATA_FILE = "chevalley_v1.json"


class RootSystemError(ValueError):
    """Query outside the domain of a root-system operation."""


@dataclass(frozen=True, order=True)
class Root:
    coords: Tuple[int, ...]
    length_class: str = field(default="long", compare=False)
    kind: str = field(default="", compare=False, repr=False)

    def __post_init__(self):
        if not any(self.coords):
            raise RootSystemError("the zero vector is not a root")
        if not (all(c >= 0 for c in self.coords) or all(c <= 0 for c in self.coords)):
            raise RootSystemError(f"mixed-sign coordinates {self.coords}")

    @property
    def is_positive(self) -> bool:
        return all(c >= 0 for c in self.coords)

    @property
    def height(self) -> int:
        return sum(self.coords)

    def __neg__(self) -> "Root":
        return Root(tuple(-c for c in self.coords), self.length_class, self.kind)

    def __str__(self) -> str:
        return "(" + ",".join(str(c) for c in self.coords) + ")"


def _norm(gram, v: Sequence[int]) -> int:
    return sum(v[i] * gram[i][j] * v[j] for i in range(len(v)) for j in range(len(v)))


def _pair(gram, u: Sequence[int], v: Sequence[int]) -> int:
    return sum(u[i] * gram[i][j] * v[j] for i in range(len(u)) for j in range(len(v)))


def reflection_closure(kind: str) -> List[Tuple[int, ...]]:
    """All roots of ``kind`` as coordinate tuples, by closing the simple
    roots under the simple reflections."""
    gram = GRAM[kind]
    rank = len(gram)
    simple = [tuple(int(i == k) for i in range(rank)) for k in range(rank)]
    found = set(simple)
    todo = list(simple)
    while todo:
        v = todo.pop()
        for k, a in enumerate(simple):
            c = Fraction(2 * _pair(gram, v, a), gram[k][k])
            assert c.denominator == 1
            w = tuple(v[i] - int(c) * a[i] for i in range(rank))
            if w not in found:
                found.add(w)
                todo.append(w)
    return sorted(found, key=lambda r: (-sum(r), tuple(-c for c in r)))


@lru_cache(maxsize=None)
def _frozen_data() -> dict:
    text = resources.files("chevlab").joinpath("data", DATA_FILE).read_text()
    return json.loads(text)



class RootSystem:
    """A rank 2 or 3 root system with its frozen structure-constant table.

    ``constants[(alpha, beta)]`` lists ``(i, j, N)`` triples in the product
    order used by the commutator formula (increasing height of
    ``i*alpha + j*beta``, ties by ``i``).
    """

    def __init__(self, kind: str, constants: Optional[dict] = None):
        if kind not in KINDS:
            raise RootSystemError(f"unknown root system {kind!r}; expected one of {KINDS}")
        self.kind = kind
        self.gram = GRAM[kind]
        self.rank = len(self.gram)
        coords = reflection_closure(kind)
        short = min(_norm(self.gram, c) for c in coords)
        self.roots: Tuple[Root, ...] = tuple(
            Root(c, "short" if _norm(self.gram, c) == short and kind in ("C2", "G2") else "long", kind)
            for c in coords
        )
        self._by_coords = {r.coords: r for r in self.roots}
        self.positive = tuple(r for r in self.roots if r.is_positive)
        self.negative = tuple(r for r in self.roots if not r.is_positive)
        self.simple = tuple(r for r in self.positive if r.height == 1)
        if constants is None:
            constants = self._load_constants()
        self.constants: Dict[Tuple[Root, Root], Tuple[Tuple[int, int, int], ...]] = constants

    def _load_constants(self):
        table: Dict[Tuple[Root, Root], List[Tuple[int, int, int]]] = {}
        for a, b, i, j, n in _frozen_data()["kinds"][self.kind]["constants"]:
            key = (self.root(tuple(a)), self.root(tuple(b)))
            table.setdefault(key, []).append((i, j, n))
        return {k: tuple(v) for k, v in table.items()}

    def __repr__(self) -> str:
        return f"RootSystem({self.kind!r})"

    def __iter__(self) -> Iterator[Root]:
        return iter(self.roots)

    def __len__(self) -> int:
        return len(self.roots)

    def __contains__(self, root) -> bool:
        return getattr(root, "coords", None) in self._by_coords

    def root(self, coords: Sequence[int]) -> Root:
        try:
            return self._by_coords[tuple(coords)]
        except KeyError:
            raise RootSystemError(f"{tuple(coords)} is not a root of {self.kind}") from None

    def combination(self, alpha: Root, beta: Root, i: int, j: int) -> Optional[Root]:
        c = tuple(i * a + j * b for a, b in zip(alpha.coords, beta.coords))
        return self._by_coords.get(c)

    def commutator_terms(self, alpha: Root, beta: Root) -> List[Tuple[int, int, Root]]:
        """The ``(i, j, i*alpha + j*beta)`` with ``i, j >= 1`` lying in the
        system, in the fixed product order."""
        terms = []
        for i, j in itertools.product(range(1, 4), repeat=2):
            g = self.combination(alpha, beta, i, j)
            if g is not None:
                terms.append((i, j, g))
        terms.sort(key=lambda t: (t[2].height, t[0]))
        return terms

    def length(self, root: Root) -> int:
        return _norm(self.gram, root.coords)


@lru_cache(maxsize=None)
def roots_of(kind: str) -> RootSystem:
    return RootSystem(kind)


def root_sum(alpha: Root, beta: Root) -> Optional[Root]:
    """``alpha + beta`` if it is a root, else ``None``."""
    if alpha.kind != beta.kind:
        raise RootSystemError("roots from different systems")
    return roots_of(alpha.kind).combination(alpha, beta, 1, 1)


def structure_constant(system: RootSystem, alpha: Root, beta: Root, i: int, j: int) -> int:
    """The constant ``N`` of ``x_{i*alpha+j*beta}`` in the commutator
    ``[x_alpha(a), x_beta(b)]``."""
    if alpha == -beta:
        raise RootSystemError("alpha = -beta is outside the commutator formula")
    if i < 1 or j < 1:
        raise RootSystemError("i and j must be positive")
    if alpha not in system or beta not in system:
        raise RootSystemError("roots not in this system")
    if system.combination(alpha, beta, i, j) is None:
        raise RootSystemError(f"{i}*{alpha}+{j}*{beta} is not a root")
    for ii, jj, n in system.constants.get((alpha, beta), ()):
        if (ii, jj) == (i, j):
            return n
    raise RootSystemError("constant missing from the frozen table")


def rank2_subsystem(system: RootSystem, alpha: Root, beta: Root) -> str:
    """Type of the subsystem of roots in the integer span of alpha, beta."""
    if alpha == beta or alpha == -beta:
        raise RootSystemError("alpha and beta must not be proportional")
    span = [
        g
        for g in system.roots
        if any(
            system.combination(alpha, beta, p, q) == g
            for p in range(-4, 5)
            for q in range(-4, 5)
        )
    ]
    return {4: "A1xA1", 6: "A2", 8: "C2", 12: "G2"}[len(span)]
