"""Finite commutative rings Z/n and F_p[t]/(t^2), with their ideals.

Ring elements are canonical small integer codes ``0 .. size-1`` so that
matrices over the ring are plain ``uint8`` arrays.  For ``Zmod(n)`` the code
is the residue; for ``DualNumbers(p)`` the code of ``a + b*t`` is
``a + p*b``.  All arithmetic methods accept numpy arrays of codes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from math import gcd
from typing import FrozenSet, Iterable, List, Optional, Tuple

import numpy as np


class RingError(ValueError):
    pass


class FiniteRing:
    """Base class; subclasses provide the code arithmetic."""

    size: int
    name: str

    def __repr__(self) -> str:
        return self.name

    def __eq__(self, other) -> bool:
        return type(self) is type(other) and self.name == other.name

    def __hash__(self) -> int:
        return hash(self.name)

    @property
    def elements(self) -> range:
        return range(self.size)

    zero = 0
    one = 1

    def add(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def from_int(self, k):
        raise NotImplementedError

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Product of (stacks of) matrices of codes; returns uint8 codes."""
        raise NotImplementedError

    def additive_generators(self) -> List[int]:
        raise NotImplementedError

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    @cached_property
    def units(self) -> Tuple[int, ...]:
        els = np.arange(self.size)
        table = self.mul(els[:, None], els[None, :])
        return tuple(int(u) for u in els if (table[u] == self.one).any())

    def inverse(self, u: int) -> int:
        for v in self.elements:
            if self.mul(u, v) == self.one:
                return v
        raise RingError(f"{self.format(u)} is not a unit of {self.name}")

    def is_unit(self, u: int) -> bool:
        return u in self.units

    def format(self, a: int) -> str:
        return str(int(a))


class Zmod(FiniteRing):
    """The ring Z/n; ``Zmod(1)`` is the zero ring."""

    def __init__(self, n: int):
        if n < 1:
            raise RingError("modulus must be positive")
        self.n = n
        self.size = n
        self.name = f"Z/{n}"
        self.one = 1 % n

    def add(self, a, b):
        return (np.asarray(a, dtype=np.int64) + b) % self.n

    def neg(self, a):
        return (-np.asarray(a, dtype=np.int64)) % self.n

    def mul(self, a, b):
        return (np.asarray(a, dtype=np.int64) * b) % self.n

    def from_int(self, k):
        return np.asarray(k, dtype=np.int64) % self.n

    def matmul(self, a, b):
        prod = np.matmul(np.asarray(a, dtype=np.int32), np.asarray(b, dtype=np.int32))
        return (prod % self.n).astype(np.uint8)

    def additive_generators(self) -> List[int]:
        return [1] if self.n > 1 else []


class DualNumbers(FiniteRing):
    """F_p[t]/(t^2), p prime."""

    def __init__(self, p: int):
        if p < 2 or any(p % q == 0 for q in range(2, int(p**0.5) + 1)):
            raise RingError("DualNumbers needs a prime p")
        self.p = p
        self.size = p * p
        self.name = f"F{p}[t]/t2"

    def _split(self, a):
        a = np.asarray(a, dtype=np.int64)
        return a % self.p, a // self.p

    def _join(self, x, y):
        return (x % self.p) + self.p * (y % self.p)

    def add(self, a, b):
        a0, a1 = self._split(a)
        b0, b1 = self._split(b)
        return self._join(a0 + b0, a1 + b1)

    def neg(self, a):
        a0, a1 = self._split(a)
        return self._join(-a0, -a1)

    def mul(self, a, b):
        a0, a1 = self._split(a)
        b0, b1 = self._split(b)
        return self._join(a0 * b0, a0 * b1 + a1 * b0)

    def from_int(self, k):
        return np.asarray(k, dtype=np.int64) % self.p

    def matmul(self, a, b):
        a0, a1 = (x.astype(np.int32) for x in self._split(a))
        b0, b1 = (x.astype(np.int32) for x in self._split(b))
        c0 = np.matmul(a0, b0)
        c1 = np.matmul(a0, b1) + np.matmul(a1, b0)
        return self._join(c0, c1).astype(np.uint8)

    def additive_generators(self) -> List[int]:
        return [1, self.p]

    def format(self, a: int) -> str:
        x, y = int(a) % self.p, int(a) // self.p
        if y == 0:
            return str(x)
        t = "t" if y == 1 else f"{y}t"
        return t if x == 0 else f"{x}+{t}"


@dataclass(frozen=True)
class Ideal:
    """An ideal, stored by its carrier; ``generator`` is a canonical
    principal generator when one exists (for Z/n, the divisor d of n)."""

    ring: FiniteRing
    carrier: FrozenSet[int]
    generator: Optional[int] = None

    def __contains__(self, a) -> bool:
        return int(a) in self.carrier

    def __len__(self) -> int:
        return len(self.carrier)

    def __le__(self, other: "Ideal") -> bool:
        _same_ring(self, other)
        return self.carrier <= other.carrier

    def __lt__(self, other: "Ideal") -> bool:
        return self <= other and self.carrier != other.carrier

    @property
    def is_zero(self) -> bool:
        return self.carrier == frozenset({0})

    @property
    def is_unit(self) -> bool:
        return len(self.carrier) == self.ring.size

    @property
    def elements(self) -> List[int]:
        return sorted(self.carrier)

    @cached_property
    def mask(self) -> np.ndarray:
        """Boolean lookup table over element codes."""
        m = np.zeros(self.ring.size, dtype=bool)
        m[list(self.carrier)] = True
        return m

    @property
    def label(self) -> str:
        if self.generator is None:
            return "{" + ",".join(self.ring.format(a) for a in self.elements) + "}"
        return self.ring.format(self.generator)

    def __str__(self) -> str:
        return f"({self.label})"


def _same_ring(i: Ideal, j: Ideal) -> None:
    if i.ring != j.ring:
        raise RingError(f"ideals over different rings {i.ring} and {j.ring}")


def _additive_closure(ring: FiniteRing, seed: Iterable[int]) -> FrozenSet[int]:
    out = {0}
    todo = [int(s) for s in seed]
    while todo:
        a = todo.pop()
        if a in out:
            continue
        new = {int(ring.add(a, b)) for b in out}
        out.add(a)
        todo.extend(new - out)
    return frozenset(out)


def ideal_generated(ring: FiniteRing, gens: Iterable[int]) -> Ideal:
    """The smallest ideal containing ``gens``."""
    els = np.arange(ring.size)
    seed = set()
    for g in gens:
        seed.update(int(x) for x in ring.mul(int(g), els))
    carrier = _additive_closure(ring, seed)
    return _with_generator(ring, carrier)


def _with_generator(ring: FiniteRing, carrier: FrozenSet[int]) -> Ideal:
    els = np.arange(ring.size)
    if isinstance(ring, Zmod):
        return Ideal(ring, carrier, gcd(ring.n, *carrier) % ring.n)
    for a in sorted(carrier, key=lambda a: (a % getattr(ring, "p", ring.size), a)):
        if frozenset(int(x) for x in ring.mul(a, els)) == carrier:
            return Ideal(ring, carrier, a)
    return Ideal(ring, carrier, None)


def ideals_of(ring: FiniteRing) -> List[Ideal]:
    """Every ideal of ``ring``, sorted by size."""
    principal = {ideal_generated(ring, [a]).carrier for a in ring.elements}
    found = set(principal)
    changed = True
    while changed:
        changed = False
        for a in list(found):
            for b in list(found):
                c = _additive_closure(ring, a | b)
                if c not in found:
                    found.add(c)
                    changed = True
    return sorted((_with_generator(ring, c) for c in found), key=lambda i: (len(i), i.generator or 0))


def zmod_ideal(ring: Zmod, d: int) -> Ideal:
    d %= ring.n
    g = gcd(d, ring.n)
    return Ideal(ring, frozenset(range(0, ring.n, g)), d and g % ring.n)


def ideal_product(i: Ideal, j: Ideal) -> Ideal:
    _same_ring(i, j)
    ring = i.ring
    return ideal_generated(ring, {int(ring.mul(a, b)) for a in i.carrier for b in j.carrier})


def ideal_sum(i: Ideal, j: Ideal) -> Ideal:
    _same_ring(i, j)
    return _with_generator(i.ring, _additive_closure(i.ring, i.carrier | j.carrier))


def unit_ideal(ring: FiniteRing) -> Ideal:
    return ideal_generated(ring, [ring.one])


def zero_ideal(ring: FiniteRing) -> Ideal:
    return ideal_generated(ring, [])


def maximal_ideals(ring: FiniteRing) -> List[Ideal]:
    proper = [i for i in ideals_of(ring) if not i.is_unit]
    return [m for m in proper if not any(m < k for k in proper)]


def has_F2_residue_field(ring: FiniteRing) -> bool:
    return any(ring.size // len(m) == 2 for m in maximal_ideals(ring))


def theta_condition(ring: FiniteRing) -> bool:
    """Every theta lies in the ideal generated by theta^2 and 2*theta."""
    two = int(ring.from_int(2))
    for theta in ring.elements:
        ideal = ideal_generated(ring, [int(ring.mul(theta, theta)), int(ring.mul(two, theta))])
        if theta not in ideal:
            return False
    return True


def quotient_map(ring: FiniteRing, ideal: Ideal) -> Tuple[FiniteRing, np.ndarray]:
    """The quotient ``ring / ideal`` and the reduction as a lookup table
    ``table[code] -> code``."""
    if ideal.ring != ring:
        raise RingError("ideal belongs to another ring")
    els = np.arange(ring.size)
    if isinstance(ring, Zmod):
        d = gcd(ring.n, ideal.generator)
        return Zmod(d), (els % d).astype(np.int64)
    if isinstance(ring, DualNumbers):
        if ideal.is_zero:
            return ring, els.astype(np.int64)
        if ideal.is_unit:
            return Zmod(1), np.zeros(ring.size, dtype=np.int64)
        return Zmod(ring.p), (els % ring.p).astype(np.int64)
    raise RingError(f"no quotient construction for {ring}")


_ZMOD_RE = re.compile(r"^Z/(\d+)$")
_DUAL_RE = re.compile(r"^F(\d+)\[t\]/t\^?2$")


def parse_ring(text: str) -> FiniteRing:
    """``Z/8`` or ``F3[t]/t2``."""
    text = text.strip().replace(" ", "")
    m = _ZMOD_RE.match(text)
    if m:
        n = int(m.group(1))
        if n < 2:
            raise RingError("need n >= 2")
        return Zmod(n)
    m = _DUAL_RE.match(text)
    if m:
        return DualNumbers(int(m.group(1)))
    raise RingError(f"cannot parse ring {text!r}; use Z/n or Fp[t]/t2")


def parse_ideal(ring: FiniteRing, text: str) -> Ideal:
    """Principal ideal from its generator: an integer, or ``t``/``0``/``1``
    over dual numbers."""
    text = str(text).strip().strip("()")
    if isinstance(ring, DualNumbers):
        if text == "t":
            return ideal_generated(ring, [ring.p])
        if text in ("0", "1"):
            return ideal_generated(ring, [int(text)])
        raise RingError(f"ideal {text!r} not understood over {ring}; use t, 0 or 1")
    try:
        k = int(text)
    except ValueError:
        raise RingError(f"ideal generator {text!r} is not an integer") from None
    return zmod_ideal(ring, k) if isinstance(ring, Zmod) else ideal_generated(ring, [k])

