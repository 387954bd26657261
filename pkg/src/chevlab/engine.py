"""Exhaustive subgroup enumeration over a fixed representation.

Subgroups are built with Dimino's coset algorithm: the member set is kept
as a union of left cosets of the subgroup generated so far, so every new
generator adds whole cosets in one vectorised product and membership is a
single hash lookup on the raw matrix bytes.
"""

from __future__ import annotations

import os
import struct
import zlib
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .chevgen import GroupElement, Generators, Representation
from .rings import Ideal, ideal_generated, quotient_map
from .rootsys import Root

DEFAULT_BUDGET = 20_000_000


class EngineError(ValueError):
    """Bad input to an engine operation (domain or precondition)."""


class BudgetExceeded(RuntimeError):
    def __init__(self, budget: int, size: int, frontier: int):
        self.budget = budget
        self.size = size
        self.frontier = frontier
        super().__init__(
            f"enumeration budget {budget} exceeded: {size} members so far, frontier of {frontier} pending"
        )


class CacheError(OSError):
    pass


def keys_of(mats: np.ndarray) -> List[bytes]:
    mats = np.ascontiguousarray(mats, dtype=np.uint8)
    n = mats.shape[0]
    if n == 0:
        return []
    return mats.reshape(n, -1).view(f"V{mats[0].size}").ravel().tolist()


GenLike = Union[Generators, np.ndarray, Sequence[GroupElement]]


def _as_arrays(rep: Representation, gens: GenLike, need_inverse: bool = False) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    if isinstance(gens, Generators):
        return gens.mats, gens.invs
    if isinstance(gens, SubgroupSet):
        return _as_arrays(rep, gens.gens, need_inverse)
    if isinstance(gens, np.ndarray):
        mats = np.ascontiguousarray(gens, dtype=np.uint8).reshape(-1, rep.dim, rep.dim)
        return mats, rep.inverse_matrices(mats) if need_inverse else None
    gens = list(gens)
    if not gens:
        empty = np.empty((0, rep.dim, rep.dim), dtype=np.uint8)
        return empty, empty
    for g in gens:
        if g.rep != rep:
            raise EngineError("generators from another representation")
    mats = np.stack([g.mat for g in gens])
    return mats, (np.stack([g.inverse().mat for g in gens]) if need_inverse else None)


class _Builder:
    """Incremental Dimino closure."""

    def __init__(self, rep: Representation, budget: int):
        self.rep = rep
        self.budget = budget
        self.chunks: List[np.ndarray] = [rep.identity[None].copy()]
        self.keys = {rep.identity.tobytes()}
        self.gens: List[np.ndarray] = []
        self.size = 1
        self._flat: Optional[np.ndarray] = None

    def members(self) -> np.ndarray:
        if self._flat is None or len(self._flat) != self.size:
            self._flat = np.ascontiguousarray(np.concatenate(self.chunks))
            self.chunks = [self._flat]
        return self._flat

    def extend(self, g: np.ndarray) -> bool:
        """Add generator ``g``; False if it was already a member."""
        if g.tobytes() in self.keys:
            return False
        mm = self.rep.matmul
        old = self.members()
        self.gens.append(np.ascontiguousarray(g, dtype=np.uint8))
        gens = np.stack(self.gens)
        reps = [self.rep.identity]
        k = 0
        while k < len(reps):
            cand = mm(gens, reps[k])
            k += 1
            for y in cand:
                if y.tobytes() in self.keys:
                    continue
                if self.size + len(old) > self.budget:
                    raise BudgetExceeded(self.budget, self.size, len(reps) - k + 1)
                coset = mm(y, old)
                self.keys.update(keys_of(coset))
                self.chunks.append(coset)
                self.size += len(coset)
                reps.append(y)
        return True

    def extend_many(self, mats: np.ndarray) -> int:
        added = 0
        for m, key in zip(mats, keys_of(mats)):
            if key not in self.keys and self.extend(m):
                added += 1
        return added

    def normalise(self, conj: np.ndarray, conj_inv: np.ndarray) -> None:
        """Close under conjugation ``c^-1 g c`` by the given conjugators."""
        mm = self.rep.matmul
        k = 0
        while k < len(self.gens):
            g = self.gens[k]
            k += 1
            if len(conj):
                self.extend_many(mm(mm(conj_inv, g), conj))


class SubgroupSet:
    """An enumerated subgroup: generators, member matrices, hash set."""

    def __init__(self, rep: Representation, members: np.ndarray, gens: np.ndarray, label: str = "",
                 keys: Optional[set] = None):
        self.rep = rep
        self.members = np.ascontiguousarray(members, dtype=np.uint8)
        self.gens = np.ascontiguousarray(gens, dtype=np.uint8).reshape(-1, rep.dim, rep.dim)
        self.label = label
        self._keys = keys

    @classmethod
    def _from_builder(cls, b: _Builder, label: str) -> "SubgroupSet":
        return cls(b.rep, b.members(), np.array(b.gens, dtype=np.uint8).reshape(-1, b.rep.dim, b.rep.dim),
                   label, b.keys)

    @property
    def keys(self) -> set:
        if self._keys is None:
            self._keys = set(keys_of(self.members))
        return self._keys

    def __len__(self) -> int:
        return len(self.members)

    @property
    def order(self) -> int:
        return len(self.members)

    def __repr__(self) -> str:
        return f"SubgroupSet({self.label or '?'}, order={len(self)}, over {self.rep.kind}/{self.rep.ring.name})"

    def __contains__(self, g) -> bool:
        mat = g.mat if isinstance(g, GroupElement) else np.asarray(g, dtype=np.uint8)
        return np.ascontiguousarray(mat).tobytes() in self.keys

    def contains_all(self, mats: np.ndarray) -> np.ndarray:
        ks = self.keys
        return np.fromiter((k in ks for k in keys_of(mats)), dtype=bool, count=len(mats))

    def first_missing(self, other: "SubgroupSet") -> Optional[np.ndarray]:
        """A member of ``self`` outside ``other``, or None if contained."""
        _same_rep(self, other)
        ks = other.keys
        for m, k in zip(self.members, keys_of(self.members)):
            if k not in ks:
                return m
        return None

    def issubset(self, other: "SubgroupSet") -> bool:
        if len(self) > len(other):
            return False
        return self.first_missing(other) is None

    def __le__(self, other: "SubgroupSet") -> bool:
        return self.issubset(other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SubgroupSet):
            return NotImplemented
        return self.rep == other.rep and len(self) == len(other) and self.issubset(other)

    __hash__ = None  # type: ignore[assignment]

    def elements(self) -> Iterable[GroupElement]:
        return (GroupElement(self.rep, m) for m in self.members)

    def gen_inverses(self) -> np.ndarray:
        return self.rep.inverse_matrices(self.gens)


def _same_rep(a: SubgroupSet, b: SubgroupSet) -> None:
    if a.rep != b.rep:
        raise EngineError("subgroups of different representations")


def closure(rep: Representation, gens: GenLike, budget: int = DEFAULT_BUDGET, label: str = "") -> SubgroupSet:
    """The subgroup generated by ``gens``."""
    mats, _ = _as_arrays(rep, gens)
    b = _Builder(rep, budget)
    b.extend_many(mats)
    return SubgroupSet._from_builder(b, label)


def normal_closure(rep: Representation, gens: GenLike, conjugators: GenLike, budget: int = DEFAULT_BUDGET,
                   label: str = "") -> SubgroupSet:
    """The smallest subgroup containing ``gens`` and normalised by the group
    generated by ``conjugators`` (the conjugators' inverses are used too,
    which is needed only for infinite groups but costs little)."""
    mats, _ = _as_arrays(rep, gens)
    cm, ci = _as_arrays(rep, conjugators, need_inverse=True)
    b = _Builder(rep, budget)
    b.extend_many(mats)
    b.normalise(cm, ci)
    return SubgroupSet._from_builder(b, label)


def commutator_mats(rep: Representation, h: GenLike, k: GenLike) -> np.ndarray:
    """All ``[a, b]`` for ``a`` in ``h``, ``b`` in ``k``, duplicates removed."""
    hm, hi = _as_arrays(rep, h, need_inverse=True)
    km, ki = _as_arrays(rep, k, need_inverse=True)
    mm = rep.matmul
    seen = set()
    out = []
    for a, ai in zip(hm, hi):
        c = mm(mm(mm(a, km), ai), ki)
        for m, key in zip(c, keys_of(c)):
            if key not in seen:
                seen.add(key)
                out.append(m)
    if not out:
        return np.empty((0, rep.dim, rep.dim), dtype=np.uint8)
    return np.stack(out)


def commutator_subgroup(rep: Representation, h: GenLike, k: GenLike, conjugators: GenLike,
                        budget: int = DEFAULT_BUDGET, label: str = "") -> SubgroupSet:
    """``[H, K]`` given generators of normal subgroups ``H``, ``K`` of the
    group generated by ``conjugators``: the normal closure of the
    commutators of generators."""
    b = _Builder(rep, budget)
    hm, hi = _as_arrays(rep, h, need_inverse=True)
    km, ki = _as_arrays(rep, k, need_inverse=True)
    mm = rep.matmul
    for a, ai in zip(hm, hi):
        b.extend_many(mm(mm(mm(a, km), ai), ki))
    cm, ci = _as_arrays(rep, conjugators, need_inverse=True)
    b.normalise(cm, ci)
    return SubgroupSet._from_builder(b, label)


def commutator_subgroup_of_sets(h: SubgroupSet, k: SubgroupSet, conjugators: GenLike,
                                budget: int = DEFAULT_BUDGET, label: str = "") -> SubgroupSet:
    """``[H, K]`` from full member lists of ``H`` and ``K`` (no normality
    assumption on the inputs beyond normalisation by ``conjugators``)."""
    _same_rep(h, k)
    rep = h.rep
    b = _Builder(rep, budget)
    small, large = (h, k) if len(h) <= len(k) else (k, h)
    si = rep.inverse_matrices(small.members)
    lm = large.members
    li = rep.inverse_matrices(lm)
    mm = rep.matmul
    for a, ai in zip(small.members, si):
        b.extend_many(mm(mm(mm(a, lm), ai), li))
    cm, ci = _as_arrays(rep, conjugators, need_inverse=True)
    b.normalise(cm, ci)
    return SubgroupSet._from_builder(b, label)


# -- reduction and levels -----------------------------------------------------


def reduction(rep: Representation, ideal: Ideal) -> Tuple[Representation, np.ndarray]:
    """The representation over ``R/ideal`` and the entrywise lookup table."""
    qring, table = quotient_map(rep.ring, ideal)
    return Representation(rep.kind, qring), table.astype(np.uint8)


def reduce(g: GroupElement, ideal: Ideal) -> GroupElement:
    qrep, table = reduction(g.rep, ideal)
    return GroupElement(qrep, table[g.mat])


def level(g: GroupElement) -> Ideal:
    """The ideal generated by the entries of ``g - 1``."""
    diff = g.rep.ring.sub(g.mat.astype(np.int64), g.rep.identity.astype(np.int64))
    return ideal_generated(g.rep.ring, {int(v) for v in np.unique(diff)})


_CHUNK = 1 << 18


def _row_mask(mats: np.ndarray, fn) -> np.ndarray:
    """Apply a row-wise boolean test in chunks to bound peak memory."""
    out = np.empty(len(mats), dtype=bool)
    for k in range(0, len(mats), _CHUNK):
        out[k:k + _CHUNK] = fn(mats[k:k + _CHUNK])
    return out


def level_mask(rep: Representation, mats: np.ndarray, ideal: Ideal) -> np.ndarray:
    """Rows of ``mats`` congruent to 1 modulo ``ideal``."""
    if ideal.ring != rep.ring:
        raise EngineError("ideal over another ring")
    one = rep.identity.astype(np.int64)[None]

    def test(block):
        diff = rep.ring.sub(block.astype(np.int64), one)
        return ideal.mask[diff].all(axis=(1, 2))

    return _row_mask(mats, test)


def _commutes_with(rep: Representation, mats: np.ndarray, gens: np.ndarray) -> np.ndarray:
    def test(block):
        ok = np.ones(len(block), dtype=bool)
        for s in gens:
            ok &= (rep.matmul(block, s) == rep.matmul(s, block)).all(axis=(1, 2))
        return ok

    return _row_mask(mats, test)


def _subgroup_from_members(rep: Representation, members: np.ndarray, label: str) -> SubgroupSet:
    """Wrap a member list known to be a subgroup, recovering a small
    generating set (and checking closure on the way)."""
    b = _Builder(rep, len(members) + 1)
    keys = set(keys_of(members))
    order = np.random.default_rng(0).permutation(len(members))
    for idx in order:
        if b.size == len(members):
            break
        m = members[idx]
        if m.tobytes() not in b.keys:
            b.extend(m)
    if b.size != len(members) or not b.keys <= keys:
        raise EngineError(f"{label}: filtered set is not a subgroup")
    return SubgroupSet(rep, members, np.array(b.gens, dtype=np.uint8).reshape(-1, rep.dim, rep.dim), label, keys)


def congruence_subgroup(ambient: SubgroupSet, ideal: Ideal, label: str = "") -> SubgroupSet:
    """Members of ``ambient`` congruent to 1 modulo ``ideal``."""
    if not isinstance(ambient, SubgroupSet):
        raise EngineError("congruence_subgroup needs an enumerated ambient group")
    rep = ambient.rep
    mask = level_mask(rep, ambient.members, ideal)
    return _subgroup_from_members(rep, ambient.members[mask], label or f"G({ideal.label})")


def center(group: SubgroupSet) -> SubgroupSet:
    """Members commuting with every generator."""
    rep = group.rep
    mask = _commutes_with(rep, group.members, group.gens)
    return _subgroup_from_members(rep, group.members[mask], f"Z({group.label})")


def full_congruence_subgroup(ambient: SubgroupSet, ideal: Ideal, label: str = "") -> SubgroupSet:
    """Members of ``ambient`` whose image mod ``ideal`` is central in the
    image of ``ambient``."""
    if not isinstance(ambient, SubgroupSet):
        raise EngineError("full_congruence_subgroup needs an enumerated ambient group")
    rep = ambient.rep
    qrep, table = reduction(rep, ideal)
    qgens = table[ambient.gens]
    mask = _row_mask(ambient.members, lambda block: _commutes_with(qrep, table[block], qgens))
    return _subgroup_from_members(rep, ambient.members[mask], label or f"C({ideal.label})")


# -- unipotent factorisation ------------------------------------------------------


def factor_unipotent(u: GroupElement, order: Sequence[Root]) -> List[Tuple[Root, int]]:
    """Coefficients ``c`` with ``u = prod x_gamma(c_gamma)`` in ``order``.

    ``order`` must list every positive root, by non-decreasing height.
    """
    rep = u.rep
    ring = rep.ring
    order = list(order)
    if sorted(order) != sorted(rep.system.positive) or len(set(order)) != len(order):
        raise EngineError("order must list each positive root once")
    heights = [g.height for g in order]
    if heights != sorted(heights):
        raise EngineError("order must be by non-decreasing height")
    m = u.mat
    if np.tril(m, -1).any() or not (np.diag(m) == ring.one).all():
        raise EngineError("not upper unitriangular")
    coef = {}
    done: List[Root] = []
    for hgt in sorted(set(heights)):
        v_inv = rep.identity
        for g in reversed(done):
            v_inv = rep.matmul(v_inv, rep.x_matrix(g, int(ring.neg(coef[g]))))
        w = rep.matmul(v_inv, m)
        for g in order:
            if g.height != hgt:
                continue
            n1 = rep.n1[g]
            p, q = next((p, q) for (p, q), v in np.ndenumerate(n1) if abs(v) == 1)
            coef[g] = int(ring.mul(int(w[p, q]), int(ring.from_int(int(n1[p, q])))))
            done.append(g)
    check = rep.identity
    for g in order:
        check = rep.matmul(check, rep.x_matrix(g, coef[g]))
    if not np.array_equal(check, m):
        raise EngineError("element is not in the unipotent subgroup")
    return [(g, coef[g]) for g in order]


# -- cache files -------------------------------------------------------------------
#
# 16-byte header: magic "CHVL", uint32 dim, uint32 ring size, uint32 count;
# then count*dim*dim member bytes; uint32 generator count and the generator
# bytes; finally a CRC32 of everything before it.  Little endian throughout.

_MAGIC = b"CHVL"
_HEADER = struct.Struct("<4sIII")


def cache_dir(override=None) -> Path:
    d = override or os.environ.get("CHEVLAB_CACHE") or Path.home() / ".cache" / "chevlab"
    return Path(d)


def dump(group: SubgroupSet, path) -> None:
    rep = group.rep
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    blob = (
        _HEADER.pack(_MAGIC, rep.dim, rep.ring.size, len(group))
        + group.members.tobytes()
        + struct.pack("<I", len(group.gens))
        + group.gens.tobytes()
    )
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(blob + struct.pack("<I", zlib.crc32(blob)))
    tmp.replace(path)


def load(rep: Representation, path, label: str = "") -> SubgroupSet:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size + 8:
        raise CacheError(f"{path}: truncated cache file")
    body, (crc,) = raw[:-4], struct.unpack("<I", raw[-4:])
    if zlib.crc32(body) != crc:
        raise CacheError(f"{path}: checksum mismatch")
    magic, dim, size, count = _HEADER.unpack_from(body)
    if magic != _MAGIC:
        raise CacheError(f"{path}: not a chevlab cache file")
    if (dim, size) != (rep.dim, rep.ring.size):
        raise CacheError(f"{path}: cached for dim {dim} over a ring of size {size}")
    dd = dim * dim
    off = _HEADER.size
    members = np.frombuffer(body, dtype=np.uint8, count=count * dd, offset=off).reshape(count, dim, dim)
    off += count * dd
    (ng,) = struct.unpack_from("<I", body, off)
    gens = np.frombuffer(body, dtype=np.uint8, count=ng * dd, offset=off + 4).reshape(ng, dim, dim)
    return SubgroupSet(rep, members, gens, label)


def inspect_cache(path) -> dict:
    """Header fields of a cache file after checking its checksum."""
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size + 8:
        raise CacheError(f"{path}: truncated cache file")
    if zlib.crc32(raw[:-4]) != struct.unpack("<I", raw[-4:])[0]:
        raise CacheError(f"{path}: checksum mismatch")
    magic, dim, size, count = _HEADER.unpack_from(raw)
    if magic != _MAGIC:
        raise CacheError(f"{path}: not a chevlab cache file")
    return {"dim": dim, "ring_size": size, "count": count}


def random_elements(rep: Representation, count: int, rng: np.random.Generator, length: int = 12):
    """``count`` random words of ``length`` root unipotents with random
    parameters, and their inverses, as two stacks of matrices."""
    roots = rep.system.roots
    out = np.broadcast_to(rep.identity, (count, rep.dim, rep.dim)).copy()
    inv = out.copy()
    for _ in range(length):
        which = rng.integers(len(roots), size=count)
        vals = rng.integers(rep.ring.size, size=count)
        step = np.empty_like(out)
        step_inv = np.empty_like(out)
        for k, a in enumerate(roots):
            sel = which == k
            if sel.any():
                step[sel] = rep.x_matrices(a, vals[sel])
                step_inv[sel] = rep.x_matrices(a, rep.ring.neg(vals[sel]))
        out = rep.matmul(out, step)
        inv = rep.matmul(step_inv, inv)
    return out, inv
