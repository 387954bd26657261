"""Derivation of the frozen representation data (run once, then frozen).

For each root system the root vectors of the Lie algebra are found inside
``gl(n, Q)`` as the weight-homogeneous solutions of an invariance condition:

* A_l: none (the matrix units ``E_ij`` of ``sl(l+1)``),
* C2: the standard symplectic form on ``Q^4``,
* G2: a generic alternating 3-form on ``Q^7``.

They are normalised to a Chevalley basis (``[X_a, X_b] = +-(r+1) X_{a+b}``,
``[X_a, X_-a] = H_a``), the weight basis is checked to span an admissible
lattice (``X`` and ``X^2/2`` integral, ``X^3 = 0``), and the structure
constants of the group commutator formula are read off from integer matrix
products.  ``python -m chevlab.derive`` rewrites the data file.
"""

from __future__ import annotations

import itertools
import json
import sys
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .rootsys import DATA_FILE, KINDS, Root, RootSystem

DATA_VERSION = 1


def _embedding(kind: str):
    """(weights of the basis vectors, image of each simple root), both in a
    common coordinate space; basis ordered by decreasing height."""
    if kind in ("A2", "A3"):
        n = int(kind[1]) + 1
        unit = [tuple(int(i == k) for i in range(n)) for k in range(n)]
        simple = [tuple(unit[k][i] - unit[k + 1][i] for i in range(n)) for k in range(n - 1)]
        return unit, simple
    if kind == "C2":
        weights = [(1, 0), (0, 1), (0, -1), (-1, 0)]
        return weights, [(1, -1), (0, 2)]
    if kind == "G2":
        # f3, e2, e1, e0, f1, f2, e3 of the decomposition 1 + V + V* under sl3
        weights = [(2, 1), (1, 1), (1, 0), (0, 0), (-1, 0), (-1, -1), (-2, -1)]
        return weights, [(1, 0), (0, 1)]
    raise KeyError(kind)


def _image(simple, coords) -> Tuple[int, ...]:
    return tuple(sum(c * s[i] for c, s in zip(coords, simple)) for i in range(len(simple[0])))


def _g2_form():
    names = ["f3", "e2", "e1", "e0", "f1", "f2", "e3"]
    idx = {n: i for i, n in enumerate(names)}
    form: Dict[Tuple[int, int, int], int] = {}

    def put(a, b, c, v):
        for perm in itertools.permutations(range(3)):
            t = tuple(idx[(a, b, c)[p]] for p in perm)
            sign = 1
            for x, y in itertools.combinations(range(3), 2):
                if perm[x] > perm[y]:
                    sign = -sign
            form[t] = form.get(t, 0) + sign * v

    put("e1", "e2", "e3", 1)
    put("f1", "f2", "f3", 1)
    for i in "123":
        put("e0", "e" + i, "f" + i, 1)
    return form


def _raw_root_vector(kind: str, root: Root):
    import sympy as sp

    weights, simple = _embedding(kind)
    shift = _image(simple, root.coords)
    n = len(weights)
    pairs = [
        (i, j)
        for j in range(n)
        for i in range(n)
        if tuple(a + b for a, b in zip(weights[j], shift)) == tuple(weights[i])
    ]
    cs = sp.symbols(f"c0:{len(pairs)}")
    X = sp.zeros(n, n)
    for (i, j), c in zip(pairs, cs):
        X[i, j] = c
    eqs = []
    if kind == "C2":
        omega = sp.zeros(4, 4)
        omega[0, 3] = omega[1, 2] = 1
        omega[3, 0] = omega[2, 1] = -1
        eqs = [e for e in (X.T * omega + omega * X) if e != 0]
    elif kind == "G2":
        form = _g2_form()
        for a, b, c in itertools.product(range(n), repeat=3):
            s = 0
            for k in range(n):
                s += X[k, a] * form.get((k, b, c), 0)
                s += X[k, b] * form.get((a, k, c), 0)
                s += X[k, c] * form.get((a, b, k), 0)
            if s != 0:
                eqs.append(s)
    if eqs:
        (sol,) = sp.linsolve(eqs, cs)
        X = X.subs(dict(zip(cs, sol)))
    free = sorted(X.free_symbols, key=str)
    if len(free) != 1:
        raise RuntimeError(f"{kind} root {root}: root space of dimension {len(free)}")
    return X.subs(free[0], 1)


def chevalley_basis(system: RootSystem) -> Dict[Root, "object"]:
    import sympy as sp

    raw = {r: _raw_root_vector(system.kind, r) for r in system.roots}
    br = lambda a, b: a * b - b * a  # noqa: E731
    basis = {a: raw[a] for a in system.simple}
    for g in sorted(system.positive, key=lambda r: r.height):
        if g in basis:
            continue
        for a in system.simple:
            beta = system.combination(g, a, 1, -1)
            if beta is not None and beta.is_positive and beta in basis:
                r = 0
                while system.combination(beta, a, 1, -(r + 1)) is not None:
                    r += 1
                basis[g] = br(basis[a], basis[beta]) / (r + 1)
                break
    for g in system.positive:
        x, y = basis[g], raw[-g]
        h = br(x, y)
        ratio = _ratio(br(h, x), x)
        basis[-g] = y * sp.Integer(2) / ratio
    _check_chevalley(system, basis)
    return basis


def _ratio(a, b):
    for i in range(b.rows):
        for j in range(b.cols):
            if b[i, j] != 0:
                c = a[i, j] / b[i, j]
                if a != c * b:
                    raise RuntimeError("matrices are not proportional")
                return c
    raise RuntimeError("zero matrix")


def _check_chevalley(system: RootSystem, basis) -> None:
    for a in system.roots:
        for b in system.roots:
            s = system.combination(a, b, 1, 1)
            if s is None or a == -b:
                continue
            r = 0
            while system.combination(b, a, 1, -(r + 1)) is not None:
                r += 1
            n = _ratio(basis[a] * basis[b] - basis[b] * basis[a], basis[s])
            if abs(n) != r + 1:
                raise RuntimeError(f"[X{a}, X{b}] = {n} X{s}, expected +-{r + 1}")


def integral_root_data(system: RootSystem) -> Dict[Root, Tuple[np.ndarray, np.ndarray]]:
    """``root -> (X, X^2/2)`` as integer arrays, so that
    ``x_root(t) = 1 + t X + t^2 X^2/2``."""
    out = {}
    for r, x in chevalley_basis(system).items():
        x2 = x * x / 2
        if any(v != 0 for v in x * x * x):
            raise RuntimeError(f"X{r} is not nilpotent of order 3")
        for m in (x, x2):
            if any(getattr(v, "q", 1) != 1 for v in m):
                raise RuntimeError(f"X{r}: weight lattice not admissible")
        out[r] = (np.array(x.tolist(), dtype=np.int64), np.array(x2.tolist(), dtype=np.int64))
    return out


def _x(data, root, t: int) -> np.ndarray:
    n1, n2 = data[root]
    return np.eye(n1.shape[0], dtype=np.int64) + t * n1 + t * t * n2


def _prod(mats: Sequence[np.ndarray], dim: int) -> np.ndarray:
    out = np.eye(dim, dtype=np.int64)
    for m in mats:
        out = out @ m
    return out


def _unit_position(n1: np.ndarray) -> Tuple[int, int]:
    for (i, j), v in np.ndenumerate(n1):
        if abs(v) == 1:
            return i, j
    raise RuntimeError("root vector without a unit entry")


def commutator_constants(system: RootSystem, data) -> List[list]:
    """Rows ``[alpha, beta, i, j, N]`` of the commutator formula in the
    representation, ordered as in ``RootSystem.commutator_terms``."""
    dim = next(iter(data.values()))[0].shape[0]
    rows = []
    for a in system.roots:
        for b in system.roots:
            if a == b or a == -b:
                continue
            terms = system.commutator_terms(a, b)
            comm = _x(data, a, 1) @ _x(data, b, 1) @ _x(data, a, -1) @ _x(data, b, -1)
            coef: Dict[Tuple[int, int], int] = {}
            for grade in sorted({i + j for i, j, _ in terms}):
                lower = [(i, j, g) for i, j, g in terms if i + j < grade]
                v_inv = _prod([_x(data, g, -coef[i, j]) for i, j, g in reversed(lower)], dim)
                w = v_inv @ comm
                for i, j, g in terms:
                    if i + j == grade:
                        p, q = _unit_position(data[g][0])
                        coef[i, j] = int(w[p, q] * data[g][0][p, q])
            for xi, eta in ((1, 1), (2, 3), (-1, 5)):
                lhs = _x(data, a, xi) @ _x(data, b, eta) @ _x(data, a, -xi) @ _x(data, b, -eta)
                rhs = _prod([_x(data, g, coef[i, j] * xi**i * eta**j) for i, j, g in terms], dim)
                if not np.array_equal(lhs, rhs):
                    raise RuntimeError(f"commutator formula fails for {a}, {b}")
            for i, j, _ in terms:
                rows.append([list(a.coords), list(b.coords), i, j, coef[i, j]])
    return rows


def derive_all() -> dict:
    kinds = {}
    for kind in KINDS:
        system = RootSystem(kind, constants={})
        data = integral_root_data(system)
        kinds[kind] = {
            "dim": int(next(iter(data.values()))[0].shape[0]),
            "roots": {
                ",".join(map(str, r.coords)): {"X": data[r][0].tolist(), "X2": data[r][1].tolist()}
                for r in system.roots
            },
            "constants": commutator_constants(system, data),
        }
    return {"version": DATA_VERSION, "product_order": "height of i*alpha+j*beta, then i", "kinds": kinds}


def main(argv=None) -> int:
    out = Path(__file__).with_name("data") / DATA_FILE
    out.write_text(json.dumps(derive_all(), indent=1, sort_keys=True) + "\n")
    print(f"wrote {out}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
