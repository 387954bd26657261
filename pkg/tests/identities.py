"""Commutator identities checked on stacks of random group elements."""

import numpy as np

from chevlab.engine import random_elements


def commutator_identity_failures(rep, count, seed=0):
    """Number of triples (x, y, z) violating each of C1..C5."""
    rng = np.random.default_rng(seed)
    (xs, xi), (ys, yi), (zs, zi) = (random_elements(rep, count, rng) for _ in range(3))
    mm = rep.matmul

    def comm(a, ai, b, bi):
        return mm(mm(mm(a, b), ai), bi)

    def conj(a, ai, b):  # a b a^-1
        return mm(mm(a, b), ai)

    def inv_comm(a, ai, b, bi):
        return mm(mm(mm(b, a), bi), ai)

    def eq(p, q):
        return int((~(p == q).all(axis=(1, 2))).sum())

    yz, yzi = mm(ys, zs), mm(zi, yi)
    xy, xyi = mm(xs, ys), mm(yi, xi)
    c1 = eq(comm(xs, xi, yz, yzi), mm(comm(xs, xi, ys, yi), conj(ys, yi, comm(xs, xi, zs, zi))))
    c2 = eq(comm(xy, xyi, zs, zi), mm(conj(xs, xi, comm(ys, yi, zs, zi)), comm(xs, xi, zs, zi)))
    yzc, yzci = conj(ys, yi, zs), conj(ys, yi, zi)
    x_y, x_yi = conj(yi, ys, xs), conj(yi, ys, xi)
    c3 = eq(comm(xs, xi, yzc, yzci), conj(ys, yi, comm(x_y, x_yi, zs, zi)))
    yxc, yxci = conj(ys, yi, xs), conj(ys, yi, xi)
    z_y, z_yi = conj(yi, ys, zs), conj(yi, ys, zi)
    c4 = eq(comm(yxc, yxci, zs, zi), conj(ys, yi, comm(xs, xi, z_y, z_yi)))
    c5 = eq(comm(ys, yi, xs, xi), inv_comm(xs, xi, ys, yi))
    return {"C1": c1, "C2": c2, "C3": c3, "C4": c4, "C5": c5}
