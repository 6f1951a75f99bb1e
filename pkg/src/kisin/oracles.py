"""Brute-force oracles, independent of the propagation and reduction code.

Membership here is recomputed from the raw definition: the Smith exponents
of g_i^{-1} A_i phi(g_{i-1}) formed as an explicit matrix product.
"""

from __future__ import annotations

import math

from .lattice import Mat2, divisors_matrix
from .series import LaurentElement
from .tree import dist
from .variety import KisinPoint, window_classes


def _inv_hermite(L) -> Mat2:
    F = L.field
    z = LaurentElement.zero(F)
    return Mat2(
        LaurentElement.monomial(F, -L.a),
        -(L.f.shift(-L.a - L.b)),
        z,
        LaurentElement.monomial(F, -L.b),
    )


def relative_position(M, i, prev, cur) -> tuple[int, int]:
    """Smith exponents of cur^{-1} A_i phi(prev) by explicit matrices."""
    h = _inv_hermite(cur) @ (M.A[i % M.n] @ prev.basis().phi())
    return divisors_matrix(h)


def definition_member(M, nu, x) -> bool:
    for i in range(M.n):
        a, b = relative_position(M, i, x[i - 1], x[i])
        if a + b != nu.m[i] or a - b > nu.r[i]:
            return False
    return True


def window_oracle(M, nu, s, fp, R, pad: int = 2):
    """Scan every lattice tuple in per-factor Hermite windows around the base.

    Window i has radius ceil(d(base, P_i) + R_i) + pad; the scan prunes only by
    evaluating the defining conjunction factor by factor.
    """
    from .lattice import VertexClass

    F = M.field
    n = M.n
    base = VertexClass.base(F)
    wins = []
    for i in range(n):
        W = math.ceil(dist(base, fp.P[i]) + R[i]) + pad
        wins.append([v.lattice(s[i]) for v in window_classes(F, W, parity=s[i])])
    found = []

    def rec(chain):
        i = len(chain)
        if i == n:
            a, b = relative_position(M, 0, chain[-1], chain[0])
            if a + b == nu.m[0] and a - b <= nu.r[0]:
                found.append(KisinPoint(chain))
            return
        for L in wins[i]:
            if i > 0:
                a, b = relative_position(M, i, chain[-1], L)
                if a + b != nu.m[i] or a - b > nu.r[i]:
                    continue
            rec(chain + [L])

    rec([])
    found.sort(key=KisinPoint.key)
    return found


def chain_scan(M, start, first, last, radii, dets):
    """Slot-2 lattices of every chain (L_2, ..., L_{s-1}) found by forward scan.

    Each slot is drawn from the r-ball around the image of the previous slot;
    the last fixed end is tested at the end.
    """
    from .tree import ball as _ball

    s = len(radii) + 1
    found = set()

    def rec(slot, prev, head):
        f = start + slot - 2  # factor of the previous slot
        img = M.phibar_vertex(f, prev)
        if slot == s:
            if dist(img, last.vertex()) <= radii[-1]:
                found.add(head)
            return
        for v in _ball(img, radii[slot - 2], parity=dets[slot - 2]):
            if slot == 2 and v in found:
                continue
            rec(slot + 1, v, head if head is not None else v)

    rec(2, first.vertex(), None)
    return sorted(v.lattice(dets[0]) for v in found)


def sandwich(X, a0: int, b0: int):
    """Every lattice L with u^{a0} L <= X <= u^{b0} L (a0 >= b0).

    Writing g for a basis of u^{-a0} X, these are g L' for the Hermite
    lattices L' between u^r O^2 and O^2 of colength r = a0 - b0, i.e.
    (a', r - a', f') with f' a polynomial of degree below a'.
    """
    import itertools

    from .lattice import Lattice, hnf

    F = X.field
    g = X.basis()
    g = Mat2(*(x.shift(-a0) for x in g.entries()))
    r = a0 - b0
    out = []
    for a in range(r + 1):
        for coeffs in itertools.product(range(F.q), repeat=a):
            inner = Lattice(a, r - a, LaurentElement(F, 0, coeffs))
            out.append(hnf(g @ inner.basis()))
    return out


def sandwich_oracle(M, nu, s, fp, R, pad: int = 1):
    """Exhaustive scan by lattice sandwiches, with no tree distances.

    Slot 0 runs over a Hermite window around the base of radius
    ceil(d(base, P_0) + R_0) + pad; each later slot runs over the sandwich of
    the image of the previous one; the cycle is closed by explicit matrices.
    """
    from .lattice import VertexClass, hnf

    F = M.field
    n = M.n
    W = math.ceil(dist(VertexClass.base(F), fp.P[0]) + R[0]) + pad
    found = []

    def rec(chain):
        i = len(chain)
        if i == n:
            a, b = relative_position(M, 0, chain[-1], chain[0])
            if a + b == nu.m[0] and a - b <= nu.r[0]:
                found.append(KisinPoint(chain))
            return
        X = hnf(M.A[i] @ chain[-1].basis().phi())
        a0, b0 = nu.pairs[i]
        for L in sandwich(X, a0, b0):
            rec(chain + [L])

    for v in window_classes(F, W, parity=s[0]):
        rec([v.lattice(s[0])])
    found.sort(key=KisinPoint.key)
    return found
