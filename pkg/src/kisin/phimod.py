"""Rank-2 etale phi-modules split into n factors, and their action on trees.

Factors are indexed 0..n-1.  The semilinear map Phi_i sends factor i to
factor i+1 (mod n) and is ``x -> A[i+1] * phi(x)``, so ``A[0]`` closes the
cycle.  The composite Phi_{n-1} o ... o Phi_0 on factor 0 is
``x -> B * phi^n(x)`` with ``B = A[0] phi(A[n-1]) ... phi^{n-1}(A[1])``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .errors import FixedPointInconsistent
from .gf import GF, FieldElement, field
from .lattice import Lattice, Mat2, VertexClass, hnf
from .series import DEFAULT_PREC, LaurentElement
from .tree import BuildingPoint, dist, point_between, point_on_geodesic


class PhiModule:
    def __init__(self, F: GF, A: list[Mat2], standard: dict | None = None):
        if not A:
            raise ValueError("need at least one factor")
        for M in A:
            if M.field != F:
                raise ValueError("matrix entries over the wrong field")
            if M.det().is_zero():
                raise ValueError("A_i must be invertible over F_q((u))")
        self.field = F
        self.p = F.p
        self.A = list(A)
        self.n = len(A)
        # parameters when built by standard_module; used to certify simplicity
        self.standard = standard
        self._cache: dict = {}

    def delta(self, i: int) -> int:
        """Valuation of det A[i]."""
        return self.A[i % self.n].det().valuation()

    def phi_apply(self, i: int, L: Lattice) -> Lattice:
        """Phi_i(phi^* L) as a lattice in factor i+1."""
        key = (i % self.n, L.key())
        out = self._cache.get(key)
        if out is None:
            out = hnf(self.A[(i + 1) % self.n] @ L.basis().phi())
            self._cache[key] = out
        return out

    def phibar_vertex(self, i: int, v: VertexClass) -> VertexClass:
        return self.phi_apply(i, v.lattice()).vertex()

    def phibar(self, i: int, x) -> BuildingPoint:
        if isinstance(x, VertexClass):
            x = BuildingPoint(x)
        if x.w is None:
            return BuildingPoint(self.phibar_vertex(i, x.v))
        a, b = self.phibar_vertex(i, x.v), self.phibar_vertex(i, x.w)
        return point_on_geodesic(a, b, self.p * x.t)

    def phibar_chain(self, start: int, x, steps: int):
        for k in range(steps):
            x = self.phibar(start + k, x)
        return x

    def composite_matrix(self) -> Mat2:
        B = self.A[0]
        for k in range(1, self.n):
            B = B @ self.A[self.n - k].subst(self.p**k)
        return B

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "m_ext": self.field.m,
            "n": self.n,
            "A": [M.to_json() for M in self.A],
        }

    @classmethod
    def from_json(cls, d: dict, F: GF | None = None) -> "PhiModule":
        if F is None:
            F = field(d["p"], d.get("m_ext", 1))
        A = [Mat2.from_json(F, rows) for rows in d["A"]]
        if "n" in d and d["n"] != len(A):
            raise ValueError(f"n={d['n']} but {len(A)} matrices given")
        return cls(F, A)

    def __repr__(self):
        return f"PhiModule(p={self.p}, q={self.field.q}, n={self.n})"


def phi_apply(M: PhiModule, i: int, L: Lattice) -> Lattice:
    return M.phi_apply(i, L)


def phibar(M: PhiModule, i: int, x) -> BuildingPoint:
    return M.phibar(i, x)


def standard_module(p: int, m_ext: int, n: int, s: int, alpha=1) -> PhiModule:
    """A[0] = [[0, alpha u^s], [1, 0]], A[i] = 1 otherwise.

    The composite then sends e1 -> e2 and e2 -> alpha u^s e1.
    """
    F = field(p, m_ext)
    a = alpha if isinstance(alpha, FieldElement) else F(alpha)
    if a.is_zero():
        raise ValueError("alpha must be nonzero")
    zero = LaurentElement.zero(F)
    A0 = Mat2(zero, LaurentElement.monomial(F, s, a.code), LaurentElement.one(F), zero)
    A = [A0] + [Mat2.identity(F) for _ in range(n - 1)]
    return PhiModule(F, A, standard={"p": p, "m_ext": m_ext, "n": n, "s": s, "alpha": a.code})


# -- fixed point ----------------------------------------------------------------

@dataclass
class FixedPoint:
    P: list[BuildingPoint]
    base_distance: Fraction  # d(x, Phi~ x) for the base vertex x of factor 0
    offset: Fraction  # d(x, P_0)

    def to_json(self):
        from .series import frac_str

        return {
            "P": [x.to_json() for x in self.P],
            "base_distance": frac_str(self.base_distance),
            "offset": frac_str(self.offset),
        }


def fixed_point(M: PhiModule) -> FixedPoint:
    """The Phi-bar-fixed point.

    P_0 lies on [x, Phi~ x] at distance d(x, Phi~ x) / (p^n + 1) from the
    base vertex x, since Phi~ scales distances to P_0 by p^n.
    """
    x = VertexClass.base(M.field)
    y = M.phibar_chain(0, BuildingPoint(x), M.n)
    L = dist(x, y)
    t = L / (M.p**M.n + 1)
    P0 = point_between(x, y, t)
    P = [P0]
    for i in range(M.n - 1):
        P.append(M.phibar(i, P[-1]))
    back = M.phibar(M.n - 1, P[-1])
    if back != P0:
        raise FixedPointInconsistent(f"Phi-bar moves the candidate {P0} to {back}")
    return FixedPoint(P, L, t)


def apartment_coordinate(x: BuildingPoint) -> Fraction | None:
    """Signed position on the standard apartment {span(u^k e1, e2)}; None off it."""
    for e, _ in x.endpoints():
        if not e.f.is_zero():
            return None
    if x.w is None:
        return Fraction(x.v.d)
    lo, hi = sorted([x.v, x.w], key=lambda v: v.d)
    t = x.t if lo == x.v else 1 - x.t
    return lo.d + t


# -- stable lines ---------------------------------------------------------------

@dataclass
class StableLine:
    """Line spanned by slope*e1 + e2 (slope None: the line of e1)."""

    slope: LaurentElement | None
    ext_degree: int
    exact: bool

    @property
    def slope_valuation(self):
        if self.slope is None:
            return None
        return self.slope.valuation() if not self.slope.is_zero() else float("inf")


@dataclass
class NotFoundUpToBounds:
    prec: int
    max_ext: int

    def __bool__(self):
        return False


@dataclass
class Simple:
    reason: str


@dataclass
class NotSimple:
    witness: StableLine


@dataclass
class UnknownUpToBounds:
    prec: int
    max_ext: int


def _embedding(F: GF, G: GF):
    """Code map F -> G sending the generator of F to a root of its modulus."""
    if F.m == 1:
        return lambda c: c
    root = None
    for r in range(G.q):
        acc = 0
        for coef in reversed(F.modulus):
            acc = G.add(G.mul(acc, r), G.from_int(coef))
        if acc == 0:
            root = r
            break
    if root is None:
        raise ValueError(f"{F} does not embed in {G}")
    powers = [G.pow(root, k) for k in range(F.m)]

    def emb(c):
        acc = 0
        for k, dgt in enumerate(F.digits(c)):
            if dgt:
                acc = G.add(acc, G.mul(G.from_int(dgt), powers[k]))
        return acc

    return emb


def _lift(x: LaurentElement, G: GF, emb) -> LaurentElement:
    return LaurentElement(G, x.val, [emb(c) for c in x.coeffs])


def _v(x: LaurentElement):
    return x.val if x.coeffs else None


def _lead_roots(G: GF, c2: int, c1: int, c0: int, limit: int):
    roots = []
    for c in range(1, G.q):
        val = G.add(G.add(G.mul(c2, G.mul(c, c)), G.mul(c1, c)), c0)
        if val == 0:
            roots.append(c)
            if len(roots) >= limit:
                break
    return roots


def _search(G, P, alpha2, beta, gamma, delta, prev, first, terms, prec, out, budget):
    """Depth-first Newton-polygon search for f with
    alpha2 f phi~(f) + beta f + gamma phi~(f) + delta = 0,  v(f) > prev."""
    if budget[0] <= 0:
        return
    budget[0] -= 1
    if delta.is_zero():
        out.append((dict(terms), True))
        return
    if first is not None and prev - first >= prec:
        out.append((dict(terms), False))
        return
    va, vb, vg, vd = _v(alpha2), _v(beta), _v(gamma), _v(delta)
    lines = []  # (slope in w, intercept)
    if va is not None:
        lines.append(("a", P + 1, va))
    if vb is not None:
        lines.append(("b", 1, vb))
    if vg is not None:
        lines.append(("g", P, vg))
    lines.append(("d", 0, vd))
    cands = set()
    for i in range(len(lines)):
        for j in range(i + 1, len(lines)):
            _, s1, c1 = lines[i]
            _, s2, c2 = lines[j]
            if s1 != s2 and (c2 - c1) % (s1 - s2) == 0:
                cands.add((c2 - c1) // (s1 - s2))
    for w in sorted(cands):
        if prev is not None and w <= prev:
            continue
        vals = {name: s * w + c for name, s, c in lines}
        low = min(vals.values())
        hit = [name for name in vals if vals[name] == low]
        if len(hit) < 2:
            continue
        k2 = alpha2.coeff(low - (P + 1) * w) if "a" in hit else 0
        k1 = 0
        if "b" in hit:
            k1 = G.add(k1, beta.coeff(low - w))
        if "g" in hit:
            k1 = G.add(k1, gamma.coeff(low - P * w))
        k0 = delta.coeff(low) if "d" in hit else 0
        for c in _lead_roots(G, k2, k1, k0, limit=4):
            mono = LaurentElement.monomial(G, w, c)
            mono_p = LaurentElement.monomial(G, P * w, c)
            nbeta = beta + alpha2 * mono_p
            ngamma = gamma + alpha2 * mono
            ndelta = alpha2 * mono * mono_p + beta * mono + gamma * mono_p + delta
            terms[w] = c
            _search(G, P, alpha2, nbeta, ngamma, ndelta, w, w if first is None else first, terms, prec, out, budget)
            del terms[w]


def stable_lines(M: PhiModule, prec: int = DEFAULT_PREC, max_ext: int = 4, budget: int = 2000):
    """Lines over F_{q^k}((u)), k <= max_ext, stable under the composite.

    A line spanned by f e1 + e2 is stable iff
    f (B21 phi~(f) + B22) = B11 phi~(f) + B12 with phi~ : u -> u^{p^n}.
    A slope is reported ``exact`` when the residual equation vanishes
    identically, otherwise it is a solution modulo relative precision ``prec``.
    """
    F = M.field
    P = M.p**M.n
    B = M.composite_matrix()
    for k in range(1, max_ext + 1):
        if F.q**k > 1024:
            break
        G = F if k == 1 else field(F.p, F.m * k)
        emb = _embedding(F, G)
        b11, b12, b21, b22 = (_lift(x, G, emb) for x in B.entries())
        found = []
        if b21.is_zero():
            found.append(StableLine(None, k, True))
        out: list = []
        _search(G, P, b21, b22, -b11, -b12, None, None, {}, prec, out, [budget])
        for terms, exact in out:
            found.append(StableLine(LaurentElement.from_terms(G, terms), k, exact))
        if found:
            return found
    return NotFoundUpToBounds(prec, max_ext)


def is_simple(M: PhiModule, prec: int = DEFAULT_PREC, max_ext: int = 4):
    res = stable_lines(M, prec, max_ext)
    if res:
        return NotSimple(res[0])
    std = M.standard
    if std is not None and std["s"] % (M.p ** M.n + 1) != 0:
        return Simple("standard form with p^n + 1 not dividing s")
    return UnknownUpToBounds(prec, max_ext)
