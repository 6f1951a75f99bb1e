"""Kisin varieties C_nu(A): membership, determinant classes and enumeration.

A point is a tuple of lattices (M_0, ..., M_{n-1}).  With (a_i, b_i) the
elementary divisors of Phi_{i-1}(phi^* M_{i-1}) relative to M_i, the tuple
is a point iff a_i + b_i = m_i and a_i - b_i <= r_i for every i.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .errors import AmbiguousQ, EmptyDetClass, InternalDisagreement
from .lattice import Lattice, VertexClass, elementary_divisors, vertex_dist
from .phimod import FixedPoint, PhiModule, fixed_point
from .tree import BuildingPoint, ball, dist

# number of candidates on which both membership formulations were compared
BICONDITIONAL_CHECKS = [0]


@dataclass(frozen=True)
class Cochar:
    pairs: tuple

    def __init__(self, pairs):
        pairs = tuple((int(a), int(b)) for a, b in pairs)
        for a, b in pairs:
            if a < b:
                raise ValueError(f"({a}, {b}) is not dominant")
        object.__setattr__(self, "pairs", pairs)

    @property
    def n(self) -> int:
        return len(self.pairs)

    @property
    def r(self) -> list[int]:
        return [a - b for a, b in self.pairs]

    @property
    def m(self) -> list[int]:
        return [a + b for a, b in self.pairs]

    def to_json(self):
        return [list(x) for x in self.pairs]


class KisinPoint(tuple):
    """Tuple of Hermite-form lattices, one per factor."""

    def key(self):
        return tuple(L.key() for L in self)

    def classes(self) -> list[VertexClass]:
        return [L.vertex() for L in self]

    def to_json(self):
        return [L.to_json() for L in self]

    @classmethod
    def from_json(cls, F, data) -> "KisinPoint":
        return cls(Lattice.from_json(F, d) for d in data)


@dataclass
class Member:
    profile: list


@dataclass
class NotMember:
    reason: str

    def __bool__(self):
        return False


def _check_n(M: PhiModule, nu: Cochar):
    if M.n != nu.n:
        raise ValueError(f"module has {M.n} factors, cocharacter {nu.n}")


def solve_det_classes(M: PhiModule, nu: Cochar) -> list[int] | None:
    """Determinant valuations s_i forced on every point, or None if not integral.

    From a_i + b_i = detval(Phi_{i-1} M_{i-1}) - detval(M_i) = m_i:
    s_i = p s_{i-1} + delta_i - m_i with delta_i = v(det A_i).
    """
    _check_n(M, nu)
    n, p = M.n, M.p
    m = nu.m
    # s_i = p^i s_0 + c_i for i >= 1
    c = [0] * n
    for i in range(1, n):
        c[i] = p * c[i - 1] + M.delta(i) - m[i]
    s0 = Fraction(p * c[n - 1] + M.delta(0) - m[0], 1 - p**n)
    if s0.denominator != 1:
        return None
    s0 = int(s0)
    return [p**i * s0 + c[i] for i in range(n)]


def radius_bound(M: PhiModule, nu: Cochar) -> list[Fraction]:
    """R_j with d(M_j, P_j) <= R_j on every point.

    From p d(M_{j}, P_{j}) = d(Phi M_j, P_{j+1}) <= r_{j+1} + d(M_{j+1}, P_{j+1})
    iterated once around the cycle.
    """
    _check_n(M, nu)
    n, p = M.n, M.p
    r = nu.r
    out = []
    for j in range(n):
        num = sum(p ** (n - k) * r[(j + k) % n] for k in range(1, n + 1))
        out.append(Fraction(num, p**n - 1))
    return out


def is_member(M: PhiModule, nu: Cochar, x) -> Member | NotMember:
    """Membership by divisor profile, cross-checked against the building form
    (tree distance to the image class plus the determinant identity)."""
    _check_n(M, nu)
    n = M.n
    profile = []
    divisor_ok = True
    building_ok = True
    reason = ""
    for i in range(n):
        prev = x[(i - 1) % n]
        src = M.phi_apply(i - 1, prev)
        a, b = elementary_divisors(src, x[i])
        profile.append((a, b))
        ok_i = a + b == nu.m[i] and a - b <= nu.r[i]
        d = vertex_dist(x[i].vertex(), M.phibar_vertex(i - 1, prev.vertex()))
        det_ok = x[i].detval == M.p * prev.detval + M.delta(i) - nu.m[i]
        ok_b = d <= nu.r[i] and det_ok
        if ok_i != ok_b:
            raise InternalDisagreement(f"factor {i}: divisors {(a, b)} vs distance {d}, det {det_ok}")
        if not ok_i and divisor_ok:
            reason = f"factor {i}: divisors {(a, b)} outside m={nu.m[i]}, r={nu.r[i]}"
        divisor_ok &= ok_i
        building_ok &= ok_b
    BICONDITIONAL_CHECKS[0] += 1
    if divisor_ok:
        return Member(profile)
    return NotMember(reason)


def nearest_Q(P: BuildingPoint, s: int) -> VertexClass:
    """Closest vertex to P carrying a lattice of determinant valuation s.

    Adjacent vertices have opposite d-parity, so exactly one endpoint of P's
    edge qualifies.
    """
    if P.is_vertex:
        if P.v.parity == s % 2:
            return P.v
        raise AmbiguousQ("P is a vertex of the wrong parity; all q+1 neighbours tie")
    hits = [e for e, _ in P.endpoints() if e.parity == s % 2]
    if len(hits) != 1:
        raise AmbiguousQ(f"{len(hits)} admissible endpoints")
    return hits[0]


@dataclass
class Enumeration:
    s: list
    R: list
    fixed: FixedPoint
    points: list

    def to_json(self):
        from .series import frac_str

        return {
            "s": self.s,
            "R": [frac_str(x) for x in self.R],
            "points": [x.to_json() for x in self.points],
            "count": len(self.points),
        }


def _extend(M, nu, s, fp, R, chain):
    n = M.n
    i = len(chain) - 1
    if i == n - 1:
        if vertex_dist(chain[0], M.phibar_vertex(n - 1, chain[-1])) <= nu.r[0]:
            return [list(chain)]
        return []
    out = []
    j = i + 1
    img = M.phibar_vertex(i, chain[-1])
    for v in ball(img, nu.r[j], parity=s[j]):
        if dist(v, fp.P[j]) <= R[j]:
            chain.append(v)
            out.extend(_extend(M, nu, s, fp, R, chain))
            chain.pop()
    return out


def _from_seed(args):
    M, nu, s, fp, R, seed = args
    return _extend(M, nu, s, fp, R, [seed])


def enumerate_points(M: PhiModule, nu: Cochar, slack: int = 0, jobs: int = 1) -> Enumeration:
    """All F_q-points, by propagating constraints factor by factor.

    Seeds for factor 0 are the vertices within R_0 (+ slack) of P_0; each
    later factor is drawn from the r-ball around the image of the previous
    class.  Results are sorted canonically and membership-verified.
    """
    _check_n(M, nu)
    s = solve_det_classes(M, nu)
    if s is None:
        raise EmptyDetClass("determinant classes are not integral")
    fp = fixed_point(M)
    R = radius_bound(M, nu)
    Rs = [x + slack for x in R]
    seeds = ball(fp.P[0], Rs[0], parity=s[0])
    tasks = [(M, nu, s, fp, Rs, v) for v in seeds]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            chains = [c for part in ex.map(_from_seed, tasks) for c in part]
    else:
        chains = [c for t in tasks for c in _from_seed(t)]
    points = []
    for chain in chains:
        x = KisinPoint(v.lattice(s[i]) for i, v in enumerate(chain))
        res = is_member(M, nu, x)
        if not res:
            raise InternalDisagreement(f"enumerated tuple fails membership: {res.reason}")
        points.append(x)
    points.sort(key=KisinPoint.key)
    return Enumeration(s, R, fp, points)


def window_classes(F, W: int, parity: int | None = None) -> list[VertexClass]:
    """Every class within distance W of the base vertex, listed straight from
    Hermite data (d, f): f is supported on exponents ceil((d - W)/2) .. d - 1."""
    import itertools

    from .series import LaurentElement

    out = []
    for d in range(-W, W + 1):
        if parity is not None and d % 2 != parity % 2:
            continue
        lo = math.ceil((d - W) / 2)
        width = max(d - lo, 0)
        for coeffs in itertools.product(range(F.q), repeat=width):
            v = VertexClass(d, LaurentElement(F, lo, coeffs))
            if vertex_dist(VertexClass.base(F), v) <= W:
                out.append(v)
    return out
