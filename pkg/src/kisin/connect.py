"""Connecting constructions on Kisin varieties and the certificate graph.

Every set handled here is a set of lattices of one fixed determinant, so it
is determined by a set of vertex classes of a single d-parity.  Balls are
always reported with a vertex centre and the largest radius actually
attained by a lattice, which makes their point sets comparable exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .gf import FieldElement
from .errors import ConstraintEmpty, DetMismatch, MembershipLost, NoWitness, PreconditionViolated
from .lattice import Lattice, VertexClass, hnf_columns, lattice_sum, neighbors, vertex_dist
from .phimod import PhiModule, fixed_point
from .series import frac_str
from .tree import BuildingPoint, as_point, ball, dist, direction, midpoint, on_geodesic, point_between
from .variety import Cochar, KisinPoint, is_member, nearest_Q, solve_det_classes


# -- balls ------------------------------------------------------------------------

@dataclass(frozen=True)
class BallDescription:
    """Lattices of determinant valuation ``det_class`` whose class lies within
    ``radius`` of ``center``."""

    center: BuildingPoint
    radius: Fraction
    det_class: int
    steps: tuple = dc_field(default=(), compare=False)

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("negative radius")

    def classes(self) -> list[VertexClass]:
        return ball(self.center, self.radius, parity=self.det_class)

    def points(self) -> list[Lattice]:
        return sorted(v.lattice(self.det_class) for v in self.classes())

    def contains(self, L: Lattice) -> bool:
        return L.detval == self.det_class and dist(L.vertex(), self.center) <= self.radius

    def to_json(self):
        return {"center": self.center.to_json(), "radius": frac_str(self.radius), "det_class": self.det_class}


class _Empty:
    """The empty lattice set."""

    def classes(self):
        return []

    def points(self):
        return []

    def contains(self, L):
        return False

    def __bool__(self):
        return False

    def __repr__(self):
        return "Empty"

    def to_json(self):
        return None


Empty = _Empty()


def _largest_with_parity(limit, parity: int) -> int:
    """Largest integer k <= limit with k = parity (mod 2); may be negative."""
    k = math.floor(limit)
    if (k - parity) % 2:
        k -= 1
    return k


def refine(center, radius, det_class: int):
    """Vertex centre and attained integer radius describing the same lattice set.

    For an interior centre at offsets t, 1 - t from the edge ends, a vertex
    leaving through end e sits at distance off_e + k; the end that attains
    the largest admissible distance becomes the centre.
    """
    center = as_point(center)
    radius = Fraction(radius)
    best = None
    for e, off in center.endpoints():
        k = _largest_with_parity(radius - off, (det_class - e.parity) % 2)
        if k >= 0 and (best is None or off + k > best[0]):
            best = (off + k, e, k)
    if best is None:
        return Empty
    return BallDescription(BuildingPoint(best[1]), Fraction(best[2]), det_class)


def two_ball_reduce(x1, r1, x2, r2, det_class: int):
    """Lattices L with det valuation ``det_class``, d(L, x1) <= r1, d(L, x2) <= r2.

    The metric intersection of two balls in a tree is the ball around the
    point y of [x1, x2] at distance (D + r1 - r2)/2 from x1, of radius
    (r1 + r2 - D)/2; the lattice set is then refined to a vertex centre.
    """
    x1, x2 = as_point(x1), as_point(x2)
    r1, r2 = Fraction(r1), Fraction(r2)
    D = dist(x1, x2)
    if D > r1 + r2 or r1 < 0 or r2 < 0:
        return Empty
    s = min(max((D + r1 - r2) / 2, Fraction(0)), D)
    R = min(r1 - s, r2 - (D - s))
    y = point_between(x1, x2, s)
    return refine(y, R, det_class)


# -- fibre reduction --------------------------------------------------------------

def project_to_image(M: PhiModule, i: int, c: VertexClass, start: VertexClass | None = None):
    """Projection y of c onto the convex set Phi-bar_i(B), and its preimage.

    z -> d(Phi-bar z, c) is convex along geodesics, so greedy descent over
    vertices reaches the minimum; y then sits on the image of one edge at
    that vertex, found by the Gromov product.  Returns (preimage, y, d(c, y)).
    """
    z = start if start is not None else VertexClass.base(c.field)
    fz = dist(M.phibar_vertex(i, z), c)
    while True:
        step = None
        for nb in neighbors(z):
            f = dist(M.phibar_vertex(i, nb), c)
            if f < fz:
                step, fz = nb, f
                break
        if step is None:
            break
        z = step
    X = M.phibar_vertex(i, z)
    best = (Fraction(0), None)
    for nb in neighbors(z):
        Xn = M.phibar_vertex(i, nb)
        g = (dist(X, c) + dist(X, Xn) - dist(Xn, c)) / 2
        if g > best[0]:
            best = (g, nb)
    g, nb = best
    if nb is None:
        return BuildingPoint(z), BuildingPoint(X), fz
    y = point_between(X, M.phibar_vertex(i, nb), g)
    pre = BuildingPoint.on_edge(z, nb, g / M.p)
    return pre, y, dist(y, c)


def pullback_ball(M: PhiModule, i: int, desc, r, det_class: int):
    """Lattices L (det ``det_class``) in factor i with some lattice of ``desc``
    within r of Phi-bar_i(L)."""
    if not desc:
        return Empty
    c, k = desc.center.v, desc.radius
    # parity of image classes is fixed by det_class; adjust r to the parity of d(w, Phi L)
    img_parity = (M.p * det_class + M.delta(i + 1)) % 2
    eps = (img_parity - desc.det_class) % 2
    r_hat = _largest_with_parity(r, eps)
    if r_hat < 0:
        return Empty
    K = k + r_hat
    pre, y, t = project_to_image(M, i, c)
    if K < t:
        return Empty
    out = refine(pre, (K - t) / M.p, det_class)
    if not out:
        return Empty
    return BallDescription(out.center, out.radius, det_class, steps=((y, t),))


def fiber_reduce(M: PhiModule, start: int, first: Lattice, last: Lattice, radii, dets):
    """Slot-2 projection of chains (L_2, ..., L_{s-1}) between fixed ends.

    Slot k lives in factor start + k - 1.  ``radii`` = [r_2, ..., r_s] bound
    d(Phi-bar L_{k-1}, L_k); ``dets`` = [m_2, ..., m_{s-1}] fix determinants.
    Works backwards from the last end, one pull-back through Phi-bar at a
    time, and finishes with a two-ball reduction in slot 2.
    """
    s = len(radii) + 1
    if s < 3 or len(dets) != s - 2:
        raise ValueError("need s >= 3 with r_2..r_s and m_2..m_{s-1}")
    radii = [Fraction(r) for r in radii]
    # slot s-1: d(Phi-bar L_{s-1}, L_s) <= r_s, with L_s a single class
    f_last = start + s - 2  # factor of slot s-1
    pre, y, t = project_to_image(M, f_last, last.vertex())
    if radii[-1] < t:
        return Empty
    desc = refine(pre, (radii[-1] - t) / M.p, dets[-1])
    steps = [(y, t)]
    # slots s-2 .. 2
    for slot in range(s - 2, 1, -1):
        if not desc:
            return Empty
        desc = pullback_ball(M, start + slot - 1, desc, radii[slot - 1], dets[slot - 2])
        if desc:
            steps.extend(desc.steps)
    if not desc:
        return Empty
    img = M.phibar_vertex(start, first.vertex())
    out = two_ball_reduce(img, radii[0], desc.center, desc.radius, dets[0])
    if not out:
        return Empty
    return BallDescription(out.center, out.radius, out.det_class, steps=tuple(steps))


# -- chi families -----------------------------------------------------------------

def _vec_add(a, b):
    return (a[0] + b[0], a[1] + b[1])


def _vec_scale(v, code: int):
    c = FieldElement(v[0].field, code)
    return (v[0].scale(c), v[1].scale(c))


def _vec_shift(v, k):
    return (v[0].shift(k), v[1].shift(k))


def _exact_order(L: Lattice, Y: Lattice, k: int):
    cands = L.columns()
    cands.append(_vec_add(cands[0], cands[1]))
    for w in cands:
        if not Y.contains(_vec_shift(w, k - 1)):
            return w
    raise AssertionError("cyclic quotient without a generator among the basis vectors")


def chi_family(N1: Lattice, N2: Lattice, F=None) -> list[Lattice]:
    """q+1 lattices chi(z), z in F_q then infinity, all of det(N1) and at
    distance d(N1, N2)/2 from the midpoint class, with chi(0) = N1, chi(inf) = N2.

    With Y = N1 cap N2 = u^k (N1 + N2) both quotients N_j / Y are cyclic of
    length k; for generators w1, w2 the family is Y + <w1 + z w2>.
    """
    if N1.detval != N2.detval:
        raise DetMismatch(f"det valuations {N1.detval} and {N2.detval}")
    F = F or N1.field
    if N1 == N2:
        return [N1] * (F.q + 1)
    k = vertex_dist(N1.vertex(), N2.vertex()) // 2
    Y = lattice_sum(N1, N2).scaled(k)
    w1 = _exact_order(N1, Y, k)
    w2 = _exact_order(N2, Y, k)
    base = Y.columns()
    out = [hnf_columns(base + [_vec_add(w1, _vec_scale(w2, z))]) for z in range(F.q)]
    inf = hnf_columns(base + [w2])
    if inf != N2:
        raise AssertionError("limit at infinity is not N2")
    out.append(inf)
    return out


# -- witnesses, Q-vertices, hubs ----------------------------------------------------

@dataclass
class Context:
    """Per-instance data shared by the constructions: fixed point, determinant
    classes, nearest admissible vertices Q_i."""

    M: PhiModule
    nu: Cochar
    s: list
    P: list
    Q: list

    @classmethod
    def of(cls, M: PhiModule, nu: Cochar) -> "Context":
        s = solve_det_classes(M, nu)
        if s is None:
            raise ConstraintEmpty("determinant classes are not integral")
        P = fixed_point(M).P
        Q = [nearest_Q(P[i], s[i]) for i in range(M.n)]
        return cls(M, nu, s, P, Q)


def witness_index(M: PhiModule, x, ctx: Context | None = None) -> int:
    """Smallest i with P_i on the geodesic [M_i, Phi-bar(M_{i-1})]."""
    P = ctx.P if ctx is not None else fixed_point(M).P
    for i in range(M.n):
        img = M.phibar_vertex(i - 1, x[i - 1].vertex())
        if on_geodesic(P[i], x[i].vertex(), img):
            return i
    raise NoWitness("no factor has P_i between M_i and the image of M_{i-1}")


def construct_MQ(M: PhiModule, nu: Cochar, i: int, ctx: Context | None = None) -> KisinPoint:
    """The tuple M(Q_i): slot i is the Q_i lattice, slot j the lattice on
    [Q_j, Phi-bar(slot j-1)] within r_j of the image and closest to Q_j."""
    ctx = ctx or Context.of(M, nu)
    n = M.n
    slots = {i: ctx.Q[i].lattice(ctx.s[i])}
    for step in range(1, n):
        j = (i + step) % n
        Qj = ctx.Q[j]
        X = M.phibar_vertex(j - 1, slots[(j - 1) % n].vertex())
        D = vertex_dist(Qj, X)
        k = max(0, D - nu.r[j])
        k += k % 2
        if k > D:
            raise ConstraintEmpty(f"slot {j}: no admissible lattice on [Q_{j}, image]")
        # vertices on the geodesic at even distance from Q_j carry det s_j
        from .tree import geodesic_vertex

        slots[j] = geodesic_vertex(Qj, X, k).lattice(ctx.s[j])
    return KisinPoint(slots[j] for j in range(n))


# -- the main step --------------------------------------------------------------------

def _extend_away(start: VertexClass, anchor: VertexClass, steps: int, prefer) -> VertexClass:
    """Walk ``steps`` edges from start, each step moving away from anchor,
    preferring to head toward the points in ``prefer`` in order."""
    cur = start
    for _ in range(steps):
        base = vertex_dist(cur, anchor)
        nxt = None
        for target in prefer:
            if dist(cur, target) > 0:
                cand = direction(cur, target)
                if vertex_dist(cand, anchor) > base:
                    nxt = cand
                    break
        if nxt is None:
            for nb in neighbors(cur):
                if vertex_dist(nb, anchor) > base:
                    nxt = nb
                    break
        cur = nxt
    return cur


def mainstep_family(M: PhiModule, nu: Cochar, x, i: int, Ni: Lattice, ctx: Context | None = None) -> list[KisinPoint]:
    """q+1 member tuples joining x (at z = 0) to a tuple with slot i = Ni (at infinity).

    Slot i runs through chi(M_i, N_i).  While Phi-bar carries the midpoint
    y_j onto [Q_{j+1}, M_{j+1}], slot j+1 also moves: it runs through the chi
    family from M_{j+1} to the vertex z_{j+1} that makes the image midpoint
    the centre of [z_{j+1}, M_{j+1}]; for each parameter the first member
    within r_{j+1} of the image of slot j is taken.
    """
    ctx = ctx or Context.of(M, nu)
    n, F = M.n, M.field
    q = F.q
    x = KisinPoint(x)
    Mi = x[i]
    if Ni.detval != Mi.detval:
        raise PreconditionViolated("det N_i differs from det M_i")
    img = M.phibar_vertex(i - 1, x[i - 1].vertex())
    if not on_geodesic(ctx.P[i], Mi.vertex(), img):
        raise PreconditionViolated(f"{i} is not a witness index")
    if Ni == Mi:
        return [x] * (q + 1)
    y = midpoint(Mi.vertex(), Ni.vertex())
    if not on_geodesic(y, ctx.P[i], Mi.vertex()):
        raise PreconditionViolated("midpoint of [N_i, M_i] is not on [P_i, M_i]")
    y = y.v
    slots = {i: chi_family(Mi, Ni, F)}
    j = i
    while True:
        nj = (j + 1) % n
        if nj == i:
            break
        yn = M.phibar_vertex(j, y)
        Mn = x[nj].vertex()
        if not on_geodesic(yn, ctx.Q[nj], Mn):
            break
        K = vertex_dist(Mn, yn)
        Z = _extend_away(yn, Mn, K, [ctx.Q[nj], ctx.P[nj]])
        chi = chi_family(x[nj], Z.lattice(x[nj].detval), F)
        column = []
        for idx in range(q + 1):
            if idx == 0 or K == 0:
                column.append(chi[0])
                continue
            img = M.phibar_vertex(j, slots[j][idx].vertex())
            pick = None
            for w in range(q + 1):
                if vertex_dist(chi[w].vertex(), img) <= nu.r[nj]:
                    pick = chi[w]
                    break
            if pick is None:
                raise MembershipLost(f"slot {nj}: no family member within r of the image")
            column.append(pick)
        slots[nj] = column
        j, y = nj, yn
    out = []
    for idx in range(q + 1):
        out.append(KisinPoint(slots[k][idx] if k in slots else x[k] for k in range(n)))
    for t in out:
        res = is_member(M, nu, t)
        if not res:
            raise MembershipLost(f"constructed tuple fails: {res.reason}")
    return out


def chi_targets(M: PhiModule, nu: Cochar, x, i: int, R, ctx: Context) -> list[Lattice]:
    """Targets N_i for the main step from x at slot i: matched determinant,
    midpoint of [N_i, M_i] on [P_i, M_i], and d(N_i, P_i) <= R."""
    Mi = x[i]
    out = []
    for v in ball(ctx.P[i], R, parity=Mi.detval):
        if v == Mi.vertex():
            continue
        y = midpoint(Mi.vertex(), v)
        if on_geodesic(y, ctx.P[i], Mi.vertex()):
            out.append(v.lattice(Mi.detval))
    return out


# -- certificate graph ------------------------------------------------------------------

RULES = ("single", "chi", "mq")
TAGS = {"single": "single-coordinate", "chi": "chi-clique", "mq": "mq-hub"}


@dataclass
class CertGraph:
    nodes: list
    edges: list  # (i, j, tag) with i < j
    certs: list  # replay data aligned with edges

    def to_json(self, comps=None):
        out = {
            "nodes": list(self.nodes),
            "edges": [[a, b, t] for a, b, t in self.edges],
            "certificates": self.certs,
        }
        out["components"] = comps if comps is not None else components(self)
        return out

    def to_dot(self) -> str:
        lines = ["graph certificates {"]
        for v in self.nodes:
            lines.append(f"  n{v};")
        for a, b, t in self.edges:
            lines.append(f'  n{a} -- n{b} [label="{t}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


class _Edges:
    def __init__(self):
        self.seen = {}

    def add(self, a, b, tag, cert):
        if a == b:
            return
        a, b = min(a, b), max(a, b)
        key = (a, b, tag)
        if key not in self.seen:
            self.seen[key] = cert

    def items(self):
        keys = sorted(self.seen)
        return keys, [self.seen[k] for k in keys]


def build_graph(points, M: PhiModule, nu: Cochar, rules=RULES, R=None) -> CertGraph:
    """Certificate graph on member points (ids are list positions)."""
    from .variety import radius_bound

    rules = set(rules)
    bad = rules - set(RULES)
    if bad:
        raise ValueError(f"unknown rules {sorted(bad)}")
    pts = [KisinPoint(x) for x in points]
    index = {x.key(): k for k, x in enumerate(pts)}
    n = M.n
    E = _Edges()
    if "single" in rules:
        for j in range(n):
            groups: dict = {}
            for k, x in enumerate(pts):
                rest = tuple(x[t].key() for t in range(n) if t != j)
                groups.setdefault(rest, []).append(k)
            for ids in groups.values():
                for a in range(len(ids)):
                    for b in range(a + 1, len(ids)):
                        E.add(ids[a], ids[b], TAGS["single"], {"slot": j})
    ctx = None
    if ("chi" in rules or "mq" in rules) and pts:
        ctx = Context.of(M, nu)
    if "chi" in rules and pts:
        R = R or radius_bound(M, nu)
        for k, x in enumerate(pts):
            i = witness_index(M, x, ctx)
            for N in chi_targets(M, nu, x, i, R[i], ctx):
                fam = mainstep_family(M, nu, x, i, N, ctx)
                ids = sorted({index[t.key()] for t in fam})
                cert = {"seed": k, "slot": i, "target": N.to_json()}
                for a in range(len(ids)):
                    for b in range(a + 1, len(ids)):
                        E.add(ids[a], ids[b], TAGS["chi"], cert)
    if "mq" in rules and pts:
        for i in range(n):
            try:
                hub = construct_MQ(M, nu, i, ctx)
            except ConstraintEmpty:
                continue
            h = index.get(hub.key())
            if h is None:
                continue
            for k, x in enumerate(pts):
                for j in range(n):
                    if x[j] == hub[j]:
                        E.add(k, h, TAGS["mq"], {"hub": i, "slot": j})
                        break
    keys, certs = E.items()
    return CertGraph(list(range(len(pts))), keys, certs)


def components(g: CertGraph) -> list[list[int]]:
    parent = {v: v for v in g.nodes}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for a, b, _ in g.edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    comps: dict = {}
    for v in g.nodes:
        comps.setdefault(find(v), []).append(v)
    return sorted((sorted(c) for c in comps.values()), key=lambda c: c[0])


def replay_edge(points, M: PhiModule, nu: Cochar, edge, cert, ctx: Context | None = None) -> bool:
    """Re-derive one edge from its certificate."""
    a, b, tag = edge
    x, y = KisinPoint(points[a]), KisinPoint(points[b])
    if not (is_member(M, nu, x) and is_member(M, nu, y)):
        return False
    n = M.n
    if tag == TAGS["single"]:
        j = cert["slot"]
        return all(x[t] == y[t] for t in range(n) if t != j)
    ctx = ctx or Context.of(M, nu)
    if tag == TAGS["chi"]:
        seed = KisinPoint(points[cert["seed"]])
        N = Lattice.from_json(M.field, cert["target"])
        fam = {t.key() for t in mainstep_family(M, nu, seed, cert["slot"], N, ctx)}
        return x.key() in fam and y.key() in fam
    if tag == TAGS["mq"]:
        hub = construct_MQ(M, nu, cert["hub"], ctx)
        j = cert["slot"]
        other = y if hub.key() == x.key() else x
        return hub.key() in (x.key(), y.key()) and other[j] == hub[j]
    return False
