"""Geometry of the Bruhat-Tits tree of PGL_2(F_q((u))).

Points are vertices (homothety classes) or rational points on edges.  All
distances are exact ``Fraction``s with adjacent vertices at distance 1.
"""

from __future__ import annotations

from collections import deque
from fractions import Fraction
from math import floor

from .errors import OutOfRange
from .gf import GF
from .lattice import VertexClass, elementary_divisors, lattice_sum, neighbors, vertex_dist
from .series import frac_str


class BuildingPoint:
    """A vertex, or the point at distance ``t`` from ``v`` on the edge [v, w].

    Interior points are stored with ``v < w`` (canonical key order), so
    (v, w, t) and (w, v, 1 - t) compare equal.
    """

    __slots__ = ("v", "w", "t")

    def __init__(self, v: VertexClass, w: VertexClass | None = None, t=0):
        self.v, self.w, self.t = v, w, Fraction(t)

    @classmethod
    def vertex(cls, v: VertexClass) -> "BuildingPoint":
        return cls(v)

    @classmethod
    def on_edge(cls, v: VertexClass, w: VertexClass, t) -> "BuildingPoint":
        t = Fraction(t)
        if t == 0:
            return cls(v)
        if t == 1:
            return cls(w)
        if not 0 < t < 1:
            raise OutOfRange(f"edge offset {t} outside [0, 1]")
        if w < v:
            v, w, t = w, v, 1 - t
        return cls(v, w, t)

    @property
    def is_vertex(self) -> bool:
        return self.w is None

    @property
    def field(self) -> GF:
        return self.v.field

    def endpoints(self):
        """(vertex, distance-from-self) pairs for the carrier edge or the vertex itself."""
        if self.w is None:
            return [(self.v, Fraction(0))]
        return [(self.v, self.t), (self.w, 1 - self.t)]

    def key(self):
        if self.w is None:
            return (self.v.key(), None, Fraction(0))
        return (self.v.key(), self.w.key(), self.t)

    def __eq__(self, other):
        return isinstance(other, BuildingPoint) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        if self.w is None:
            return f"BuildingPoint({self.v!r})"
        return f"BuildingPoint({self.v!r} -> {self.w!r}, t={self.t})"

    def to_json(self):
        if self.w is None:
            return {"vertex": self.v.to_json()}
        return {"edge": [self.v.to_json(), self.w.to_json()], "t": frac_str(self.t)}

    @classmethod
    def from_json(cls, F: GF, d) -> "BuildingPoint":
        if "vertex" in d:
            return cls(VertexClass.from_json(F, d["vertex"]))
        v, w = (VertexClass.from_json(F, x) for x in d["edge"])
        return cls.on_edge(v, w, Fraction(d["t"]))


def as_point(x) -> BuildingPoint:
    return x if isinstance(x, BuildingPoint) else BuildingPoint(x)


def dist(x, y) -> Fraction:
    x, y = as_point(x), as_point(y)
    if x.w is None and y.w is None:
        return Fraction(vertex_dist(x.v, y.v))
    if x.w is not None and y.w is not None and x.v == y.v and x.w == y.w:
        return abs(x.t - y.t)
    if x.w is None:
        x, y = y, x
    # x is interior and y lies off x's edge (or is a vertex): leave through an endpoint
    return min(off + dist(BuildingPoint(e), y) for e, off in x.endpoints())


def geodesic_vertex(v: VertexClass, w: VertexClass, k: int) -> VertexClass:
    """The vertex at distance k from v on [v, w].

    With L_w scaled so that L_v / L_w is cyclic of length n = d(v, w), the
    geodesic is L_w + u^k L_v, k = 0..n.
    """
    Lv, Lw = v.lattice(), w.lattice()
    big, small = elementary_divisors(Lw, Lv)
    n = big - small
    if not 0 <= k <= n:
        raise OutOfRange(f"k={k} outside [0, {n}]")
    if k == 0:
        return v
    if k == n:
        return w
    return lattice_sum(Lw.scaled(-small), Lv.scaled(k)).vertex()


def geodesic(v: VertexClass, w: VertexClass) -> list[VertexClass]:
    Lv, Lw = v.lattice(), w.lattice()
    big, small = elementary_divisors(Lw, Lv)
    n = big - small
    Lw0 = Lw.scaled(-small)
    path = [v]
    for k in range(1, n):
        path.append(lattice_sum(Lw0, Lv.scaled(k)).vertex())
    if n:
        path.append(w)
    return path


def point_on_geodesic(v: VertexClass, w: VertexClass, t) -> BuildingPoint:
    t = Fraction(t)
    n = vertex_dist(v, w)
    if not 0 <= t <= n:
        raise OutOfRange(f"t={t} outside [0, {n}]")
    k = floor(t)
    if t == k:
        return BuildingPoint(geodesic_vertex(v, w, k))
    return BuildingPoint.on_edge(geodesic_vertex(v, w, k), geodesic_vertex(v, w, k + 1), t - k)


def _exit(x: BuildingPoint, y: BuildingPoint):
    """Endpoint through which the geodesic from x to y leaves x's edge."""
    if x.w is None:
        return x.v, Fraction(0)
    (e0, o0), (e1, o1) = x.endpoints()
    if o0 + dist(BuildingPoint(e0), y) <= o1 + dist(BuildingPoint(e1), y):
        return e0, o0
    return e1, o1


def point_between(x, y, t) -> BuildingPoint:
    """The point at distance t from x on the geodesic [x, y]."""
    x, y = as_point(x), as_point(y)
    t = Fraction(t)
    total = dist(x, y)
    if not 0 <= t <= total:
        raise OutOfRange(f"t={t} outside [0, {total}]")
    if t == 0:
        return x
    if t == total:
        return y
    if x.w is not None and y.w is not None and x.v == y.v and x.w == y.w:
        s = x.t + t if y.t > x.t else x.t - t
        return BuildingPoint.on_edge(x.v, x.w, s)
    ex, ox = _exit(x, y)
    ey, oy = _exit(y, x)
    if t <= ox:
        # still on x's edge, moving toward ex
        other = x.w if ex == x.v else x.v
        return BuildingPoint.on_edge(ex, other, ox - t)
    if t >= total - oy:
        other = y.w if ey == y.v else y.v
        return BuildingPoint.on_edge(ey, other, t - (total - oy))
    return point_on_geodesic(ex, ey, t - ox)


def project_to_segment(x, v, w) -> BuildingPoint:
    """Nearest point of [v, w] to x (Gromov product along the segment)."""
    x, v, w = as_point(x), as_point(v), as_point(w)
    dvw = dist(v, w)
    s = (dist(v, x) + dvw - dist(w, x)) / 2
    return point_between(v, w, s)


def midpoint(v, w) -> BuildingPoint:
    return point_between(v, w, dist(v, w) / 2)


def on_geodesic(x, v, w) -> bool:
    return dist(v, x) + dist(x, w) == dist(v, w)


def direction(x: VertexClass, target) -> VertexClass:
    """The neighbour of vertex x that starts the geodesic toward ``target``."""
    target = as_point(target)
    d0 = dist(x, target)
    for nb in neighbors(x):
        if dist(nb, target) < d0:
            return nb
    raise OutOfRange("target coincides with x")


def ball(center, radius, parity: int | None = None) -> list[VertexClass]:
    """Vertices within ``radius`` of ``center``, optionally of a fixed d-parity.

    Breadth-first from the carrier edge; distances grow monotonically outward,
    so pruning at the radius is exact.
    """
    center = as_point(center)
    radius = Fraction(radius)
    seeds = [e for e, off in center.endpoints() if off <= radius]
    seen = set(seeds)
    queue = deque(seeds)
    out = []
    while queue:
        v = queue.popleft()
        out.append(v)
        for nb in neighbors(v):
            if nb not in seen:
                seen.add(nb)
                if dist(nb, center) <= radius:
                    queue.append(nb)
    if parity is not None:
        out = [v for v in out if v.parity == parity % 2]
    out.sort()
    return out
