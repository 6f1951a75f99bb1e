"""F_q[[u]]-lattices in F_q((u))^2.

A lattice is stored in Hermite form: the span of the columns ``(u^a, 0)`` and
``(f, u^b)`` with ``f`` reduced modulo ``u^a``.  Its homothety class is the
``VertexClass`` ``(d, f)`` obtained by scaling so that ``b = 0``; ``d`` may be
negative.  Every reduction here is exact: unit inverses are only ever needed
modulo a known power of u.
"""

from __future__ import annotations

from .errors import InsufficientPrecision, SingularMatrix
from .gf import GF
from .series import LaurentElement, val_diff

INF = float("inf")


def _v(x: LaurentElement):
    return x.val if x.coeffs else INF


def _zero(F):
    return LaurentElement.zero(F)


def _one(F):
    return LaurentElement.one(F)


class Mat2:
    """2x2 matrix of exact Laurent polynomials, row-major."""

    __slots__ = ("a11", "a12", "a21", "a22")

    def __init__(self, a11, a12, a21, a22):
        self.a11, self.a12, self.a21, self.a22 = a11, a12, a21, a22

    @property
    def field(self) -> GF:
        return self.a11.field

    @classmethod
    def identity(cls, F: GF) -> "Mat2":
        return cls(_one(F), _zero(F), _zero(F), _one(F))

    @classmethod
    def diag(cls, F: GF, e1: int, e2: int) -> "Mat2":
        return cls(LaurentElement.monomial(F, e1), _zero(F), _zero(F), LaurentElement.monomial(F, e2))

    def entries(self):
        return (self.a11, self.a12, self.a21, self.a22)

    def __matmul__(self, o: "Mat2") -> "Mat2":
        return Mat2(
            self.a11 * o.a11 + self.a12 * o.a21,
            self.a11 * o.a12 + self.a12 * o.a22,
            self.a21 * o.a11 + self.a22 * o.a21,
            self.a21 * o.a12 + self.a22 * o.a22,
        )

    def apply(self, vec):
        x, y = vec
        return (self.a11 * x + self.a12 * y, self.a21 * x + self.a22 * y)

    def det(self) -> LaurentElement:
        return self.a11 * self.a22 - self.a12 * self.a21

    def subst(self, e: int) -> "Mat2":
        return Mat2(*(x.subst(e) for x in self.entries()))

    def phi(self) -> "Mat2":
        return self.subst(self.field.p)

    def columns(self):
        return [(self.a11, self.a21), (self.a12, self.a22)]

    def __eq__(self, other):
        return isinstance(other, Mat2) and self.entries() == other.entries()

    def __repr__(self):
        return f"Mat2({self.a11!r}, {self.a12!r}, {self.a21!r}, {self.a22!r})"

    def to_json(self):
        return [[self.a11.to_json(), self.a12.to_json()], [self.a21.to_json(), self.a22.to_json()]]

    @classmethod
    def from_json(cls, F: GF, rows) -> "Mat2":
        (x11, x12), (x21, x22) = rows
        return cls(*(LaurentElement.from_json(F, x) for x in (x11, x12, x21, x22)))


class Lattice:
    """span{(u^a, 0), (f, u^b)} with every exponent of f below a."""

    __slots__ = ("a", "b", "f", "_hash")

    def __init__(self, a: int, b: int, f: LaurentElement):
        self.a = a
        self.b = b
        self.f = f
        self._hash = None

    @property
    def field(self) -> GF:
        return self.f.field

    @classmethod
    def standard(cls, F: GF) -> "Lattice":
        return cls(0, 0, _zero(F))

    @property
    def detval(self) -> int:
        return self.a + self.b

    def basis(self) -> Mat2:
        F = self.field
        return Mat2(LaurentElement.monomial(F, self.a), self.f, _zero(F), LaurentElement.monomial(F, self.b))

    def columns(self):
        F = self.field
        return [(LaurentElement.monomial(F, self.a), _zero(F)), (self.f, LaurentElement.monomial(F, self.b))]

    def scaled(self, k: int) -> "Lattice":
        return Lattice(self.a + k, self.b + k, self.f.shift(k))

    def vertex(self) -> "VertexClass":
        return VertexClass(self.a - self.b, self.f.shift(-self.b))

    def contains(self, vec) -> bool:
        """Membership of an exact vector: basis^{-1} vec must be integral."""
        x, y = vec
        if not y.coeffs:
            return _v(x) >= self.a
        if y.val < self.b:
            return False
        # coefficient on (f, u^b) is y/u^b; remainder x - f*y/u^b must lie in u^a
        rest = x - self.f * y.shift(-self.b)
        return _v(rest) >= self.a

    def key(self):
        return (self.a, self.b, self.f.key())

    def __eq__(self, other):
        return isinstance(other, Lattice) and self.key() == other.key()

    def __lt__(self, other):
        return self.key() < other.key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def __repr__(self):
        return f"Lattice(a={self.a}, b={self.b}, f={self.f!r})"

    def to_json(self):
        return {"a": self.a, "b": self.b, "f": self.f.to_json()}

    @classmethod
    def from_json(cls, F: GF, d) -> "Lattice":
        return cls(int(d["a"]), int(d["b"]), LaurentElement.from_json(F, d["f"]))


class VertexClass:
    """Homothety class span{u^d e1, f e1 + e2} with every exponent of f below d."""

    __slots__ = ("d", "f", "_hash")

    def __init__(self, d: int, f: LaurentElement):
        self.d = d
        self.f = f
        self._hash = None

    @property
    def field(self) -> GF:
        return self.f.field

    @classmethod
    def base(cls, F: GF) -> "VertexClass":
        return cls(0, _zero(F))

    @property
    def parity(self) -> int:
        return self.d & 1

    def lattice(self, det: int | None = None) -> Lattice:
        """The lattice in this class with determinant valuation ``det``.

        With ``det=None`` the representative with b = 0 is returned.
        """
        if det is None:
            return Lattice(self.d, 0, self.f)
        if (det - self.d) % 2:
            raise ValueError(f"class with d={self.d} holds no lattice of det valuation {det}")
        b = (det - self.d) // 2
        return Lattice(self.d + b, b, self.f.shift(b))

    def key(self):
        return (self.d, self.f.key())

    def __eq__(self, other):
        return isinstance(other, VertexClass) and self.d == other.d and self.f.key() == other.f.key()

    def __lt__(self, other):
        return self.key() < other.key()

    def __le__(self, other):
        return self.key() <= other.key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def __repr__(self):
        return f"VertexClass(d={self.d}, f={self.f!r})"

    def to_json(self):
        return {"d": self.d, "f": self.f.to_json()}

    @classmethod
    def from_json(cls, F: GF, d) -> "VertexClass":
        return cls(int(d["d"]), LaurentElement.from_json(F, d["f"]))


def hnf_columns(cols) -> Lattice:
    """Hermite form of the F_q[[u]]-span of exact column vectors."""
    cols = [(x, y) for x, y in cols if x.coeffs or y.coeffs]
    if not cols:
        raise SingularMatrix("no nonzero generators")
    for x, y in cols:
        if not (x.exact and y.exact):
            raise InsufficientPrecision("hnf needs exact generators")
    F = cols[0][0].field
    piv, b = None, INF
    for j, (_, y) in enumerate(cols):
        vy = _v(y)
        if vy < b:
            piv, b = j, vy
    if b == INF:
        raise SingularMatrix("generators span a line")
    D = INF
    for i in range(len(cols)):
        xi, yi = cols[i]
        for j in range(i + 1, len(cols)):
            xj, yj = cols[j]
            D = min(D, _v(xi * yj - xj * yi))
    if D == INF:
        raise SingularMatrix("generators span a line")
    a = D - b
    top, bot = cols[piv]
    if top.coeffs and top.val < a:
        unit = bot.shift(-b)
        inv = unit.inverse(a - top.val)
        f = (top * inv).truncate(a)
    else:
        f = _zero(F)
    return Lattice(a, b, f)


def hnf(basis: Mat2) -> Lattice:
    return hnf_columns(basis.columns())


def lattice_sum(*lats: Lattice) -> Lattice:
    cols = []
    for L in lats:
        cols.extend(L.columns())
    return hnf_columns(cols)


def divisors_matrix(m: Mat2) -> tuple[int, int]:
    """Elementary divisors (big, small) of a nonsingular matrix over F_q[[u]]."""
    vals = [_v(x) for x in m.entries()]
    small = min(vals)
    dv = _v(m.det())
    if dv == INF:
        raise SingularMatrix("singular matrix")
    return dv - small, small


def elementary_divisors(src: Lattice, dst: Lattice) -> tuple[int, int]:
    """Smith exponents (a, b), a >= b, of dst^{-1} src over F_q[[u]].

    Uses the triangular inverse of dst: the (1,2) entry of dst^{-1} src is
    (u^{b'} f - u^b f') / u^{a'+b'}.
    """
    a, b, f = src.a, src.b, src.f
    a2, b2, f2 = dst.a, dst.b, dst.f
    off = val_diff(f.shift(b2), f2.shift(b))
    off = off - a2 - b2
    small = min(a - a2, b - b2, off)
    det = a + b - a2 - b2
    return det - small, small


def vertex_canonical(L: Lattice) -> VertexClass:
    return L.vertex()


def vertex_dist(v: VertexClass, w: VertexClass) -> int:
    """Tree distance between classes, from the divisors of the b = 0 representatives."""
    e = val_diff(w.f, v.f) - v.d
    dd = w.d - v.d
    return dd - 2 * min(dd, e, 0)


def neighbors(v: VertexClass) -> list[VertexClass]:
    """The q+1 adjacent classes, sorted by canonical key.

    They are the index-q sublattices of the b = 0 representative:
    span{u^{d+1}, f + c u^d} for c in F_q, and span{u^d, u f} ~ (d-1, f mod u^{d-1}).
    """
    F = v.field
    out = [VertexClass(v.d + 1, v.f + LaurentElement.monomial(F, v.d, c)) for c in range(F.q)]
    out.append(VertexClass(v.d - 1, v.f.truncate(v.d - 1)))
    out.sort()
    return out
