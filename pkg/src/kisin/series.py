"""Laurent polynomials over F_q with an optional truncation horizon.

A ``LaurentElement`` stores ``val`` and a dense tuple of field codes, so the
term ``coeffs[k]`` sits at exponent ``val + k``.  Stored tuples never start
or end with a zero.  ``horizon=H`` means every exponent >= H is unknown;
exact elements have ``horizon=None``.
"""

from __future__ import annotations

from fractions import Fraction

from . import _core
from .errors import InsufficientPrecision, SpecMismatch, ZeroInverse, ZeroValuation
from .gf import GF, FieldElement

DEFAULT_PREC = 64


class LaurentElement:
    __slots__ = ("field", "val", "coeffs", "horizon", "_hash")

    def __init__(self, field: GF, val: int, coeffs, horizon: int | None = None):
        coeffs = list(coeffs)
        if horizon is not None and coeffs:
            keep = horizon - val
            if keep < len(coeffs):
                coeffs = coeffs[: max(keep, 0)]
        start = 0
        while start < len(coeffs) and coeffs[start] == 0:
            start += 1
        end = len(coeffs)
        while end > start and coeffs[end - 1] == 0:
            end -= 1
        self.field = field
        self.coeffs = tuple(coeffs[start:end])
        self.val = val + start if self.coeffs else 0
        self.horizon = horizon
        self._hash = None

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, field: GF) -> "LaurentElement":
        return cls(field, 0, ())

    @classmethod
    def one(cls, field: GF) -> "LaurentElement":
        return cls(field, 0, (1,))

    @classmethod
    def monomial(cls, field: GF, exp: int, coeff: int = 1) -> "LaurentElement":
        return cls(field, exp, (coeff,))

    @classmethod
    def from_terms(cls, field: GF, terms, horizon=None) -> "LaurentElement":
        """``terms`` maps exponent -> field code (or FieldElement)."""
        items = dict(terms)
        if not items:
            return cls(field, 0, (), horizon)
        lo, hi = min(items), max(items)
        dense = [0] * (hi - lo + 1)
        for e, c in items.items():
            if isinstance(c, FieldElement):
                c = c.code
            dense[e - lo] = field.add(dense[e - lo], c)
        return cls(field, lo, dense, horizon)

    # -- inspection ---------------------------------------------------------
    def is_zero(self) -> bool:
        """True when no known coefficient is nonzero."""
        return not self.coeffs

    @property
    def exact(self) -> bool:
        return self.horizon is None

    def valuation(self) -> int:
        if self.coeffs:
            return self.val
        if self.horizon is not None:
            raise InsufficientPrecision(f"all coefficients below u^{self.horizon} vanish")
        raise ZeroValuation("valuation of zero")

    def vv(self) -> float | int:
        """Valuation with v(0) = +inf; exact elements only."""
        return self.val if self.coeffs else float("inf")

    def degree(self) -> int:
        return self.val + len(self.coeffs) - 1

    def coeff(self, e: int) -> int:
        k = e - self.val
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return 0

    def terms(self):
        return [(self.val + k, c) for k, c in enumerate(self.coeffs) if c]

    def lead(self) -> int:
        return self.coeffs[0]

    # -- arithmetic ---------------------------------------------------------
    def _same(self, other):
        if other.field != self.field:
            raise SpecMismatch("series over different fields")

    def __add__(self, other: "LaurentElement") -> "LaurentElement":
        self._same(other)
        h = _min_h(self.horizon, other.horizon)
        if not other.coeffs:
            return LaurentElement(self.field, self.val, self.coeffs, h)
        if not self.coeffs:
            return LaurentElement(self.field, other.val, other.coeffs, h)
        F = self.field
        if self.val <= other.val:
            out = _core.poly_addshift(self.coeffs, list(other.coeffs), other.val - self.val, F.add_t)
            return LaurentElement(F, self.val, out, h)
        out = _core.poly_addshift(other.coeffs, list(self.coeffs), self.val - other.val, F.add_t)
        return LaurentElement(F, other.val, out, h)

    def __neg__(self) -> "LaurentElement":
        neg = self.field.neg_t
        return LaurentElement(self.field, self.val, [neg[c] for c in self.coeffs], self.horizon)

    def __sub__(self, other: "LaurentElement") -> "LaurentElement":
        return self + (-other)

    def __mul__(self, other) -> "LaurentElement":
        if isinstance(other, (int, FieldElement)):
            return self.scale(other)
        self._same(other)
        h = float("inf")
        if self.horizon is not None:
            h = min(h, self.horizon + _lower(other))
        if other.horizon is not None:
            h = min(h, other.horizon + _lower(self))
        h = None if h == float("inf") else h
        if not self.coeffs or not other.coeffs:
            return LaurentElement(self.field, 0, (), h)
        F = self.field
        out = _core.poly_mul(list(self.coeffs), list(other.coeffs), F.add_t, F.mul_t)
        return LaurentElement(F, self.val + other.val, out, h)

    __rmul__ = __mul__

    def scale(self, c) -> "LaurentElement":
        if isinstance(c, FieldElement):
            if c.field != self.field:
                raise SpecMismatch("scalar from a different field")
            c = c.code
        else:
            c = self.field.from_int(c)
        row = self.field.mul_t[c]
        return LaurentElement(self.field, self.val, [row[x] for x in self.coeffs], self.horizon)

    def shift(self, k: int) -> "LaurentElement":
        """Multiply by u^k."""
        h = None if self.horizon is None else self.horizon + k
        return LaurentElement(self.field, self.val + k, self.coeffs, h)

    def truncate(self, H: int) -> "LaurentElement":
        """Exact reduction modulo u^H: drop every term of exponent >= H."""
        if self.horizon is not None and self.horizon < H:
            raise InsufficientPrecision(f"need terms below u^{H}, known below u^{self.horizon}")
        keep = H - self.val
        if keep <= 0 or not self.coeffs:
            return LaurentElement.zero(self.field)
        return LaurentElement(self.field, self.val, self.coeffs[:keep])

    def subst(self, e: int) -> "LaurentElement":
        """u -> u^e on exponents; coefficients untouched."""
        if e == 1 or not self.coeffs:
            h = None if self.horizon is None else self.horizon * e
            return LaurentElement(self.field, self.val * e, self.coeffs, h)
        dense = [0] * ((len(self.coeffs) - 1) * e + 1)
        for k, c in enumerate(self.coeffs):
            dense[k * e] = c
        h = None if self.horizon is None else self.horizon * e
        return LaurentElement(self.field, self.val * e, dense, h)

    def phi(self) -> "LaurentElement":
        return self.subst(self.field.p)

    def inverse(self, prec: int = DEFAULT_PREC) -> "LaurentElement":
        """1/x known to relative precision ``prec`` (horizon v(result) + prec).

        Exact when x is a monomial.
        """
        if not self.coeffs:
            if self.horizon is not None:
                raise InsufficientPrecision("cannot invert: no nonzero coefficient known")
            raise ZeroInverse("inverse of zero series")
        F = self.field
        if len(self.coeffs) == 1 and self.horizon is None:
            return LaurentElement(F, -self.val, (F.inv_t[self.coeffs[0]],))
        if self.horizon is not None and self.horizon - self.val < prec:
            raise InsufficientPrecision(
                f"relative precision {self.horizon - self.val} < requested {prec}"
            )
        out = _core.series_inv(list(self.coeffs), prec, F.add_t, F.neg_t, F.mul_t, F.inv_t)
        return LaurentElement(F, -self.val, out, -self.val + prec)

    # -- comparison ---------------------------------------------------------
    def key(self):
        return (self.val, self.coeffs) if self.coeffs else (0, ())

    def __eq__(self, other):
        if not isinstance(other, LaurentElement):
            return NotImplemented
        return (
            self.field == other.field
            and self.coeffs == other.coeffs
            and (self.val == other.val or not self.coeffs)
            and self.horizon == other.horizon
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.key(), self.horizon))
        return self._hash

    def __repr__(self):
        if not self.coeffs:
            body = "0"
        else:
            parts = []
            for e, c in self.terms():
                cs = "".join(str(d) for d in self.field.digits(c)) if self.field.m > 1 else str(c)
                parts.append(f"{cs}*u^{e}")
            body = " + ".join(parts)
        if self.horizon is not None:
            body += f" + O(u^{self.horizon})"
        return f"Laurent({body})"

    # -- serialization ------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "terms": [[e, self.field.digits(c)] for e, c in self.terms()],
            "horizon": self.horizon,
        }

    @classmethod
    def from_json(cls, field: GF, d) -> "LaurentElement":
        terms = {int(e): field.encode(c) if isinstance(c, list) else field.from_int(c) for e, c in d["terms"]}
        return cls.from_terms(field, terms, d.get("horizon"))


def _min_h(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _lower(x: LaurentElement):
    """A lower bound for v(x)."""
    if x.coeffs:
        return x.val
    return float("inf") if x.horizon is None else x.horizon


def val_diff(a: LaurentElement, b: LaurentElement) -> float | int:
    """v(a - b) for exact elements, inf when equal."""
    if a.coeffs == b.coeffs and (a.val == b.val or not a.coeffs):
        return float("inf")
    if not a.coeffs:
        return b.val
    if not b.coeffs:
        return a.val
    if a.val != b.val:
        return min(a.val, b.val)
    for k, (x, y) in enumerate(zip(a.coeffs, b.coeffs)):
        if x != y:
            return a.val + k
    # common prefix; the longer tuple ends in a nonzero, so find its next nonzero
    longer = a.coeffs if len(a.coeffs) > len(b.coeffs) else b.coeffs
    for k in range(min(len(a.coeffs), len(b.coeffs)), len(longer)):
        if longer[k]:
            return a.val + k
    raise AssertionError("unreachable: equal coefficient tuples handled above")


# -- functional surface ------------------------------------------------------

def ser_add(x: LaurentElement, y: LaurentElement) -> LaurentElement:
    return x + y


def ser_mul(x: LaurentElement, y: LaurentElement) -> LaurentElement:
    return x * y


def ser_scale(x: LaurentElement, c) -> LaurentElement:
    return x.scale(c)


def ser_inv(x: LaurentElement, prec: int = DEFAULT_PREC) -> LaurentElement:
    return x.inverse(prec)


def ser_phi(x: LaurentElement) -> LaurentElement:
    return x.phi()


def ser_val(x: LaurentElement) -> int:
    return x.valuation()


def frac_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_frac(s) -> Fraction:
    return Fraction(s)
