"""Finite fields F_{p^m} with an explicit irreducible modulus.

Elements are encoded as integers ``0 <= code < q``: the base-p digits of the
code are the coefficients ``c_0 .. c_{m-1}`` of the residue polynomial.  Code
``0`` is zero and code ``1`` is one.  Small fields keep full addition and
multiplication tables so the series kernels can work on plain ints.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

from .errors import SpecMismatch, ZeroInverse

# Conway polynomials, coefficients low degree first.
CONWAY = {
    (2, 1): (1, 1),
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (3, 1): (1, 1),
    (3, 2): (2, 2, 1),
    (3, 3): (1, 2, 0, 1),
    (3, 4): (2, 0, 0, 2, 1),
    (5, 1): (3, 1),
    (5, 2): (2, 4, 1),
    (5, 3): (3, 3, 0, 1),
    (5, 4): (2, 4, 4, 0, 1),
}

TABLE_LIMIT = 1024


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, int(p**0.5) + 1))


def _polymod(a: list[int], mod: tuple[int, ...], p: int) -> list[int]:
    a = a[:]
    m = len(mod) - 1
    inv_lead = pow(mod[-1], p - 2, p)
    for k in range(len(a) - 1, m - 1, -1):
        c = a[k] * inv_lead % p
        if c:
            for j in range(m + 1):
                a[k - m + j] = (a[k - m + j] - c * mod[j]) % p
    return (a + [0] * m)[:m]


def is_irreducible(mod: tuple[int, ...], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    m = len(mod) - 1
    if m < 1 or mod[-1] % p == 0:
        return False
    if m == 1:
        return True
    for d in range(1, m // 2 + 1):
        for tail in itertools.product(range(p), repeat=d):
            if _polymod(list(mod), tuple(tail) + (1,), p) == [0] * d:
                return False
    return True


def find_irreducible(p: int, m: int) -> tuple[int, ...]:
    """Lexicographically first monic irreducible of degree m over F_p."""
    for tail in itertools.product(range(p), repeat=m):
        cand = tuple(reversed(tail)) + (1,)
        if cand[0] and is_irreducible(cand, p):
            return cand
    raise ValueError(f"no irreducible polynomial of degree {m} over F_{p}")


class GF:
    """The field F_{p^m} = F_p[t]/(modulus)."""

    def __init__(self, p: int, m: int = 1, modulus=None):
        if not _is_prime(p):
            raise ValueError(f"p={p} is not prime")
        if m < 1:
            raise ValueError("extension degree must be >= 1")
        if modulus is None:
            modulus = CONWAY.get((p, m)) or find_irreducible(p, m)
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != m + 1 or modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree m")
        if not is_irreducible(modulus, p):
            raise ValueError(f"modulus {modulus} is reducible over F_{p}")
        self.p = p
        self.m = m
        self.q = p**m
        self.modulus = modulus
        self._tables = self.q <= TABLE_LIMIT
        if self._tables:
            self._build_tables()

    # -- encoding ---------------------------------------------------------
    def digits(self, code: int) -> list[int]:
        out = []
        for _ in range(self.m):
            code, c = divmod(code, self.p)
            out.append(c)
        return out

    def encode(self, digits) -> int:
        code = 0
        for c in reversed(list(digits)):
            code = code * self.p + int(c) % self.p
        return code

    def _build_tables(self):
        q, p = self.q, self.p
        dig = [self.digits(c) for c in range(q)]
        self.add_t = [[self.encode([(x + y) % p for x, y in zip(dig[a], dig[b])]) for b in range(q)] for a in range(q)]
        self.neg_t = [self.encode([(-x) % p for x in dig[a]]) for a in range(q)]
        self.mul_t = [[self._slow_mul(a, b) for b in range(q)] for a in range(q)]
        self.inv_t = [0] * q
        for a in range(1, q):
            row = self.mul_t[a]
            self.inv_t[a] = row.index(1)

    def _slow_mul(self, a: int, b: int) -> int:
        x, y = self.digits(a), self.digits(b)
        prod = [0] * (2 * self.m - 1)
        for i, xi in enumerate(x):
            if xi:
                for j, yj in enumerate(y):
                    prod[i + j] = (prod[i + j] + xi * yj) % self.p
        return self.encode(_polymod(prod, self.modulus, self.p))

    # -- code level arithmetic -------------------------------------------
    def add(self, a: int, b: int) -> int:
        if self._tables:
            return self.add_t[a][b]
        return self.encode([(x + y) % self.p for x, y in zip(self.digits(a), self.digits(b))])

    def neg(self, a: int) -> int:
        if self._tables:
            return self.neg_t[a]
        return self.encode([(-x) % self.p for x in self.digits(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self._tables:
            return self.mul_t[a][b]
        return self._slow_mul(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroInverse("inverse of zero in a finite field")
        if self._tables:
            return self.inv_t[a]
        return self.pow(a, self.q - 2)

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        result, base = 1, a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def frob(self, a: int) -> int:
        return self.pow(a, self.p)

    def from_int(self, n: int) -> int:
        return n % self.p

    # -- element level ------------------------------------------------------
    def __call__(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            if value.field != self:
                raise SpecMismatch("element belongs to a different field")
            return value
        if isinstance(value, int):
            return FieldElement(self, self.from_int(value))
        return FieldElement(self, self.encode(value))

    def elements(self):
        return [FieldElement(self, c) for c in range(self.q)]

    def gen(self) -> "FieldElement":
        """The class of t."""
        if self.m == 1:
            return FieldElement(self, (-self.modulus[0]) % self.p)
        return FieldElement(self, self.p)

    def key(self):
        return (self.p, self.m, self.modulus)

    def __eq__(self, other):
        return isinstance(other, GF) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"GF({self.p}, {self.m}, modulus={list(self.modulus)})"

    def to_json(self) -> dict:
        return {"p": self.p, "m": self.m, "modulus": list(self.modulus)}

    @classmethod
    def from_json(cls, d: dict) -> "GF":
        return field(d["p"], d.get("m", 1), d.get("modulus"))


@lru_cache(maxsize=None)
def _cached_field(p: int, m: int, modulus) -> GF:
    return GF(p, m, modulus)


def field(p: int, m: int = 1, modulus=None) -> GF:
    """Shared field instance; tables are built once per (p, m, modulus)."""
    return _cached_field(p, m, None if modulus is None else tuple(modulus))


class FieldElement:
    __slots__ = ("field", "code")

    def __init__(self, field: GF, code: int):
        self.field = field
        self.code = code

    def _check(self, other) -> int:
        if isinstance(other, int):
            return self.field.from_int(other)
        if not isinstance(other, FieldElement) or other.field != self.field:
            raise SpecMismatch("operands live in different fields")
        return other.code

    def __add__(self, other):
        return FieldElement(self.field, self.field.add(self.code, self._check(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.field, self.field.sub(self.code, self._check(other)))

    def __rsub__(self, other):
        return FieldElement(self.field, self.field.sub(self._check(other), self.code))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.code))

    def __mul__(self, other):
        return FieldElement(self.field, self.field.mul(self.code, self._check(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return FieldElement(self.field, self.field.mul(self.code, self.field.inv(self._check(other))))

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.pow(self.code, e))

    def inv(self):
        return FieldElement(self.field, self.field.inv(self.code))

    def frobenius(self):
        return FieldElement(self.field, self.field.frob(self.code))

    @property
    def coeffs(self) -> list[int]:
        return self.field.digits(self.code)

    def is_zero(self) -> bool:
        return self.code == 0

    def __bool__(self):
        return self.code != 0

    def __eq__(self, other):
        if isinstance(other, int):
            return self.code == self.field.from_int(other)
        return isinstance(other, FieldElement) and other.field == self.field and other.code == self.code

    def __hash__(self):
        return hash((self.field.key(), self.code))

    def __repr__(self):
        return f"FieldElement({self.coeffs})"
