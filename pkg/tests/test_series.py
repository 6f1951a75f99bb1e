from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kisin.errors import InsufficientPrecision, SpecMismatch, ZeroInverse, ZeroValuation
from kisin.gf import field
from kisin.series import LaurentElement, frac_str, parse_frac, val_diff

from conftest import L, fields, laurents


def test_square_in_char_2(F2):
    x = L(F2, {0: 1, 1: 1})
    assert x * x == L(F2, {0: 1, 2: 1})


def test_self_sum_vanishes_in_char_2(F2):
    x = L(F2, {-1: 1})
    assert (x + x).is_zero()


def test_horizon_shifts_under_monomial_product(F2):
    x = L(F2, {0: 1, 1: 1}, horizon=2)
    y = x * L(F2, {3: 1})
    assert y == L(F2, {3: 1, 4: 1}, horizon=5)


def test_geometric_inverse(F2):
    inv = L(F2, {0: 1, 1: 1}).inverse(3)
    assert inv == L(F2, {0: 1, 1: 1, 2: 1}, horizon=3)


def test_monomial_inverse_is_exact(F2):
    assert L(F2, {1: 1}).inverse(3) == L(F2, {-1: 1})


def test_inverse_of_2_plus_u_over_f3(F3):
    # 1/(2+u) = 2 * 1/(1 + 2u) = 2 - u + ... = 2 + 2u mod u^2 over F_3
    x = L(F3, {0: 2, 1: 1})
    inv = x.inverse(2)
    assert inv == L(F3, {0: 2, 1: 2}, horizon=2)
    assert (x * inv).truncate(2) == LaurentElement.one(F3)


def test_phi_on_exponents(F2):
    assert L(F2, {-1: 1, 0: 1, 3: 1}).phi() == L(F2, {-2: 1, 0: 1, 6: 1})
    assert LaurentElement.zero(F2).phi().is_zero()


def test_valuations(F2):
    assert L(F2, {2: 1, 5: 1}).valuation() == 2
    assert L(F2, {-4: 1}).valuation() == -4
    with pytest.raises(InsufficientPrecision):
        LaurentElement(F2, 0, (), horizon=3).valuation()
    with pytest.raises(ZeroValuation):
        LaurentElement.zero(F2).valuation()


def test_zero_inverse(F2):
    with pytest.raises(ZeroInverse):
        LaurentElement.zero(F2).inverse()


def test_inverse_needs_precision(F2):
    x = L(F2, {0: 1, 1: 1}, horizon=3)
    with pytest.raises(InsufficientPrecision):
        x.inverse(8)


def test_mixed_fields(F2, F3):
    with pytest.raises(SpecMismatch):
        L(F2, {0: 1}) + L(F3, {0: 1})


def test_scale_uses_field_codes(F4):
    t = F4.gen()
    x = L(F4, {0: 1, 2: 1})
    assert x.scale(t) == LaurentElement.from_terms(F4, {0: t.code, 2: t.code})
    assert x * t == x.scale(t)


def test_json_roundtrip(F4):
    x = LaurentElement.from_terms(F4, {-2: 3, 1: 2}, horizon=7)
    assert LaurentElement.from_json(F4, x.to_json()) == x


def test_rational_strings():
    assert frac_str(Fraction(1, 3)) == "1/3"
    assert frac_str(2) == "2/1"
    assert parse_frac("-4/6") == Fraction(-2, 3)


@given(fields.flatmap(lambda F: st.tuples(laurents(F), laurents(F), laurents(F))))
def test_ring_axioms(xyz):
    x, y, z = xyz
    assert (x + y) * z == x * z + y * z
    assert x * y == y * x
    assert (x * y) * z == x * (y * z)
    assert (x - x).is_zero()


@given(fields.flatmap(lambda F: st.tuples(laurents(F), laurents(F))))
def test_phi_is_a_ring_map_and_scales_valuation(xy):
    x, y = xy
    assert (x * y).phi() == x.phi() * y.phi()
    assert (x + y).phi() == x.phi() + y.phi()
    if not x.is_zero():
        assert x.phi().valuation() == x.field.p * x.valuation()


@given(fields.flatmap(lambda F: laurents(F)), st.integers(1, 40))
def test_inverse_multiplies_back(x, prec):
    if x.is_zero():
        return
    one = (x * x.inverse(prec)).truncate(prec)
    assert one == LaurentElement.one(x.field)


@given(fields.flatmap(lambda F: st.tuples(laurents(F), laurents(F))))
def test_val_diff_matches_subtraction(xy):
    x, y = xy
    d = x - y
    expected = float("inf") if d.is_zero() else d.valuation()
    assert val_diff(x, y) == expected


@pytest.mark.parametrize("p,m", [(2, 1), (3, 1), (2, 3)])
def test_pure_and_compiled_kernels_agree(p, m):
    import random

    from kisin import _pycore

    try:
        from kisin import _ccore
    except ImportError:
        pytest.skip("compiled extension not built")
    F = field(p, m)
    rng = random.Random(p * 10 + m)
    for _ in range(50):
        a = [rng.randrange(F.q) for _ in range(rng.randint(1, 30))]
        b = [rng.randrange(F.q) for _ in range(rng.randint(1, 30))]
        a[0] = a[0] or 1
        n = rng.randint(1, 40)
        assert _pycore.poly_mul(a, b, F.add_t, F.mul_t) == _ccore.poly_mul(a, b, F.add_t, F.mul_t)
        assert _pycore.poly_mul_trunc(a, b, n, F.add_t, F.mul_t) == _ccore.poly_mul_trunc(a, b, n, F.add_t, F.mul_t)
        assert _pycore.poly_addshift(a, b, 3, F.add_t) == _ccore.poly_addshift(a, b, 3, F.add_t)
        args = (F.add_t, F.neg_t, F.mul_t, F.inv_t)
        assert _pycore.series_inv(a, n, *args) == _ccore.series_inv(a, n, *args)
