from fractions import Fraction

import pytest

from fedosov import Poly

from conftest import make_random_poly


def var(i, dim=2):
    return Poly.variable(dim, i)


def test_additive_inverse():
    x1 = var(0)
    assert (x1 + (-x1)).is_zero()


def test_add_merges_terms():
    x1, x2 = var(0), var(1)
    assert x1 * x2 + x1 * x2 == 2 * (x1 * x2)
    assert (x1 + 1) + x2 == x1 + x2 + 1


def test_mul_unit_and_products():
    x1, x2 = var(0), var(1)
    p = 3 * x1**2 - x2 + Fraction(1, 2)
    assert Poly.const(2, 1) * p == p
    assert x1 * x2 == Poly(2, {(1, 1): 1})
    assert (x1 + x2) ** 2 == x1**2 + 2 * x1 * x2 + x2**2


def test_diff_examples():
    x1, x2 = var(0), var(1)
    assert (x1**2).diff(0) == 2 * x1
    assert x1.diff(1).is_zero()
    assert (x1 * x2).diff(0) == x2


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        Poly.variable(2, 0) + Poly.variable(4, 0)
    with pytest.raises(ValueError):
        Poly.variable(2, 0) * Poly.variable(4, 1)


def test_index_out_of_range():
    with pytest.raises(ValueError):
        Poly.variable(2, 2)
    with pytest.raises(ValueError):
        var(0).diff(5)


def test_no_zero_coefficients_stored():
    p = var(0) - var(0) + Poly.const(2, 0)
    assert p.terms == {}
    q = Poly(2, {(1, 0): Fraction(0), (0, 1): Fraction(2)})
    assert (1, 0) not in q.terms


def test_ring_axioms_random(rng):
    for _ in range(25):
        a = make_random_poly(rng, 2)
        b = make_random_poly(rng, 2)
        c = make_random_poly(rng, 2)
        assert (a + b) + c == a + (b + c)
        assert a + b == b + a
        assert (a * b) * c == a * (b * c)
        assert a * b == b * a
        assert a * (b + c) == a * b + a * c


def test_diff_is_derivation(rng):
    for _ in range(25):
        a = make_random_poly(rng, 2, degree=3)
        b = make_random_poly(rng, 2, degree=3)
        for i in range(2):
            assert (a * b).diff(i) == a.diff(i) * b + a * b.diff(i)


def test_mixed_partials_commute(rng):
    for _ in range(25):
        a = make_random_poly(rng, 2, degree=4)
        assert a.diff(0).diff(1) == a.diff(1).diff(0)


def test_pow_matches_repeated_product(rng):
    a = make_random_poly(rng, 2)
    assert a**0 == Poly.const(2, 1)
    assert a**3 == a * a * a


def test_evaluate():
    x1, x2 = var(0), var(1)
    p = 2 * x1**2 * x2 - Fraction(1, 3)
    assert p.evaluate([2, 3]) == 24 - Fraction(1, 3)


def test_render_canonical():
    x1, x2 = var(0), var(1)
    p = 2 * x1**2 * x2 - Fraction(1, 3)
    assert str(p) == "2*x1^2*x2 - 1/3"
    assert str(Poly.zero(2)) == "0"
    assert str(-x1) == "-x1"
    assert str(x1 + x2) == "x1 + x2"
    assert str(x2 - x1) == "-x1 + x2"


def test_hash_consistency(rng):
    a = make_random_poly(rng, 2)
    b = Poly(2, dict(a.terms))
    assert a == b and hash(a) == hash(b)


def test_equality_with_scalars():
    assert Poly.const(2, Fraction(3, 2)) == Fraction(3, 2)
    assert Poly.zero(2) == 0
    assert var(0) != 1
