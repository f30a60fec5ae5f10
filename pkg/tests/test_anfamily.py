from fractions import Fraction

import numpy as np
import pytest
import sympy

from ade_sieve import error
from ade_sieve.anfamily import (
    DivisibilityType,
    MonicPoly,
    W0Matrix,
    brute_divisibility_type,
    build_companion,
    build_companion_even,
    certify_sigma,
    classification_table,
    classify,
    discriminant,
    fast_divisibility_type,
    generic_form,
    intended_q,
    normalized_discriminant,
    q_invariant,
    random_w0_matrix,
    shift_normalize,
    sigma_m,
    sylvester_discriminant,
    taylor_shift,
    x,
)


def test_parse():
    assert MonicPoly.parse('5,5', degree=3).coeffs == (0, 5, 5)
    assert MonicPoly.parse('1, 0, -2').coeffs == (1, 0, -2)
    with pytest.raises(error.InvalidPolynomial):
        MonicPoly.parse('1,2', degree=5)
    with pytest.raises(error.InvalidPolynomial):
        MonicPoly.parse('1,y')


def test_sigma_m_rejects_linear():
    for m in (1, 3):
        with pytest.raises(error.InvalidPolynomial):
            sigma_m(MonicPoly((5,)), m)
    with pytest.raises(error.InvalidPolynomial):
        shift_normalize(MonicPoly((5,)), 3)


@pytest.mark.parametrize('coeffs', [(0, -3, 2), (0, 5, 5), (1, 2, 3, 4), (0, 0, 7, -1, 2), (3, -5)])
def test_discriminant_engines_agree(coeffs):
    f = MonicPoly(coeffs)
    assert discriminant(f) == sylvester_discriminant(f)
    assert discriminant(f) == int(sympy.discriminant(f.as_expr(), x))


def test_cubic_discriminant():
    a, b = 5, 5
    assert discriminant(MonicPoly((0, a, b))) == -4 * a ** 3 - 27 * b ** 2
    assert discriminant(MonicPoly((0, -3, 2))) == 0


def test_generic_form_matches_discriminant():
    form = generic_form(4)
    for coeffs in [(1, 2, 3, 4), (0, -1, 0, 5), (-2, 0, 0, 1)]:
        assert form.evaluate(coeffs) == discriminant(MonicPoly(coeffs))


def test_normalized_discriminant():
    # x^2 + b has discriminant -4b; the form's content is 4
    assert normalized_discriminant(MonicPoly((0, 3)), trace_zero=True) == -3
    assert generic_form(3, trace_zero=True).content == 1


def test_taylor_shift():
    f = MonicPoly((2, -1, 3))
    g = f.shift(4)
    assert all(g(t) == f(t + 4) for t in range(-3, 4))
    assert taylor_shift((0, -3, 2), 1) == (3, 0, 0)


def test_shift_normalize():
    assert shift_normalize(MonicPoly((0, 1, 1)), 5) is None
    l, c = shift_normalize(MonicPoly((0, -3, 2)), 5)
    assert l == 1 and c == (3, 0, 0)


@pytest.mark.parametrize('coeffs, p, expected', [
    ((0, 5, 5), 5, DivisibilityType.STRONG),
    ((0, -3, 2), 5, DivisibilityType.WEAK),
    ((0, -3, 2), 3, DivisibilityType.STRONG),
    ((0, 1, 1), 5, DivisibilityType.NONE),
])
def test_classify_examples(coeffs, p, expected):
    f = MonicPoly(coeffs)
    result = classify(f, p)
    assert result.type == expected
    assert result.method == 'brute+fast'
    assert brute_divisibility_type(f, p) == fast_divisibility_type(f, p) == expected


def test_classify_over_budget():
    f = MonicPoly((0, -3, 2))
    assert classify(f, 5, budget=10).method == 'fast-path-only'
    with pytest.raises(error.BudgetExceeded):
        brute_divisibility_type(f, 5, budget=10)


@pytest.mark.parametrize('degree, p', [(2, 3), (2, 5), (3, 2), (3, 3), (3, 5), (4, 2), (4, 3)])
def test_fast_path_matches_brute_force(degree, p):
    brute = classification_table(degree, p, engine='brute')
    fast = classification_table(degree, p, engine='fast')
    assert (brute == fast).all()
    # Discriminants are 0 or 1 mod 4, so p = 2 has no weak classes
    assert (brute == DivisibilityType.WEAK).any() == (p > 2)


@pytest.mark.slow
def test_fast_path_matches_brute_force_cubics_at_7():
    assert (classification_table(3, 7, engine='brute') == classification_table(3, 7, engine='fast')).all()


def _double_root_mod_p(rng, degree, p):
    """(x - r)^2 g(x) + p h(x) with random r, g, h, so p always divides the discriminant"""
    r = int(rng.integers(0, p))
    g = x ** (degree - 2) + sum(int(rng.integers(0, p * p)) * x ** k for k in range(degree - 2))
    h = sum(int(rng.integers(0, p)) * x ** k for k in range(degree))
    poly = sympy.Poly(sympy.expand((x - r) ** 2 * g + p * h), x)
    return MonicPoly(tuple(int(c) for c in poly.all_coeffs()[1:]))


@pytest.mark.slow
@pytest.mark.parametrize('degree', [3, 4])
@pytest.mark.parametrize('p', [5, 7, 11])
def test_fast_path_matches_brute_force_sampled(degree, p):
    rng = np.random.default_rng(100 * degree + p)
    seen = set()
    for _ in range(200):
        f = _double_root_mod_p(rng, degree, p)
        brute = brute_divisibility_type(f, p)
        assert fast_divisibility_type(f, p) == brute, f
        seen.add(brute)
    assert DivisibilityType.WEAK in seen


def test_sigma_7_example():
    v = sigma_m(MonicPoly((0, -3, 2)), 7)
    assert v.rows() == [[1, 7, 0], [0, -2, 7], [0, 0, 1]]
    assert v.shift == 1
    assert all(certify_sigma(v, MonicPoly((0, -3, 2)), 7).values())


def test_sigma_rejects_undivisible():
    with pytest.raises(error.NotWeaklyDivisible):
        sigma_m(MonicPoly((0, 1, 1)), 5)


def _weakly_divisible(rng, degree, m):
    """Random f with some shift f(x + l) having m | c_{d-1} and m^2 | c_d"""
    c = [int(v) for v in rng.integers(-20, 21, size=degree)]
    c[-2] = m * int(rng.integers(-5, 6))
    c[-1] = m * m * int(rng.integers(-5, 6))
    l = int(rng.integers(0, m))
    return MonicPoly(taylor_shift(c, -l))


def test_sigma_certification_randomized():
    rng = np.random.default_rng(1234)
    for _ in range(100):
        degree = int(rng.integers(2, 5))
        m = int(rng.integers(2, 14))
        f = _weakly_divisible(rng, degree, m)
        v = sigma_m(f, m)
        assert all(certify_sigma(v, f, m).values())
        assert v.is_w0_shape()
        assert v.is_antidiagonal_symmetric()
        assert v.trace() == -f.coeffs[0]
        assert q_invariant(v) == m * m
        assert intended_q(v) == m


@pytest.mark.parametrize('b', [(0, 1, 2, 3), (2, -1, 4, 0), (0, 0, 0, 5)])
def test_build_companion_odd(b):
    v = build_companion(b, 3)
    assert v.charpoly() == tuple(Fraction(c) for c in b)
    assert v.superdiagonal() == (1, 1, 1)
    assert v.is_w0_shape()
    assert v.is_antidiagonal_symmetric()


def test_build_companion_even():
    b = (3, 1, -4)
    v = build_companion_even(b, 2)
    assert v.charpoly() == tuple(Fraction(c) for c in b)
    with pytest.raises(error.Error):
        build_companion(b, 2)
    with pytest.raises(error.Error):
        build_companion_even((0, 1, 2, 3), 3)


@pytest.mark.parametrize('n', [1, 5, 7])
def test_build_companion_random(n):
    rng = np.random.default_rng(n)
    for _ in range(5):
        b = tuple(int(c) for c in rng.integers(-6, 7, size=n + 1))
        v = build_companion(b, n)
        assert v.charpoly() == tuple(Fraction(c) for c in b)
        assert v.superdiagonal() == (1,) * n
        assert v.is_w0_shape()
        assert v.is_antidiagonal_symmetric()


def test_build_companion_even_random():
    rng = np.random.default_rng(4)
    for _ in range(20):
        b = tuple(int(c) for c in rng.integers(-6, 7, size=5))
        v = build_companion_even(b, 4)
        assert v.charpoly() == tuple(Fraction(c) for c in b)
        assert v.superdiagonal() == (1, 1, 1, 1)
        assert v.is_w0_shape()


@pytest.mark.parametrize('n', [1, 2, 3, 4])
def test_build_companion_nilpotent(n):
    build = build_companion_even if n % 2 == 0 else build_companion
    v = build((0,) * (n + 1), n)
    assert v.charpoly() == (Fraction(0),) * (n + 1)
    assert v.entries ** (n + 1) == sympy.zeros(n + 1, n + 1)


@pytest.mark.parametrize('size', [2, 3, 4, 5])
def test_zero_q_forces_zero_discriminant(size):
    rng = np.random.default_rng(size)
    for _ in range(10):
        for slot in range(size - 1):
            v = random_w0_matrix(size, rng, zero_slot=slot)
            assert q_invariant(v) == 0
            coeffs = v.charpoly()
            assert all(c.denominator == 1 for c in coeffs)
            assert discriminant(MonicPoly(coeffs)) == 0


def test_w0_matrix_exports():
    v = W0Matrix([[0, 1], [sympy.Rational(1, 4), 0]], m=1)
    assert v.to_csv() == '0,1\n1/4,0\n'
    assert v.to_json()['entries'] == [[[0, 1], [1, 1]], [[1, 4], [0, 1]]]
    assert v.is_integral(4) and not v.is_integral(1)
