import functools
import itertools
import logging
import math
from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction

import numpy as np
import sympy
from sympy.polys.subresultants_qq_zz import sylvester

from ade_sieve import error
from ade_sieve.utils import BRUTE_FORCE_BUDGET, SCHEMA_VERSION

logger = logging.getLogger(__name__)

x = sympy.Symbol('x')


class DivisibilityType(IntEnum):
    # p^2 does not divide the discriminant
    NONE = 0
    # p^2 divides it, but some perturbation by p escapes
    WEAK = 1
    # Every perturbation by p keeps p^2 dividing it
    STRONG = 2


def taylor_shift(b, l):
    """Coefficients of f(x + l) for f = x^d + b_1 x^{d-1} + ... + b_d"""
    a = [1] + [int(c) for c in b]
    d = len(a) - 1
    for i in range(d):
        for j in range(1, d - i + 1):
            a[j] += l * a[j - 1]
    return tuple(a[1:])


@dataclass(frozen=True)
class MonicPoly:
    """
    f(x) = x^d + b_1 x^{d-1} + ... + b_d with integer coefficients
    """

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, 'coeffs', tuple(int(c) for c in self.coeffs))
        assert len(self.coeffs) >= 1, self.coeffs

    @classmethod
    def parse(cls, text, degree=None):
        """
        Parse 'b_1,...,b_d'; with degree given, a list one short means b_1 = 0
        """
        try:
            coeffs = [int(c) for c in text.replace(' ', '').split(',') if c != '']
        except ValueError:
            raise error.InvalidPolynomial('coefficients must be integers, got %r' % text)
        if not coeffs:
            raise error.InvalidPolynomial('no coefficients in %r' % text)
        if degree is not None:
            if len(coeffs) == degree - 1:
                coeffs = [0] + coeffs
            if len(coeffs) != degree:
                raise error.InvalidPolynomial('expected %d or %d coefficients for degree %d, got %d'
                                              % (degree - 1, degree, degree, len(coeffs)))
        return cls(tuple(coeffs))

    @property
    def degree(self):
        return len(self.coeffs)

    def as_expr(self):
        d = self.degree
        return x**d + sum(c * x**(d - k) for k, c in enumerate(self.coeffs, start=1))

    def as_poly(self):
        return sympy.Poly(self.as_expr(), x)

    def shift(self, l):
        return MonicPoly(taylor_shift(self.coeffs, l))

    def __call__(self, value):
        acc = 1
        for c in self.coeffs:
            acc = acc * value + c
        return acc

    def __str__(self):
        return str(self.as_expr())


@dataclass(frozen=True)
class DiscriminantForm:
    """
    A polynomial in named coordinates, kept as (exponents, coefficient) terms
    """

    names: tuple
    terms: tuple

    @classmethod
    def from_expr(cls, expr, symbols):
        symbols = tuple(symbols)
        poly = sympy.Poly(sympy.expand(expr), *symbols) if symbols else None
        if poly is None:
            terms = ((((), int(expr)),) if expr != 0 else ())
        else:
            terms = tuple((tuple(int(e) for e in monom), int(coeff)) for monom, coeff in poly.terms())
        return cls(tuple(str(s) for s in symbols), terms)

    @property
    def content(self):
        g = 0
        for _, coeff in self.terms:
            g = math.gcd(g, coeff)
        return g or 1

    def normalized(self, normalizer=None):
        """Same form divided by a fixed content"""
        normalizer = normalizer or self.content
        assert all(coeff % normalizer == 0 for _, coeff in self.terms), normalizer
        return DiscriminantForm(self.names, tuple((e, c // normalizer) for e, c in self.terms))

    def derivative(self, k):
        """Partial derivative in the k-th coordinate"""
        terms = []
        for exps, coeff in self.terms:
            if exps and exps[k]:
                lowered = exps[:k] + (exps[k] - 1,) + exps[k + 1:]
                terms.append((lowered, coeff * exps[k]))
        return DiscriminantForm(self.names, tuple(terms))

    def evaluate(self, values):
        """Exact value at integer coordinates"""
        total = 0
        for exps, coeff in self.terms:
            term = coeff
            for v, e in zip(values, exps):
                if e:
                    term *= int(v) ** e
            total += term
        return total

    def evaluate_mod(self, arrays, modulus):
        """Values mod modulus over numpy coordinate arrays (int64, products below 2^63)"""
        shape = np.shape(arrays[0]) if arrays else ()
        arrays = [np.asarray(a, dtype=np.int64) % modulus for a in arrays]
        powers = {}
        total = np.zeros(shape, dtype=np.int64)
        for exps, coeff in self.terms:
            term = np.full(shape, coeff % modulus, dtype=np.int64)
            for k, e in enumerate(exps):
                if not e:
                    continue
                if (k, e) not in powers:
                    p = np.ones(shape, dtype=np.int64)
                    for _ in range(e):
                        p = (p * arrays[k]) % modulus
                    powers[(k, e)] = p
                term = (term * powers[(k, e)]) % modulus
            total = (total + term) % modulus
        return total

    def evaluate_array(self, arrays):
        """Exact values over int64 arrays; the caller bounds them by max_abs"""
        shape = np.shape(arrays[0]) if arrays else ()
        total = np.zeros(shape, dtype=np.int64)
        for exps, coeff in self.terms:
            term = np.full(shape, coeff, dtype=np.int64)
            for k, e in enumerate(exps):
                if e:
                    term = term * np.asarray(arrays[k], dtype=np.int64) ** e
            total += term
        return total

    def max_abs(self, bounds):
        """Upper bound for |value| when |coordinate_k| <= bounds[k]"""
        total = 0
        for exps, coeff in self.terms:
            term = abs(coeff)
            for b, e in zip(bounds, exps):
                term *= int(b) ** e
            total += term
        return total


@functools.lru_cache(maxsize=None)
def generic_form(degree, trace_zero=False):
    """
    Discriminant of x^d + b_1 x^{d-1} + ... + b_d as a form in the b_i
    """
    symbols = sympy.symbols('b1:%d' % (degree + 1))
    f = x**degree + sum(s * x**(degree - k) for k, s in enumerate(symbols, start=1))
    disc = sympy.discriminant(f, x)
    if trace_zero:
        disc = disc.subs(symbols[0], 0)
        symbols = symbols[1:]
    return DiscriminantForm.from_expr(disc, symbols)


def discriminant(f):
    """
    (-1)^{d(d-1)/2} Res(f, f')
    """
    poly = f.as_poly()
    d = f.degree
    res = sympy.resultant(poly, poly.diff(x))
    return int((-1) ** (d * (d - 1) // 2) * res)


def sylvester_discriminant(f):
    """Discriminant from the determinant of the Sylvester matrix of f and f'"""
    expr = f.as_expr()
    d = f.degree
    det = sylvester(expr, sympy.diff(expr, x), x).det()
    return int((-1) ** (d * (d - 1) // 2) * det)


def normalized_discriminant(f, trace_zero=False):
    """Discriminant divided by the content of its family's discriminant form"""
    form = generic_form(f.degree, trace_zero)
    return discriminant(f) // form.content


def shift_normalize(f, m):
    """
    Least l in [0, m) with m | c_{d-1} and m^2 | c_d for f(x + l)
    """
    assert m >= 2, m
    if f.degree < 2:
        raise error.InvalidPolynomial('shift normalization needs degree >= 2, got %s' % f)
    for l in range(m):
        c = taylor_shift(f.coeffs, l)
        if c[-2] % m == 0 and c[-1] % (m * m) == 0:
            return l, c
    return None


def perturbation_codes(form, classes, p, free=None):
    """
    Types of every class of b mod p^2, scanning the p^|free| perturbations
    """
    mod = p * p
    free = range(len(classes)) if free is None else free
    base = form.evaluate_mod(classes, mod)
    escapes = np.zeros(base.shape, dtype=bool)
    for c in itertools.product(range(p), repeat=len(free)):
        if not any(c):
            continue
        shifted = list(classes)
        for k, ck in zip(free, c):
            if ck:
                shifted[k] = classes[k] + p * ck
        escapes |= form.evaluate_mod(shifted, mod) != 0
    codes = np.full(base.shape, DivisibilityType.STRONG, dtype=np.int8)
    codes[escapes] = DivisibilityType.WEAK
    codes[base != 0] = DivisibilityType.NONE
    return codes


def brute_divisibility_type(f, p, budget=BRUTE_FORCE_BUDGET):
    if p ** f.degree > budget:
        raise error.BudgetExceeded('brute force needs %d^%d perturbations, budget %d' % (p, f.degree, budget))
    classes = [np.array([c % (p * p)], dtype=np.int64) for c in f.coeffs]
    return DivisibilityType(int(perturbation_codes(generic_form(f.degree), classes, p)[0]))


def fast_divisibility_type(f, p):
    """
    Shift criterion: weak exactly when a lone double root l mod p has f(l) = 0 mod p^2
    """
    b = f.coeffs
    d = len(b)
    delta = generic_form(d).evaluate(b)
    if delta % (p * p):
        return DivisibilityType.NONE
    # Stickelberger: discriminants are 0 or 1 mod 4
    if p == 2:
        return DivisibilityType.STRONG

    shifted = shift_normalize(f, p)
    if shifted is None:
        return DivisibilityType.STRONG
    _, c = shifted

    # Triple root at l
    if d >= 3 and c[d - 3] % p == 0:
        return DivisibilityType.STRONG
    # Another repeated root in the cofactor f(x + l) / x^2 mod p
    if d - 2 >= 2 and generic_form(d - 2).evaluate(c[:d - 2]) % p == 0:
        return DivisibilityType.STRONG
    return DivisibilityType.WEAK


@dataclass(frozen=True)
class Classification:
    type: DivisibilityType
    method: str


def classify(f, p, engine='auto', budget=BRUTE_FORCE_BUDGET):
    """
    Divisibility type with the engine that produced it

    'auto' runs both engines within budget and cross-checks them; beyond
    the budget the shift criterion alone answers, labelled fast-path-only.
    """
    if engine == 'brute':
        return Classification(brute_divisibility_type(f, p, budget), 'brute')
    if engine == 'fast':
        return Classification(fast_divisibility_type(f, p), 'fast')

    assert engine == 'auto', engine
    fast = fast_divisibility_type(f, p)
    if p ** f.degree > budget:
        logger.info('p^d = %d^%d over budget, using the shift criterion only', p, f.degree)
        return Classification(fast, 'fast-path-only')
    brute = brute_divisibility_type(f, p, budget)
    if brute != fast:
        logger.error('engines disagree on %s at p=%d: brute %s, fast %s', f, p, brute.name, fast.name)
    return Classification(brute, 'brute+fast')


def divisibility_type(f, p, engine='auto', budget=BRUTE_FORCE_BUDGET):
    return classify(f, p, engine, budget).type


def classification_table(degree, p, engine='brute'):
    """
    Types of every monic polynomial mod p^2, indexed by (b_1, ..., b_d) mod p^2
    """
    shape = (p * p,) * degree
    classes = [a.ravel() for a in np.indices(shape, dtype=np.int64)]
    if engine == 'brute':
        codes = perturbation_codes(generic_form(degree), classes, p)
    elif engine == 'fast':
        columns = zip(*(a.tolist() for a in classes))
        codes = np.array([fast_divisibility_type(MonicPoly(col), p) for col in columns], dtype=np.int8)
    else:
        raise ValueError('unknown engine %r' % engine)
    return codes.reshape(shape)


class W0Matrix:
    """
    Square matrix with all entries above the superdiagonal zero
    """

    def __init__(self, entries, m=1, shift=0):
        self.entries = sympy.Matrix(entries).applyfunc(sympy.nsimplify)
        assert self.entries.rows == self.entries.cols
        self.size = self.entries.rows
        self.m = m
        self.shift = shift

    def __getitem__(self, key):
        return self.entries[key]

    def superdiagonal(self):
        return tuple(self.entries[i, i + 1] for i in range(self.size - 1))

    def is_w0_shape(self):
        return all(self.entries[i, j] == 0 for i in range(self.size) for j in range(i + 2, self.size))

    def is_antidiagonal_symmetric(self):
        n = self.size
        return all(
            self.entries[i, j] == self.entries[n - 1 - j, n - 1 - i] for i in range(n) for j in range(n)
        )

    def trace(self):
        return self.entries.trace()

    def is_integral(self, denominator=1):
        """All entries in (1/denominator)Z"""
        return all((denominator * e).is_integer for e in self.entries)

    def charpoly(self):
        """Coefficients of det(xI - A) below the leading 1"""
        coeffs = self.entries.charpoly(x).all_coeffs()[1:]
        return tuple(Fraction(int(sympy.Rational(c).p), int(sympy.Rational(c).q)) for c in coeffs)

    def rows(self):
        return [[Fraction(int(sympy.Rational(e).p), int(sympy.Rational(e).q)) for e in self.entries.row(i)]
                for i in range(self.size)]

    def to_csv(self):
        return '\n'.join(','.join(str(e) for e in row) for row in self.rows()) + '\n'

    def to_json(self):
        return {
            'schema_version': SCHEMA_VERSION,
            'size': self.size,
            'm': self.m,
            'shift': self.shift,
            'entries': [[[e.numerator, e.denominator] for e in row] for row in self.rows()],
        }

    def __str__(self):
        rows = [[str(e) for e in row] for row in self.rows()]
        width = max(len(s) for row in rows for s in row)
        return '\n'.join(' '.join(s.rjust(width) for s in row) for row in rows)


def band_matrix(c):
    """
    W0-shaped matrix with unit superdiagonal and charpoly x^N + c_1 x^{N-1} + ... + c_N

    c_k sits on the (k-1)-th subdiagonal where it meets the antidiagonal band:
    one entry -c_k on i + j = N + 1 when N + k is even, otherwise -c_k/2 on
    each of i + j = N and i + j = N + 2. For even N the middle entry of the
    first subdiagonal also carries c_1^2/4.
    """
    n = len(c)
    a = sympy.zeros(n, n)
    for i in range(n - 1):
        a[i, i + 1] = 1
    for k, ck in enumerate(c, start=1):
        ck = sympy.Integer(ck)
        if (n + k) % 2 == 0:
            i = (n + k) // 2
            a[i - 1, i - k] += -ck
        else:
            i = (n + k - 1) // 2
            a[i - 1, i - k] += -ck / 2
            a[i, i - k + 1] += -ck / 2
    if n % 2 == 0:
        a[n // 2, n // 2 - 1] += sympy.Integer(c[0]) ** 2 / 4
    return a


def build_companion(b, n):
    """The (n+1) x (n+1) band matrix for odd n"""
    if n % 2 == 0:
        raise error.Error('build_companion needs odd n, got %d; use build_companion_even' % n)
    assert len(b) == n + 1, (b, n)
    return W0Matrix(band_matrix(b))


def build_companion_even(b, n):
    """The same band pattern at even n, where the size n+1 is odd"""
    if n % 2:
        raise error.Error('build_companion_even needs even n, got %d' % n)
    assert len(b) == n + 1, (b, n)
    return W0Matrix(band_matrix(b))


def expected_superdiagonal(size, m):
    if size == 2:
        return (m * m,)
    return (m,) + (1,) * (size - 3) + (m,)


def conjugator(size, m):
    """D = diag(m, 1, ..., 1, 1/m)"""
    diag = [sympy.Integer(1)] * size
    diag[0] = sympy.Integer(m)
    diag[-1] = sympy.Rational(1, m)
    return sympy.diag(*diag)


def sigma_m(f, m):
    """
    Integral W0 matrix with charpoly f and superdiagonal (m, 1, ..., 1, m)
    """
    if f.degree < 2:
        raise error.InvalidPolynomial('sigma_m needs degree >= 2, got %s' % f)
    if m == 1:
        l, c = 0, f.coeffs
    else:
        shifted = shift_normalize(f, m)
        if shifted is None:
            raise error.NotWeaklyDivisible('%s has no shift with %d | c_{d-1} and %d | c_d' % (f, m, m * m))
        l, c = shifted

    size = f.degree
    d = conjugator(size, m)
    entries = d * (band_matrix(c) + l * sympy.eye(size)) * d.inv()
    v = W0Matrix(entries, m=m, shift=l)

    failed = [name for name, ok in certify_sigma(v, f, m).items() if not ok]
    if failed:
        raise error.VerificationFailure('sigma_%d of %s fails: %s' % (m, f, ', '.join(failed)))
    logger.debug('sigma_%d of %s: shift %d', m, f, l)
    return v


def certify_sigma(v, f, m):
    """The three postconditions of sigma_m"""
    return {
        'integral': v.is_integral(4),
        'charpoly': v.charpoly() == tuple(Fraction(c) for c in f.coeffs),
        'superdiagonal': v.superdiagonal() == expected_superdiagonal(v.size, m),
    }


def q_invariant(v):
    """|product of the height-one (superdiagonal) entries|"""
    product = sympy.Integer(1)
    for e in v.superdiagonal():
        product *= e
    product = abs(sympy.Rational(product))
    return Fraction(int(product.p), int(product.q))


def intended_q(v):
    """The Q-invariant in the convention where sigma_m has invariant m"""
    return Fraction(v.m)


def random_w0_matrix(size, rng, zero_slot=None, bound=5):
    """
    Random integer W0 matrix symmetric about the antidiagonal

    With zero_slot set, that superdiagonal entry and its mirror are zero.
    """
    a = sympy.zeros(size, size)
    for i in range(size):
        for j in range(min(i + 2, size)):
            mi, mj = size - 1 - j, size - 1 - i
            if (mi, mj) < (i, j):
                continue
            if j == i + 1:
                value = int(rng.integers(1, bound + 1)) * int(rng.choice([-1, 1]))
            else:
                value = int(rng.integers(-bound, bound + 1))
            a[i, j] = value
            a[mi, mj] = value
    if zero_slot is not None:
        a[zero_slot, zero_slot + 1] = 0
        a[size - 2 - zero_slot, size - 1 - zero_slot] = 0
    return W0Matrix(a)
