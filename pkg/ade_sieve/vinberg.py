import functools
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import mpmath
import sympy

from ade_sieve import error
from ade_sieve.rootsystem import build_root_system, height, permute_root, pinned_automorphism
from ade_sieve.utils import E_DEGREES, E_DIM_V, MARKED_POINTS

logger = logging.getLogger(__name__)

GREEK = {'alpha': 'α', 'beta': 'β'}


class CaseTag(Enum):
    # V_a = 0, g_a spanned by X_alpha
    G_ONLY = 'G_ONLY'
    # g_a = 0
    V_ONLY = 'V_ONLY'
    # Two-element orbit, one dimension in each of g_a and V_a
    SPLIT = 'SPLIT'


def theta_average(theta, v):
    """Image of a coordinate vector in the theta-invariant subspace"""
    w = permute_root(theta, v)
    return tuple((Fraction(a) + Fraction(b)) / 2 for a, b in zip(v, w))


@dataclass(frozen=True)
class RestrictedRoot:
    """
    A theta-orbit of roots together with its common image
    """

    orbit: tuple
    image: tuple
    case_tag: CaseTag
    # (-1)^height, the eigenvalue of Ad(rho_check(-1))
    sign: int
    # Eigenvalue of the pinned automorphism on a fixed root space
    twist: int = 1

    @property
    def height(self):
        return height(self.orbit[0])

    @property
    def dim_v(self):
        return 0 if self.case_tag is CaseTag.G_ONLY else 1

    @property
    def dim_g(self):
        return 0 if self.case_tag is CaseTag.V_ONLY else 1


@dataclass
class GradedData:
    """
    The graded pieces of a Vinberg pair (G, V) read off the root system
    """

    rs: object
    theta: tuple
    restricted: list
    dim_v: int
    dim_g: int
    degrees: tuple
    height_one_count: int
    marked_points: int
    simple_orbits: tuple = field(default=())

    @property
    def dim_v0(self):
        return self.rs.rank - len(self.simple_orbits)

    def root_names(self):
        return tuple('alpha_%d' % (i + 1) for i in range(self.rs.rank))

    def sv_roots(self):
        """Restricted roots of height one, ordered like the simple orbits"""
        by_orbit = {}
        for a in self.restricted:
            if a.height == 1:
                by_orbit[a.orbit] = a
        out = []
        for orbit in self.simple_orbits:
            roots = tuple(sorted(self.rs.simple_roots[i] for i in orbit))
            out.append(by_orbit[roots])
        return out


@dataclass(frozen=True)
class ExponentVector:
    """
    X^x * prod_i basis_i(t)^e_i, optionally carrying (1/M)^m
    """

    basis_names: tuple
    exponents: tuple
    x_prefactor: Fraction = Fraction(0)
    m_power: int = 0

    def __post_init__(self):
        assert len(self.basis_names) == len(self.exponents)
        object.__setattr__(self, 'basis_names', tuple(self.basis_names))
        object.__setattr__(self, 'exponents', tuple(Fraction(e) for e in self.exponents))
        object.__setattr__(self, 'x_prefactor', Fraction(self.x_prefactor))

    @classmethod
    def zero(cls, names):
        return cls(tuple(names), (0,) * len(names))

    def __getitem__(self, name):
        return self.exponents[self.basis_names.index(name)]

    def __add__(self, other):
        assert self.basis_names == other.basis_names, (self.basis_names, other.basis_names)
        return ExponentVector(
            self.basis_names,
            tuple(a + b for a, b in zip(self.exponents, other.exponents)),
            self.x_prefactor + other.x_prefactor,
            self.m_power + other.m_power,
        )

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = Fraction(c)
        return ExponentVector(
            self.basis_names,
            tuple(c * e for e in self.exponents),
            c * self.x_prefactor,
            self.m_power,
        )

    def as_dict(self):
        return dict(zip(self.basis_names, self.exponents))

    def __str__(self):
        parts = []
        if self.m_power:
            parts.append('(1/M)' if self.m_power == 1 else '(1/M)^%d' % self.m_power)
        if self.x_prefactor:
            parts.append('X^%s' % self.x_prefactor)
        monomial = ' '.join(
            '%s^%s' % (pretty_name(n), e) for n, e in zip(self.basis_names, self.exponents) if e
        )
        parts.append('(%s)' % monomial if monomial else '1')
        return '·'.join(parts)


def pretty_name(name):
    stem, _, index = name.partition('_')
    return GREEK.get(stem, stem) + index


def sum_vectors(vectors, names):
    total = ExponentVector.zero(names)
    for v in vectors:
        total = total + v
    return total


class CharacterBasis:
    """
    Named characters of the torus T^theta, given by root-coordinate vectors

    Each vector is replaced by its theta-average, so it may be any root
    whose restriction is the intended character.
    """

    def __init__(self, names, vectors, theta):
        assert len(names) == len(vectors)
        self.names = tuple(names)
        self.theta = tuple(theta)
        self.images = [theta_average(theta, v) for v in vectors]

        rank = len(theta)
        n_orbits = len(set(frozenset((i, theta[i])) for i in range(rank)))
        columns = [[sympy.Rational(c.numerator, c.denominator) for c in im] for im in self.images]
        self.matrix = sympy.Matrix(columns).T if columns else sympy.zeros(rank, 0)

        if len(self.names) != n_orbits or self.matrix.rank() != n_orbits:
            raise error.BasisError(
                'basis (%s) has rank %d, the restricted character lattice has rank %d'
                % (', '.join(self.names), self.matrix.rank(), n_orbits)
            )
        gram = self.matrix.T * self.matrix
        self._left_inverse = gram.inv() * self.matrix.T

    def coordinates(self, chi):
        """Exact coordinates of a theta-invariant character"""
        target = sympy.Matrix([sympy.Rational(Fraction(c).numerator, Fraction(c).denominator) for c in chi])
        coords = self._left_inverse * target
        if self.matrix * coords != target:
            raise error.BasisError('character %s is not in the span of (%s)' % (chi, ', '.join(self.names)))
        return tuple(Fraction(int(c.p), int(c.q)) for c in coords)

    def express(self, ev):
        """Rewrite an exponent vector over root coordinates in this basis"""
        return ExponentVector(self.names, self.coordinates(ev.exponents), ev.x_prefactor, ev.m_power)


def weyl_degrees(dtype):
    r = dtype.rank
    if dtype.family == 'A':
        return tuple(range(2, r + 2))
    if dtype.family == 'D':
        return tuple(sorted(list(range(2, 2 * r - 1, 2)) + [r]))
    return E_DEGREES[r]


def marked_points(dtype):
    if dtype.family == 'E':
        return MARKED_POINTS[('E', dtype.rank)]
    return MARKED_POINTS[(dtype.family, dtype.rank % 2)]


def closed_form_dim_v(dtype):
    """dim V from the closed forms for each representation"""
    r = dtype.rank
    if dtype.family == 'A':
        if r % 2 == 0:
            n = r // 2
            return 2 * n * n + 3 * n
        n = (r - 1) // 2
        return 2 * n * n + 5 * n + 2
    if dtype.family == 'D':
        return r * r
    return E_DIM_V[r]


def family_equation(dtype):
    """Curve equation of an A-type family, built from the Weyl degrees"""
    assert dtype.family == 'A', dtype
    top = dtype.rank + 1
    terms = ['x^%d' % top]
    for d in weyl_degrees(dtype):
        power = top - d
        if power > 1:
            terms.append('p_%d x^%d' % (d, power))
        elif power == 1:
            terms.append('p_%d x' % d)
        else:
            terms.append('p_%d' % d)
    return 'y^2 = ' + ' + '.join(terms)


def equation_discrepancies(dtype):
    """Known misprints in the published curve equations, against the degrees"""
    if dtype.family == 'A' and dtype.rank % 2 == 1 and dtype.rank >= 3:
        r = dtype.rank
        return [
            'A_{2n+1} row prints last coefficient p_%d; Weyl degrees end at %d, using p_%d'
            % (r, r + 1, r + 1)
        ]
    return []


def _is_folded(rs, theta, r):
    """True if the fixed root r is beta + theta(beta) for a root beta"""
    for beta in rs.roots:
        image = permute_root(theta, beta)
        if image != beta and tuple(a + b for a, b in zip(beta, image)) == r:
            return True
    return False


def grade(rs):
    """
    Split the roots into theta-orbits and tag each one
    """
    theta = pinned_automorphism(rs)

    restricted = []
    seen = set()
    for r in rs.roots:
        if r in seen:
            continue
        t = permute_root(theta, r)
        orbit = (r,) if t == r else tuple(sorted((r, t)))
        seen.update(orbit)

        sign = -1 if height(r) % 2 else 1
        if len(orbit) == 2:
            tag, twist = CaseTag.SPLIT, 1
        else:
            twist = -1 if _is_folded(rs, theta, r) else 1
            tag = CaseTag.G_ONLY if sign * twist == 1 else CaseTag.V_ONLY
        restricted.append(RestrictedRoot(orbit, theta_average(theta, r), tag, sign, twist))

    simple_orbits = tuple(sorted(set(tuple(sorted({i, theta[i]})) for i in range(rs.rank))))
    n_orbits = len(simple_orbits)
    dim_v = (rs.rank - n_orbits) + sum(a.dim_v for a in restricted)
    dim_g = n_orbits + sum(a.dim_g for a in restricted)
    assert dim_v + dim_g == rs.rank + len(rs.roots)

    gd = GradedData(
        rs=rs,
        theta=theta,
        restricted=restricted,
        dim_v=dim_v,
        dim_g=dim_g,
        degrees=weyl_degrees(rs.dtype),
        height_one_count=sum(1 for a in restricted if a.height == 1 and a.dim_v),
        marked_points=marked_points(rs.dtype),
        simple_orbits=simple_orbits,
    )
    logger.info('graded %s: dim V = %d, dim G = %d, k = %d', rs.dtype, dim_v, dim_g, gd.height_one_count)
    return gd


@functools.lru_cache(maxsize=None)
def graded_data(dtype):
    """Graded data of a Dynkin type, built once per process"""
    return grade(build_root_system(dtype))


def restricted_height(a):
    return a.height


def w0_weights(gd):
    """
    Weights of W0 with multiplicity, each carrying one factor of X
    """
    names = gd.root_names()
    zero = tuple([0] * gd.rs.rank)
    weights = [ExponentVector(names, zero, 1) for _ in range(gd.dim_v0)]
    for a in gd.restricted:
        if a.dim_v and a.height <= 1:
            weights.append(ExponentVector(names, a.image, 1))
    return weights


def positive_g_sum(gd):
    """Sum of the positive restricted roots of G, i.e. 2 rho_G"""
    names = gd.root_names()
    return sum_vectors(
        [ExponentVector(names, a.image) for a in gd.restricted if a.dim_g and a.height > 0], names
    )


def modular_function(gd, basis):
    """delta_G^{-1}, the inverse of the product of the negative roots of G"""
    return basis.express(positive_g_sum(gd))


def volume_exponents(gd, basis):
    """prod over W0 of X*omega(t)"""
    return basis.express(sum_vectors(w0_weights(gd), gd.root_names()))


def q_condition(gd, basis):
    """X^k times the product of the height-one characters"""
    names = gd.root_names()
    total = sum_vectors([ExponentVector(names, a.image) for a in gd.sv_roots()], names)
    total = ExponentVector(names, total.exponents, gd.height_one_count)
    return basis.express(total)


def sv_basis(gd):
    """The height-one characters S_V as a basis"""
    names = []
    for orbit in gd.simple_orbits:
        names.append('alpha_' + ','.join(str(i + 1) for i in orbit))
    return CharacterBasis(names, [a.image for a in gd.sv_roots()], gd.theta)


def lambda_target(gd):
    """Exponents of prod_{W0} omega^{-1} prod_{Phi_G^-} beta over root coordinates"""
    names = gd.root_names()
    weights = sum_vectors(w0_weights(gd), names)
    return -ExponentVector(names, weights.exponents) - positive_g_sum(gd)


def lambda_exponents(gd):
    """
    The r_i with prod_i alpha_i^{r_i} = prod_{W0} omega^{-1} prod_{Phi_G^-} beta
    """
    r = sv_basis(gd).coordinates(lambda_target(gd).exponents)
    logger.info('lambda exponents of %s: %s', gd.rs.dtype, ', '.join(str(x) for x in r))
    return r


def resubstitute(gd, r):
    """Rebuild sum_i r_i alpha_i over root coordinates"""
    names = gd.root_names()
    return sum_vectors(
        [ExponentVector(names, a.image).scale(ri) for a, ri in zip(gd.sv_roots(), r)], names
    )


def zeta(s, terms=20, corrections=10, dps=30):
    """
    Riemann zeta for real s > 1 by Euler-Maclaurin summation
    """
    with mpmath.workdps(dps):
        s = mpmath.mpf(Fraction(s).numerator) / Fraction(s).denominator
        n = mpmath.mpf(terms)
        total = mpmath.fsum(mpmath.power(k, -s) for k in range(1, terms))
        total += mpmath.power(n, 1 - s) / (s - 1) + mpmath.power(n, -s) / 2
        for k in range(1, corrections + 1):
            total += (
                mpmath.bernoulli(2 * k) / mpmath.factorial(2 * k)
                * mpmath.rf(s, 2 * k - 1)
                * mpmath.power(n, -s - 2 * k + 1)
            )
        return +total


def zeta_product(r):
    """prod_i zeta(r_i + 1)"""
    for ri in r:
        if Fraction(ri) <= 0:
            raise error.ZetaDomainError('zeta(%s) diverges: every r_i must be positive' % (Fraction(ri) + 1))
    with mpmath.workdps(30):
        product = mpmath.mpf(1)
        for ri in r:
            product *= zeta(Fraction(ri) + 1)
        return float(product)


def lambda_local_factor(r, p):
    """Euler factor prod_i 1/(1 - p^{-(r_i+1)}) at the prime p"""
    with mpmath.workdps(30):
        factor = mpmath.mpf(1)
        for ri in r:
            s = Fraction(ri) + 1
            factor /= 1 - mpmath.power(p, -(mpmath.mpf(s.numerator) / s.denominator))
        return float(factor)


def euler_product(r, primes):
    """Partial Euler product of the zeta constant over the given primes"""
    product = 1.0
    for p in primes:
        product *= lambda_local_factor(r, p)
    return product
