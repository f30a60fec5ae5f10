import functools
import hashlib
import json
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ade_sieve import error, seeding
from ade_sieve.anfamily import (
    DiscriminantForm,
    DivisibilityType,
    MonicPoly,
    fast_divisibility_type,
    generic_form,
    perturbation_codes,
)
from ade_sieve.arith import icbrt, primes_upto, squarefree_mask, squarefree_status
from ade_sieve.reports import densities_csv, fraction_str
from ade_sieve.rootsystem import DynkinType
from ade_sieve.utils import (
    AGREEMENT_SIGMAS,
    BOX_BUDGET,
    BRUTE_FORCE_BUDGET,
    CHUNK_SIZE,
    DENSITY_ENUMERATION_BUDGET,
    EXACT_DENSITY_PRIME_CAP,
    MONTE_CARLO_SAMPLES,
    SCHEMA_VERSION,
    SQUAREFREE_TRIAL_BOUND,
    TAIL_FIT_PRIMES,
    TAIL_PRIME_BOUND,
    UNCERTAIN_FRACTION,
    map_chunks,
)
from ade_sieve.vinberg import weyl_degrees

logger = logging.getLogger(__name__)

ENUM = 'ENUM'
MONTECARLO = 'MONTECARLO'

# Largest |discriminant| the int64 kernels accept
INT64_LIMIT = 2**62

# The lifting engine multiplies residues mod p^2 in int64, so p^2 stays below this
LIFT_MODULUS_LIMIT = 2**31

# Verdicts need at least this many box points
MIN_POWERED_POINTS = 1000


@dataclass(frozen=True)
class FamilySpec:
    """
    A family of monic polynomials with its discriminant as a form in the invariant coordinates
    """

    name: str
    degrees: tuple
    form: DiscriminantForm
    disc_normalizer: int = 1
    trace_zero: bool = True
    dynkin: DynkinType = None
    # Degree of the monic polynomial, None when the form is user supplied
    polynomial_degree: int = None

    def __post_init__(self):
        object.__setattr__(self, 'degrees', tuple(self.degrees))
        assert all(a < b for a, b in zip(self.degrees, self.degrees[1:])), self.degrees
        assert len(self.form.names) == len(self.degrees), (self.form.names, self.degrees)
        assert self.disc_normalizer > 0

    @classmethod
    def from_dynkin(cls, dtype, trace_zero=True):
        if isinstance(dtype, str):
            dtype = DynkinType.parse(dtype)
        if dtype.family != 'A':
            raise error.InvalidDynkinType('only A-type families have wired discriminants, not %s' % dtype)
        degree = dtype.rank + 1
        raw = generic_form(degree, trace_zero)
        normalizer = raw.content
        logger.info('%s family: discriminant content %d', dtype, normalizer)
        degrees = weyl_degrees(dtype)
        if not trace_zero:
            degrees = (1,) + degrees
        return cls(str(dtype), degrees, raw.normalized(normalizer), normalizer, trace_zero, dtype, degree)

    @classmethod
    def custom(cls, name, expr, symbols, degrees):
        """Family with a user-supplied discriminant form"""
        raw = DiscriminantForm.from_expr(expr, symbols)
        return cls(name, tuple(degrees), raw.normalized(), raw.content, trace_zero=False)

    @property
    def rank(self):
        return len(self.degrees)

    @property
    def cache_id(self):
        """Name plus a digest of the normalized form, so equal names never share cache entries"""
        blob = json.dumps({
            'names': list(self.form.names),
            'terms': [[list(e), c] for e, c in self.form.terms],
            'degrees': list(self.degrees),
            'disc_normalizer': self.disc_normalizer,
            'trace_zero': self.trace_zero,
        }, sort_keys=True)
        return '%s@%s' % (self.name, hashlib.sha256(blob.encode()).hexdigest()[:16])

    def polynomial(self, values):
        assert self.polynomial_degree is not None, self.name
        coeffs = tuple(int(v) for v in values)
        return MonicPoly((0,) + coeffs if self.trace_zero else coeffs)

    def discriminant(self, values):
        return self.form.evaluate(values)


def make_family(name):
    return FamilySpec.from_dynkin(DynkinType.parse(name))


def height(values, degrees):
    """max_i |v_i|^(1/d_i)"""
    return max((abs(int(v)) ** (1.0 / d) for v, d in zip(values, degrees)), default=0.0)


@dataclass(frozen=True)
class HeightBox:
    """
    Integer points with |v_i| < X^{d_i} for every coordinate
    """

    X: Fraction
    degrees: tuple

    def __post_init__(self):
        object.__setattr__(self, 'X', Fraction(self.X))
        object.__setattr__(self, 'degrees', tuple(self.degrees))
        assert self.X > 0, self.X

    @property
    def bounds(self):
        return tuple(max(math.ceil(self.X ** d) - 1, 0) for d in self.degrees)

    @property
    def shape(self):
        return tuple(2 * b + 1 for b in self.bounds)

    @property
    def size(self):
        return math.prod(self.shape)

    @property
    def volume(self):
        return float(math.prod(2 * self.X ** d for d in self.degrees))

    def __contains__(self, values):
        return all(abs(v) < self.X ** d for v, d in zip(values, self.degrees))

    def coordinates(self, start, stop):
        """Coordinate arrays for flat indices [start, stop)"""
        flat = np.arange(start, stop, dtype=np.int64)
        index = np.unravel_index(flat, self.shape)
        return [i.astype(np.int64) - b for i, b in zip(index, self.bounds)]

    def chunks(self, chunk_size=CHUNK_SIZE):
        return [(s, min(s + chunk_size, self.size)) for s in range(0, self.size, chunk_size)]


def _box(fam, X, budget):
    box = HeightBox(X, fam.degrees)
    if box.size > budget:
        raise error.BudgetExceeded('height box at X=%s has %d points, budget %d' % (box.X, box.size, budget))
    return box


@dataclass(frozen=True)
class LocalDensity:
    p: int
    value: Fraction
    method: str
    # Residue classes enumerated, or draws taken
    samples: int
    seed: int = None

    @property
    def std_error(self):
        if self.method == ENUM:
            return 0.0
        v = float(self.value)
        return math.sqrt(v * (1 - v) / self.samples)

    def to_json(self):
        return {
            'p': self.p,
            'rho': fraction_str(self.value),
            'rho_float': float(self.value),
            'method': self.method,
            'samples': self.samples,
            'seed': self.seed,
        }

    @classmethod
    def from_json(cls, payload):
        return cls(payload['p'], Fraction(payload['rho']), payload['method'], payload['samples'], payload['seed'])


def _count_flat(form, p, rank):
    mod = p * p
    shape = (mod,) * rank
    total = mod ** rank
    count = 0
    for start in range(0, total, CHUNK_SIZE):
        flat = np.arange(start, min(start + CHUNK_SIZE, total), dtype=np.int64)
        coords = np.unravel_index(flat, shape)
        count += int(np.count_nonzero(form.evaluate_mod(coords, mod)))
    return count


def _count_fibre(form, p, rank):
    """Same count, looping over the first coordinate and vectorizing the fibre above it"""
    mod = p * p
    rest = [a.ravel() for a in np.indices((mod,) * (rank - 1), dtype=np.int64)]
    size = mod ** (rank - 1)
    count = 0
    for v in range(mod):
        first = np.full(size, v, dtype=np.int64)
        count += int(np.count_nonzero(form.evaluate_mod([first] + rest, mod)))
    return count


def _count_lifted(form, p, rank):
    """
    Same count from the residues mod p alone

    Above a root b of the discriminant mod p, disc(b + pc) = disc(b) + p grad(b).c
    mod p^2: p^(r-1) of the lifts vanish mod p^2 when grad(b) != 0 mod p, and
    otherwise all p^r or none do.
    """
    mod = p * p
    if mod >= LIFT_MODULUS_LIMIT:
        raise error.BudgetExceeded('lifting needs p^2 below %d, got p=%d' % (LIFT_MODULUS_LIMIT, p))
    shape = (p,) * rank
    size = p ** rank
    gradient = [form.derivative(k) for k in range(rank)]
    vanishing = 0
    for start in range(0, size, CHUNK_SIZE):
        flat = np.arange(start, min(start + CHUNK_SIZE, size), dtype=np.int64)
        coords = np.unravel_index(flat, shape)
        delta = form.evaluate_mod(coords, mod)
        on = delta % p == 0
        if not on.any():
            continue
        roots = [c[on] for c in coords]
        escapes = np.zeros(int(on.sum()), dtype=bool)
        for g in gradient:
            escapes |= g.evaluate_mod(roots, p) != 0
        vanishing += int(np.count_nonzero(escapes)) * p ** (rank - 1)
        vanishing += int(np.count_nonzero(~escapes & (delta[on] == 0))) * size
    return mod ** rank - vanishing


def local_density(fam, p, method='auto', engine='flat', samples=MONTE_CARLO_SAMPLES, seed=0,
                  budget=DENSITY_ENUMERATION_BUDGET, allow_fallback=True, cache=None):
    """
    Share of b in (Z/p^2)^r with discriminant nonzero mod p^2

    Enumerated exactly within budget by the flat, fibre or lift engine;
    otherwise estimated from seeded draws when allow_fallback is set.
    """
    method = method.upper()
    total = (p * p) ** fam.rank
    cost = p ** fam.rank if engine == 'lift' else total
    if method == 'AUTO':
        if cost <= budget:
            method = ENUM
        elif allow_fallback:
            logger.info('%s p=%d: %d classes over budget, sampling instead', fam.name, p, cost)
            method = MONTECARLO
        else:
            raise error.BudgetExceeded('%s p=%d needs %d evaluations, budget %d' % (fam.name, p, cost, budget))
    elif method == ENUM and cost > budget:
        raise error.BudgetExceeded('%s p=%d needs %d evaluations, budget %d' % (fam.name, p, cost, budget))
    assert method in (ENUM, MONTECARLO), method

    key = dict(seed=seed, samples=samples) if method == MONTECARLO else {}
    if cache is not None:
        hit = cache.get(fam.cache_id, p, method, **key)
        if hit is not None:
            return LocalDensity.from_json(hit)

    if method == ENUM:
        if engine == 'lift':
            count = _count_lifted(fam.form, p, fam.rank)
        elif engine == 'fibre':
            count = _count_fibre(fam.form, p, fam.rank)
        else:
            count = _count_flat(fam.form, p, fam.rank)
        result = LocalDensity(p, Fraction(count, total), ENUM, total)
    else:
        rng = seeding.stream(seed, p)
        draws = rng.integers(0, p * p, size=(fam.rank, samples), dtype=np.int64)
        count = int(np.count_nonzero(fam.form.evaluate_mod(list(draws), p * p)))
        result = LocalDensity(p, Fraction(count, samples), MONTECARLO, samples, seed)
    logger.debug('%s rho_%d = %s (%s)', fam.name, p, result.value, method)

    if cache is not None:
        cache.put(fam.cache_id, p, method, result.to_json(), **key)
    return result


def truncated_product(densities):
    return math.prod(float(d.value) for d in densities)


def joint_density(fam, primes, budget=DENSITY_ENUMERATION_BUDGET):
    """
    Share of b mod N^2, N = prod(primes), with p^2 not dividing the discriminant for every p
    """
    n = math.prod(primes)
    mod = n * n
    total = mod ** fam.rank
    if total > budget:
        raise error.BudgetExceeded('joint density mod %d^2 needs %d evaluations, budget %d' % (n, total, budget))
    shape = (mod,) * fam.rank
    count = 0
    for start in range(0, total, CHUNK_SIZE):
        flat = np.arange(start, min(start + CHUNK_SIZE, total), dtype=np.int64)
        values = fam.form.evaluate_mod(np.unravel_index(flat, shape), mod)
        ok = np.ones(values.shape, dtype=bool)
        for p in primes:
            ok &= values % (p * p) != 0
        count += int(np.count_nonzero(ok))
    return Fraction(count, total)


@dataclass(frozen=True)
class EmpiricalCount:
    X: Fraction
    squarefree: int
    total: int
    uncertain: int = 0
    degenerate: int = 0

    @property
    def ratio(self):
        return Fraction(self.squarefree, self.total) if self.total else Fraction(0)

    @property
    def inconclusive(self):
        return self.uncertain > UNCERTAIN_FRACTION * self.total

    def to_json(self):
        return {
            'X': fraction_str(self.X),
            'count_squarefree': self.squarefree,
            'count_total': self.total,
            'uncertain': self.uncertain,
            'degenerate': self.degenerate,
            'ratio': float(self.ratio),
            'inconclusive': self.inconclusive,
        }


def _squarefree_chunk(form, box, bound, max_abs, span):
    start, stop = span
    coords = box.coordinates(start, stop)
    if max_abs < INT64_LIMIT:
        delta = form.evaluate_array(coords)
        squarefree, uncertain = squarefree_mask(delta, bound, max_abs)
        return (int(squarefree.sum()), int(uncertain.sum()), int(np.count_nonzero(delta == 0)), stop - start)

    counts = [0, 0, 0, stop - start]
    for values in zip(*(c.tolist() for c in coords)):
        delta = form.evaluate(values)
        status = squarefree_status(delta, bound)
        if delta == 0:
            counts[2] += 1
        elif status is None:
            counts[1] += 1
        elif status:
            counts[0] += 1
    return tuple(counts)


def empirical_density(fam, X, squarefree_bound=SQUAREFREE_TRIAL_BOUND, executor=None, budget=BOX_BUDGET):
    """
    Squarefree discriminants among the integer points of height < X
    """
    box = _box(fam, X, budget)
    max_abs = fam.form.max_abs(box.bounds)
    if max_abs >= INT64_LIMIT:
        logger.info('%s X=%s: |disc| up to %d, using the scalar path', fam.name, box.X, max_abs)

    work = functools.partial(_squarefree_chunk, fam.form, box, squarefree_bound, max_abs)
    parts = map_chunks(work, box.chunks(), executor)
    squarefree, uncertain, degenerate, total = (sum(column) for column in zip(*parts))
    count = EmpiricalCount(box.X, squarefree, total, uncertain, degenerate)
    if count.inconclusive:
        logger.warning('%s X=%s: %d of %d values undecided', fam.name, box.X, uncertain, total)
    logger.info('%s X=%s: %d of %d squarefree', fam.name, box.X, squarefree, total)
    return count


@functools.lru_cache(maxsize=None)
def family_table(fam, p):
    """Divisibility type of every class in (Z/p^2)^r, perturbing the family's own coordinates"""
    shape = (p * p,) * fam.rank
    classes = [a.ravel() for a in np.indices(shape, dtype=np.int64)]
    return perturbation_codes(fam.form, classes, p).reshape(shape)


@functools.lru_cache(maxsize=1 << 16)
def _fast_type(coeffs, p):
    return fast_divisibility_type(MonicPoly(coeffs), p)


def family_type(fam, values, p):
    """Divisibility type of one family member at p"""
    mod = p * p
    values = tuple(int(v) % mod for v in values)
    degree = fam.polynomial_degree
    if degree is not None and p > 2 and degree % p and fam.disc_normalizer % p:
        return _fast_type(fam.polynomial(values).coeffs, p)
    classes = [np.array([v], dtype=np.int64) for v in values]
    return DivisibilityType(int(perturbation_codes(fam.form, classes, p)[0]))


def gradient_types(fam, values, p):
    """
    Types at points with p^2 | disc, p a scalar or one prime per point

    disc(b + p c) = disc(b) + p grad(b).c mod p^2, so the type is strong
    exactly when the gradient vanishes mod p.
    """
    p = np.asarray(p, dtype=np.int64)
    escapes = np.zeros(np.shape(values[0]), dtype=bool)
    for k in range(fam.rank):
        escapes |= fam.form.derivative(k).evaluate_array(values) % p != 0
    return np.where(escapes, DivisibilityType.WEAK, DivisibilityType.STRONG).astype(np.int8)


def family_types(fam, values, p, budget=BRUTE_FORCE_BUDGET):
    """Types at points with p^2 | disc: a residue table for small p, the gradient test above"""
    if p ** (3 * fam.rank) <= budget:
        table = family_table(fam, p)
        index = np.ravel_multi_index([np.asarray(v, dtype=np.int64) % (p * p) for v in values], table.shape)
        return table.ravel()[index]
    return gradient_types(fam, values, p)


@dataclass
class TailProfile:
    X: Fraction
    strong: dict = field(default_factory=dict)
    weak: dict = field(default_factory=dict)
    # Points with nonzero discriminant
    total: int = 0
    degenerate: int = 0

    def counts(self, M):
        return self.strong[M], self.weak[M]

    def to_json(self):
        return {
            'X': fraction_str(self.X),
            'total': self.total,
            'degenerate': self.degenerate,
            'strong': {str(M): c for M, c in sorted(self.strong.items())},
            'weak': {str(M): c for M, c in sorted(self.weak.items())},
        }


def _tail_chunk(fam, box, Ms, max_abs, span):
    start, stop = span
    coords = box.coordinates(start, stop)
    delta = np.abs(fam.form.evaluate_array(coords))
    nonzero = delta != 0
    cof = np.where(nonzero, delta, 1)
    largest = {
        DivisibilityType.STRONG: np.zeros(delta.shape, dtype=np.int64),
        DivisibilityType.WEAK: np.zeros(delta.shape, dtype=np.int64),
    }

    # Primes arrive in increasing order, so the last write is the largest
    for p in primes_upto(icbrt(max_abs) + 1).tolist():
        hit = np.flatnonzero(cof % p == 0)
        if hit.size == 0:
            continue
        square = hit[delta[hit] % (p * p) == 0]
        if square.size:
            codes = family_types(fam, [c[square] for c in coords], p)
            for kind, arr in largest.items():
                arr[square[codes == kind]] = p
        while hit.size:
            cof[hit] //= p
            hit = hit[cof[hit] % p == 0]

    # Cofactors are below the cube of the trial bound: q^2 | disc with q large iff cof = q^2
    s = np.floor(np.sqrt(cof.astype(np.float64))).astype(np.int64)
    root = np.zeros(cof.shape, dtype=np.int64)
    for t in (s - 1, s, s + 1):
        exact = (t * t == cof) & (cof > 1)
        root[exact] = t[exact]
    big = np.flatnonzero(root)
    if big.size:
        codes = gradient_types(fam, [c[big] for c in coords], root[big])
        for kind, arr in largest.items():
            arr[big[codes == kind]] = root[big[codes == kind]]

    strong = {M: int(np.count_nonzero(largest[DivisibilityType.STRONG] > M)) for M in Ms}
    weak = {M: int(np.count_nonzero(largest[DivisibilityType.WEAK] > M)) for M in Ms}
    return strong, weak, int(nonzero.sum()), int(delta.size - nonzero.sum())


def tail_profile(fam, X, Ms, executor=None, budget=BOX_BUDGET):
    """
    Points of height < X with p^2 strongly (weakly) dividing the discriminant for some p > M
    """
    box = _box(fam, X, budget)
    max_abs = fam.form.max_abs(box.bounds)
    if max_abs >= INT64_LIMIT:
        raise error.BudgetExceeded('tail counts need |disc| below 2^62, box reaches %d' % max_abs)
    slope = max(fam.form.derivative(k).max_abs(box.bounds) for k in range(fam.rank))
    if slope >= INT64_LIMIT:
        raise error.BudgetExceeded('tail counts need gradients below 2^62, box reaches %d' % slope)
    Ms = tuple(sorted(set(Ms)))

    work = functools.partial(_tail_chunk, fam, box, Ms, max_abs)
    profile = TailProfile(box.X, {M: 0 for M in Ms}, {M: 0 for M in Ms})
    for strong, weak, total, degenerate in map_chunks(work, box.chunks(), executor):
        for M in Ms:
            profile.strong[M] += strong[M]
            profile.weak[M] += weak[M]
        profile.total += total
        profile.degenerate += degenerate
    logger.info('%s X=%s tail profile over %d points', fam.name, box.X, profile.total)
    return profile


def tail_counts(fam, X, M, executor=None, budget=BOX_BUDGET):
    return tail_profile(fam, X, [M], executor, budget).counts(M)


@dataclass(frozen=True)
class TailEstimate:
    """
    Densities for primes above the truncation point: exact up to reached, fitted beyond
    """

    reached: int
    product: float
    # Sum over p > reached of c/p^2, with c fitted at the largest primes enumerated
    remainder: float

    @property
    def factor(self):
        return self.product * math.exp(-self.remainder)


def _tail_density(fam, p):
    return local_density(fam, p, method=ENUM, engine='lift')


def tail_estimate(fam, p_max, bound=TAIL_PRIME_BOUND, executor=None, budget=DENSITY_ENUMERATION_BUDGET,
                  fit=()):
    """
    Product of rho_p over p_max < p <= bound by lifting, plus the remainder beyond

    The remainder takes 1 - rho_p = c/p^2 with c averaged over the last few
    primes (or over fit when no prime lies in range) and sums it as c/(q log q).
    """
    primes = [p for p in primes_upto(bound).tolist()
              if p > p_max and p ** fam.rank <= budget and p * p < LIFT_MODULUS_LIMIT]
    densities = map_chunks(functools.partial(_tail_density, fam), primes, executor)
    last = (list(fit) + densities)[-TAIL_FIT_PRIMES:]
    reached = max([p_max] + primes)
    if last and reached > 1:
        c = sum((1 - float(d.value)) * d.p ** 2 for d in last) / len(last)
        remainder = c / (reached * math.log(reached))
    else:
        remainder = 0.0
    tail = TailEstimate(reached, float(truncated_product(densities)), remainder)
    logger.info('%s: product over %d < p <= %d is %.6f, remainder %.2e', fam.name, p_max, reached,
                tail.product, tail.remainder)
    return tail


@dataclass
class DensityReport:
    family: str
    p_max: int
    seed: int
    per_prime: list
    truncated_product: float
    empirical: EmpiricalCount
    sigma: float
    z: float
    tail: TailEstimate
    corrected_z: float
    verdict: str
    samples: int = MONTE_CARLO_SAMPLES
    model: str = 'height-box points as i.i.d. Bernoulli draws, plus Monte-Carlo variance of sampled primes'

    @property
    def corrected_product(self):
        return self.truncated_product * self.tail.factor

    def to_json(self):
        return {
            'schema_version': SCHEMA_VERSION,
            'family': self.family,
            'p_max': self.p_max,
            'seed': self.seed,
            'samples': self.samples,
            'per_prime': [d.to_json() for d in self.per_prime],
            'truncated_product': self.truncated_product,
            'empirical': self.empirical.to_json(),
            'sigma': self.sigma,
            'z': self.z,
            'tail': {
                'reached': self.tail.reached,
                'product': self.tail.product,
                'remainder': self.tail.remainder,
            },
            'corrected_product': self.corrected_product,
            'corrected_z': self.corrected_z,
            'verdict': self.verdict,
            'model': self.model,
        }

    def to_csv(self):
        return densities_csv(self.per_prime)


def _compare_density(fam, seed, samples, exact_cap, cache, p):
    method = ENUM if p <= exact_cap else MONTECARLO
    return local_density(fam, p, method=method, samples=samples, seed=seed, cache=cache)


def _z_score(deviation, sigma):
    if sigma > 0:
        return deviation / sigma
    return 0.0 if deviation == 0 else None


def compare(fam, p_max, X, seed=0, samples=MONTE_CARLO_SAMPLES, exact_cap=EXACT_DENSITY_PRIME_CAP,
            squarefree_bound=SQUAREFREE_TRIAL_BOUND, executor=None, cache=None, sigmas=AGREEMENT_SIGMAS,
            tail_bound=TAIL_PRIME_BOUND):
    """
    Truncated Euler product of local densities against the empirical squarefree ratio

    The verdict tests the truncated product itself at the given number of
    standard errors. The primes above p_max are reported next to it as a
    tail estimate, with the z-score against the corrected product.
    """
    primes = primes_upto(p_max).tolist()
    work = functools.partial(_compare_density, fam, seed, samples, exact_cap, cache)
    per_prime = map_chunks(work, primes, executor)
    product = truncated_product(per_prime)
    empirical = empirical_density(fam, X, squarefree_bound, executor)
    tail = tail_estimate(fam, p_max, tail_bound, executor, fit=[d for d in per_prime if d.method == ENUM])

    n = empirical.total
    ratio = float(empirical.ratio)
    variance = ratio * (1 - ratio) / n if n else 0.0
    for d in per_prime:
        v = float(d.value)
        if d.method == MONTECARLO and v > 0:
            variance += product ** 2 * (1 - v) / (v * d.samples)
    sigma = math.sqrt(variance)

    z = _z_score(ratio - product, sigma)
    corrected_z = _z_score(ratio - product * tail.factor, sigma)

    if empirical.inconclusive:
        verdict = 'INCONCLUSIVE'
    elif n < MIN_POWERED_POINTS or p_max < 5:
        verdict = 'UNDERPOWERED'
    elif z is not None and abs(z) <= sigmas:
        verdict = 'AGREE'
    else:
        verdict = 'DISAGREE'
    logger.info('%s: product %.6f, ratio %.6f, sigma %.2e, z %s, %s', fam.name, product, ratio, sigma, z, verdict)

    return DensityReport(
        family=fam.name,
        p_max=p_max,
        seed=seed,
        per_prime=per_prime,
        truncated_product=product,
        empirical=empirical,
        sigma=sigma,
        z=z,
        tail=tail,
        corrected_z=corrected_z,
        verdict=verdict,
        samples=samples,
    )
