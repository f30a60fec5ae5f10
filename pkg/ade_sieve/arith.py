import functools
import logging

import numpy as np
import sympy

from ade_sieve.utils import RHO_ATTEMPTS, RHO_ITERATIONS, SQUAREFREE_TRIAL_BOUND

logger = logging.getLogger(__name__)


@functools.lru_cache(maxsize=32)
def primes_upto(n):
    """Primes <= n as an int64 array"""
    return np.fromiter((int(p) for p in sympy.sieve.primerange(2, n + 1)), dtype=np.int64)


def icbrt(n):
    """Largest c with c^3 <= n"""
    return int(sympy.integer_nthroot(n, 3)[0]) if n > 0 else 0


def factorize(n, trial_bound=1000, max_steps=RHO_ITERATIONS, attempts=RHO_ATTEMPTS):
    """
    Prime factorization {p: e} of |n|, or None if some cofactor resists rho
    """
    n = abs(n)
    assert n > 0
    factors = {}
    # factorint stops after trial division to the limit, leaving a cofactor
    stack = list(sympy.factorint(n, limit=max(trial_bound, 2)).items())
    while stack:
        m, e = stack.pop()
        if m == 1:
            continue
        if sympy.isprime(m):
            factors[m] = factors.get(m, 0) + e
            continue
        power = sympy.perfect_power(m)
        if power:
            base, k = power
            stack.append((base, e * k))
            continue
        f = sympy.pollard_rho(m, retries=attempts, max_steps=max_steps)
        if f is None:
            logger.debug('rho gave up on a %d-digit cofactor', len(str(m)))
            return None
        stack.extend([(f, e), (m // f, e)])
    return factors


def squarefree_status(n, trial_bound=SQUAREFREE_TRIAL_BOUND):
    """
    True/False for squarefree |n|, None when the cofactor cannot be decided
    """
    n = abs(n)
    if n == 0:
        return False
    bound = min(trial_bound, icbrt(n) + 1)
    for p in primes_upto(bound).tolist():
        if n % p == 0:
            n //= p
            if n % p == 0:
                return False
    return _cofactor_status(n, bound)


def _cofactor_status(c, bound):
    """Decide a cofactor whose prime factors all exceed bound"""
    if c == 1 or sympy.isprime(c):
        return True
    if sympy.integer_nthroot(c, 2)[1]:
        return False
    # At most two prime factors, not equal
    if c < bound ** 3:
        return True
    factors = factorize(c, trial_bound=0)
    if factors is None:
        return None
    return all(e == 1 for e in factors.values())


def squarefree_mask(values, trial_bound=SQUAREFREE_TRIAL_BOUND, max_abs=None):
    """
    Vectorized squarefree test: (squarefree, uncertain) boolean masks

    Trial division runs to min(trial_bound, cbrt(max|value|) + 1); a
    cofactor below the cube of that bound is non-squarefree exactly when it
    is a square, larger ones are decided one by one.
    """
    v = np.abs(np.asarray(values, dtype=np.int64))
    if max_abs is None:
        max_abs = int(v.max()) if v.size else 0
    bound = min(trial_bound, icbrt(max_abs) + 1)

    bad = v == 0
    cof = np.where(bad, 1, v)
    for p in primes_upto(bound).tolist():
        hit = np.flatnonzero(cof % p == 0)
        if hit.size == 0:
            continue
        cof[hit] //= p
        bad[hit[cof[hit] % p == 0]] = True

    s = np.floor(np.sqrt(cof.astype(np.float64))).astype(np.int64)
    square = np.zeros(cof.shape, dtype=bool)
    for t in (s - 1, s, s + 1):
        square |= (t * t == cof) & (cof > 1)
    bad |= square

    uncertain = np.zeros(cof.shape, dtype=bool)
    # Only reachable when trial_bound cut the trial division short
    large = np.flatnonzero(~bad & (cof >= bound ** 3))
    for i in large.tolist():
        status = _cofactor_status(int(cof[i]), bound)
        if status is None:
            uncertain[i] = True
        elif not status:
            bad[i] = True
    return ~bad & ~uncertain, uncertain
