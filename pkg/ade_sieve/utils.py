import os

# Version stamped into every JSON artifact
SCHEMA_VERSION = 1

# Invariant degrees of the Weyl group, keyed by exceptional type
E_DEGREES = {
    6: (2, 5, 6, 8, 9, 12),
    7: (2, 6, 8, 10, 12, 14, 18),
    8: (2, 8, 12, 14, 18, 20, 24, 30),
}

# Number of marked points on the curves of each family (by rank parity for A and D)
MARKED_POINTS = {
    ('A', 0): 1,
    ('A', 1): 2,
    ('D', 0): 3,
    ('D', 1): 2,
    ('E', 6): 1,
    ('E', 7): 2,
    ('E', 8): 1,
}

# dim V of the exceptional representations
E_DIM_V = {
    6: 42,
    7: 70,
    8: 128,
}

# Perturbation scans beyond this many points use the shift criterion only
BRUTE_FORCE_BUDGET = 10**7

# Fibre evaluations allowed for an exact local density
DENSITY_ENUMERATION_BUDGET = 10**8

# Points allowed in an integer height box
BOX_BUDGET = 10**8

# Largest trial divisor used by the squarefree test
SQUAREFREE_TRIAL_BOUND = 10**6

# Pollard rho iterations per attempt, and attempts with fresh constants
RHO_ITERATIONS = 200000
RHO_ATTEMPTS = 8

# An empirical count is inconclusive above this share of undecided values
UNCERTAIN_FRACTION = 0.001

# compare() enumerates local densities exactly up to this prime
EXACT_DENSITY_PRIME_CAP = 13

# Samples drawn per prime by the Monte-Carlo density estimate
MONTE_CARLO_SAMPLES = 20000

# Height-box points processed per work unit
CHUNK_SIZE = 1 << 21

# compare() multiplies in exact densities above p_max up to this prime
TAIL_PRIME_BOUND = 500

# Primes whose exact densities fit the constant of the remainder beyond it
TAIL_FIT_PRIMES = 5

# Significance of the density comparison, in standard errors
AGREEMENT_SIGMAS = 3

CACHE_ENV_VAR = 'ADE_SIEVE_CACHE_DIR'


def default_cache_dir():
    """Cache directory from the environment, or the per-user default"""
    path = os.environ.get(CACHE_ENV_VAR)
    if path:
        return path
    return os.path.join(os.path.expanduser('~'), '.cache', 'ade_sieve')


def map_chunks(fn, items, executor=None):
    """Map over work units, on the executor when one is given"""
    if executor is None:
        return list(map(fn, items))
    return list(executor.map(fn, items))
