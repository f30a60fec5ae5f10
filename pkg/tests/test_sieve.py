import itertools
import json
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np
import pytest
import sympy

from ade_sieve import error, seeding, sieve
from ade_sieve.anfamily import DivisibilityType
from ade_sieve.arith import primes_upto
from ade_sieve.reports import DensityCache, dumps
from ade_sieve.sieve import (
    EmpiricalCount,
    FamilySpec,
    HeightBox,
    compare,
    empirical_density,
    family_table,
    family_type,
    gradient_types,
    height,
    joint_density,
    local_density,
    make_family,
    tail_counts,
    tail_estimate,
    tail_profile,
    truncated_product,
)


def a2_disc(a, b):
    return -4 * a ** 3 - 27 * b ** 2


def squarefree(n):
    return n != 0 and all(e == 1 for e in sympy.factorint(abs(n)).values())


@pytest.fixture
def a2():
    return make_family('A2')


@pytest.fixture
def unit():
    u, v = sympy.symbols('u v')
    return FamilySpec.custom('unit', sympy.Integer(1), (u, v), (2, 3))


def test_a2_family(a2):
    assert a2.degrees == (2, 3)
    assert a2.disc_normalizer == 1
    assert a2.discriminant((5, 5)) == a2_disc(5, 5)
    assert a2.polynomial((5, 5)).coeffs == (0, 5, 5)


def test_a1_normalizer():
    a1 = make_family('A1')
    assert a1.disc_normalizer == 4
    assert a1.discriminant((3,)) == -3


def test_only_a_families():
    with pytest.raises(error.InvalidDynkinType):
        make_family('D4')


def test_height_box():
    box = HeightBox(2, (2, 3))
    assert box.bounds == (3, 7)
    assert box.size == 7 * 15
    assert box.volume == 128.0
    assert (3, -7) in box and (4, 0) not in box
    a, b = box.coordinates(0, box.size)
    assert a.min() == -3 and a.max() == 3 and b.min() == -7 and b.max() == 7
    assert len({(int(s), int(t)) for s, t in zip(a, b)}) == box.size


def test_height():
    assert height((4, -8), (2, 3)) == 2.0
    assert height((0, 0), (2, 3)) == 0.0


def test_rational_height_box():
    assert HeightBox(Fraction(3, 2), (2, 3)).bounds == (2, 3)
    assert HeightBox(1, (2, 3)).bounds == (0, 0)


@pytest.mark.parametrize('p, expected', [(2, Fraction(1, 2)), (3, Fraction(2, 3))])
def test_a2_small_densities(a2, p, expected):
    d = local_density(a2, p)
    assert d.value == expected
    assert d.method == sieve.ENUM
    assert d.samples == (p * p) ** 2


@pytest.mark.parametrize('p', [2, 3, 5, 7])
def test_enumeration_engines_agree_a2(a2, p):
    assert local_density(a2, p, engine='flat').value == local_density(a2, p, engine='fibre').value


@pytest.mark.parametrize('p', [2, 3, 5])
def test_enumeration_engines_agree_a4(p):
    a4 = make_family('A4')
    assert local_density(a4, p, engine='flat').value == local_density(a4, p, engine='fibre').value


@pytest.mark.slow
def test_enumeration_engines_agree_a4_at_7():
    a4 = make_family('A4')
    assert local_density(a4, 7, engine='flat').value == local_density(a4, 7, engine='fibre').value


@pytest.mark.parametrize('name, trace_zero, primes', [
    ('A1', True, [2, 3, 5, 7]),
    ('A2', True, [2, 3, 5, 7, 11]),
    ('A2', False, [2, 3]),
    ('A3', True, [2, 3, 5]),
    ('A4', True, [2, 3]),
])
def test_lift_engine_matches_enumeration(name, trace_zero, primes):
    fam = FamilySpec.from_dynkin(name, trace_zero=trace_zero)
    for p in primes:
        lifted = local_density(fam, p, engine='lift')
        assert lifted.value == local_density(fam, p, engine='flat').value
        assert lifted.samples == (p * p) ** fam.rank


def test_lift_engine_budget(a2):
    assert local_density(a2, 5, method='enum', engine='lift', budget=25).method == sieve.ENUM
    with pytest.raises(error.BudgetExceeded):
        local_density(a2, 7, method='enum', engine='lift', budget=25)


def test_density_matches_definition(a2):
    mod = 25
    count = sum(1 for a, b in itertools.product(range(mod), repeat=2) if a2_disc(a, b) % mod)
    assert local_density(a2, 5).value == Fraction(count, mod * mod)


@pytest.mark.parametrize('p', [5, 7, 11])
def test_monte_carlo_within_four_sigma(a2, p):
    exact = float(local_density(a2, p).value)
    mc = local_density(a2, p, method='montecarlo', samples=20000, seed=3)
    sigma = (exact * (1 - exact) / mc.samples) ** 0.5
    assert abs(float(mc.value) - exact) <= 4 * sigma
    assert mc.seed == 3
    assert local_density(a2, p, method='montecarlo', samples=20000, seed=3) == mc


def test_budget_refusal(a2):
    with pytest.raises(error.BudgetExceeded):
        local_density(a2, 5, budget=100, allow_fallback=False)
    with pytest.raises(error.BudgetExceeded):
        local_density(a2, 5, method='enum', budget=100)
    assert local_density(a2, 5, budget=100).method == sieve.MONTECARLO


def test_constant_family_density(unit):
    assert local_density(unit, 5).value == 1
    assert local_density(unit, 101, method='montecarlo').value == 1


def test_truncated_products_nonincreasing(a2):
    densities = [local_density(a2, p) for p in primes_upto(13).tolist()]
    products = [truncated_product(densities[:k]) for k in range(1, len(densities) + 1)]
    assert all(0 < q <= 1 for q in products)
    assert all(x >= y for x, y in zip(products, products[1:]))


def test_joint_density_factorizes(a2):
    rho = [local_density(a2, p).value for p in (2, 3)]
    assert joint_density(a2, [2, 3]) == rho[0] * rho[1]


def test_density_cache(a2, tmp_path, monkeypatch):
    cache = DensityCache(str(tmp_path))
    first = local_density(a2, 5, cache=cache)

    def fail(*args):
        raise AssertionError('cache miss')

    monkeypatch.setattr(sieve, '_count_flat', fail)
    assert local_density(a2, 5, cache=cache) == first
    assert list(tmp_path.rglob('*.json'))


def test_density_cache_separates_families_with_one_name(a2, tmp_path):
    cache = DensityCache(str(tmp_path))
    full = FamilySpec.from_dynkin('A2', trace_zero=False)
    assert full.name == a2.name
    assert full.cache_id != a2.cache_id
    assert local_density(a2, 3, cache=cache).value == Fraction(2, 3)
    assert local_density(full, 3, cache=cache).value == local_density(full, 3).value

    u, v = sympy.symbols('u v')
    one = FamilySpec.custom('same', u * v + 1, (u, v), (2, 3))
    other = FamilySpec.custom('same', u * u - v, (u, v), (2, 3))
    assert local_density(one, 3, cache=cache) == local_density(one, 3)
    assert local_density(other, 3, cache=cache) == local_density(other, 3)


def _draws(*key):
    return seeding.stream(*key).integers(0, 2**62, size=4).tolist()


def test_seed_streams_are_keyed():
    assert _draws(3, 5) == _draws(3, 5)
    assert _draws(3, 5) != _draws(3, 7)
    assert _draws(3, 5) != _draws(4, 5)


def test_empirical_density_small_box(a2):
    count = empirical_density(a2, 2)
    values = [a2_disc(a, b) for a in range(-3, 4) for b in range(-7, 8)]
    expected = sum(1 for v in values if squarefree(v))
    assert count.total == 105
    assert count.squarefree == expected
    # (0, 0) and the cusp points (-3, 2), (-3, -2)
    assert count.degenerate == values.count(0) == 3
    assert count.uncertain == 0
    assert count.ratio == Fraction(expected, 105)


def test_empirical_density_degenerate_box(a2):
    count = empirical_density(a2, 1)
    assert (count.squarefree, count.total, count.degenerate) == (0, 1, 1)
    assert count.ratio == 0


def test_empirical_density_threads(a2):
    serial = empirical_density(a2, 4)
    with ThreadPoolExecutor(max_workers=3) as executor:
        assert empirical_density(a2, 4, executor=executor) == serial


def test_empirical_density_trial_bound(a2):
    # A small trial bound pushes most values through the cofactor path
    assert empirical_density(a2, 3, squarefree_bound=5) == empirical_density(a2, 3)


def test_box_budget(a2):
    with pytest.raises(error.BudgetExceeded):
        empirical_density(a2, 30, budget=10**6)


def oracle_types(a, b, p):
    """Strong iff the first-order change 12a^2 c1 + 54b c2 vanishes mod p for every c"""
    if (12 * a * a) % p == 0 and (54 * b) % p == 0:
        return DivisibilityType.STRONG
    return DivisibilityType.WEAK


def test_tail_profile_against_factorization(a2):
    Ms = [0, 2, 3, 5, 10, 100]
    profile = tail_profile(a2, 5, Ms)

    strong = {M: 0 for M in Ms}
    weak = {M: 0 for M in Ms}
    total = 0
    for a in range(-24, 25):
        for b in range(-124, 125):
            delta = a2_disc(a, b)
            if delta == 0:
                continue
            total += 1
            largest = {DivisibilityType.STRONG: 0, DivisibilityType.WEAK: 0}
            for p, e in sympy.factorint(abs(delta)).items():
                if e >= 2:
                    kind = oracle_types(a, b, p)
                    largest[kind] = max(largest[kind], p)
            for M in Ms:
                strong[M] += largest[DivisibilityType.STRONG] > M
                weak[M] += largest[DivisibilityType.WEAK] > M

    assert profile.total == total
    assert profile.strong == strong
    assert profile.weak == weak


def test_tail_counts_edge_cases(a2):
    assert tail_counts(a2, 3, 10**9) == (0, 0)
    profile = tail_profile(a2, 6, [1, 2, 4, 8, 16, 32])
    for M, N in zip([1, 2, 4, 8, 16], [2, 4, 8, 16, 32]):
        assert profile.strong[N] <= profile.strong[M]
        assert profile.weak[N] <= profile.weak[M]


@pytest.mark.parametrize('p', [5, 7, 11, 13])
def test_gradient_types_match_residue_table(a2, p):
    table = family_table(a2, p)
    a, b = (v.ravel() for v in np.indices(table.shape, dtype=np.int64))
    divisible = table.ravel() != DivisibilityType.NONE
    codes = gradient_types(a2, [a[divisible], b[divisible]], p)
    assert (codes == table.ravel()[divisible]).all()


@pytest.mark.parametrize('p', [17, 19, 23])
def test_gradient_types_match_shift_criterion(a2, p):
    mod = p * p
    a, b = (v.ravel() for v in np.indices((mod, mod), dtype=np.int64))
    on = a2_disc(a, b) % mod == 0
    a, b = a[on], b[on]
    codes = gradient_types(a2, [a, b], p)
    assert set(codes.tolist()) == {DivisibilityType.STRONG, DivisibilityType.WEAK}
    assert codes.tolist() == [family_type(a2, point, p) for point in zip(a.tolist(), b.tolist())]


def test_compare_small(a2):
    report = compare(a2, 7, 6, tail_bound=31)
    assert [d.p for d in report.per_prime] == [2, 3, 5, 7]
    assert report.truncated_product == pytest.approx(
        float(np.prod([float(d.value) for d in report.per_prime])))
    assert report.empirical.total == HeightBox(6, (2, 3)).size
    assert report.verdict in ('AGREE', 'DISAGREE')
    assert (report.verdict == 'AGREE') == (abs(report.z) <= 3)
    assert report.tail.reached == 31
    assert report.corrected_product < report.truncated_product


def test_tail_estimate_is_exact_in_range(a2):
    tail = tail_estimate(a2, 7, bound=13)
    assert tail.reached == 13
    exact = [local_density(a2, p).value for p in (11, 13)]
    assert tail.product == pytest.approx(float(exact[0] * exact[1]))
    assert 0 < tail.remainder < 2 * 3 / (13 * np.log(13))
    assert tail.factor < tail.product


def test_tail_estimate_empty_range(a2):
    fit = [local_density(a2, p) for p in (5, 7)]
    tail = tail_estimate(a2, 7, bound=7, fit=fit)
    assert (tail.reached, tail.product) == (7, 1.0)
    assert tail.remainder > 0
    assert tail_estimate(a2, 7, bound=7).remainder == 0.0


def _crafted_count(offset):
    def count(fam, X, *args, **kwargs):
        total = 10 ** 8
        product = float(Fraction(1, 2) * Fraction(2, 3) * local_density(fam, 5).value * local_density(fam, 7).value)
        return EmpiricalCount(Fraction(X), round((product + offset) * total), total)
    return count


@pytest.mark.parametrize('offset, verdict', [(0.0, 'AGREE'), (-0.01, 'DISAGREE'), (0.01, 'DISAGREE')])
def test_compare_verdict_uses_plain_z(a2, monkeypatch, offset, verdict):
    monkeypatch.setattr(sieve, 'empirical_density', _crafted_count(offset))
    report = compare(a2, 7, 30, tail_bound=7)
    assert report.verdict == verdict
    assert abs(report.z) <= 3 if verdict == 'AGREE' else abs(report.z) > 100


def test_compare_is_reproducible(a2):
    first = dumps(compare(a2, 17, 4, seed=5, exact_cap=3, tail_bound=41).to_json())
    second = dumps(compare(a2, 17, 4, seed=5, exact_cap=3, tail_bound=41).to_json())
    assert first == second
    payload = json.loads(first)
    assert payload['schema_version'] == 1
    assert [d['method'] for d in payload['per_prime']] == ['ENUM', 'ENUM'] + ['MONTECARLO'] * 5
    assert payload['tail']['reached'] == 41
    assert payload['corrected_product'] < payload['truncated_product']


def test_compare_underpowered(a2):
    assert compare(a2, 2, Fraction(3, 2), tail_bound=13).verdict == 'UNDERPOWERED'


def test_compare_constant_family(unit):
    report = compare(unit, 7, 3)
    assert report.truncated_product == 1.0
    assert report.empirical.ratio == 1
    assert report.z == 0.0
    assert report.tail.product == 1.0
    assert report.tail.remainder == 0.0
    assert report.corrected_z == 0.0


@pytest.mark.slow
def test_sieve_agreement_at_height_30(a2):
    with ThreadPoolExecutor() as executor:
        report = compare(a2, 50, 30, seed=42, executor=executor)
    assert not report.empirical.inconclusive
    assert report.verdict in ('AGREE', 'DISAGREE')
    assert (report.verdict == 'AGREE') == (abs(report.z) <= 3), report.to_json()
    # The primes above 50 pull the product toward the observed ratio
    assert abs(report.corrected_z) < abs(report.z), report.to_json()


@pytest.mark.slow
def test_tail_decay_at_height_20(a2):
    Ms = [2, 5, 10, 20, 50]
    with ThreadPoolExecutor() as executor:
        profile = tail_profile(a2, 20, Ms, executor=executor)
    strong = [profile.strong[M] for M in Ms]
    weak = [profile.weak[M] for M in Ms]
    assert strong == sorted(strong, reverse=True)
    assert weak == sorted(weak, reverse=True)
    assert profile.weak[50] / profile.total < 0.02
