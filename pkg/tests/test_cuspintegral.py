import copy
import dataclasses
from fractions import Fraction

import numpy as np
import pytest

from ade_sieve import error, register
from ade_sieve.cases import DEvenCase, DOddCase
from ade_sieve.cases import eseries
from ade_sieve.cases.dseries import _parse
from ade_sieve.cuspintegral import (
    AsymptoticBound,
    BoxDomain,
    apply_m_step,
    bound_value,
    integrate_monomial,
    numeric_integral,
    verify_case,
    verify_cases,
)
from ade_sieve.vinberg import ExponentVector

DIM_V = {'E6': 42, 'E7': 70, 'E8': 128, 'D4': 16, 'D5': 25, 'D6': 36, 'D7': 49}


def test_every_shipped_case_is_registered():
    assert sorted(register.case_list) == sorted(DIM_V)


def test_make_returns_registered_class():
    assert type(register.make('E6')) is eseries.E6Case
    with pytest.raises(error.UnregisteredCase):
        register.make('E9')
    with pytest.raises(AssertionError):
        register.register('E6', eseries.E6Case)


@pytest.mark.parametrize('case_id', sorted(DIM_V))
def test_verify_case_passes(case_id):
    report = register.make(case_id).verify()
    assert report.passed, report.table()
    assert report.bound.x_exponent == DIM_V[case_id]
    assert report.bound.m_power == 1
    assert report.pre_m_bound.x_exponent == DIM_V[case_id]


def test_e6_bound_text():
    report = register.make('E6').verify()
    assert str(report.bound) == '(1/M)·X^42·X^ε'
    assert 'final bound (1/M)·X^42·X^ε' in report.table()


def test_e6_volume_vector():
    rec = register.make('E6').record
    assert rec.volume.x_prefactor == 26
    assert rec.volume.exponents == (-12, -17, -21, -11)


def test_e7_modular_vector():
    rec = register.make('E7').record
    assert rec.modular.exponents == (7, 12, 15, 16, 15, 12, 7)


def test_e7_volume_erratum():
    case = register.make('E7')
    assert case.record.volume['beta_5'] == -17
    [erratum] = [e for e in case.record.errata if e.field == 'volume']
    assert (erratum.name, Fraction(erratum.printed), Fraction(erratum.corrected)) == ('beta_5', -15, -17)


def test_e8_basis_erratum():
    rec = register.make('E8').record
    [erratum] = rec.errata
    assert erratum.printed == [6, 5]
    assert erratum.corrected == [6, 7]
    beta_2 = rec.basis_vectors[rec.basis_names.index('beta_2')]
    assert beta_2 == (0, 0, 0, 0, 0, 1, 1, 0)


def _with_e6_erratum(monkeypatch, printed):
    data = copy.deepcopy(eseries.load_case_data())
    data['exceptional']['E6']['errata'] = [
        {'field': 'modular', 'name': 'beta_2', 'printed': printed, 'corrected': 15},
    ]
    monkeypatch.setattr(eseries, 'load_case_data', lambda: data)


def test_modular_erratum_is_applied(monkeypatch):
    _with_e6_erratum(monkeypatch, 14)
    rec = eseries.E6Case().record
    assert rec.modular['beta_2'] == 15
    assert [e.field for e in rec.errata] == ['modular']


def test_modular_erratum_must_match_printed_value(monkeypatch):
    _with_e6_erratum(monkeypatch, 13)
    with pytest.raises(AssertionError):
        eseries.E6Case()


def test_corrupted_record_names_the_field():
    rec = register.make('E6').record
    exponents = list(rec.volume.exponents)
    exponents[0] += 1
    bad = dataclasses.replace(rec, volume=ExponentVector(rec.basis_names, exponents, rec.volume.x_prefactor))

    report = verify_case(bad)
    assert not report.passed
    assert [c.field for c in report.mismatches()] == ['volume[beta_1]']
    with pytest.raises(error.VerificationFailure, match=r'volume\[beta_1\]'):
        report.raise_for_failure()


def test_corrupted_dim_v():
    rec = dataclasses.replace(register.make('D5').record, dim_v=24)
    assert [c.field for c in verify_case(rec).mismatches()] == ['dim_v']


def test_verify_cases_matches_serial():
    records = [register.make(case_id).record for case_id in ('E6', 'D4')]
    assert [r.passed for r in verify_cases(records)] == [True, True]


def test_report_json():
    payload = register.make('D4').verify().to_json()
    assert payload['status'] == 'PASS'
    assert payload['final_bound'] == '(1/M)·X^16·X^ε'
    assert len(payload['errata']) == 6


@pytest.mark.parametrize('n', [2, 3, 4, 5])
@pytest.mark.parametrize('cls', [DOddCase, DEvenCase])
def test_d_series_formulas(cls, n):
    case = cls(n=n)
    report = case.verify()
    assert report.passed, report.table()
    assert report.bound.x_exponent == case.dynkin.rank ** 2


@pytest.mark.parametrize('cls', [DOddCase, DEvenCase])
def test_d_series_final_bound_identity(cls):
    case = cls()
    assert (case.symbolic_final() - _parse(case.data['final'])).expand() == 0


def test_domain_errors():
    with pytest.raises(error.DomainError):
        BoxDomain(('beta_1',), (-1,))
    dom = BoxDomain(('beta_1',), (1,))
    with pytest.raises(error.DomainError):
        dom['beta_2']


def test_integrate_monomial():
    names = ('b1', 'b2', 'b3')
    e = ExponentVector(names, (-1, -2, 0), 1)
    dom = BoxDomain(names, (1, 3, 2))
    assert integrate_monomial(e, dom) == AsymptoticBound(Fraction(8), 1, 0, True)


def test_bound_is_monotone_in_domain():
    rec = register.make('E7').record
    reduced = rec.reduced
    base = integrate_monomial(reduced, rec.domain).x_exponent
    for name, exponent in zip(reduced.basis_names, reduced.exponents):
        widened = integrate_monomial(reduced, rec.domain.widen(name, 1)).x_exponent
        assert widened >= base
        if exponent < 0:
            assert widened > base


@pytest.mark.parametrize('X', [50, 500])
def test_numeric_integral_matches_order(X):
    names = ('b1', 'b2')
    e = ExponentVector(names, (-1, -2), 0)
    dom = BoxDomain(names, (1, 1))
    bound = integrate_monomial(e, dom)
    ratio = numeric_integral(e, dom, X) / bound_value(bound, X)
    assert 1 / 32 <= ratio <= 32


def test_numeric_integral_flat_direction():
    names = ('b1', 'b2')
    e = ExponentVector(names, (-1, 2))
    dom = BoxDomain(names, (1, 0))
    bound = integrate_monomial(e, dom)
    assert bound_value(bound, 100) == pytest.approx(100.0)
    assert numeric_integral(e, dom, 100) == pytest.approx(99.0, rel=1e-3)
    assert numeric_integral(ExponentVector(names[:1], (-1,)), BoxDomain(names[:1], (0,)), 100) == 1.0


@pytest.mark.parametrize('X', [10, 100])
@pytest.mark.parametrize('seed', range(6))
def test_numeric_integral_matches_random_orders(X, seed):
    rng = np.random.default_rng(seed)
    size = int(rng.integers(2, 5))
    names = tuple('b%d' % (i + 1) for i in range(size))
    e = ExponentVector(names, tuple(int(v) for v in rng.integers(-2, 3, size)), int(rng.integers(0, 3)))
    dom = BoxDomain(names, tuple(int(v) for v in rng.integers(0, 3, size)))
    ratio = numeric_integral(e, dom, X, seed=seed) / bound_value(integrate_monomial(e, dom), X)
    assert 1 / 32 <= ratio <= 32, (e, dom)


def test_apply_m_step():
    names = ('beta_1', 'beta_2', 'beta_3', 'beta_4')
    integrand = ExponentVector(names, (-4, -3, -3, -1), 26)
    reduced = apply_m_step(integrand, ExponentVector(names, (0, 1, 1, 1), 4))
    assert reduced.exponents == (-4, -2, -2, 0)
    assert reduced.x_prefactor == 30
    assert reduced.m_power == 1

    unchanged = apply_m_step(integrand, ExponentVector.zero(names))
    assert (unchanged.exponents, unchanged.x_prefactor, unchanged.m_power) == (integrand.exponents, 26, 1)


def test_e8_m_step():
    names = tuple('beta_%d' % i for i in range(1, 9))
    integrand = ExponentVector(names, (-4, -4, -4, -3, -3, -3, -1, -2), 72)
    reduced = apply_m_step(integrand, ExponentVector(names, (0, 0, 0, 1, 1, 1, 1, 0), 8))
    assert reduced.exponents == (-4, -4, -4, -2, -2, -2, 0, -2)
    assert reduced.x_prefactor == 80
