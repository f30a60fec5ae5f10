import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ade_sieve import error
from ade_sieve.utils import SCHEMA_VERSION, map_chunks
from ade_sieve.vinberg import (
    CharacterBasis,
    ExponentVector,
    graded_data,
    modular_function,
    q_condition,
    sv_basis,
    volume_exponents,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BoxDomain:
    """
    X^{-a_i} << beta_i << 1 for every named character
    """

    names: tuple
    lower: tuple

    def __post_init__(self):
        object.__setattr__(self, 'names', tuple(self.names))
        object.__setattr__(self, 'lower', tuple(Fraction(a) for a in self.lower))
        for name, a in zip(self.names, self.lower):
            if a < 0:
                raise error.DomainError('lower exponent of %s must be >= 0, got %s' % (name, a))

    def __getitem__(self, name):
        if name not in self.names:
            raise error.DomainError('no domain bound for %s' % name)
        return self.lower[self.names.index(name)]

    def widen(self, name, delta):
        """Same domain with a_name increased by delta"""
        lower = list(self.lower)
        lower[self.names.index(name)] += Fraction(delta)
        return BoxDomain(self.names, lower)


@dataclass(frozen=True)
class AsymptoticBound:
    """
    (1/M)^m * X^x * (log X)^l
    """

    x_exponent: Fraction
    log_power: int = 0
    m_power: int = 0
    # Set when the log factor is absorbed into X^eps
    epsilon_flag: bool = False

    def __str__(self):
        parts = []
        if self.m_power == 1:
            parts.append('(1/M)')
        elif self.m_power:
            parts.append('(1/M)^%d' % self.m_power)
        parts.append('X^%s' % self.x_exponent)
        if self.epsilon_flag:
            parts.append('X^ε')
        elif self.log_power:
            parts.append('(log X)^%d' % self.log_power)
        return '·'.join(parts)

    def explicit(self):
        """The bound with its log power written out"""
        return str(AsymptoticBound(self.x_exponent, self.log_power, self.m_power, False))


@dataclass(frozen=True)
class Erratum:
    field: str
    name: str
    printed: object
    corrected: object
    note: str = ''


@dataclass
class CaseRecord:
    """
    Transcribed data of one case: basis, exponent vectors and domain
    """

    name: str
    dynkin: object
    basis_names: tuple
    basis_vectors: tuple
    volume: ExponentVector
    modular: ExponentVector
    q_condition: ExponentVector
    domain: BoxDomain
    dim_v: int
    expected_bound: AsymptoticBound
    integrand: ExponentVector = None
    reduced: ExponentVector = None
    errata: list = field(default_factory=list)


@dataclass(frozen=True)
class FieldCheck:
    field: str
    computed: object
    expected: object

    @property
    def ok(self):
        return self.computed == self.expected


@dataclass
class VerificationReport:
    case: str
    checks: list
    bound: AsymptoticBound
    pre_m_bound: AsymptoticBound
    dim_v: int
    errata: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c.ok for c in self.checks)

    def mismatches(self):
        return [c for c in self.checks if not c.ok]

    def raise_for_failure(self):
        bad = self.mismatches()
        if bad:
            raise error.VerificationFailure(
                '%s: %s' % (self.case, '; '.join(
                    '%s computed %s, transcribed %s' % (c.field, c.computed, c.expected) for c in bad
                ))
            )

    def to_json(self):
        return {
            'schema_version': SCHEMA_VERSION,
            'case': self.case,
            'status': 'PASS' if self.passed else 'FAIL',
            'dim_v': self.dim_v,
            'final_bound': str(self.bound),
            'final_bound_explicit': self.bound.explicit(),
            'pre_m_bound': self.pre_m_bound.explicit(),
            'checks': [
                {'field': c.field, 'computed': str(c.computed), 'expected': str(c.expected), 'ok': c.ok}
                for c in self.checks
            ],
            'errata': [
                {'field': e.field, 'name': e.name, 'printed': _jsonable(e.printed),
                 'corrected': _jsonable(e.corrected), 'note': e.note}
                for e in self.errata
            ],
        }

    def table(self):
        width = max(len(c.field) for c in self.checks)
        lines = ['case %s: %s' % (self.case, 'PASS' if self.passed else 'FAIL')]
        for c in self.checks:
            lines.append('  %-*s  %10s  %10s  %s' % (
                width, c.field, c.computed, c.expected, 'ok' if c.ok else 'MISMATCH'))
        for e in self.errata:
            lines.append('  erratum %s[%s]: printed %s, corrected %s' % (
                e.field, e.name, _jsonable(e.printed), _jsonable(e.corrected)))
        lines.append('final bound %s' % self.bound)
        return '\n'.join(lines)


def _jsonable(value):
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, Fraction):
        return str(value)
    return value


def integrate_monomial(e, dom):
    """
    Order of the integral of prod beta_i^{e_i} d^x beta over the box
    """
    x = e.x_prefactor
    logs = 0
    for name, exponent in zip(e.basis_names, e.exponents):
        a = dom[name]
        if exponent < 0:
            x += -a * exponent
        elif exponent == 0 and a > 0:
            logs += 1
    return AsymptoticBound(x, logs, e.m_power, logs > 0)


def apply_m_step(integrand, q):
    """Multiply by (X^k prod alpha_i)/M, which is >> 1 on the cut-off region"""
    total = integrand + q
    return ExponentVector(total.basis_names, total.exponents, total.x_prefactor, 1)


def integration_domain(gd, basis):
    """
    Lower exponents a_j = height of each basis character over S_V
    """
    heights = sv_basis(gd)
    lower = []
    for name, image in zip(basis.names, basis.images):
        a = sum(heights.coordinates(image))
        if a < 0:
            raise error.DomainError('character %s has negative height %s over S_V' % (name, a))
        lower.append(a)
    return BoxDomain(basis.names, lower)


def _compare(label, computed, expected, checks):
    if expected is None:
        return
    checks.append(FieldCheck('%s.x' % label, computed.x_prefactor, expected.x_prefactor))
    for name in computed.basis_names:
        checks.append(FieldCheck('%s[%s]' % (label, name), computed[name], expected[name]))


def verify_case(rec):
    """
    Recompute a case from the root data and compare with its record
    """
    gd = graded_data(rec.dynkin)
    basis = CharacterBasis(rec.basis_names, rec.basis_vectors, gd.theta)

    volume = volume_exponents(gd, basis)
    modular = modular_function(gd, basis)
    q = q_condition(gd, basis)
    domain = integration_domain(gd, basis)

    integrand = volume + modular
    reduced = apply_m_step(integrand, q)
    bound = integrate_monomial(reduced, domain)
    pre_m_bound = integrate_monomial(integrand, domain)

    checks = []
    _compare('volume', volume, rec.volume, checks)
    for name in basis.names:
        checks.append(FieldCheck('modular[%s]' % name, modular[name], rec.modular[name]))
    _compare('q_condition', q, rec.q_condition, checks)
    for name in basis.names:
        checks.append(FieldCheck('domain[%s]' % name, domain[name], rec.domain[name]))
    _compare('integrand', integrand, rec.integrand, checks)
    _compare('reduced', reduced, rec.reduced, checks)
    checks.append(FieldCheck('dim_v', gd.dim_v, rec.dim_v))
    checks.append(FieldCheck('final.x_exponent', bound.x_exponent, rec.expected_bound.x_exponent))
    checks.append(FieldCheck('final.x_exponent_vs_dim_v', bound.x_exponent, gd.dim_v))
    checks.append(FieldCheck('final.m_power', bound.m_power, 1))
    # The M-step trades X^k for 1/M without moving the total exponent
    checks.append(FieldCheck('pre_m.x_exponent', pre_m_bound.x_exponent, gd.dim_v))

    report = VerificationReport(rec.name, checks, bound, pre_m_bound, gd.dim_v, list(rec.errata))
    if report.passed:
        logger.info('%s: PASS, final bound %s', rec.name, bound)
    else:
        logger.warning('%s: FAIL on %s', rec.name, ', '.join(c.field for c in report.mismatches()))
    for e in rec.errata:
        logger.info('%s: applied erratum %s[%s]', rec.name, e.field, e.name)
    return report


def verify_cases(records, executor=None):
    return map_chunks(verify_case, records, executor)


def numeric_integral(e, dom, X, samples=100000, seed=0):
    """
    Stratified Monte-Carlo value of the box integral at a fixed X

    In log-coordinates s = log(beta) each factor is a 1-D integral of
    exp(e*s) over [-a log X, 0], and the box integral is their product.
    A direction with a = 0 only ranges over X^0 << beta << 1 and
    contributes a factor of 1.
    """
    rng = np.random.default_rng(seed)
    log_x = math.log(X)
    value = float(X) ** float(e.x_prefactor)
    for name, exponent in zip(e.basis_names, e.exponents):
        length = float(dom[name]) * log_x
        if length == 0:
            continue
        u = (np.arange(samples) + rng.random(samples)) / samples
        s = -length * u
        value *= float(np.mean(np.exp(float(exponent) * s))) * length
    return value


def bound_value(bound, X):
    """Numerical size of X^x (log X)^l, ignoring M"""
    return float(X) ** float(bound.x_exponent) * math.log(X) ** bound.log_power
