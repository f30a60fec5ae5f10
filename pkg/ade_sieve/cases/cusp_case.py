import functools
import json
import logging
import os
from fractions import Fraction

from ade_sieve.cuspintegral import AsymptoticBound, BoxDomain, Erratum, verify_case
from ade_sieve.rootsystem import DynkinType
from ade_sieve.vinberg import ExponentVector

logger = logging.getLogger(__name__)

DATA_PATH = os.path.join(os.path.dirname(__file__), 'cases.json')


@functools.lru_cache(maxsize=None)
def load_case_data(path=DATA_PATH):
    with open(path) as f:
        return json.load(f)


def exponent_vector(names, data, x=0):
    """ExponentVector from a transcribed list, or a {'x', 'exponents'} dict"""
    if isinstance(data, dict):
        return ExponentVector(names, [Fraction(e) for e in data['exponents']], Fraction(data['x']))
    return ExponentVector(names, [Fraction(e) for e in data], Fraction(x))


class CuspCase:
    """
    Base class for one case of the cusp-integral estimate
    """

    def __init__(self, case_id, dynkin):
        self.case_id = case_id
        self.dynkin = DynkinType.parse(dynkin) if isinstance(dynkin, str) else dynkin

        self.record = self._gen_record()

    def _gen_record(self):
        raise NotImplementedError

    @staticmethod
    def _expected_bound(final):
        return AsymptoticBound(Fraction(final), m_power=1, epsilon_flag=True)

    @staticmethod
    def _errata(entries):
        return [
            Erratum(e['field'], e['name'], e['printed'], e['corrected'], e.get('note', ''))
            for e in entries
        ]

    def verify(self):
        return verify_case(self.record)

    def __repr__(self):
        return '%s(%s)' % (type(self).__name__, self.case_id)


def domain_from(names, lower):
    return BoxDomain(names, [Fraction(a) for a in lower])
