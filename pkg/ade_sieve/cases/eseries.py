from fractions import Fraction

from ade_sieve.cases.cusp_case import CuspCase, domain_from, exponent_vector, load_case_data
from ade_sieve.cuspintegral import CaseRecord
from ade_sieve.register import register


class ExceptionalCase(CuspCase):
    """
    E-series case read from the shipped data, errata applied
    """

    def __init__(self, case_id):
        self.data = load_case_data()['exceptional'][case_id]
        super().__init__(case_id, self.data['dynkin'])

    def _corrected(self):
        """Transcribed data with every erratum substituted"""
        basis = dict(self.data['basis'])
        names = list(basis)
        volume = dict(self.data['volume'], exponents=list(self.data['volume']['exponents']))
        modular = list(self.data['modular'])

        for e in self.data['errata']:
            if e['field'] == 'basis':
                assert basis[e['name']] == e['printed'], e
                basis[e['name']] = e['corrected']
            elif e['field'] == 'volume':
                i = names.index(e['name'])
                assert Fraction(volume['exponents'][i]) == Fraction(e['printed']), e
                volume['exponents'][i] = e['corrected']
            elif e['field'] == 'modular':
                i = names.index(e['name'])
                assert Fraction(modular[i]) == Fraction(e['printed']), e
                modular[i] = e['corrected']
            else:
                raise ValueError('no erratum handler for field %r' % e['field'])
        return basis, volume, modular

    def _gen_record(self):
        basis, volume, modular = self._corrected()
        names = tuple(basis)
        rank = self.dynkin.rank

        vectors = []
        for name in names:
            v = [0] * rank
            for node in basis[name]:
                v[node - 1] += 1
            vectors.append(tuple(v))

        return CaseRecord(
            name=self.case_id,
            dynkin=self.dynkin,
            basis_names=names,
            basis_vectors=tuple(vectors),
            volume=exponent_vector(names, volume),
            modular=exponent_vector(names, modular),
            q_condition=exponent_vector(names, self.data['q_condition']),
            domain=domain_from(names, self.data['domain']),
            dim_v=self.data['final'],
            expected_bound=self._expected_bound(self.data['final']),
            integrand=exponent_vector(names, self.data['integrand']),
            reduced=exponent_vector(names, self.data['reduced']),
            errata=self._errata(self.data['errata']),
        )

class E6Case(ExceptionalCase):
    def __init__(self):
        super().__init__('E6')

class E7Case(ExceptionalCase):
    def __init__(self):
        super().__init__('E7')

class E8Case(ExceptionalCase):
    def __init__(self):
        super().__init__('E8')


register('E6', E6Case)
register('E7', E7Case)
register('E8', E8Case)
