from fractions import Fraction

import sympy

from ade_sieve.cases.cusp_case import CuspCase, domain_from, load_case_data
from ade_sieve.cuspintegral import CaseRecord
from ade_sieve.register import register
from ade_sieve.rootsystem import DynkinType
from ade_sieve.vinberg import ExponentVector

i_sym, n_sym = sympy.symbols('i n', integer=True, positive=True)

STEMS = ('alpha', 'beta')


def _parse(expr):
    return sympy.sympify(expr, locals={'i': i_sym, 'n': n_sym})


def _to_fraction(value):
    value = sympy.nsimplify(value)
    assert value.is_Rational, value
    return Fraction(int(value.p), int(value.q))


def epsilon(rank, k):
    """
    epsilon_k of D_rank in simple-root coordinates

    alpha_{rank-1} = eps_{rank-1} - eps_rank and alpha_rank = eps_{rank-1} + eps_rank.
    """
    v = [Fraction(0)] * rank
    if k == rank:
        v[rank - 2] = Fraction(-1, 2)
        v[rank - 1] = Fraction(1, 2)
        return v
    for j in range(k - 1, rank - 2):
        v[j] = Fraction(1)
    v[rank - 2] += Fraction(1, 2)
    v[rank - 1] += Fraction(1, 2)
    return v


class OrthogonalCase(CuspCase):
    """
    D-series case generated from exponent formulas in (i, n)
    """

    def __init__(self, family, n, case_id=None):
        self.family = family
        self.n = n
        self.data = load_case_data()['orthogonal'][family]
        rank = int(_parse(self.data['rank']).subs(n_sym, n))
        super().__init__(case_id or 'D%d' % rank, DynkinType('D', rank))

    def table(self, field):
        """Formulas of one field with the errata substituted"""
        table = dict(self.data[field])
        for e in self.data['errata']:
            if e['field'] == field:
                assert table[e['name']] == e['printed'], e
                table[e['name']] = e['corrected']
        return table

    def formula(self, field, stem, i):
        """Symbolic exponent of stem_i, honouring index overrides like alpha[n-1]"""
        table = self.table(field)
        for key, expr in table.items():
            if key.startswith(stem + '['):
                index = _parse(key[len(stem) + 1:-1]).subs(n_sym, self.n)
                if index == i:
                    return _parse(expr)
        return _parse(table[stem])

    def names(self):
        return tuple('%s_%d' % (stem, i) for stem in STEMS for i in range(1, self.n + 1))

    def _values(self, field):
        values = []
        for stem in STEMS:
            for i in range(1, self.n + 1):
                expr = self.formula(field, stem, i)
                values.append(_to_fraction(expr.subs({i_sym: i, n_sym: self.n})))
        return values

    def _vector(self, field):
        names = self.names()
        x = self.table(field).get('x', '0')
        return ExponentVector(names, self._values(field), _to_fraction(_parse(x).subs(n_sym, self.n)))

    def _basis_vectors(self):
        rank = self.dynkin.rank
        table = self.data['basis']
        vectors = []
        for stem in STEMS:
            for i in range(1, self.n + 1):
                terms = table[stem]
                for key, override in table.items():
                    if key.startswith(stem + '[') and _parse(key[len(stem) + 1:-1]).subs(n_sym, self.n) == i:
                        terms = override
                v = [Fraction(0)] * rank
                for k_expr, coeff in terms:
                    k = int(_parse(k_expr).subs({i_sym: i, n_sym: self.n}))
                    v = [a + coeff * b for a, b in zip(v, epsilon(rank, k))]
                vectors.append(tuple(v))
        return tuple(vectors)

    def final_exponent(self):
        return int(_parse(self.data['final']).subs(n_sym, self.n))

    def _gen_record(self):
        names = self.names()
        final = self.final_exponent()
        return CaseRecord(
            name=self.case_id,
            dynkin=self.dynkin,
            basis_names=names,
            basis_vectors=self._basis_vectors(),
            volume=self._vector('volume'),
            modular=self._vector('modular'),
            q_condition=self._vector('q_condition'),
            domain=domain_from(names, self._values('domain')),
            dim_v=final,
            expected_bound=self._expected_bound(final),
            integrand=self._vector('integrand'),
            reduced=self._vector('reduced'),
            errata=self._errata(self.data['errata']),
        )

    def symbolic_final(self):
        """
        Final X-exponent as a polynomial in n, summed from the formulas

        Every reduced exponent is <= 0, so each variable contributes -a*e.
        """
        reduced = self.table('reduced')
        domain = self.table('domain')
        total = _parse(reduced['x'])
        for stem in STEMS:
            generic = _parse(domain[stem]) * _parse(reduced[stem])
            total -= sympy.summation(generic, (i_sym, 1, n_sym))

            overrides = {key[len(stem) + 1:-1] for key in list(reduced) + list(domain)
                         if key.startswith(stem + '[')}
            for index in overrides:
                k = _parse(index)
                a = _parse(domain.get('%s[%s]' % (stem, index), domain[stem])).subs(i_sym, k)
                e = _parse(reduced.get('%s[%s]' % (stem, index), reduced[stem])).subs(i_sym, k)
                total -= a * e - generic.subs(i_sym, k)
        return sympy.expand(total)

class DOddCase(OrthogonalCase):
    def __init__(self, n=2):
        super().__init__('D_odd', n)

class DEvenCase(OrthogonalCase):
    def __init__(self, n=2):
        super().__init__('D_even', n)

class D5Case(DOddCase):
    def __init__(self):
        super().__init__(n=2)

class D7Case(DOddCase):
    def __init__(self):
        super().__init__(n=3)

class D4Case(DEvenCase):
    def __init__(self):
        super().__init__(n=2)

class D6Case(DEvenCase):
    def __init__(self):
        super().__init__(n=3)


register('D5', D5Case)
register('D7', D7Case)
register('D4', D4Case)
register('D6', D6Case)
