import re

from ade_sieve import error

case_list = []
_cases = {}


def register(id, cls):
    assert re.match(r'^[ADE][0-9]+$', id), id
    assert id not in _cases, id
    _cases[id] = cls
    case_list.append(id)


def make(id):
    """Instantiate the case registered under id"""
    if id not in _cases:
        raise error.UnregisteredCase('no case registered as %r (known: %s)' % (id, ', '.join(case_list)))
    return _cases[id]()
