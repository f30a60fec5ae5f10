import logging
import re
from collections import deque
from dataclasses import dataclass

import numpy as np

from ade_sieve import error

logger = logging.getLogger(__name__)

FAMILIES = ('A', 'D', 'E')


@dataclass(frozen=True)
class DynkinType:
    """
    A simply laced Dynkin diagram, named by family and rank
    """

    family: str
    rank: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise error.InvalidDynkinType('unknown family %r, expected one of A, D, E' % (self.family,))
        if not isinstance(self.rank, int) or self.rank < 1:
            raise error.InvalidDynkinType('rank must be a positive integer, got %r' % (self.rank,))
        if self.family == 'D' and self.rank < 4:
            raise error.InvalidDynkinType('type D needs rank >= 4, got D%d' % self.rank)
        if self.family == 'E' and self.rank not in (6, 7, 8):
            raise error.InvalidDynkinType('type E exists only in ranks 6, 7, 8, got E%d' % self.rank)

    @classmethod
    def parse(cls, name):
        """Parse names like 'E8', 'D5' or 'A2'"""
        match = re.match(r'^\s*([A-Za-z])\s*_?\s*(\d+)\s*$', name)
        if not match:
            raise error.InvalidDynkinType('cannot parse Dynkin type %r' % (name,))
        return cls(match.group(1).upper(), int(match.group(2)))

    def __str__(self):
        return '%s%d' % (self.family, self.rank)


def dynkin_edges(dtype):
    """Edges of the diagram, as 0-based node pairs"""
    r = dtype.rank
    if dtype.family == 'A':
        return [(i, i + 1) for i in range(r - 1)]
    if dtype.family == 'D':
        # Linear chain 1..r-1, fork node r attached to r-2
        return [(i, i + 1) for i in range(r - 2)] + [(r - 3, r - 1)]
    # E-series: chain 1-3-4-5-...-r, branch node 2 attached to 4
    chain = [0, 2, 3] + list(range(4, r))
    return list(zip(chain, chain[1:])) + [(1, 3)]


def cartan_matrix(dtype):
    r = dtype.rank
    cartan = 2 * np.eye(r, dtype=np.int64)
    for i, j in dynkin_edges(dtype):
        cartan[i, j] = cartan[j, i] = -1
    return cartan


class RootSystem:
    """
    Roots of an ADE system in simple-root coordinates
    """

    def __init__(self, dtype, roots, cartan):
        self.dtype = dtype
        self.rank = dtype.rank
        self.cartan = cartan
        self.cartan.setflags(write=False)

        # Sorted lexicographically on coordinates
        self.roots = tuple(sorted(roots))
        self._index = {r: i for i, r in enumerate(self.roots)}

        self.positive_roots = tuple(r for r in self.roots if height(r) > 0)
        self.simple_roots = tuple(
            tuple(int(i == j) for j in range(self.rank)) for i in range(self.rank)
        )

    def __len__(self):
        return len(self.roots)

    def __contains__(self, root):
        return tuple(root) in self._index

    def __iter__(self):
        return iter(self.roots)

    def index(self, root):
        return self._index[tuple(root)]

    def coroot_pairing(self, v, i):
        """<v, alpha_i^vee> for a vector v in simple-root coordinates"""
        return int(np.dot(self.cartan[i], v))

    def reflect(self, v, i):
        """Apply the simple reflection s_i"""
        v = list(v)
        v[i] -= self.coroot_pairing(v, i)
        return tuple(v)

    def highest_root(self):
        return max(self.positive_roots, key=height)

    def as_array(self):
        return np.array(self.roots, dtype=np.int64)


def build_root_system(dtype):
    """
    Close the simple roots under simple reflections
    """
    cartan = cartan_matrix(dtype)
    r = dtype.rank

    simple = [tuple(int(i == j) for j in range(r)) for i in range(r)]
    positive = set(simple)
    queue = deque(simple)

    while queue:
        v = queue.popleft()
        for i in range(r):
            w = list(v)
            w[i] -= int(np.dot(cartan[i], v))
            w = tuple(w)
            # Only positive roots are expanded, negatives come from symmetry
            if any(c < 0 for c in w) or w in positive:
                continue
            positive.add(w)
            queue.append(w)

    roots = list(positive) + [tuple(-c for c in v) for v in positive]
    rs = RootSystem(dtype, roots, cartan)
    logger.debug('built %s with %d roots', dtype, len(rs))
    return rs


def height(r):
    return int(sum(r))


def longest_element(rs):
    """
    Reduced word of w0, found by descending from 2*rho

    At each step the smallest-index simple reflection with a positive
    pairing is applied, so the word is deterministic.
    """
    v = tuple(int(c) for c in np.sum(np.array(rs.positive_roots, dtype=np.int64), axis=0))
    word = []
    while True:
        descents = [i for i in range(rs.rank) if rs.coroot_pairing(v, i) > 0]
        if not descents:
            break
        i = descents[0]
        v = rs.reflect(v, i)
        word.append(i)
    assert len(word) == len(rs.positive_roots)
    return tuple(word)


def apply_word(rs, word, v):
    """Apply s_{word[-1]} ... s_{word[0]} to v, first letter acting first"""
    for i in word:
        v = rs.reflect(v, i)
    return v


def pinned_automorphism(rs):
    """
    The diagram involution -w0 as a permutation of simple-root indices
    """
    word = longest_element(rs)
    perm = []
    for simple in rs.simple_roots:
        image = tuple(-c for c in apply_word(rs, word, simple))
        assert image in rs.simple_roots, image
        perm.append(rs.simple_roots.index(image))
    return tuple(perm)


def permute_root(perm, r):
    """Image of a root under a diagram permutation"""
    out = [0] * len(r)
    for j, c in enumerate(r):
        out[perm[j]] = c
    return tuple(out)


def dump(rs):
    """Deterministic text listing, one root per line"""
    return '\n'.join(','.join(str(c) for c in r) for r in rs.roots) + '\n'
