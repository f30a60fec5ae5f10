import csv
import hashlib
import io
import json
import logging
import os
import tempfile
from fractions import Fraction

from ade_sieve.utils import SCHEMA_VERSION, default_cache_dir

logger = logging.getLogger(__name__)


def fraction_str(q):
    q = Fraction(q)
    return '%d/%d' % (q.numerator, q.denominator)


def parse_fraction(text):
    """Exact rational from 'n', 'n/d' or a decimal string"""
    return Fraction(str(text).strip())


def dumps(payload):
    """Deterministic pretty JSON"""
    return json.dumps(payload, indent=2, sort_keys=True) + '\n'


def write_atomic(path, text):
    """Write via a temporary file in the same directory and rename it into place"""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix='.tmp-', suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, 'w') as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


def write_json(path, payload):
    write_atomic(path, dumps(payload))


def densities_csv(per_prime):
    """CSV table of (p, rho_p) rows from LocalDensity records"""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator='\n')
    writer.writerow(['p', 'rho', 'rho_float', 'method', 'samples'])
    for d in per_prime:
        writer.writerow([d.p, fraction_str(d.value), '%.12f' % float(d.value), d.method, d.samples])
    return out.getvalue()


class DensityCache:
    """
    Content-addressed store of local densities, one JSON file per key
    """

    def __init__(self, directory=None):
        self.directory = directory or default_cache_dir()

    @staticmethod
    def key(family, p, method, seed=None, samples=None):
        blob = json.dumps(
            {'family': family, 'p': p, 'method': method, 'seed': seed, 'samples': samples,
             'schema_version': SCHEMA_VERSION},
            sort_keys=True,
        )
        return hashlib.sha256(blob.encode()).hexdigest()

    def path(self, key):
        return os.path.join(self.directory, key[:2], key + '.json')

    def get(self, family, p, method, seed=None, samples=None):
        path = self.path(self.key(family, p, method, seed, samples))
        if not os.path.exists(path):
            return None
        try:
            with open(path) as f:
                payload = json.load(f)
        except ValueError:
            logger.warning('ignoring unreadable cache entry %s', path)
            return None
        logger.debug('cache hit %s p=%d %s', family, p, method)
        return payload

    def put(self, family, p, method, payload, seed=None, samples=None):
        path = self.path(self.key(family, p, method, seed, samples))
        write_json(path, payload)
        return path
