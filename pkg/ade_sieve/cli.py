import argparse
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import sympy

from ade_sieve import anfamily, cuspintegral, error, register, reports, sieve, vinberg
from ade_sieve.arith import primes_upto
from ade_sieve.rootsystem import DynkinType, build_root_system, dump
from ade_sieve.utils import (
    MONTE_CARLO_SAMPLES,
    SCHEMA_VERSION,
    SQUAREFREE_TRIAL_BOUND,
    TAIL_PRIME_BOUND,
    default_cache_dir,
)

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(levelname)s %(name)s: %(message)s'


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError('expected an integer, got %r' % text)
    if value < 1:
        raise argparse.ArgumentTypeError('expected an integer >= 1, got %d' % value)
    return value


def _nonnegative_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError('expected an integer, got %r' % text)
    if value < 0:
        raise argparse.ArgumentTypeError('expected an integer >= 0, got %d' % value)
    return value


def _prime(text):
    value = _positive_int(text)
    if not sympy.isprime(value):
        raise argparse.ArgumentTypeError('%d is not prime' % value)
    return value


def _positive_rational(text):
    try:
        value = reports.parse_fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError('expected a rational like 30 or 5/2, got %r' % text)
    if value <= 0:
        raise argparse.ArgumentTypeError('expected a positive rational, got %s' % value)
    return value


def _dynkin(text):
    try:
        return DynkinType.parse(text)
    except error.InvalidDynkinType as e:
        raise argparse.ArgumentTypeError(str(e))


def _digits(text):
    value = _positive_int(text)
    if value > 15:
        raise argparse.ArgumentTypeError('digits must lie in 1..15, got %d' % value)
    return value


def _m_values(text):
    return [_nonnegative_int(t) for t in text.split(',') if t]


def build_parser():
    parser = argparse.ArgumentParser(
        prog='ade-sieve',
        description='Vinberg gradings, cusp-integral checks and squarefree-discriminant sieves for ADE families',
    )
    parser.add_argument('--threads', type=_positive_int, default=os.cpu_count() or 1,
                        help='worker threads, >= 1 (default: CPU count)')
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help='log INFO with -v, DEBUG with -vv')
    parser.add_argument('--cache-dir', default=None,
                        help='density cache directory (default: $ADE_SIEVE_CACHE_DIR or ~/.cache/ade_sieve)')
    parser.add_argument('--no-cache', action='store_true', help='do not read or write the density cache')
    sub = parser.add_subparsers(dest='command', metavar='command')
    sub.required = True

    p = sub.add_parser('roots', help='list the roots of a Dynkin type')
    p.add_argument('--type', type=_dynkin, required=True, help='A<r> (r >= 1), D<r> (r >= 4), E6, E7 or E8')

    p = sub.add_parser('grade', help='restricted roots and dimensions of the Vinberg grading')
    p.add_argument('--type', type=_dynkin, required=True, help='A<r> (r >= 1), D<r> (r >= 4), E6, E7 or E8')

    p = sub.add_parser('verify-case', help='check a transcribed cusp-integral case')
    p.add_argument('--case', required=True, help='one of %s, or all' % ', '.join(register.case_list))
    p.add_argument('--json', metavar='PATH', help='write the verification report as JSON')

    p = sub.add_parser('lambda', help='lambda exponents r_i and prod zeta(r_i + 1)')
    p.add_argument('--case', type=_dynkin, required=True, help='Dynkin type, e.g. D5')
    p.add_argument('--pmax', type=_positive_int, default=100, help='primes for the partial Euler product, >= 1')

    p = sub.add_parser('zeta', help='zeta(r + 1) by Euler-Maclaurin summation')
    p.add_argument('--r', type=_positive_rational, required=True, help='positive rational r')
    p.add_argument('--digits', type=_digits, default=6, help='decimal places, 1..15 (default 6)')

    p = sub.add_parser('disc', help='discriminant of a monic polynomial')
    p.add_argument('--poly', required=True, help='coefficients b_1,...,b_d below the leading 1')
    p.add_argument('--degree', type=_positive_int, help='degree d >= 1; d-1 coefficients mean b_1 = 0')

    p = sub.add_parser('classify', help='strong/weak divisibility of the discriminant by p^2')
    p.add_argument('--poly', required=True, help='coefficients b_1,...,b_d below the leading 1')
    p.add_argument('--degree', type=_positive_int, help='degree d >= 1; d-1 coefficients mean b_1 = 0')
    p.add_argument('--p', type=_prime, required=True, help='a prime')
    p.add_argument('--engine', choices=('auto', 'brute', 'fast'), default='auto', help='classification engine')

    p = sub.add_parser('construct', help='integral W0 matrix sigma_m with the given characteristic polynomial')
    p.add_argument('--poly', required=True, help='coefficients b_1,...,b_d below the leading 1')
    p.add_argument('--degree', type=_positive_int, help='degree d >= 2; d-1 coefficients mean b_1 = 0')
    p.add_argument('--m', type=_positive_int, required=True, help='m >= 1')
    p.add_argument('--csv', metavar='PATH', help='write the matrix as CSV of exact rationals')
    p.add_argument('--json', metavar='PATH', help='write the matrix as JSON')

    p = sub.add_parser('local-density', help='local density rho_p of an A-type family')
    p.add_argument('--family', type=_dynkin, required=True, help='A<r>, e.g. A2')
    p.add_argument('--p', type=_prime, required=True, help='a prime')
    p.add_argument('--method', choices=('auto', 'enum', 'montecarlo'), default='auto', help='density method')
    p.add_argument('--engine', choices=('flat', 'fibre', 'lift'), default='flat',
                   help='enumeration engine: all classes mod p^2 (flat, fibre) or roots mod p (lift)')
    p.add_argument('--samples', type=_positive_int, default=MONTE_CARLO_SAMPLES, help='Monte-Carlo draws, >= 1')
    p.add_argument('--seed', type=_nonnegative_int, default=0, help='Monte-Carlo seed, >= 0')

    p = sub.add_parser('sieve', help='empirical squarefree-discriminant count over a height box')
    p.add_argument('--family', type=_dynkin, required=True, help='A<r>, e.g. A2')
    p.add_argument('--height', type=_positive_rational, required=True, help='height bound X > 0 (rational)')
    p.add_argument('--squarefree-bound', type=_positive_int, default=SQUAREFREE_TRIAL_BOUND,
                   help='trial division bound, >= 1')
    p.add_argument('--tail-m', type=_m_values, help='comma-separated M >= 0 for strong/weak tail counts')
    p.add_argument('--out', metavar='PATH', help='write the counts as JSON')

    p = sub.add_parser('compare', help='truncated Euler product against the empirical ratio')
    p.add_argument('--family', type=_dynkin, required=True, help='A<r>, e.g. A2')
    p.add_argument('--pmax', type=_positive_int, required=True, help='product over primes <= pmax, pmax >= 2')
    p.add_argument('--height', type=_positive_rational, required=True, help='height bound X > 0 (rational)')
    p.add_argument('--seed', type=_nonnegative_int, default=0, help='Monte-Carlo seed, >= 0')
    p.add_argument('--samples', type=_positive_int, default=MONTE_CARLO_SAMPLES, help='Monte-Carlo draws, >= 1')
    p.add_argument('--tail-bound', type=_positive_int, default=TAIL_PRIME_BOUND,
                   help='exact densities above pmax up to this prime, reported as the tail')
    p.add_argument('--out', metavar='PATH', help='write the density report as JSON')
    p.add_argument('--csv', metavar='PATH', help='write the (p, rho_p) table as CSV')
    return parser


def cmd_roots(args, executor, cache):
    sys.stdout.write(dump(build_root_system(args.type)))
    return 0


def cmd_grade(args, executor, cache):
    gd = vinberg.graded_data(args.type)
    print('type %s' % args.type)
    print('dim V = %d, dim G = %d, k = %d' % (gd.dim_v, gd.dim_g, gd.height_one_count))
    print('degrees %s (sum %d)' % (', '.join(map(str, gd.degrees)), sum(gd.degrees)))
    print('closed-form dim V = %d' % vinberg.closed_form_dim_v(args.type))
    if args.type.family == 'A':
        print('curves %s' % vinberg.family_equation(args.type))
        for note in vinberg.equation_discrepancies(args.type):
            logger.warning(note)
    for a in gd.restricted:
        image = ','.join(str(c) for c in a.image)
        print('%-8s ht %2d  sign %+d twist %+d  %s' % (a.case_tag.value, a.height, a.sign, a.twist, image))
    return 0


def cmd_verify_case(args, executor, cache):
    ids = list(register.case_list) if args.case == 'all' else [args.case]
    records = [register.make(case_id).record for case_id in ids]
    results = cuspintegral.verify_cases(records, executor)
    for report in results:
        print(report.table())
    if args.json:
        payload = results[0].to_json() if len(ids) == 1 else [r.to_json() for r in results]
        reports.write_json(args.json, payload)
    for report in results:
        report.raise_for_failure()
    return 0


def cmd_lambda(args, executor, cache):
    gd = vinberg.graded_data(args.case)
    r = vinberg.lambda_exponents(gd)
    print('r = (%s)' % ', '.join(str(x) for x in r))
    print('zeta product %.12f' % vinberg.zeta_product(r))
    print('Euler product over p <= %d: %.12f' % (args.pmax, vinberg.euler_product(r, primes_upto(args.pmax).tolist())))
    return 0


def cmd_zeta(args, executor, cache):
    value = vinberg.zeta_product([args.r])
    print('%.*f' % (args.digits, value))
    return 0


def cmd_disc(args, executor, cache):
    f = anfamily.MonicPoly.parse(args.poly, args.degree)
    delta = anfamily.discriminant(f)
    check = anfamily.sylvester_discriminant(f)
    if delta != check:
        raise error.VerificationFailure('resultant gives %d, Sylvester determinant %d' % (delta, check))
    print(delta)
    return 0


def cmd_classify(args, executor, cache):
    f = anfamily.MonicPoly.parse(args.poly, args.degree)
    result = anfamily.classify(f, args.p, engine=args.engine)
    print(result.type.name)
    print('method %s' % result.method)
    return 0


def cmd_construct(args, executor, cache):
    f = anfamily.MonicPoly.parse(args.poly, args.degree)
    v = anfamily.sigma_m(f, args.m)
    print(v)
    for name, ok in anfamily.certify_sigma(v, f, args.m).items():
        print('%s: %s' % (name, 'ok' if ok else 'FAILED'))
    print('shift %d' % v.shift)
    print('Q (product of height-one entries) %s' % anfamily.q_invariant(v))
    print('Q (m convention) %s' % anfamily.intended_q(v))
    if args.csv:
        reports.write_atomic(args.csv, v.to_csv())
    if args.json:
        reports.write_json(args.json, v.to_json())
    return 0


def cmd_local_density(args, executor, cache):
    fam = sieve.FamilySpec.from_dynkin(args.family)
    d = sieve.local_density(fam, args.p, method=args.method, engine=args.engine,
                            samples=args.samples, seed=args.seed, cache=cache)
    print('rho_%d = %s (%.9f, %s, %d samples)' % (d.p, reports.fraction_str(d.value), float(d.value),
                                                  d.method, d.samples))
    return 0


def cmd_sieve(args, executor, cache):
    fam = sieve.FamilySpec.from_dynkin(args.family)
    count = sieve.empirical_density(fam, args.height, args.squarefree_bound, executor)
    print('%s X=%s: %d squarefree of %d (ratio %.6f), %d degenerate, %d undecided%s' % (
        fam.name, reports.fraction_str(args.height), count.squarefree, count.total, float(count.ratio),
        count.degenerate, count.uncertain, ' INCONCLUSIVE' if count.inconclusive else ''))
    payload = {'schema_version': SCHEMA_VERSION, 'family': fam.name, 'empirical': count.to_json()}

    if args.tail_m:
        profile = sieve.tail_profile(fam, args.height, args.tail_m, executor)
        print('%8s %10s %10s' % ('M', 'strong', 'weak'))
        for M in sorted(profile.strong):
            print('%8d %10d %10d' % ((M,) + profile.counts(M)))
        payload['tail'] = profile.to_json()
    if args.out:
        reports.write_json(args.out, payload)
    return 0


def _format_z(z):
    return 'undefined' if z is None else '%.2f' % z


def cmd_compare(args, executor, cache):
    fam = sieve.FamilySpec.from_dynkin(args.family)
    report = sieve.compare(fam, args.pmax, args.height, seed=args.seed, samples=args.samples,
                           executor=executor, cache=cache, tail_bound=args.tail_bound)
    if args.out:
        reports.write_json(args.out, report.to_json())
    else:
        sys.stdout.write(reports.dumps(report.to_json()))
    if args.csv:
        reports.write_atomic(args.csv, report.to_csv())
    print('%s: product %.6f (%.6f with the tail), ratio %.6f, z %s, verdict %s' % (
        fam.name, report.truncated_product, report.corrected_product, float(report.empirical.ratio),
        _format_z(report.z), report.verdict), file=sys.stderr)
    if report.verdict == 'DISAGREE':
        raise error.VerificationFailure('%s: ratio %.6f is %s standard errors from the product %.6f' % (
            fam.name, float(report.empirical.ratio), _format_z(report.z), report.truncated_product))
    return 0


COMMANDS = {
    'roots': cmd_roots,
    'grade': cmd_grade,
    'verify-case': cmd_verify_case,
    'lambda': cmd_lambda,
    'zeta': cmd_zeta,
    'disc': cmd_disc,
    'classify': cmd_classify,
    'construct': cmd_construct,
    'local-density': cmd_local_density,
    'sieve': cmd_sieve,
    'compare': cmd_compare,
}


def run(argv=None):
    """
    Parse argv and run one command; returns 0 on success, 1 on failure, 2 on usage errors
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code

    level = logging.WARNING if args.verbose == 0 else logging.INFO if args.verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)

    cache = None if args.no_cache else reports.DensityCache(args.cache_dir or default_cache_dir())
    try:
        with ThreadPoolExecutor(max_workers=args.threads) as executor:
            return COMMANDS[args.command](args, executor, cache)
    except error.Error as e:
        print('error: %s' % e.reason(), file=sys.stderr)
        return e.exit_status


def main():
    sys.exit(run())
