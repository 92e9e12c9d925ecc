#!/usr/bin/env python3
"""
Friable averages: tabulate special functions, compare expansions with exact sums.

Commands:
    fn_table   rho, rho_kappa, h_kappa, phi_kappa, psi_kappa, omega, xi, zeta0, R_kappa on a v grid
    compare    expansion reports against the sieve for every (x, u) grid point
    coeffs     gamma_h, c_j, a_j(f), a_j*(f) coefficient tables
    dichotomy  a_0 of (-k)**omega(n) for k = 1..8 and its zeros

Usage:
    python friable_averages.py <command> [--config FILE] [options]

Example:
    python friable_averages.py fn_table --kappa 2 --grid-v 0.5:10:0.5
    python friable_averages.py compare --config sweep-mu.yaml
    python friable_averages.py compare --function mu --theorem friable --grid-x 1e6 --grid-u 2.3,2.7,3.4

Exit codes: 0 success, 1 a ratio above --ratio-bound, 2 configuration error,
3 numerical failure.
"""

import argparse
import csv
import dataclasses
import hashlib
import logging
import math
import os
import sys
from dataclasses import dataclass
from multiprocessing.pool import ThreadPool

import numpy as np
import yaml

import asymptotics
import dde_kernel
import friable_oracle
import transforms
from friable_errors import ConfigError, FriableError

__version__ = '0.1.0'

logger = logging.getLogger('friable_averages')

COMMANDS = ('fn_table', 'compare', 'coeffs', 'dichotomy')
THEOREMS = ('convolution', 'friable', 'weighted', 'truncated', 'plus')
# numeric labels accepted by --theorem
THEOREM_LABELS = {'1.1': 'convolution', '1.2': 'friable', '2.1': 'weighted', '2.2': 'truncated',
                  '3.14': 'plus'}


@dataclass(frozen=True)
class RunConfig:
    command: str
    function: str = 'mu'
    kappa: float = 1.0
    J: int = 1
    beta: float = asymptotics.DEFAULT_BETA
    delta: float = asymptotics.DEFAULT_DELTA
    theorem: str = 'friable'
    grid_x: tuple = ()
    grid_u: tuple = ()
    grid_v: tuple = ()
    sieve_limit: int = 0
    sieve_cache: str = ''
    threads: int = 0
    out: str = ''
    ratio_bound: float = 100.0
    order: int = 6
    prime_limit: int = 10 ** 6
    k_max: int = 8
    functions: tuple = ()

    def digest(self):
        """sha256 of the canonical YAML dump, first 16 hex digits."""
        data = dataclasses.asdict(self)
        data = {k: list(v) if isinstance(v, tuple) else v for k, v in data.items()}
        data['functions'] = {name: dict(entry) for name, entry in self.functions}
        text = yaml.dump(data, sort_keys=True, default_flow_style=True)
        return hashlib.sha256(text.encode()).hexdigest()[:16]


CONFIG_KEYS = {f.name for f in dataclasses.fields(RunConfig)} - {'command'}


def parse_grid(value):
    """
    A grid from a YAML list, a number, or a string of comma-separated items
    where an item may be start:stop:step (stop included).
    """
    if value is None:
        return ()
    if isinstance(value, (int, float)):
        items = [value]
    elif isinstance(value, str):
        items = [item.strip() for item in value.split(',') if item.strip()]
    else:
        items = list(value)
    points = []
    for item in items:
        try:
            if isinstance(item, str) and ':' in item:
                start, stop, step = (float(t) for t in item.split(':'))
                if step <= 0:
                    raise ConfigError(f"grid step must be positive in {item!r}")
                count = int(math.floor((stop - start) / step + 1e-9)) + 1
                points.extend(start + step * np.arange(count))
            else:
                points.append(float(item))
        except ValueError as err:
            raise ConfigError(f"bad grid entry {item!r}: {err}") from err
    points = np.array(points, dtype=float)
    if not np.all(np.isfinite(points)) or np.any(points <= 0):
        raise ConfigError("grid points must be finite and positive")
    return tuple(float(p) for p in np.unique(points))


def load_config(path):
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    with open(path, 'r') as f:
        try:
            data = yaml.safe_load(f) or {}
        except yaml.YAMLError as err:
            raise ConfigError(f"{path}: {err}") from err
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    unknown = set(data) - CONFIG_KEYS
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
    return data


def _coerce(key, value, kind):
    try:
        return kind(float(value)) if kind is int else kind(value)
    except (TypeError, ValueError) as err:
        raise ConfigError(f"{key}: {err}") from err


def build_config(args):
    """Config file values overlaid with the flags that were given."""
    data = load_config(args.config) if args.config else {}
    for key in CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            data[key] = flag

    fields = {}
    for key, kind in (('function', str), ('theorem', str), ('sieve_cache', str), ('out', str),
                      ('kappa', float), ('beta', float), ('delta', float), ('ratio_bound', float),
                      ('J', int), ('sieve_limit', int), ('threads', int), ('order', int),
                      ('prime_limit', int), ('k_max', int)):
        if data.get(key) is not None:
            fields[key] = _coerce(key, data[key], kind)
    if 'theorem' in fields:
        fields['theorem'] = THEOREM_LABELS.get(fields['theorem'], fields['theorem'])
    for key in ('grid_x', 'grid_u', 'grid_v'):
        fields[key] = parse_grid(data.get(key))
    functions = data.get('functions') or {}
    if not isinstance(functions, dict):
        raise ConfigError("functions must be a mapping of name to definition")
    friable_oracle.register_specs(functions)
    fields['functions'] = tuple(sorted((name, tuple(sorted(entry.items())))
                                       for name, entry in functions.items()))

    config = RunConfig(args.command, **fields)
    validate(config)
    return config


def validate(config):
    if config.theorem not in THEOREMS:
        raise ConfigError(f"theorem must be one of {', '.join(THEOREMS + tuple(THEOREM_LABELS))}")
    if config.kappa <= 0:
        raise ConfigError("kappa must be positive")
    if not 0 <= config.J <= 12:
        raise ConfigError("J must lie in 0..12")
    if not 0 < config.beta < 0.5:
        raise ConfigError("beta must lie in (0, 1/2)")
    if not 0 <= config.order <= transforms.MAX_SERIES_ORDER:
        raise ConfigError(f"order must lie in 0..{transforms.MAX_SERIES_ORDER}")
    if config.command == 'fn_table' and not config.grid_v:
        raise ConfigError("fn_table needs a non-empty grid_v")
    if config.command == 'compare':
        if not config.grid_x or not config.grid_u:
            raise ConfigError("compare needs non-empty grid_x and grid_u")
        if min(config.grid_u) < 1:
            raise ConfigError("u must be >= 1")
        need = int(math.floor(max(config.grid_x)))
        if config.sieve_limit and config.sieve_limit < need:
            raise ConfigError(f"sieve_limit {config.sieve_limit} is below the largest x {need}")
        friable_oracle.get_spec(config.function)


# ------------------------------------------------------------------ output

def open_output(config):
    path = config.out or f"{config.command}.csv"
    return path, open(path, 'w', newline='')


def write_csv(config, header, rows):
    path, fh = open_output(config)
    with fh:
        fh.write(f"# friable_averages {__version__} csv-v{asymptotics.CSV_VERSION} "
                 f"command={config.command} config={config.digest()}\n")
        writer = csv.writer(fh, lineterminator='\n')
        writer.writerow(header)
        writer.writerows(rows)
    print(f"Wrote {len(rows)} rows to: {path}")


def _pool_map(config, job, items):
    threads = config.threads or os.cpu_count() or 1
    if threads > 1 and len(items) > 1:
        with ThreadPool(min(threads, len(items))) as pool:
            return pool.map(job, items)
    return [job(item) for item in items]


def _cell(value):
    return '' if value is None else f"{value:.17g}"


# ---------------------------------------------------------------- commands

def cmd_fn_table(config):
    kappa = config.kappa
    top = max(config.grid_v)
    v_max = math.ceil(top) + 1
    nu = int(math.floor(kappa))
    rho = dde_kernel.solve_dickman(v_max, 0)
    rho_k = dde_kernel.solve_rho_kappa(kappa, v_max, 0)
    h = dde_kernel.solve_h(kappa, v_max, 0)
    phi = dde_kernel.solve_phi(kappa, v_max, nu + 1)
    omega = dde_kernel.solve_buchstab(v_max, 0)

    def row(v):
        z0 = dde_kernel.zeta0(v) if v >= dde_kernel.ZETA0_FLOOR else None
        return [_cell(v), _cell(rho(v)), _cell(rho_k(v)), _cell(h(v)), _cell(phi(v)),
                _cell(dde_kernel.psi_deriv(phi, 0, v)), _cell(dde_kernel.psi_deriv(phi, 1, v)),
                _cell(omega(v)),
                _cell(dde_kernel.xi(v) if v >= 1 else None),
                _cell(z0.real if z0 is not None else None),
                _cell(z0.imag if z0 is not None else None),
                _cell(dde_kernel.r_kappa(kappa, v) if v >= 1 else None)]

    header = ['v', 'rho', 'rho_kappa', 'h_kappa', 'phi_kappa', 'psi_kappa', 'dpsi_kappa',
              'omega', 'xi', 're_zeta0', 'im_zeta0', 'R_kappa']
    write_csv(config, header, _pool_map(config, row, list(config.grid_v)))
    print("OK: function table complete")
    return 0


def _compare_job(config, f, sieve):
    """Callable computing one report at (x, u), with the solutions it needs built up front."""
    J = config.J
    v_max = math.ceil(max(config.grid_u)) + 1
    depth = min(f.nu + J + 2, dde_kernel.MAX_DEPTH)
    theorem = config.theorem

    if theorem == 'convolution':
        h = dde_kernel.solve_h(f.kappa, v_max, 0)
        return lambda x, y: asymptotics.convolution_report(x, y, f, h, sieve, config.delta,
                                                           config.beta)
    if theorem == 'plus':
        rho = dde_kernel.solve_rho_kappa(f.kappa, v_max, 0)
        return lambda x, y: asymptotics.rho_main(x, y, f, rho, sieve, config.beta,
                                                 config.prime_limit)

    # coefficient series are cached; fill the cache before the pool starts
    transforms.a_coeffs(f, J, prime_limit=config.prime_limit)
    if theorem == 'truncated':
        phi = dde_kernel.solve_phi(f.kappa + 1, v_max, min(depth + 1, dde_kernel.MAX_DEPTH))
        return lambda x, y: asymptotics.expansion_trunc(x, y, f, J, phi, sieve, config.beta,
                                                        config.prime_limit)
    phi = dde_kernel.solve_phi(f.kappa, v_max, depth)
    table = dde_kernel.jumps(f.kappa, f.nu + J + 1) if f.integer_kappa else None
    expand = asymptotics.expansion_M if theorem == 'friable' else asymptotics.expansion_m
    return lambda x, y: expand(x, y, f, J, phi, sieve, config.beta, None, table,
                               config.prime_limit)


def cmd_compare(config):
    f = friable_oracle.get_spec(config.function)
    limit = config.sieve_limit or int(math.floor(max(config.grid_x)))
    print(f"Building sieve to {limit}" + (f" (cache {config.sieve_cache})" if config.sieve_cache else ""))
    sieve = friable_oracle.build_sieve(limit, config.sieve_cache or None)
    job = _compare_job(config, f, sieve)
    points = [(x, x ** (1.0 / u)) for x in config.grid_x for u in config.grid_u]
    reports = _pool_map(config, lambda p: job(*p), points)

    write_csv(config, asymptotics.csv_header(config.J), [r.csv_row(config.J) for r in reports])

    if config.theorem == 'truncated':
        row = asymptotics.dichotomy_scan(int(f.kappa), config.prime_limit)[-1] \
            if f.name.startswith('neg_omega_') else None
        if row is not None:
            print(f"a_0({f.name}) = {row.a0:.6g} (tail {row.tail_estimate:.2g}); "
                  f"local-factor zero: {row.factor_rule}, quoted rule: {row.quoted_rule}")

    ratios = [r.ratio for r in reports if r.ratio is not None]
    worst = max(ratios) if ratios else 0.0
    print("=" * 60)
    print(f"{len(reports)} grid points, max ratio {worst:.4g} (bound {config.ratio_bound:g})")
    print("=" * 60)
    if worst > config.ratio_bound:
        print("ERROR: ratio bound exceeded")
        return 1
    print("OK: all ratios within bound")
    return 0


def cmd_coeffs(config):
    order = config.order
    rows = []
    for j, g in enumerate(transforms.zeta_series(order)):
        rows.append(['gamma', str(j), _cell(g), ''])
    c = transforms.c_coeffs(config.kappa, order)
    for j, cj in enumerate(c):
        rows.append(['c', str(j), _cell(cj), ''])
    check = c * transforms.rho_hat_series(config.kappa, order)
    worst = float(np.max(np.abs(check.coeffs - np.eye(1, order + 1)[0])))

    f = friable_oracle.get_spec(config.function)
    if f.sign < 0:
        B1 = transforms.euler_product(f, 1.0, config.prime_limit)
        a = transforms.a_coeffs(f, order, prime_limit=config.prime_limit)
        for name, series in (('a', a), ('a_star', a.shift_sum())):
            for j, aj in enumerate(series):
                rows.append([name, str(j), _cell(aj), _cell(B1.tail_estimate) if j == 0 else ''])
    else:
        print(f"WARNING: {f.name} is in the plus class; no a_j table")

    write_csv(config, ['table', 'j', 'value', 'tail_estimate'], rows)
    if worst > 1e-12:
        print(f"WARNING: c_j reciprocal check off by {worst:.3g}")
    else:
        print(f"OK: c_j reciprocal check ({worst:.2g})")
    return 0


def cmd_dichotomy(config):
    rows = asymptotics.dichotomy_scan(config.k_max, config.prime_limit)
    header = ['k', 'a0', 'tail_estimate', 'a0_doubled', 'near_zero', 'stable',
              'factor_rule', 'quoted_rule']
    write_csv(config, header, [[str(r.k), _cell(r.a0), _cell(r.tail_estimate), _cell(r.a0_doubled),
                                str(int(r.near_zero)), str(int(r.stable)), str(int(r.factor_rule)),
                                str(int(r.quoted_rule))] for r in rows])
    zeros = [r.k for r in rows if r.near_zero]
    print("=" * 60)
    print(f"computed zeros of a_0: {zeros}")
    print(f"k with k+1 prime:      {[r.k for r in rows if r.factor_rule]}")
    print(f"k with k-1 prime:      {[r.k for r in rows if r.quoted_rule]}")
    print("=" * 60)
    if not all(r.stable for r in rows):
        print("WARNING: near-zero set changes when the prime limit is doubled")
    disagree = [r.k for r in rows if r.near_zero != r.quoted_rule]
    if disagree:
        print(f"WARNING: computed zeros disagree with the k = p + 1 rule at k = {disagree}")
    else:
        print("OK: computed zeros agree with the k = p + 1 rule")
    return 0


HANDLERS = {'fn_table': cmd_fn_table, 'compare': cmd_compare, 'coeffs': cmd_coeffs,
            'dichotomy': cmd_dichotomy}


def make_parser():
    parser = argparse.ArgumentParser(
        description='Friable averages of multiplicative functions: tables, coefficients and '
                    'expansion-vs-exact comparisons')
    parser.add_argument('command', choices=COMMANDS, help='What to compute')
    parser.add_argument('--config', help='YAML run configuration; flags override it')
    parser.add_argument('--out', help='Output CSV (default: <command>.csv)')
    parser.add_argument('--verbose', action='store_true', help='Debug logging')
    parser.add_argument('--sieve-limit', dest='sieve_limit', type=int,
                        help='Sieve size (default: largest x)')
    parser.add_argument('--sieve-cache', dest='sieve_cache', help='Binary spf cache file')
    parser.add_argument('--threads', type=int, help='Worker threads (default: CPU count)')
    parser.add_argument('--function', help='Bundled or config-defined function name (default: mu)')
    parser.add_argument('--kappa', type=float, help='kappa for fn_table and coeffs (default: 1)')
    parser.add_argument('--J', dest='J', type=int, help='Expansion order (default: 1)')
    parser.add_argument('--beta', type=float, help='Range parameter for domain flags (default: 0.25)')
    parser.add_argument('--delta', type=float, help='Exponent of L_delta(y) in the convolution check '
                                                    '(default: 0.1)')
    parser.add_argument('--theorem', choices=THEOREMS + tuple(THEOREM_LABELS),
                        help='Which expansion compare evaluates, by name or number (1.2 = friable)')
    parser.add_argument('--grid-x', dest='grid_x', help='x values, e.g. 1e6,1e7')
    parser.add_argument('--grid-u', dest='grid_u', help='u values, e.g. 2.3,2.7 or 2:3:0.25')
    parser.add_argument('--grid-v', dest='grid_v', help='v values for fn_table, e.g. 0.5:10:0.5')
    parser.add_argument('--ratio-bound', dest='ratio_bound', type=float,
                        help='Largest acceptable |residual|/error_scale (default: 100)')
    parser.add_argument('--order', type=int, help='Series order for coeffs (default: 6)')
    parser.add_argument('--prime-limit', dest='prime_limit', type=int,
                        help='Euler product cutoff (default: 1e6)')
    parser.add_argument('--k-max', dest='k_max', type=int, help='Largest k for dichotomy (default: 8)')
    return parser


def main(argv=None):
    args = make_parser().parse_args(argv)
    logging.basicConfig(format="%(levelname)s: %(message)s",
                        level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        config = build_config(args)
    except ConfigError as err:
        print(f"ERROR: configuration: {err}")
        return 2
    try:
        return HANDLERS[config.command](config)
    except ConfigError as err:
        print(f"ERROR: configuration: {err}")
        return 2
    except (FriableError, FloatingPointError, ZeroDivisionError) as err:
        print(f"ERROR: {config.command} failed in {type(err).__name__}: {err}")
        return 3


if __name__ == '__main__':
    sys.exit(main())
