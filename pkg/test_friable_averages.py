#!/usr/bin/env python3
"""
Command-line checks: configuration loading, CSV output and exit codes.

Run with pytest, or directly: python test_friable_averages.py
"""
import csv
import os
import tempfile

import pytest

import asymptotics
from friable_averages import THEOREM_LABELS, __version__, build_config, main, make_parser, parse_grid
from friable_errors import ConfigError
from friable_oracle import get_spec

HERE = os.path.dirname(os.path.abspath(__file__))


def run(argv):
    """Run the CLI into a scratch CSV; returns (exit code, metadata line, rows)."""
    with tempfile.TemporaryDirectory() as tmp:
        out = os.path.join(tmp, 'out.csv')
        code = main(argv + ['--out', out])
        if not os.path.exists(out):
            return code, None, []
        with open(out) as fh:
            meta = fh.readline().rstrip('\n')
            rows = list(csv.reader(fh))
    return code, meta, rows


def write_yaml(tmp, text):
    path = os.path.join(tmp, 'run.yaml')
    with open(path, 'w') as fh:
        fh.write(text)
    return path


# ------------------------------------------------------------------ grids

def test_parse_grid():
    assert parse_grid('2:3:0.25') == (2.0, 2.25, 2.5, 2.75, 3.0)
    assert parse_grid('1e7, 1e6') == (1e6, 1e7)
    assert parse_grid([3, 1, 3]) == (1.0, 3.0)
    assert parse_grid(4) == (4.0,)
    assert parse_grid(None) == ()


def test_parse_grid_errors():
    for bad in ('a,b', '1:2:0', '-1,2', '1:2:x'):
        with pytest.raises(ConfigError):
            parse_grid(bad)


# ----------------------------------------------------------------- config

def test_bundled_sweep_config():
    args = make_parser().parse_args(['compare', '--config', os.path.join(HERE, 'sweep-mu.yaml')])
    config = build_config(args)
    assert config.function == 'mu'
    assert config.grid_u == (2.3, 2.7, 3.4)
    assert config.grid_x == (1e6,)
    assert config.sieve_limit == 10 ** 6
    assert get_spec('neg_two_squarefree').kappa == 2.0
    assert [name for name, _ in config.functions] == ['neg_two_squarefree']


def test_flags_override_config_and_change_digest():
    path = os.path.join(HERE, 'sweep-mu.yaml')
    base = build_config(make_parser().parse_args(['compare', '--config', path]))
    again = build_config(make_parser().parse_args(['compare', '--config', path]))
    low = build_config(make_parser().parse_args(['compare', '--config', path, '--J', '0']))
    assert base.J == 1 and low.J == 0
    assert base.digest() == again.digest()
    assert base.digest() != low.digest()


def test_theorem_numbers_resolve_to_names():
    common = ['--grid-x', '1e4', '--grid-u', '2']
    for label, name in THEOREM_LABELS.items():
        by_label = build_config(make_parser().parse_args(['compare', '--theorem', label] + common))
        by_name = build_config(make_parser().parse_args(['compare', '--theorem', name] + common))
        assert by_label.theorem == name
        assert by_label.digest() == by_name.digest()
    assert sorted(THEOREM_LABELS) == ['1.1', '1.2', '2.1', '2.2', '3.14']
    with tempfile.TemporaryDirectory() as tmp:
        # YAML reads these as floats
        for text, name in (('3.14', 'plus'), ('1.1', 'convolution'), ('2.2', 'truncated')):
            path = write_yaml(tmp, f"theorem: {text}\ngrid_x: [10000]\ngrid_u: [2]\n")
            config = build_config(make_parser().parse_args(['compare', '--config', path]))
            assert config.theorem == name
    with pytest.raises(SystemExit):
        make_parser().parse_args(['compare', '--theorem', '3.1'])


def test_config_errors_exit_2():
    with tempfile.TemporaryDirectory() as tmp:
        unknown = write_yaml(tmp, "function: mu\ncolour: red\n")
        assert main(['compare', '--config', unknown]) == 2
        theorem = write_yaml(tmp, "theorem: nonsense\ngrid_x: [1e4]\ngrid_u: [2]\n")
        assert main(['compare', '--config', theorem]) == 2
        broken = write_yaml(tmp, "grid_x: [1e4\n")
        assert main(['compare', '--config', broken]) == 2
    assert main(['compare', '--config', '/no/such/file.yaml']) == 2
    assert main(['fn_table']) == 2
    assert main(['compare', '--grid-x', '1e4']) == 2
    assert main(['compare', '--function', 'nope', '--grid-x', '1e4', '--grid-u', '2']) == 2
    assert main(['compare', '--grid-x', '1e4', '--grid-u', '2', '--sieve-limit', '100']) == 2
    assert main(['coeffs', '--order', '13']) == 2


def test_numerical_failure_exits_3():
    code, _, _ = run(['compare', '--grid-x', '1e4', '--grid-u', '2',
                      '--sieve-limit', str(3 * 10 ** 8)])
    assert code == 3


# ---------------------------------------------------------------- commands

def test_fn_table_csv():
    code, meta, rows = run(['fn_table', '--kappa', '2', '--grid-v', '0.5:4:0.5', '--threads', '2'])
    assert code == 0
    assert meta.startswith(f"# friable_averages {__version__} csv-v1 command=fn_table config=")
    header, data = rows[0], rows[1:]
    assert header[:3] == ['v', 'rho', 'rho_kappa']
    assert len(data) == 8
    first = dict(zip(header, data[0]))
    assert float(first['v']) == 0.5
    assert float(first['rho']) == 1.0
    assert first['xi'] == '' and first['R_kappa'] == ''
    assert first['re_zeta0'] != ''


def test_fn_table_is_deterministic():
    argv = ['fn_table', '--kappa', '1.5', '--grid-v', '0.25:6:0.25']
    one, _, rows_one = run(argv + ['--threads', '1'])
    three, _, rows_three = run(argv + ['--threads', '3'])
    assert one == three == 0
    assert rows_one == rows_three


def test_compare_rows_and_ratio_bound():
    argv = ['compare', '--function', 'mu', '--theorem', 'friable', '--J', '0',
            '--grid-x', '1e5', '--grid-u', '2.5,3.5', '--prime-limit', '100000', '--threads', '2']
    code, meta, rows = run(argv + ['--ratio-bound', '1e9'])
    assert code == 0
    assert 'command=compare' in meta
    assert rows[0] == asymptotics.csv_header(0)
    assert len(rows) == 3
    assert all(row[rows[0].index('exact')] != '' for row in rows[1:])
    code, _, _ = run(argv + ['--ratio-bound', '1e-12'])
    assert code == 1


def test_compare_csv_is_byte_identical():
    with tempfile.TemporaryDirectory() as tmp:
        out = os.path.join(tmp, 'compare.csv')
        path = write_yaml(tmp, "function: mu\ntheorem: 1.2\nJ: 0\ngrid_x: [100000]\n"
                               "grid_u: [2.5, 3.5]\nprime_limit: 100000\nratio_bound: 1.0e+9\n"
                               f"sieve_cache: {os.path.join(tmp, 'spf.bin')}\nout: {out}\n")
        outputs = []
        for _ in range(2):
            assert main(['compare', '--config', path]) == 0
            with open(out, 'rb') as fh:
                outputs.append(fh.read())
    assert outputs[0] == outputs[1]
    assert outputs[0].startswith(b'# friable_averages ')
    assert outputs[0].count(b'\n') == 4


def test_compare_other_theorems():
    common = ['--grid-x', '1e5', '--grid-u', '2.5', '--J', '0', '--prime-limit', '100000',
              '--ratio-bound', '1e9']
    for function, theorem in (('mu', 'weighted'), ('mu', 'convolution'),
                              ('neg_omega_2', 'truncated'), ('one', 'plus')):
        code, _, rows = run(['compare', '--function', function, '--theorem', theorem] + common)
        assert code == 0, (function, theorem)
        assert len(rows) == 2


def test_coeffs_tables():
    code, _, rows = run(['coeffs', '--order', '4', '--function', 'mu', '--prime-limit', '10000'])
    assert code == 0
    assert rows[0] == ['table', 'j', 'value', 'tail_estimate']
    tables = [row[0] for row in rows[1:]]
    assert tables.count('gamma') == tables.count('c') == tables.count('a') == 5
    a0 = next(row for row in rows[1:] if row[0] == 'a' and row[1] == '0')
    assert float(a0[2]) == pytest.approx(1.0, abs=1e-12)
    code, _, rows = run(['coeffs', '--order', '3', '--function', 'tau_2'])
    assert code == 0
    assert {row[0] for row in rows[1:]} == {'gamma', 'c'}


def test_dichotomy_csv():
    code, _, rows = run(['dichotomy', '--k-max', '4', '--prime-limit', '10000'])
    assert code == 0
    header = rows[0]
    near = {int(row[0]): row[header.index('near_zero')] for row in rows[1:]}
    assert near == {1: '1', 2: '1', 3: '0', 4: '1'}


if __name__ == "__main__":
    tests = [obj for name, obj in sorted(globals().items()) if name.startswith('test_')]
    print(f"Running {len(tests)} command-line checks...")
    for test in tests:
        test()
        print(f"  OK: {test.__name__}")
    print("\nAll command-line checks passed!")
