"""
Test script for the command-line entry point and the verification report
"""

import json
import sys
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

import pandas as pd
import pytest

import src.reporting.checks as checks_module
from main import EXIT_CHECKS_FAILED, EXIT_IO, EXIT_OK, EXIT_USAGE, main
from src.config import REPORT_SCHEMA
from src.reporting.checks import (
    REGISTRY,
    SUITES,
    Check,
    CheckOutcome,
    check_seed,
    checks_for_suite,
    run_check,
)
from src.reporting.report import build_report, json_safe, strip_volatile
from src.exceptions import CapraError

# Small enough for a quick run, large enough to touch every branch
FAST_SETTINGS = {
    'norm_vectors': 3,
    'dual_vectors': 2,
    'l0_vectors': 8,
    'conj_vectors': 2,
    'biconj_vectors': 2,
    'sphere_vectors': 4,
    'engine_functions': 4,
    'theorem_restarts': 1,
}


@pytest.fixture
def vector_file(tmp_path):
    def write(values, name='x.json'):
        path = tmp_path / name
        path.write_text(json.dumps(values), encoding='utf-8')
        return str(path)
    return write


@pytest.fixture
def fast_config(tmp_path):
    path = tmp_path / 'fast.json'
    path.write_text(json.dumps(FAST_SETTINGS), encoding='utf-8')
    return str(path)


def _stdout_json(capsys):
    return json.loads(capsys.readouterr().out.strip().splitlines()[-1])


def test_norm_command(capsys, vector_file):
    path = vector_file([3.0, 0.0, -4.0])
    assert main(['norm', '--kind', 'topk', '--k', '1', '--vec', path]) == EXIT_OK
    assert _stdout_json(capsys) == {'kind': 'topk', 'k': 1, 'value': 4.0}

    assert main(['norm', '--kind', 'l0', '--vec', path]) == EXIT_OK
    assert _stdout_json(capsys)['value'] == 2

    assert main(['norm', '--kind', 'euclid', '--vec', path]) == EXIT_OK
    assert _stdout_json(capsys)['value'] == 5.0

    path = vector_file([3.0, -4.0], 'y.json')
    assert main(['norm', '--kind', 'ksup', '--k', '1', '--vec', path]) == EXIT_OK
    assert _stdout_json(capsys)['value'] == 7.0


def test_norm_command_errors(vector_file, tmp_path):
    path = vector_file([3.0, -4.0])
    assert main(['norm', '--kind', 'ksup', '--k', '0', '--vec', path]) == EXIT_USAGE
    assert main(['norm', '--kind', 'topk', '--vec', path]) == EXIT_USAGE
    assert main(['norm', '--kind', 'l0', '--vec', str(tmp_path / 'missing.json')]) == EXIT_IO

    bad = tmp_path / 'bad.json'
    bad.write_text('[1e999, 1]', encoding='utf-8')
    assert main(['norm', '--kind', 'l0', '--vec', str(bad)]) == EXIT_USAGE

    with pytest.raises(SystemExit) as exc:
        main(['norm', '--kind', 'l3', '--vec', path])
    assert exc.value.code == 2


def test_conjugate_closed_form(capsys, vector_file):
    path = vector_file([2.0, 0.0])
    assert main(['conjugate', '--fn', 'l0', '--at', path]) == EXIT_OK
    payload = _stdout_json(capsys)
    assert payload['value'] == 1.0
    assert payload['engine'] == 'closed'
    assert payload['oracle'] is None

    path = vector_file([3.0, 0.0, -4.0], 'y.json')
    assert main(['conjugate', '--fn', 'levelset', '--k', '1', '--at', path]) == EXIT_OK
    assert _stdout_json(capsys)['value'] == 4.0


def test_conjugate_grid_engine_and_samples(capsys, vector_file, tmp_path):
    path = vector_file([2.0, 0.0])
    samples = tmp_path / 'samples.json'
    argv = ['conjugate', '--fn', 'l0', '--at', path, '--engine', 'grid', '--samples', '64', '--seed', '7']
    assert main(argv + ['--samples-out', str(samples)]) == EXIT_OK
    payload = _stdout_json(capsys)
    assert payload['closed_form'] == 1.0
    assert payload['oracle'] == 1.0
    assert payload['gap'] == 0.0
    assert payload['seed'] == 7
    assert samples.exists()

    assert main(argv + ['--samples-from', str(samples)]) == EXIT_OK
    again = _stdout_json(capsys)
    assert again['oracle'] == 1.0
    assert again['samples'] == payload['samples']

    path = vector_file([3.0, 0.0, -4.0], 'y.json')
    grid = ['conjugate', '--fn', 'levelset', '--k', '1', '--at', path, '--engine', 'grid', '--samples', '32']
    assert main(grid) == EXIT_OK
    payload = _stdout_json(capsys)
    assert payload['oracle'] == 4.0


def test_conjugate_biconj_l0(capsys, vector_file):
    path = vector_file([3.0, 0.0, -4.0])
    assert main(['conjugate', '--fn', 'biconj-l0', '--at', path, '--restarts', '2']) == EXIT_OK
    payload = _stdout_json(capsys)
    assert payload['value'] == 2.0
    assert payload['gap'] <= 1e-6
    assert payload['suggested_lambda_max'] == 1.0


def test_conjugate_usage_errors(vector_file):
    path = vector_file([1.0, 2.0])
    assert main(['conjugate', '--fn', 'levelset', '--at', path]) == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(['conjugate', '--fn', 'l0', '--at', path, '--samples', '0'])
    assert exc.value.code == 2


def test_check_seed_is_stable():
    assert check_seed(42, 'norms.l0_chain') == check_seed(42, 'norms.l0_chain')
    assert check_seed(42, 'norms.l0_chain') != check_seed(43, 'norms.l0_chain')
    assert check_seed(42, 'norms.l0_chain') != check_seed(42, 'norms.chain_monotone')


def test_registry_layout():
    ids = [check.check_id for check in REGISTRY]
    assert len(ids) == len(set(ids))
    assert {check.suite for check in REGISTRY} == set(SUITES)
    assert len(checks_for_suite('all')) == len(REGISTRY)
    assert [c.check_id for c in checks_for_suite('moreau')] == ['moreau.laws']
    assert 'norms.axioms' in [c.check_id for c in checks_for_suite('norms')]
    references = [check.reference for check in REGISTRY]
    assert len(references) == len(set(references))
    assert 'plumbing' not in references
    with pytest.raises(CapraError):
        checks_for_suite('bogus')


def test_run_check_turns_exceptions_into_errors():
    def explode(settings, seed):
        raise RuntimeError('boom')

    result = run_check(Check('engine.explode', 'engine', 'plumbing', explode), {'seed': 0})
    assert result.status == 'error'
    assert 'boom' in result.message

    def fail(settings, seed):
        return CheckOutcome(False, 0.5, 3)

    result = run_check(Check('engine.fail', 'engine', 'plumbing', fail), {'seed': 0})
    assert result.status == 'fail'
    assert result.worst_gap == 0.5


def test_verify_moreau_report(tmp_path):
    out = tmp_path / 'report.json'
    xlsx = tmp_path / 'report.xlsx'
    argv = ['verify', '--suite', 'moreau', '--seed', '42', '--out', str(out), '--workers', '1']
    assert main(argv + ['--xlsx', str(xlsx)]) == EXIT_OK

    report = json.loads(out.read_text(encoding='utf-8'))
    assert report['schema'] == REPORT_SCHEMA
    assert report['index_base'] == 0
    assert report['seed'] == 42
    assert report['summary'] == {'total': 1, 'passed': 1, 'failed': 0, 'errors': 0}
    assert report['checks'][0]['check_id'] == 'moreau.laws'
    assert report['checks'][0]['reference'] == 'moreau-addition-laws'
    assert report['generated_at'].endswith('+00:00')

    sheets = pd.read_excel(xlsx, sheet_name=None)
    assert set(sheets) == {'Checks', 'Summary'}
    assert sheets['Checks']['status'].tolist() == ['pass']


def test_verify_engine_with_default_dims(tmp_path, fast_config):
    out = tmp_path / 'engine.json'
    argv = ['verify', '--suite', 'engine', '--seed', '7', '--config', fast_config, '--out', str(out)]
    assert main(argv) == EXIT_OK
    report = json.loads(out.read_text(encoding='utf-8'))
    assert report['settings']['dims'] == [1, 2, 3, 4, 6]
    assert [check['status'] for check in report['checks']] == ['pass'] * len(checks_for_suite('engine'))


def test_verify_all_is_reproducible(tmp_path, fast_config):
    first, second = tmp_path / 'a.json', tmp_path / 'b.json'
    argv = ['verify', '--suite', 'all', '--seed', '42', '--dims', '1,2', '--config', fast_config]

    assert main(argv + ['--out', str(first)]) == EXIT_OK
    assert main(argv + ['--out', str(second), '--workers', '3']) == EXIT_OK

    a = json.loads(first.read_text(encoding='utf-8'))
    b = json.loads(second.read_text(encoding='utf-8'))
    assert [check['check_id'] for check in a['checks']] == [check.check_id for check in REGISTRY]
    assert all(check['status'] == 'pass' for check in a['checks'])
    assert 'generated_at' not in strip_volatile(a)
    assert strip_volatile(a) == strip_volatile(b)


def test_verify_reports_failures(tmp_path, monkeypatch):
    failing = Check('moreau.broken', 'moreau', 'plumbing', lambda settings, seed: CheckOutcome(False, 1.0, 1))
    monkeypatch.setattr(checks_module, 'REGISTRY', REGISTRY + (failing,))
    out = tmp_path / 'report.json'
    assert main(['verify', '--suite', 'moreau', '--out', str(out), '--workers', '1']) == EXIT_CHECKS_FAILED
    report = json.loads(out.read_text(encoding='utf-8'))
    assert report['summary']['failed'] == 1
    assert report['checks'][-1]['status'] == 'fail'


def test_verify_unwritable_output(tmp_path):
    assert main(['verify', '--suite', 'moreau', '--out', str(tmp_path), '--workers', '1']) == EXIT_IO


def test_verify_bad_dims():
    with pytest.raises(SystemExit) as exc:
        main(['verify', '--suite', 'norms', '--dims', '0,2'])
    assert exc.value.code == 2


def test_report_helpers():
    assert json_safe({'a': [float('inf'), 1.0], 'b': float('-inf')}) == {'a': ['+inf', 1.0], 'b': '-inf'}
    report = build_report('moreau', {'seed': 3, 'dims': [2], 'workers': 8}, [])
    data = report.to_dict()
    assert data['settings'] == {'dims': [2]}
    assert data['summary']['total'] == 0
    assert report.passed
    assert list(report.to_frame().columns)[:5] == ['check_id', 'suite', 'statement', 'reference', 'status']


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
