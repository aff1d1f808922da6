#!/usr/bin/env python3
"""
Tests for the command-line front end.
"""

import json

import pytest

from src.pipelines.scattering_pipeline import build_parser, config_from_args, main


def _run(argv, capsys):
    code = main(argv)
    return code, capsys.readouterr().out


def test_analyze_boundary_instance(instance_dir, capsys):
    code, out = _run(['analyze', str(instance_dir / 'example_boundary.json')], capsys)
    assert code == 0
    document = json.loads(out)
    assert document['reciprocal_degree'] == 2
    assert document['ml_degree'] == 1
    assert document['criterion'] == {'verdict': 'strict', 'witnesses': [[0, 1]]}
    assert document['connected'] is False
    assert document['flats_by_type']['type_ii'] == 2


def test_solve_intro(instance_dir, capsys):
    code, out = _run(['solve', str(instance_dir / 'example_intro.json'), '--seed', '7'], capsys)
    assert code == 0
    document = json.loads(out)
    assert len(document['report']['interior']) == 3
    assert document['report']['boundary_clusters'] == []
    assert document['certificate']['interior'] == 3


def test_solve_is_deterministic(instance_dir, capsys):
    argv = ['solve', str(instance_dir / 'example_boundary.json'), '--seed', '3', '--return-boundary']
    _, first = _run(argv, capsys)
    _, second = _run(argv, capsys)
    assert first == second
    assert len(json.loads(first)['report']['boundary_clusters']) == 1


def test_solve_positive_instance_checks_chambers(instance_dir, capsys):
    code, out = _run(['solve', str(instance_dir / 'example_intro_positive.json'), '--seed', '1'], capsys)
    assert code == 0
    certificate = json.loads(out)['certificate']
    assert certificate['reality_checked'] and certificate['chambers_checked']


def test_chy_command(capsys):
    code, out = _run(['chy', '--m', '5', '--seed', '5'], capsys)
    assert code == 0
    document = json.loads(out)
    assert document['census']['interior'] == 2
    assert document['census']['total_mass'] == 4
    assert document['extra_type_two_flats'] == []
    assert document['sub_scattering_ok'] is True


def test_hilbert_command(instance_dir, capsys):
    code, out = _run(['hilbert', str(instance_dir / 'example_intro.json'), '--q', '3', '--seed', '2'], capsys)
    assert code == 0
    document = json.loads(out)
    assert [row['hf_reciprocal'] for row in document['table']] == [1, 4, 10, 19]
    assert [row['hf_quotient'] for row in document['table']][2:] == [3, 3]
    assert document['regularity'] == 0


def test_eliminant_command(instance_dir, capsys):
    code, out = _run(['eliminant', str(instance_dir / 'example_boundary.json'),
                      '--h1', 'y0', '--h2', 'y1', '--seed', '4'], capsys)
    assert code == 0
    assert json.loads(out)['eliminant']['degree'] == 2


def test_missing_instance_file(tmp_path, capsys):
    code, out = _run(['analyze', str(tmp_path / 'nope.json')], capsys)
    assert code == 1
    assert json.loads(out)['error'] == 'FileNotFoundError'


@pytest.mark.parametrize("m", ['3', '10'])
def test_bad_m(m, capsys):
    code, out = _run(['chy', '--m', m], capsys)
    assert code == 1
    assert json.loads(out)['error'] == 'BadM'


def test_malformed_omega(instance_dir, capsys):
    code, out = _run(['solve', str(instance_dir / 'example_intro.json'), '--omega', '1,x'], capsys)
    assert code == 1
    assert json.loads(out)['error'] == 'MalformedInput'


def test_certify_saved_report(instance_dir, tmp_path, capsys):
    report = tmp_path / 'report.json'
    code, _ = _run(['solve', str(instance_dir / 'example_intro.json'), '--seed', '7', '--out', str(report)], capsys)
    assert code == 0 and report.exists()

    code, out = _run(['certify', '--report', str(report)], capsys)
    assert code == 0
    summary = json.loads(out)
    assert summary['summary']['high_severity'] == 0
    assert summary['certificate']['interior'] == 3


def test_certify_flags_tampered_report(instance_dir, tmp_path, capsys):
    report = tmp_path / 'report.json'
    _run(['solve', str(instance_dir / 'example_intro.json'), '--seed', '7', '--out', str(report)], capsys)
    document = json.loads(report.read_text())
    document['report']['interior'] = document['report']['interior'][:2]
    report.write_text(json.dumps(document))

    code, out = _run(['certify', '--report', str(report)], capsys)
    assert code == 3
    assert json.loads(out)['summary']['high_severity'] >= 1


def test_table_format(instance_dir, capsys):
    code, out = _run(['analyze', str(instance_dir / 'example_intro.json'), '--format', 'table'], capsys)
    assert code == 0
    assert 'reciprocal_degree' in out
    assert 'type_i' in out


@pytest.mark.parametrize("env,flags,expected", [
    (None, [], False),
    ('yes', [], True),
    ('no', ['--return-boundary'], True),
    ('yes', ['--no-return-boundary'], False),
])
def test_return_boundary_flag_and_env(monkeypatch, env, flags, expected):
    if env is None:
        monkeypatch.delenv('SCATTER_RETURN_BOUNDARY', raising=False)
    else:
        monkeypatch.setenv('SCATTER_RETURN_BOUNDARY', env)
    args = build_parser().parse_args(['solve', 'instance.json', *flags])
    assert config_from_args(args).tracker.return_boundary is expected
