#!/usr/bin/env python3
# coding: utf-8
# Copyright (c) 2026 znjet developers
"""
スクリプトの実行とレポート出力のテスト
"""
import json
import random
from os.path import abspath, dirname, join

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from znjet.cli import (EXIT_KERNEL_ERROR, EXIT_OK, EXIT_PARSE_ERROR,
                       load_config, main, run_script)
from znjet.report import STATUS_ERROR, STATUS_OK, STATUS_PARSE_ERROR, emit
from znjet.selfcheck import Bounds, trial_roundtrip

GOLDEN = join(dirname(abspath(__file__)), 'golden')


def _read(name: str) -> str:
    with open(join(GOLDEN, name), encoding='utf-8') as f:
        return f.read()


PIPELINE = _read('pipeline.znj')


def test_empty_script(config):
    reports, code = run_script('', config)
    assert (reports, code) == ([], EXIT_OK)
    assert emit(reports, 'text') == ''
    assert emit(reports, 'json') == '[]\n'


def test_pipeline(config):
    reports, code = run_script(PIPELINE, config)
    assert code == EXIT_OK
    assert [r.status for r in reports] == [STATUS_OK] * 6
    ring, morphism, jac, invert, composite, derham = reports
    assert ring.payload['formcap'] == '3'
    assert morphism.payload['morphism'] == 'morphism F : R -> R { x := x + z^2 ; z := z }'
    assert jac.payload['entries'] == [['1', '2*z'], ['0', '1']]
    assert invert.payload['morphism'] == 'morphism G : R -> R { x := x - z^2 ; z := z }'
    assert composite.payload['morphism'].endswith('{ x := x ; z := z }')
    assert derham.payload['columns'] == 'k w dim rank h'
    assert ['0', '0', '1', '0', '1'] in derham.payload['cells']
    assert derham.payload['cohomology'] == ['H^0 = 1', 'H^1 = 0', 'H^2 = 0']
    assert derham.line == 6


def test_pipeline_is_deterministic(config):
    for fmt in ('text', 'json'):
        first = emit(run_script(PIPELINE, config)[0], fmt)
        second = emit(run_script(PIPELINE, config)[0], fmt)
        assert first == second
    text = emit(run_script(PIPELINE, config)[0], 'text')
    assert text.startswith('>>> ring R n=2 cap=3 coords [x:(0,0), z:(1,1)]\nstatus: ok\n')
    assert '  [1, 2*z]\n' in text


@pytest.mark.parametrize('fmt', ['text', 'json'])
def test_pipeline_matches_golden(config, fmt):
    reports, code = run_script(PIPELINE, config)
    assert code == EXIT_OK
    assert emit(reports, fmt) == _read(f'pipeline.{"txt" if fmt == "text" else "json"}')


def test_kernel_error_stops(config):
    script = ('ring R n=2 cap=3 coords [x:(0,0), z:(1,1)]\n'
              'morphism F : R -> R { x := x^2 ; z := z }\n'
              'invert F\n'
              'jac F\n')
    reports, code = run_script(script, config)
    assert code == EXIT_KERNEL_ERROR
    assert len(reports) == 3
    assert reports[-1].status == STATUS_ERROR
    assert reports[-1].diagnostics[0].startswith('3:1: NotLocallyInvertibleError: ')


def test_parse_error(config):
    reports, code = run_script('ring R n=2 cap=3 coords [x:(0,0)]\nlet f = x + y\n', config)
    assert code == EXIT_PARSE_ERROR
    assert reports[0].status == STATUS_PARSE_ERROR
    assert reports[0].diagnostics == ["2:13: ParseError: unknown identifier 'y'"]


def test_forms_and_vectors(config):
    script = ('ring R n=2 cap=4 coords [x:(0,0), z:(1,1), a:(0,1), b:(1,0)]\n'
              'let f = z^2/2\n'
              'd f as w\n'
              'potential w\n'
              'vector X : R { x := z }\n'
              'pair X w\n'
              'homotopy w z\n')
    reports, code = run_script(script, config)
    assert code == EXIT_OK
    assert reports[2].payload['value'] == 'd(z)*(z)'
    assert reports[3].payload['value'] == '(1/2*z^2)'
    assert reports[5].payload['value'] == '0'
    assert reports[6].payload['value'] == '(1/2*z^2)'


def test_jaccheck_across_rings(config):
    script = ('ring U n=2 cap=3 coords [x:(0,0), z:(1,1)]\n'
              'ring L n=2 cap=3 coords [s:(0,0)]\n'
              'morphism P : U -> L { s := x + z^2 }\n'
              'morphism Q : L -> U { x := s^2 ; z := 0 }\n'
              'jaccheck P Q\n')
    reports, code = run_script(script, config)
    assert code == EXIT_OK
    assert reports[-1].payload == {'holds': 'yes', 'residual': [['0', '0'], ['0', '0']]}


def test_cap_override_and_config():
    config = load_config(overrides={'cap_override': 2, 'format': None})
    assert config.format == 'text'
    reports, _ = run_script('ring R n=2 cap=5 coords [x:(0,0)]', config)
    assert reports[0].payload['formcap'] == '2'


def test_selfcheck_command(config):
    reports, code = run_script('check signs seed=3', config)
    assert code == EXIT_OK
    assert reports[0].payload['seed'] == '3'
    assert reports[0].payload['suites'][0].startswith('signs: ')
    reports, code = run_script('check nosuch', config)
    assert code == EXIT_KERNEL_ERROR


def test_main(tmp_path, capsys):
    path = tmp_path / 'pipeline.znj'
    path.write_text(PIPELINE, encoding='utf-8')
    assert main([str(path), '--format', 'json']) == EXIT_OK
    reports = json.loads(capsys.readouterr().out)
    assert [r['line'] for r in reports] == [1, 2, 3, 4, 5, 6]
    assert reports[2]['payload']['entries'] == [['1', '2*z'], ['0', '1']]


@settings(deadline=None, max_examples=50)
@given(st.integers(0, 2 ** 32 - 1))
def test_roundtrip(seed):
    assert trial_roundtrip(random.Random(seed), Bounds()) == []


def test_sample_script(config):
    path = join(dirname(dirname(abspath(__file__))), 'sample', 'pipeline.znj')
    with open(path, encoding='utf-8') as f:
        reports, code = run_script(f.read(), config)
    assert code == EXIT_OK
    assert reports[-1].payload['cohomology'] == ['H^0 = 1', 'H^1 = 0', 'H^2 = 0', 'H^3 = 0']
