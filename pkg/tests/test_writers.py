import json

import numpy as np
import pandas as pd

from src.discretization.field import Field
from src.output.plots import plot_series
from src.output.writers import (
    config_hash,
    read_csv,
    report_text,
    write_csv,
    write_field_csv,
    write_json,
    write_report,
)

SHA = 'ab' * 32


def test_config_hash_ignores_key_order():
    assert config_hash({'p': 2.0, 'q': 1.5}) == config_hash({'q': 1.5, 'p': 2.0})
    assert config_hash({'p': 2.0}) != config_hash({'p': 2.5})
    assert len(config_hash({'a': np.float64(1.0)})) == 64


def test_csv_has_hash_line_and_full_precision(tmp_path):
    frame = pd.DataFrame({'t': [0.0, 0.1], 'l2_w': [1 / 3, 2 / 3]})
    path = write_csv(frame, tmp_path / 'out' / 'trajectory.csv', SHA)
    lines = path.read_text(encoding='utf-8').split('\n')
    assert lines[0] == f'# config_sha256={SHA}'
    assert lines[1] == 't,l2_w'
    back = read_csv(path)
    assert back['l2_w'].tolist() == [1 / 3, 2 / 3]


def test_field_csv_columns(tmp_path, unit_interval_3):
    path = write_field_csv(Field(unit_interval_3, [0.0, 1.5, 0.0]), tmp_path / 'w.csv', SHA, column='w')
    back = read_csv(path)
    assert list(back.columns) == ['x', 'w']
    assert back['w'].tolist() == [0.0, 1.5, 0.0]


def test_json_is_sorted_and_tagged(tmp_path):
    path = write_json({'z': np.float64(1.0), 'a': np.int64(2), 'ok': np.bool_(True)}, tmp_path / 'd.json', SHA)
    document = json.loads(path.read_text(encoding='utf-8'))
    assert document == {'config_sha256': SHA, 'z': 1.0, 'a': 2, 'ok': True}
    assert list(document) == sorted(document)


def test_report_files(tmp_path):
    report = {
        'suite': 'demo', 'status': 'fail', 'trials_count': 2, 'passed_count': 1,
        'failed_count': 1, 'errors_count': 1, 'worst_margin': -0.5, 'params': {},
        'trials': [{'trial': 0, 'passed': True, 'margin': 0.5, 'extra': 1},
                   {'trial': 1, 'passed': False, 'margin': -0.5, 'extra': 2}],
        'errors': ['Essai 2: ValueError: boom'],
    }
    paths = write_report(report, tmp_path, SHA)
    text = paths['text'].read_text(encoding='utf-8')
    assert 'STATUS: FAIL' in text
    assert 'extra' not in text
    assert 'ValueError: boom' in text
    assert json.loads(paths['json'].read_text(encoding='utf-8'))['status'] == 'fail'


def test_report_text_without_trials():
    report = {'suite': 'empty', 'status': 'pass', 'trials_count': 0, 'passed_count': 0,
              'failed_count': 0, 'errors_count': 0, 'worst_margin': None, 'trials': [], 'errors': []}
    assert 'STATUS: PASS' in report_text(report)


def test_plot_is_deterministic(tmp_path):
    times = np.linspace(0.0, 1.0, 11)
    series = {'l2_w': np.exp(-times), 'sup_u': np.exp(-2 * times)}
    first = plot_series(times, series, tmp_path / 'a.svg', SHA, loglog=True)
    second = plot_series(times, series, tmp_path / 'b.svg', SHA, loglog=True)
    assert first.read_bytes() == second.read_bytes()
    assert SHA in first.read_text(encoding='utf-8')
