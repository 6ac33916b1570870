import numpy as np
import pytest

from src.verification import BaseSuite, merge_reports
from src.verification.suites import (
    ContractionSuite,
    suite_boundary,
    suite_contraction,
    suite_convexity_picone,
    suite_homogeneity,
    suite_oracle,
    suite_shifted_truncation,
)


class FlakySuite(BaseSuite):
    def generate_trials(self):
        return [{'x': 1.0}, {'x': -1.0}, {'x': 2.0}]

    def run_trial(self, trial):
        if trial['x'] < 0:
            raise ValueError('negative input')
        return {'passed': True, 'margin': trial['x']}


def test_failing_trial_is_recorded_and_suite_fails():
    report = FlakySuite('flaky', {}).run()
    assert report['status'] == 'fail'
    assert report['trials_count'] == 2
    assert report['errors_count'] == 1
    assert 'ValueError' in report['errors'][0]
    assert report['worst_margin'] == 1.0
    assert [t['trial'] for t in report['trials']] == [0, 2]


def test_threaded_run_keeps_trial_order():
    report = FlakySuite('flaky', {}, threads=4).run()
    assert [t['x'] for t in report['trials']] == [1.0, 2.0]


def test_merge_of_nothing_passes():
    report = merge_reports('empty', [])
    assert report['status'] == 'pass'
    assert report['trials_count'] == 0
    assert report['worst_margin'] is None


def test_contraction_suite_passes():
    report = suite_contraction(3.0, 1.2, 0.05, n=8, trials=3, seed=1)
    assert report['status'] == 'pass'
    assert report['passed_count'] == 3
    assert report['worst_margin'] >= 0


def test_contraction_identical_data_has_zero_left_side():
    suite = ContractionSuite(2.0, 1.5, 0.1, n=6, trials=1, seed=0)
    g = np.linspace(-0.5, 1.0, 6)
    result = suite.run_trial({'g': g, 'g_hat': g})
    assert result['lhs'] == 0.0
    assert result['passed']


def test_contraction_ordered_shift():
    suite = ContractionSuite(2.0, 1.5, 0.1, n=6, trials=1, seed=0)
    g = np.linspace(-0.5, 1.0, 6)
    result = suite.run_trial({'g': g, 'g_hat': g + 0.5})
    assert result['lhs'] <= 1e-6
    assert result['rhs'] == 0.0


def test_homogeneity_suite():
    assert suite_homogeneity(3.0, 1.5, n=8, trials=3, seed=7)['status'] == 'pass'
    unit = suite_homogeneity(3.0, 1.5, n=8, trials=2, seed=7, radii=[1.0], tolerance=0.0)
    assert unit['status'] == 'pass'
    assert unit['worst_margin'] == 0.0


def test_homogeneity_with_zero_tolerance_fails():
    report = suite_homogeneity(3.0, 1.5, n=32, trials=20, seed=7, radii=[10.0, 3.0], tolerance=0.0)
    assert report['status'] == 'fail'


def test_convexity_picone_suite():
    report = suite_convexity_picone(3.0, 1.2, n=8, trials=20, seed=11, picone_sizes=[16, 32])
    assert report['status'] == 'pass'
    assert report['trials_count'] == 21
    assert {t['case'] for t in report['trials']} == {'convexity[p=3,q=1.2]', 'picone[p=3,q=1.2]'}


def test_oracle_suite():
    report = suite_oracle([3], trials=2, seed=5)
    assert report['status'] == 'pass'
    assert all(t['distance'] <= 1e-6 for t in report['trials'])


def test_boundary_suite():
    report = suite_boundary(3.0, 1.2, 0.05, n=256, band=0.1)
    assert report['status'] == 'pass'
    trial = report['trials'][0]
    assert trial['converged']
    assert trial['case'] == 'ii'
    assert trial['min_v'] > 0


def test_shifted_truncation_is_informational():
    report = suite_shifted_truncation(3.0, 1.2, n=8, trials=5, seed=13)
    assert report['status'] == 'info'
    assert report['trials_count'] == 5
    assert all(np.isfinite(t['gap_k0.1']) for t in report['trials'])


@pytest.mark.parametrize('threads', [1, 3])
def test_reports_do_not_depend_on_threads(threads):
    report = suite_homogeneity(2.0, 1.5, n=8, trials=4, seed=3, threads=threads)
    assert [t['deviation'] for t in report['trials']] == \
        [t['deviation'] for t in suite_homogeneity(2.0, 1.5, n=8, trials=4, seed=3)['trials']]
