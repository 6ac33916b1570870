import pytest

from src.exceptions import ConfigError
from src.verification.parabolic import SCENARIOS, ParabolicSuite, suite_parabolic


def test_empty_pack_passes():
    report = suite_parabolic([])
    assert report['status'] == 'pass'
    assert report['trials_count'] == 0


def test_unknown_scenario():
    with pytest.raises(ConfigError):
        ParabolicSuite(['comparison_k0', 'blow_up'])


def test_default_pack_lists_every_scenario():
    suite = ParabolicSuite()
    assert [t['scenario'] for t in suite.generate_trials()] == list(SCENARIOS)


def test_comparison_without_reaction():
    report = suite_parabolic(['comparison_k0'], params={'n': 16, 'comparison_steps': 40})
    assert report['status'] == 'pass'
    trial = report['trials'][0]
    assert trial['K'] == 0.0
    assert trial['margin'] >= 0


def test_comparison_with_lipschitz_reaction():
    report = suite_parabolic(['comparison_k05'], params={'n': 16, 'comparison_steps': 40})
    assert report['status'] == 'pass'
    assert report['trials'][0]['K'] == 0.5


def test_extinction_time_is_stable_under_refinement():
    report = suite_parabolic(['extinction'], params={'n': 16})
    trial = report['trials'][0]
    assert report['status'] == 'pass'
    assert 0 < trial['te_fine'] <= 0.5


def test_dissipation_and_first_order_convergence():
    report = suite_parabolic(['dissipation'])
    trial = report['trials'][0]
    assert report['status'] == 'pass'
    assert 1.5 <= trial['convergence_ratio'] <= 2.5


def test_slow_diffusion_decays_without_extinction():
    report = suite_parabolic(['decay'])
    trial = report['trials'][0]
    assert report['status'] == 'pass'
    assert trial['diffusion_class'] == 'slow'
    assert 0 < trial['alpha'] <= trial['bound'] + 0.02
