import numpy as np
import pytest

from src.discretization.field import Field
from src.exceptions import ConfigError
from src.model.forcing import (
    ForcingSpec,
    constant_forcing,
    forcing_from_config,
    sample,
    sample_values,
    zero_forcing,
)


def test_zero_forcing_samples_to_zero(interval_16):
    h = zero_forcing()
    assert h.is_zero
    np.testing.assert_array_equal(sample(h, 3.0, interval_16).values, 0.0)
    np.testing.assert_array_equal(sample_values(h, 0.0, interval_16), 0.0)


def test_constant_forcing_is_time_independent(unit_interval_3):
    profile = Field(unit_interval_3, [1.0, -2.0, 0.5])
    h = constant_forcing(profile)
    np.testing.assert_array_equal(sample(h, 0.0, unit_interval_3).values, profile.values)
    np.testing.assert_array_equal(sample(h, 7.5, unit_interval_3).values, profile.values)


def test_separable_amplitude_is_piecewise_constant(unit_interval_3):
    h = ForcingSpec(kind='separable', profile=Field.constant(unit_interval_3, 2.0),
                    times=[0.0, 1.0, 2.0], values=[1.0, -1.0, 0.0])
    assert h.amplitude(0.0) == 1.0
    assert h.amplitude(0.999) == 1.0
    assert h.amplitude(1.0) == -1.0
    assert h.amplitude(5.0) == 0.0
    np.testing.assert_array_equal(sample_values(h, 1.5, unit_interval_3), -2.0)


@pytest.mark.parametrize('kwargs', [
    {'kind': 'pulse'},
    {'kind': 'constant'},
    {'kind': 'separable', 'times': [0.0], 'values': [1.0, 2.0]},
    {'kind': 'separable', 'times': [0.5], 'values': [1.0]},
    {'kind': 'separable', 'times': [0.0, 0.0], 'values': [1.0, 2.0]},
])
def test_invalid_specs(unit_interval_3, kwargs):
    if kwargs['kind'] == 'separable':
        kwargs = dict(kwargs, profile=Field.zeros(unit_interval_3))
    with pytest.raises(ConfigError):
        ForcingSpec(**kwargs)


def test_forcing_from_config(unit_interval_3):
    h = forcing_from_config(unit_interval_3, {'kind': 'separable', 'profile': 1.5,
                                              'times': [0, 2], 'values': [1, 3]})
    assert h.describe() == {'kind': 'separable', 'times': [0.0, 2.0], 'values': [1.0, 3.0]}
    np.testing.assert_array_equal(sample_values(h, 2.0, unit_interval_3), 4.5)
    assert forcing_from_config(unit_interval_3, None).is_zero


@pytest.mark.parametrize('cfg', [
    {'kind': 'zero', 'profile': 1.0},
    {'kind': 'constant'},
    {'kind': 'constant', 'profile': 1.0, 'times': [0]},
    {'kind': 'wave'},
])
def test_forcing_from_config_rejects(unit_interval_3, cfg):
    with pytest.raises(ConfigError):
        forcing_from_config(unit_interval_3, cfg)
