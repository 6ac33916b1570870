import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.discretization.field import Field
from src.discretization.mesh import build_interval
from src.exceptions import AdmissibilityError, ConfigError
from src.model.reaction import (
    PowerTerm,
    ReactionSpec,
    f1_potential,
    f1_potential_values,
    f1_ratio_values,
    f1_values,
    f2_ratio,
    f2_ratio_values,
    reaction_from_config,
    validate,
)

MESH = build_interval(1.0, 4)


def term(c, s):
    return PowerTerm(coeff=Field.constant(MESH, c), exponent=s)


def test_validate_s_equal_q_term():
    q = 1.5
    spec = ReactionSpec(f1_terms=[term(1.0, q)])
    assert validate(spec, q) == 0.0
    np.testing.assert_array_equal(spec.a0_field.values, 1.0)


def test_validate_absorption_with_sin_ratio():
    q = 1.5
    spec = ReactionSpec(f1_terms=[term(-2.0, 2 * q)], f2_kind='sin_ratio', f2_lambda=0.5)
    assert validate(spec, q) == 0.5
    np.testing.assert_array_equal(spec.a0_field.values, 0.0)


@pytest.mark.parametrize('kind, lam, K', [
    ('none', 0.0, 0.0),
    ('constant_ratio', 3.0, 0.0),
    ('sin_ratio', -0.7, 0.7),
    ('tanh_ratio', 2.0, 2.0),
])
def test_lipschitz_constant_catalog(kind, lam, K):
    assert validate(ReactionSpec(f2_kind=kind, f2_lambda=lam), 2.0, MESH) == K


def test_sign_rule_violation():
    # c > 0 with s > q makes the ratio increasing
    with pytest.raises(AdmissibilityError, match='sign rule'):
        validate(ReactionSpec(f1_terms=[term(1.0, 3.0)]), 2.0)


def test_blow_up_at_zero_is_rejected():
    with pytest.raises(AdmissibilityError, match='a0'):
        validate(ReactionSpec(f1_terms=[term(1.0, 1.5)]), 2.0)


def test_vanishing_sub_q_term_is_accepted():
    spec = ReactionSpec(f1_terms=[term(0.0, 1.5)])
    assert validate(spec, 2.0) == 0.0
    assert spec.f1_terms == []


def test_unknown_f2_kind():
    with pytest.raises(AdmissibilityError):
        validate(ReactionSpec(f2_kind='cos_ratio'), 2.0, MESH)


def test_evaluation_needs_validation():
    with pytest.raises(AdmissibilityError):
        f1_values(ReactionSpec(f1_terms=[term(1.0, 2.0)]), np.ones(4))


def test_potential_examples():
    q = 2.0
    spec = ReactionSpec(f1_terms=[term(1.0, q)])
    validate(spec, q)
    assert f1_potential(spec, 0, 2.0) == pytest.approx(2.0)
    assert f1_potential(spec, 0, 0.0) == 0.0

    absorption = ReactionSpec(f1_terms=[term(-2.0, 4.0)])
    validate(absorption, q)
    assert f1_potential(absorption, 2, 1.0) == pytest.approx(-0.5)


def test_f2_ratio_examples():
    constant = ReactionSpec(f2_kind='constant_ratio', f2_lambda=3.0)
    validate(constant, 2.0, MESH)
    assert f2_ratio(constant, 1, 17.0) == 3.0

    sine = ReactionSpec(f2_kind='sin_ratio', f2_lambda=0.5)
    validate(sine, 2.0, MESH)
    assert f2_ratio(sine, 0, 0.0) == 0.0

    tanh = ReactionSpec(f2_kind='tanh_ratio', f2_lambda=1.0)
    validate(tanh, 2.0, MESH)
    assert f2_ratio(tanh, 0, 10.0) == pytest.approx(0.9999999959, rel=1e-9)


def test_reaction_from_config():
    spec = reaction_from_config(
        MESH,
        {'f1': [{'c': -1.0, 's': 3.0}], 'f2': {'kind': 'tanh_ratio', 'lambda': 0.25}},
        q=1.5,
    )
    assert spec.K == 0.25
    assert len(spec.f1_terms) == 1


@pytest.mark.parametrize('cfg', [
    {'f1': [{'c': 1.0}]},
    {'f1': [{'c': 1.0, 's': 2.0, 'x': 0}]},
    {'f2': {'kind': 'sin_ratio', 'lam': 1.0}},
])
def test_reaction_from_config_rejects_bad_keys(cfg):
    with pytest.raises(ConfigError):
        reaction_from_config(MESH, cfg, q=2.0)


ADMISSIBLE = [
    [(1.0, 1.5)],
    [(-1.0, 2.5), (0.5, 1.5)],
    [(-0.3, 4.0), (-2.0, 1.5), (0.1, 1.5)],
]


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(ADMISSIBLE), st.floats(min_value=1e-3, max_value=10), st.floats(min_value=1e-3, max_value=10))
def test_f1_ratio_is_nonincreasing(terms, u1, u2):
    spec = ReactionSpec(f1_terms=[term(c, s) for c, s in terms])
    validate(spec, 1.5)
    lo, hi = sorted((u1, u2))
    r_lo = f1_ratio_values(spec, np.full(4, lo))
    r_hi = f1_ratio_values(spec, np.full(4, hi))
    assert np.all(r_hi <= r_lo + 1e-12 * (1 + np.abs(r_lo)))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(['sin_ratio', 'tanh_ratio', 'constant_ratio']), st.floats(min_value=-3, max_value=3),
       st.floats(min_value=0, max_value=20), st.floats(min_value=0, max_value=20))
def test_f2_ratio_is_lipschitz(kind, lam, u1, u2):
    spec = ReactionSpec(f2_kind=kind, f2_lambda=lam)
    K = validate(spec, 2.0, MESH)
    a = f2_ratio_values(spec, np.full(4, u1))
    b = f2_ratio_values(spec, np.full(4, u2))
    assert np.all(np.abs(a - b) <= K * abs(u1 - u2) + 1e-12)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(ADMISSIBLE), st.floats(min_value=0.05, max_value=5))
def test_potential_is_antiderivative(terms, v):
    spec = ReactionSpec(f1_terms=[term(c, s) for c, s in terms])
    validate(spec, 1.5)
    step = 1e-6 * v
    derivative = (f1_potential_values(spec, np.full(4, v + step))
                  - f1_potential_values(spec, np.full(4, v - step))) / (2 * step)
    exact = f1_values(spec, np.full(4, v))
    assert np.allclose(derivative, exact, rtol=1e-8 * 100, atol=1e-8 * (1 + np.max(np.abs(exact))))
    assert math.isfinite(float(derivative[0]))
