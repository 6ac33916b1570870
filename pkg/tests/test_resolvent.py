import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from src.discretization.field import Field, l2_norm, positive_part
from src.discretization.mesh import build_interval
from src.discretization.profiles import evaluate_profile
from src.exceptions import ConfigError
from src.model.energy import StepObjective
from src.model.reaction import reaction_from_config
from src.solver.brute_force import brute_force_resolvent
from src.solver.resolvent import (
    SolverConfig,
    diagonal_scaling,
    maximum_bound_check,
    maximum_bound_margin,
    residual_check,
    solve_resolvent,
)

MESH_8 = build_interval(1.0, 8)
datum_8 = arrays(np.float64, 8, elements=st.floats(min_value=-1.0, max_value=2.0))
TIGHT = {'tol_grad_abs': 1e-13, 'tol_grad_rel': 1e-11}


def solve(mesh, p, q, mu, g_values, **cfg):
    obj = StepObjective(mesh, p, q, mu, Field(mesh, g_values))
    return obj, solve_resolvent(obj, cfg=SolverConfig.from_dict(cfg))


def test_nonpositive_datum_gives_zero(interval_16):
    obj, res = solve(interval_16, 3.0, 1.2, 0.05, -np.ones(16))
    assert res.converged
    np.testing.assert_array_equal(res.w.values, 0.0)
    assert residual_check(res.w, obj) == 0.0
    assert maximum_bound_check(res.w, obj.g)


def test_single_node_closed_form(single_node):
    # Phi = (w - 4)^2 / 4 + 0.4 w for p = q = 2, h = 0.5
    obj, res = solve(single_node, 2.0, 2.0, 0.1, [4.0])
    assert res.converged
    assert res.w.values[0] == pytest.approx(3.2, abs=1e-7)
    assert residual_check(Field(single_node, [3.2]), obj) <= 1e-8
    assert residual_check(res.w, obj) <= 1e-6


def test_symmetric_datum_gives_symmetric_solution():
    mesh = build_interval(1.0, 9)
    g = evaluate_profile(mesh, {'profile': 'sin', 'amplitude': 1.5})
    obj = StepObjective(mesh, 3.0, 1.5, 0.05, g)
    w = solve_resolvent(obj).w.values
    np.testing.assert_allclose(w, w[::-1], atol=1e-7)


def test_matches_brute_force_oracle(unit_interval_3):
    obj, res = solve(unit_interval_3, 2.0, 1.5, 0.1, np.ones(3))
    oracle = brute_force_resolvent(obj)
    assert res.converged
    assert np.max(np.abs(res.w.values - oracle.values)) <= 1e-6


def test_implicit_reaction_leaves_the_trivial_branch(unit_interval_3):
    reaction = reaction_from_config(unit_interval_3, {'f1': [{'c': 20.0, 's': 1.5}]}, 1.5)
    obj = StepObjective(unit_interval_3, 2.0, 1.5, 0.1, Field.zeros(unit_interval_3), reaction)
    res = solve_resolvent(obj)
    oracle = brute_force_resolvent(obj)
    assert res.converged
    assert np.all(res.w.values > 0.5)
    assert np.max(np.abs(res.w.values - oracle.values)) <= 1e-6
    assert residual_check(res.w, obj) <= 1e-6
    # w = 0 is stationary in v but not in w: slope -mu a0 = -2 per node
    assert residual_check(Field.zeros(unit_interval_3), obj) == pytest.approx(2.0)


def test_single_node_with_source(single_node):
    # Phi = (w - 4)^2 / 4 + 0.4 w - 5 w for p = q = 2, h = 0.5, f1 = 100 u
    reaction = reaction_from_config(single_node, {'f1': [{'c': 100.0, 's': 2.0}]}, 2.0)
    obj = StepObjective(single_node, 2.0, 2.0, 0.1, Field(single_node, [4.0]), reaction)
    assert brute_force_resolvent(obj).values[0] == pytest.approx(13.2, abs=1e-8)
    res = solve_resolvent(obj)
    assert res.converged
    assert res.w.values[0] == pytest.approx(13.2, abs=1e-7)
    assert residual_check(Field(single_node, [13.2]), obj) <= 1e-8


def test_residual_detects_perturbation(unit_interval_3):
    obj, res = solve(unit_interval_3, 2.0, 1.5, 0.1, np.ones(3))
    assert residual_check(res.w, obj) <= 1e-6
    bumped = res.w.values.copy()
    bumped[1] += 0.1
    assert residual_check(Field(unit_interval_3, bumped), obj) >= 0.01


def test_residual_rejects_negative_w(unit_interval_3):
    obj = StepObjective(unit_interval_3, 2.0, 1.5, 0.1, Field.zeros(unit_interval_3))
    with pytest.raises(ConfigError):
        residual_check(Field(unit_interval_3, [0.0, -1.0, 0.0]), obj)


def test_constant_datum_respects_maximum_bound(interval_16):
    obj, res = solve(interval_16, 3.0, 1.2, 0.05, np.full(16, 0.8))
    assert maximum_bound_check(res.w, obj.g)
    assert maximum_bound_margin(res.w, obj.g) >= -1e-8
    assert np.all(res.w.values > 0)


def test_small_mu_reduces_to_projection():
    obj, res = solve(MESH_8, 2.0, 2.0, 1e-8, np.linspace(-1.0, 1.0, 8))
    np.testing.assert_allclose(res.w.values, positive_part(obj.g).values, atol=1e-4)


def test_warm_start_is_idempotent(interval_16, rng):
    g = Field(interval_16, rng.uniform(-0.5, 1.5, 16))
    obj = StepObjective(interval_16, 3.0, 1.5, 0.05, g)
    first = solve_resolvent(obj)
    second = solve_resolvent(obj, v_init=first.v)
    assert second.converged
    np.testing.assert_allclose(second.w.values, first.w.values, atol=1e-7)


def test_scaling_damps_stiff_nodes(interval_16):
    cfg = SolverConfig()
    obj = StepObjective(interval_16, 3.0, 1.2, 0.05, Field.constant(interval_16, 1.0))
    v = np.linspace(1.0, 2.0, 16)
    v[0] = 0.0
    scale = diagonal_scaling(obj, v, cfg)
    assert scale[0] == cfg.scaling_floor
    assert np.all((scale >= cfg.scaling_floor) & (scale <= cfg.scaling_cap))
    assert scale[1] > scale[0]


def test_non_convergence_is_reported_not_raised(unit_interval_3):
    _, res = solve(unit_interval_3, 2.0, 1.5, 0.1, np.ones(3), max_iters=1)
    assert not res.converged
    assert res.iterations <= 1
    assert res.diagnostics()['converged'] is False


def test_budget_exhaustion_falls_back_to_the_w_residual(unit_interval_3):
    _, strict = solve(unit_interval_3, 2.0, 1.5, 0.1, np.ones(3), max_iters=1)
    _, loose = solve(unit_interval_3, 2.0, 1.5, 0.1, np.ones(3), max_iters=1, tol_residual=1e6)
    assert not strict.converged
    assert strict.residual > 1e-7
    assert loose.converged
    assert loose.residual == strict.residual
    assert loose.diagnostics()['residual'] == loose.residual


def test_initial_iterate_validation(unit_interval_3, interval_16):
    obj = StepObjective(unit_interval_3, 2.0, 1.5, 0.1, Field.zeros(unit_interval_3))
    with pytest.raises(ConfigError):
        solve_resolvent(obj, v_init=Field.zeros(interval_16))
    with pytest.raises(ConfigError):
        solve_resolvent(obj, v_init=Field(unit_interval_3, [1.0, -1.0, 1.0]))


@pytest.mark.parametrize('overrides', [
    {'tolerance': 1e-8},
    {'backtrack_factor': 1.5},
    {'max_iters': 0},
    {'tol_grad_abs': 0.0},
    {'scaling_floor': 2.0},
    {'scaling_cap': 0.5},
    {'tol_residual': -1.0},
])
def test_solver_config_validation(overrides):
    with pytest.raises(ConfigError):
        SolverConfig.from_dict(overrides)


def test_solver_config_round_trip():
    cfg = SolverConfig.from_dict({'max_iters': 50})
    assert SolverConfig.from_dict(cfg.to_dict()) == cfg


@settings(max_examples=20, deadline=None)
@given(datum_8, datum_8)
def test_positive_part_l2_contraction(g_values, g_hat_values):
    _, res = solve(MESH_8, 2.0, 1.5, 0.1, g_values)
    _, res_hat = solve(MESH_8, 2.0, 1.5, 0.1, g_hat_values)
    left = l2_norm(positive_part(res.w - res_hat.w))
    right = l2_norm(positive_part(Field(MESH_8, g_values) - Field(MESH_8, g_hat_values)))
    assert left <= right + 1e-6


@settings(max_examples=20, deadline=None)
@given(datum_8, arrays(np.float64, 8, elements=st.floats(min_value=0.0, max_value=1.0)))
def test_order_preservation(g_values, shift):
    _, low = solve(MESH_8, 3.0, 1.2, 0.05, g_values, **TIGHT)
    _, high = solve(MESH_8, 3.0, 1.2, 0.05, g_values + shift, **TIGHT)
    assert np.all(low.w.values <= high.w.values + 1e-8)
