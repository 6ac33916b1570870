import numpy as np
import pytest

from src.discretization.field import Field
from src.discretization.mesh import build_interval
from src.exceptions import ConfigError
from src.model.energy import StepObjective
from src.solver.brute_force import MAX_NODES, brute_force_resolvent, golden_section


def test_golden_section_interior_minimum():
    assert golden_section(lambda x: (x - 0.3) ** 2, 0.0, 1.0) == pytest.approx(0.3, abs=1e-6)


def test_golden_section_endpoint_minimum():
    assert golden_section(lambda x: x, 0.0, 1.0) == 0.0
    assert golden_section(lambda x: -x, 0.0, 1.0) == 1.0


def test_golden_section_degenerate_bracket():
    assert golden_section(lambda x: x * x, 2.0, 2.0) == 2.0


def test_zero_datum_gives_zero(unit_interval_3):
    obj = StepObjective(unit_interval_3, 2.0, 1.5, 0.1, Field.zeros(unit_interval_3))
    np.testing.assert_array_equal(brute_force_resolvent(obj).values, 0.0)


def test_single_node_closed_form(single_node):
    obj = StepObjective(single_node, 2.0, 2.0, 0.1, Field(single_node, [4.0]))
    assert brute_force_resolvent(obj).values[0] == pytest.approx(3.2, abs=1e-8)


def test_strong_diffusion_kills_single_node(single_node):
    # derivative of (w - 4)^2 / 4 + 4 w stays positive on the cone
    obj = StepObjective(single_node, 2.0, 2.0, 1.0, Field(single_node, [4.0]))
    assert brute_force_resolvent(obj).values[0] == pytest.approx(0.0, abs=1e-10)


def test_rejects_large_meshes():
    mesh = build_interval(1.0, MAX_NODES + 1)
    obj = StepObjective(mesh, 2.0, 1.5, 0.1, Field.zeros(mesh))
    with pytest.raises(ConfigError):
        brute_force_resolvent(obj)


def test_oracle_lowers_the_objective(rng):
    mesh = build_interval(1.0, 6)
    obj = StepObjective(mesh, 3.0, 1.5, 0.05, Field(mesh, rng.uniform(-0.5, 1.5, 6)))
    w = brute_force_resolvent(obj)
    assert obj.value_of(w.values ** (1 / 1.5)) <= obj.value_of(np.zeros(6))
    assert np.all(w.values >= 0)
