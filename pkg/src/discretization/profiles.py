"""
Profiles - Catalogue de profils nodaux nommés (données initiales, coefficients, forçages)
"""
import logging
from typing import Any, Dict, Optional

import numpy as np

from src.discretization.field import Field
from src.discretization.mesh import Mesh, boundary_distance
from src.exceptions import ConfigError

logger = logging.getLogger(__name__)

# Nom du profil -> clés autorisées en plus de 'profile'
PROFILE_KEYS = {
    'constant': {'amplitude'},
    'sin': {'amplitude'},
    'parabola': {'amplitude'},
    'distance': {'amplitude'},
    'random': {'low', 'high'},
}


def evaluate_profile(mesh: Mesh, spec: Any, rng: Optional[np.random.Generator] = None) -> Field:
    """
    Build a Field from a profile description.

    Args:
        mesh: target mesh
        spec: a number (constant profile) or a dict
              {"profile": name, "amplitude": a} / {"profile": "random", "low": lo, "high": hi}
        rng: generator for the random profile (seeded by the caller)
    """
    if isinstance(spec, (int, float)) and not isinstance(spec, bool):
        return Field.constant(mesh, float(spec))
    if not isinstance(spec, dict) or 'profile' not in spec:
        raise ConfigError(f"profile must be a number or a dict with a 'profile' key, got {spec!r}")

    name = spec['profile']
    if name not in PROFILE_KEYS:
        raise ConfigError(f"unknown profile '{name}' (known: {', '.join(sorted(PROFILE_KEYS))})")
    extra = set(spec) - {'profile'} - PROFILE_KEYS[name]
    if extra:
        raise ConfigError(f"unknown keys for profile '{name}': {', '.join(sorted(extra))}")

    coords = mesh.coordinates
    extents = np.asarray(mesh.extents)
    amplitude = float(spec.get('amplitude', 1.0))

    if name == 'constant':
        values = np.full(mesh.size, amplitude)
    elif name == 'sin':
        values = amplitude * np.prod(np.sin(np.pi * coords / extents), axis=1)
    elif name == 'parabola':
        values = amplitude * np.prod(4.0 * coords * (extents - coords) / extents ** 2, axis=1)
    elif name == 'distance':
        values = amplitude * boundary_distance(mesh).values
    else:
        low = float(spec.get('low', -1.0))
        high = float(spec.get('high', 1.0))
        if not low < high:
            raise ConfigError(f"random profile needs low < high, got [{low}, {high}]")
        rng = rng if rng is not None else np.random.default_rng(0)
        values = rng.uniform(low, high, size=mesh.size)

    return Field(mesh, values)


def describe_profile(spec: Any) -> Dict[str, Any]:
    """Normalised description for logs and diagnostics"""
    if isinstance(spec, dict):
        return dict(spec)
    return {'profile': 'constant', 'amplitude': float(spec)}
