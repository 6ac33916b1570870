"""
p-Laplacian module - Énergie de p-Dirichlet discrète, gradient et opérateur

2D meshes use the anisotropic edge form sum_e |D_e v|^p instead of the
isotropic |grad v|^p: only the edge form keeps the nodal submodularity
p_energy(min) + p_energy(max) <= p_energy(a) + p_energy(b) exact.
"""
import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from src.discretization.field import Field
from src.discretization.mesh import Mesh
from src.exceptions import ConfigError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PExponent:
    p: float

    def __post_init__(self):
        p = float(self.p)
        if not (np.isfinite(p) and p > 1.0):
            raise ConfigError(f"p must satisfy 1 < p < inf, got {self.p!r}")
        object.__setattr__(self, 'p', p)


def as_exponent(p) -> float:
    """Accept either a PExponent or a bare number"""
    if isinstance(p, PExponent):
        return p.p
    return PExponent(p).p


# ============================================================
# EDGE DIFFERENCES
# ============================================================

def edge_differences(values: np.ndarray, mesh: Mesh) -> List[Tuple[np.ndarray, float]]:
    """
    Difference quotients across every edge, one array per axis.

    Along axis a the n_a interior nodes are padded with the two ghost
    zeros, giving n_a + 1 edges per grid line.
    """
    grid = values.reshape(mesh.shape)
    result = []
    for axis, h in enumerate(mesh.spacing):
        pad = [(0, 0)] * mesh.dim
        pad[axis] = (1, 1)
        padded = np.pad(grid, pad)
        result.append((np.diff(padded, axis=axis) / h, h))
    return result


def signed_power(d: np.ndarray, p: float) -> np.ndarray:
    """|d|^(p-2) d with the convention 0 at d = 0"""
    return np.sign(d) * np.abs(d) ** (p - 1.0)


# ============================================================
# ARRAY KERNELS
# ============================================================

def energy_values(values: np.ndarray, mesh: Mesh, p: float) -> float:
    total = 0.0
    for d, _ in edge_differences(values, mesh):
        total += np.sum(np.abs(d) ** p)
    return float(mesh.cell_measure * total / p)


def laplacian_values(values: np.ndarray, mesh: Mesh, p: float) -> np.ndarray:
    out = np.zeros(mesh.shape)
    for axis, (d, h) in enumerate(edge_differences(values, mesh)):
        out += np.diff(signed_power(d, p), axis=axis) / h
    return out.reshape(-1)


def energy_gradient_values(values: np.ndarray, mesh: Mesh, p: float) -> np.ndarray:
    return -mesh.cell_measure * laplacian_values(values, mesh, p)


# ============================================================
# PUBLIC OPERATIONS
# ============================================================

def p_energy(v: Field, p) -> float:
    """(1/p) sum over edges of m |D_e v|^p, ghost zeros on the boundary"""
    return energy_values(v.values, v.mesh, as_exponent(p))


def p_energy_gradient(v: Field, p) -> Field:
    """Exact gradient of p_energy with respect to the nodal values"""
    return Field(v.mesh, energy_gradient_values(v.values, v.mesh, as_exponent(p)))


def apply_p_laplacian(v: Field, p) -> Field:
    """Nodal div(|Dv|^(p-2) Dv); p_energy_gradient = -cell_measure * this"""
    return Field(v.mesh, laplacian_values(v.values, v.mesh, as_exponent(p)))
