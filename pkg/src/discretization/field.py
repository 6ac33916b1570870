"""
Field module - Fonctions nodales sur un maillage et leur algèbre
"""
import logging
from typing import TYPE_CHECKING, Union

import numpy as np
import pandas as pd

from src.exceptions import ConfigError, MeshMismatchError

if TYPE_CHECKING:
    from src.discretization.mesh import Mesh

logger = logging.getLogger(__name__)

Scalar = Union[int, float]


class Field:
    """
    One real value per interior node of a mesh.

    Fields behave as values: every operation returns a new Field and the
    underlying array is read-only. The same class carries u, v = w^(1/q),
    w = u^q, W = u^(2q-1), the forcing h(t,.) and coefficient fields.
    """

    __slots__ = ('mesh', 'values')

    def __init__(self, mesh: 'Mesh', values):
        values = np.array(values, dtype=float).reshape(-1)
        if values.size != mesh.size:
            raise ConfigError(
                f"Field has {values.size} values but the mesh has {mesh.size} interior nodes"
            )
        if not np.all(np.isfinite(values)):
            raise ConfigError("Field values must be finite (no NaN/Inf)")
        values.setflags(write=False)
        self.mesh = mesh
        self.values = values

    # ---------- constructors ----------

    @classmethod
    def zeros(cls, mesh: 'Mesh') -> 'Field':
        return cls(mesh, np.zeros(mesh.size))

    @classmethod
    def constant(cls, mesh: 'Mesh', value: Scalar) -> 'Field':
        return cls(mesh, np.full(mesh.size, float(value)))

    def with_values(self, values) -> 'Field':
        return Field(self.mesh, values)

    # ---------- views ----------

    def grid(self) -> np.ndarray:
        """Values reshaped to the mesh tensor shape"""
        return self.values.reshape(self.mesh.shape)

    def __len__(self) -> int:
        return self.values.size

    def __repr__(self) -> str:
        return f"Field(dim={self.mesh.dim}, nodes={self.values.size}, sup={sup_norm(self):.3g})"

    # ---------- arithmetic ----------

    def _other_values(self, other) -> np.ndarray:
        if isinstance(other, Field):
            check_same_mesh(self, other)
            return other.values
        return float(other)

    def __add__(self, other) -> 'Field':
        return Field(self.mesh, self.values + self._other_values(other))

    __radd__ = __add__

    def __sub__(self, other) -> 'Field':
        return Field(self.mesh, self.values - self._other_values(other))

    def __rsub__(self, other) -> 'Field':
        return Field(self.mesh, self._other_values(other) - self.values)

    def __mul__(self, other) -> 'Field':
        return Field(self.mesh, self.values * self._other_values(other))

    __rmul__ = __mul__

    def __neg__(self) -> 'Field':
        return Field(self.mesh, -self.values)

    def allclose(self, other: 'Field', atol: float = 0.0, rtol: float = 1e-12) -> bool:
        check_same_mesh(self, other)
        return bool(np.allclose(self.values, other.values, atol=atol, rtol=rtol))


def check_same_mesh(f: Field, g: Field) -> None:
    if not f.mesh.same_as(g.mesh):
        raise MeshMismatchError("Fields are defined on different meshes")


# ============================================================
# NORMS
# ============================================================

def l2_norm(f: Field) -> float:
    """sqrt(sum_j m_j f_j^2), the cell-measure weighted L2 norm"""
    return float(np.sqrt(f.mesh.cell_measure * np.dot(f.values, f.values)))


def sup_norm(f: Field) -> float:
    return float(np.max(np.abs(f.values))) if f.values.size else 0.0


def inner(f: Field, g: Field) -> float:
    """Weighted L2 inner product"""
    check_same_mesh(f, g)
    return float(f.mesh.cell_measure * np.dot(f.values, g.values))


# ============================================================
# NODAL MAPS
# ============================================================

def positive_part(f: Field) -> Field:
    return Field(f.mesh, np.maximum(f.values, 0.0))


def nodal_min(f: Field, g: Field) -> Field:
    check_same_mesh(f, g)
    return Field(f.mesh, np.minimum(f.values, g.values))


def nodal_max(f: Field, g: Field) -> Field:
    check_same_mesh(f, g)
    return Field(f.mesh, np.maximum(f.values, g.values))


def power(f: Field, alpha: float) -> Field:
    """
    Nodal f^alpha with 0^alpha = 0.

    Moves between the u, v, w and W coordinates; fractional exponents
    need a nonnegative base.
    """
    alpha = float(alpha)
    if not alpha > 0:
        raise ConfigError(f"power exponent must be positive, got {alpha}")
    if not alpha.is_integer() and np.any(f.values < 0):
        raise ConfigError(f"negative base with fractional exponent {alpha}")
    return Field(f.mesh, power_values(f.values, alpha))


def power_values(values: np.ndarray, alpha: float) -> np.ndarray:
    """Array version of power() without the checks, for inner loops"""
    if alpha == 1.0:
        return np.array(values, dtype=float)
    return np.power(values, alpha)


# ============================================================
# EXPORT
# ============================================================

def to_frame(f: Field, column: str = 'value') -> pd.DataFrame:
    """Table with one row per node: x (, y), value"""
    names = ['x', 'y'][:f.mesh.dim]
    frame = pd.DataFrame(f.mesh.coordinates, columns=names)
    frame[column] = f.values
    return frame
