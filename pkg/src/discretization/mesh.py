"""
Mesh module - Grilles structurées 1D/2D avec bord de Dirichlet homogène
"""
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from src.discretization.field import Field
from src.exceptions import ConfigError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Mesh:
    """
    Structured tensor grid of interior nodes on (0,Lx) or (0,Lx)x(0,Ly).

    Boundary nodes are never stored: the Dirichlet zeros live in an
    implicit ghost layer that the stencils pad in on demand. Nodal data is
    flattened in C order of `shape` (x index major).
    """
    dim: int
    extents: Tuple[float, ...]
    counts: Tuple[int, ...]
    spacing: Tuple[float, ...]
    coordinates: np.ndarray
    cell_measure: float

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.counts

    @property
    def size(self) -> int:
        return int(np.prod(self.counts))

    @property
    def volume(self) -> float:
        return float(np.prod(self.extents))

    def axis_coordinates(self, axis: int) -> np.ndarray:
        """Node positions along one axis (j·h for j = 1..n)"""
        h = self.spacing[axis]
        return h * np.arange(1, self.counts[axis] + 1)

    def same_as(self, other: 'Mesh') -> bool:
        return (
            self is other
            or (self.dim == other.dim
                and self.extents == other.extents
                and self.counts == other.counts)
        )

    def describe(self) -> dict:
        """JSON-friendly summary"""
        return {
            'dim': self.dim,
            'extents': list(self.extents),
            'counts': list(self.counts),
            'spacing': list(self.spacing),
            'cell_measure': self.cell_measure,
        }


def _check_length(name: str, value) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a positive real, got {value!r}")
    if not np.isfinite(value) or value <= 0:
        raise ConfigError(f"{name} must be a positive real, got {value!r}")
    return value


def _check_count(name: str, value) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
        raise ConfigError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def _build(extents: Tuple[float, ...], counts: Tuple[int, ...]) -> Mesh:
    spacing = tuple(L / (n + 1) for L, n in zip(extents, counts))
    axes = [h * np.arange(1, n + 1) for h, n in zip(spacing, counts)]
    grids = np.meshgrid(*axes, indexing='ij')
    coordinates = np.stack([g.ravel() for g in grids], axis=1)
    coordinates.setflags(write=False)
    mesh = Mesh(
        dim=len(extents),
        extents=extents,
        counts=counts,
        spacing=spacing,
        coordinates=coordinates,
        cell_measure=float(np.prod(spacing)),
    )
    logger.debug(f"Mesh built: {mesh.describe()}")
    return mesh


def build_interval(L: float, n: int) -> Mesh:
    """1D mesh of n interior nodes x_j = j·L/(n+1)"""
    return _build((_check_length('L', L),), (_check_count('n', n),))


def build_rectangle(Lx: float, Ly: float, nx: int, ny: int) -> Mesh:
    """2D tensor mesh of nx·ny interior nodes"""
    return _build(
        (_check_length('Lx', Lx), _check_length('Ly', Ly)),
        (_check_count('nx', nx), _check_count('ny', ny)),
    )


def boundary_distance(mesh: Mesh) -> Field:
    """Exact Euclidean distance from every node to the boundary of the box"""
    coords = mesh.coordinates
    extents = np.asarray(mesh.extents)
    distance = np.minimum(coords, extents - coords).min(axis=1)
    return Field(mesh, distance)
