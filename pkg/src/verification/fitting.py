"""
Fitting module - Ajustement d'exposants en log-log (décroissance en temps, décroissance au bord)
"""
import logging
from typing import Sequence, Tuple

import numpy as np

from src.discretization.field import Field
from src.discretization.mesh import boundary_distance
from src.exceptions import ConfigError

logger = logging.getLogger(__name__)


def loglog_slope(x: np.ndarray, y: np.ndarray) -> float:
    """Least-squares slope of log y against log x"""
    if x.size < 2:
        raise ConfigError(f"log-log fit needs at least 2 samples, got {x.size}")
    slope, _ = np.polyfit(np.log(x), np.log(y), 1)
    return float(slope)


def decay_exponent(times: np.ndarray, norms: np.ndarray, window: Sequence[float]) -> float:
    """alpha such that norms ~ t^(-alpha) over samples with t in [t_lo, t_hi]"""
    t_lo, t_hi = float(window[0]), float(window[1])
    if not 0 < t_lo < t_hi:
        raise ConfigError(f"decay window must satisfy 0 < t_lo < t_hi, got {list(window)}")
    times = np.asarray(times, dtype=float)
    norms = np.asarray(norms, dtype=float)
    if t_hi > times[-1] * (1 + 1e-12):
        raise ConfigError(f"decay window ends at {t_hi} beyond the horizon {times[-1]}")
    inside = (times >= t_lo) & (times <= t_hi)
    if np.any(norms[inside] <= 0):
        raise ConfigError("norm vanished inside the decay window")
    return -loglog_slope(times[inside], norms[inside])


def fit_decay_exponent(traj, window: Sequence[float]) -> float:
    """Decay exponent of ||w(t)|| over a trajectory"""
    return decay_exponent(traj.times, traj.l2_w, window)


def fit_boundary_exponent(v: Field, band: float, min_per_side: int = 4) -> float:
    """
    Slope of log v against log d(x, boundary) over the nodes with d < band,
    all sides pooled.
    """
    mesh = v.mesh
    distance = boundary_distance(mesh).values
    inside = distance < band

    # noeuds par face: chaque noeud compte pour sa face la plus proche
    coords = mesh.coordinates
    extents = np.asarray(mesh.extents)
    gaps = np.concatenate([coords, extents - coords], axis=1)
    nearest_side = np.argmin(gaps, axis=1)
    for side in range(2 * mesh.dim):
        count = int(np.sum(inside & (nearest_side == side)))
        if count < min_per_side:
            raise ConfigError(f"boundary band {band} holds {count} nodes on side {side}, need {min_per_side}")

    if np.any(v.values[inside] <= 0):
        raise ConfigError("zero node inside the boundary band")
    return loglog_slope(distance[inside], v.values[inside])


def expected_boundary_exponent(p: float, q: float, h_negative_near_boundary: bool) -> Tuple[str, float]:
    """
    Vanishing exponent bound of the resolvent solution near the boundary:
        i    1 < q < p, h_- > 0 near the boundary  -> p/(p-q)
        ii   h_- = 0, p > 2, 1 < q < p/2           -> p/(p-2q)
        iii  h_- = 0, remaining q < p               -> 1
        iv   q = p                                  -> 1
    """
    if q == p:
        return 'iv', 1.0
    if h_negative_near_boundary:
        return 'i', p / (p - q)
    if p > 2 and q < p / 2:
        return 'ii', p / (p - 2 * q)
    return 'iii', 1.0


def decay_exponent_bound(p: float, q: float) -> float:
    """1/(theta - 1) = q/(p - 2q) for the theta-homogeneous flow, theta = (p-q)/q > 1"""
    if not 2 * q < p:
        raise ConfigError(f"decay bound needs q < p/2, got p={p}, q={q}")
    return q / (p - 2 * q)


def stated_decay_exponent(p: float, q: float) -> float:
    return (q - 1) / (p + q - 2)
