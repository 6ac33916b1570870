"""
Brute-force module - Oracle indépendant par descente coordonnée et section dorée

Minimizes the step objective in w coordinates, where it is convex, one
node at a time. Only meant for tiny meshes (cross-checking solve_resolvent).
"""
import logging
import math
from typing import Callable

import numpy as np

from src.discretization.field import Field, power_values
from src.exceptions import ConfigError
from src.model.energy import StepObjective

logger = logging.getLogger(__name__)

MAX_NODES = 8
INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI_SQ = (3.0 - math.sqrt(5.0)) / 2.0


def golden_section(obj: Callable[[float], float], a: float, b: float, tol: float = 1e-13) -> float:
    """Minimizer of a unimodal function on [a, b] to bracket width tol"""
    dist = b - a
    if dist <= tol:
        return 0.5 * (a + b)

    n = int(math.ceil(math.log(tol / dist) / math.log(INV_PHI)))
    c = a + INV_PHI_SQ * dist
    d = a + INV_PHI * dist
    yc = obj(c)
    yd = obj(d)

    for _ in range(n - 1):
        if yc < yd:
            b, d, yd = d, c, yc
            dist = INV_PHI * dist
            c = a + INV_PHI_SQ * dist
            yc = obj(c)
        else:
            a, c, yc = c, d, yd
            dist = INV_PHI * dist
            d = a + INV_PHI * dist
            yd = obj(d)

    # endpoints matter: the minimizer is often w_j = 0
    best = min((yc, c), (yd, d), (obj(a), a), (obj(b), b))
    return best[1]


def brute_force_resolvent(obj: StepObjective, sweep_tol: float = 1e-12,
                          max_sweeps: int = 10_000) -> Field:
    """
    Global minimizer by cyclic coordinate minimization in w on [0, w_hi],
    w_hi = 2 max(g + mu a0)_+ + 1, doubled while a node sits on w_hi.

    Stops when a sweep moves no node by more than sweep_tol, or when a
    sweep no longer lowers the objective (float resolution reached).
    """
    mesh = obj.mesh
    if mesh.size > MAX_NODES:
        raise ConfigError(f"brute_force_resolvent is limited to {MAX_NODES} nodes, mesh has {mesh.size}")

    q = obj.q
    w_hi = 2.0 * float(np.max(np.maximum(obj.g.values + obj.mu * obj.a0, 0.0))) + 1.0
    w = np.zeros(mesh.size)

    def total(values: np.ndarray) -> float:
        return obj.value_of(power_values(values, 1.0 / q))

    current = total(w)
    for sweep in range(max_sweeps):
        change = 0.0
        start = current
        for j in range(mesh.size):
            def nodal(x: float, j=j) -> float:
                trial = w.copy()
                trial[j] = x
                return total(trial)

            x_new = golden_section(nodal, 0.0, w_hi)
            f_new = nodal(x_new)
            if f_new < current:
                change = max(change, abs(x_new - w[j]))
                w[j] = x_new
                current = f_new
        if np.any(w >= w_hi * (1.0 - 1e-9)):
            w_hi *= 2.0
            logger.debug(f"Brute force bracket widened to w_hi={w_hi:.6g}")
            continue
        if change <= sweep_tol or current >= start:
            logger.debug(f"Brute force stopped after {sweep + 1} sweeps (change={change:.2e})")
            break
    else:
        logger.warning(f"⚠️ Brute force hit the sweep cap ({max_sweeps})")

    return Field(mesh, w)
