"""
Evolve module - Schéma d'Euler implicite en temps rescalé tau pour
d_t(u^(2q-1)) - Delta_p u = f(x,u) + h(t,x) u^(q-1)

With w = u^q and tau = q t / (2q-1) the problem becomes the subdifferential
flow w_tau + A(w) = h + f/u^(q-1). Each step is one resolvent solve with
mu = dtau; f1 stays inside the (convex) step objective, f2 is explicit.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd
from tqdm import tqdm

from config.settings import TIME_CONFIG
from src.discretization.field import Field, l2_norm, positive_part, power_values
from src.discretization.mesh import Mesh
from src.exceptions import ConfigError, MeshMismatchError, StabilityError
from src.model.energy import StepObjective, check_exponents, j0q_values
from src.model.forcing import ForcingSpec, sample_values, zero_forcing
from src.model.reaction import ReactionSpec, f2_ratio_values, no_reaction
from src.solver.resolvent import SolverConfig, solve_resolvent

logger = logging.getLogger(__name__)

STEP_POLICIES = ('uniform', 'geometric')


@dataclass
class EvolutionSpec:
    mesh: Mesh
    p: float
    q: float
    u0: Field
    T: float
    steps: int = TIME_CONFIG['steps']
    forcing: ForcingSpec = field(default_factory=zero_forcing)
    reaction: Optional[ReactionSpec] = None
    solver: SolverConfig = field(default_factory=SolverConfig)
    policy: str = TIME_CONFIG['policy']
    ratio: float = TIME_CONFIG['ratio']
    extinction_threshold: float = TIME_CONFIG['extinction_threshold']
    progress: bool = True

    def __post_init__(self):
        check_exponents(self.p, self.q)
        self.p, self.q = float(self.p), float(self.q)
        if not (np.isfinite(self.T) and self.T > 0):
            raise ConfigError(f"horizon T must be positive, got {self.T}")
        if isinstance(self.steps, bool) or int(self.steps) != self.steps or self.steps < 1:
            raise ConfigError(f"steps must be a positive integer, got {self.steps}")
        self.steps = int(self.steps)
        if self.policy not in STEP_POLICIES:
            raise ConfigError(f"unknown step policy '{self.policy}' (known: {', '.join(STEP_POLICIES)})")
        if self.policy == 'geometric' and not self.ratio > 1.0:
            raise ConfigError(f"geometric step ratio must exceed 1, got {self.ratio}")
        if not self.u0.mesh.same_as(self.mesh):
            raise MeshMismatchError("u0 lives on a different mesh")
        if np.any(self.u0.values < 0):
            raise ConfigError("u0 must be nonnegative at every node")
        if self.reaction is None:
            self.reaction = no_reaction(self.mesh, self.q)
        elif not self.reaction.validated or self.reaction.q != self.q:
            raise ConfigError(f"reaction must be validated for q={self.q}")

    # ---------- derived quantities ----------

    @property
    def m(self) -> float:
        return 1.0 / (2.0 * self.q - 1.0)

    @property
    def diffusion_class(self) -> str:
        """fast if (p-1)m < 1, slow if > 1, borderline if = 1"""
        index = (self.p - 1.0) * self.m
        if math.isclose(index, 1.0, rel_tol=0.0, abs_tol=1e-12):
            return 'borderline'
        return 'fast' if index < 1.0 else 'slow'

    @property
    def tau_end(self) -> float:
        return self.q / (2.0 * self.q - 1.0) * self.T

    @property
    def K(self) -> float:
        return float(self.reaction.K)

    def tau_steps(self) -> np.ndarray:
        """Rescaled time increments dtau_i summing to tau_end"""
        n = self.steps
        if self.policy == 'uniform':
            return np.full(n, self.tau_end / n)
        rho = float(self.ratio)
        first = self.tau_end * (rho - 1.0) / (rho ** n - 1.0)
        return first * rho ** np.arange(n)

    def tau_grid(self) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum(self.tau_steps())])

    def physical_times(self) -> np.ndarray:
        return to_physical_time(self.tau_grid(), self.q)

    def check_stability(self) -> None:
        largest = float(np.max(self.tau_steps()))
        if largest * self.K >= 1.0:
            raise StabilityError(
                f"dtau*K = {largest * self.K:.4g} >= 1 (dtau={largest:.4g}, K={self.K}); increase the number of steps"
            )

    def describe(self) -> Dict[str, Any]:
        return {
            'mesh': self.mesh.describe(),
            'p': self.p,
            'q': self.q,
            'T': self.T,
            'steps': self.steps,
            'policy': self.policy,
            'diffusion_class': self.diffusion_class,
            'forcing': self.forcing.describe(),
            'reaction': self.reaction.describe(),
        }


def to_physical_time(tau, q: float):
    """t = ((2q-1)/q) tau"""
    return (2.0 * q - 1.0) / q * tau


# ============================================================
# TRAJECTORY
# ============================================================

@dataclass
class Trajectory:
    q: float
    p: float
    times: np.ndarray
    w: List[Field]
    forcing_samples: List[np.ndarray]
    iterations: List[int]
    converged: List[bool]
    completed: bool
    extinction_time: Optional[float] = None

    @property
    def mesh(self) -> Mesh:
        return self.w[0].mesh

    @property
    def l2_w(self) -> np.ndarray:
        return np.array([l2_norm(w) for w in self.w])

    @property
    def sup_u(self) -> np.ndarray:
        return np.array([float(np.max(power_values(w.values, 1.0 / self.q))) for w in self.w])

    @property
    def sup_w(self) -> np.ndarray:
        return np.array([float(np.max(w.values)) for w in self.w])

    @property
    def j0q(self) -> np.ndarray:
        return np.array([j0q_values(w.values, w.mesh, self.p, self.q) for w in self.w])

    @property
    def l2_big_w(self) -> np.ndarray:
        """||u^(2q-1)|| = ||w^((2q-1)/q)||"""
        exponent = (2.0 * self.q - 1.0) / self.q
        return np.array([l2_norm(Field(w.mesh, power_values(w.values, exponent))) for w in self.w])

    @property
    def step_durations(self) -> np.ndarray:
        return np.diff(self.times)

    def snapshot(self, t: float) -> Field:
        """w at the first t_k >= t (the last state beyond the horizon)"""
        idx = int(np.searchsorted(self.times, t, side='left'))
        return self.w[min(idx, len(self.w) - 1)]

    def snapshot_time(self, t: float) -> float:
        idx = int(np.searchsorted(self.times, t, side='left'))
        return float(self.times[min(idx, len(self.times) - 1)])

    def to_frame(self) -> pd.DataFrame:
        extinct = np.zeros(len(self.times), dtype=int)
        if self.extinction_time is not None:
            extinct[self.times >= self.extinction_time] = 1
        return pd.DataFrame({
            't': self.times,
            'l2_w': self.l2_w,
            'sup_u': self.sup_u,
            'j0q': self.j0q,
            'extinct_flag': extinct,
        })

    def diagnostics(self) -> Dict[str, Any]:
        return {
            'completed': self.completed,
            'steps_done': len(self.w) - 1,
            'total_iterations': int(sum(self.iterations)),
            'max_iterations': int(max(self.iterations)) if self.iterations else 0,
            'non_converged_steps': int(sum(1 for c in self.converged if not c)),
            'extinction_time': self.extinction_time,
        }


# ============================================================
# TIME STEPPING
# ============================================================

def evolve(spec: EvolutionSpec) -> Trajectory:
    """
    Implicit Euler in tau. Stops early (completed=False) at the first step
    whose resolvent does not converge.
    """
    spec.check_stability()
    mesh, q = spec.mesh, spec.q
    dtaus = spec.tau_steps()
    times = spec.physical_times()

    w = Field(mesh, power_values(spec.u0.values, q))
    v = spec.u0
    states = [w]
    samples: List[np.ndarray] = []
    iterations: List[int] = []
    converged: List[bool] = []
    completed = True

    show = spec.progress and logger.isEnabledFor(logging.INFO)
    for k in tqdm(range(spec.steps), desc='Time steps', disable=not show, leave=False):
        t_mid = 0.5 * (times[k] + times[k + 1])
        h = sample_values(spec.forcing, t_mid, mesh)
        explicit = f2_ratio_values(spec.reaction, v.values)
        g = Field(mesh, w.values + dtaus[k] * (h + explicit))

        obj = StepObjective(mesh, spec.p, q, float(dtaus[k]), g, spec.reaction)
        result = solve_resolvent(obj, v, spec.solver)

        samples.append(h)
        iterations.append(result.iterations)
        converged.append(result.converged)
        states.append(result.w)
        v, w = result.v, result.w

        if not result.converged:
            logger.warning(f"⚠️ Step {k + 1}/{spec.steps} did not converge; trajectory truncated at t={times[k + 1]:.6g}")
            completed = False
            break

    traj = Trajectory(
        q=q,
        p=spec.p,
        times=times[:len(states)],
        w=states,
        forcing_samples=samples,
        iterations=iterations,
        converged=converged,
        completed=completed,
    )
    if completed:
        traj.extinction_time = detect_extinction(traj, spec.extinction_threshold)
    logger.debug(f"Evolution finished: {traj.diagnostics()}")
    return traj


def detect_extinction(traj: Trajectory, threshold: float = TIME_CONFIG['extinction_threshold']) -> Optional[float]:
    """First t_k from which sup w stays <= threshold up to the horizon"""
    below = traj.sup_w <= threshold
    if not below[-1]:
        return None
    above = np.flatnonzero(~below)
    first = 0 if above.size == 0 else int(above[-1]) + 1
    return float(traj.times[first])


# ============================================================
# COMPARISON
# ============================================================

@dataclass
class ComparisonResult:
    times: np.ndarray
    defects: np.ndarray
    bounds: np.ndarray
    max_defect: float
    tolerance: float
    passed: bool
    ordered: Optional[bool]
    completed: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            'max_defect': self.max_defect,
            'tolerance': self.tolerance,
            'passed': self.passed,
            'ordered': self.ordered,
            'completed': self.completed,
        }


def _check_comparable(a: EvolutionSpec, b: EvolutionSpec) -> None:
    if not a.mesh.same_as(b.mesh):
        raise MeshMismatchError("comparison needs both specs on the same mesh")
    if (a.p, a.q) != (b.p, b.q):
        raise ConfigError("comparison needs identical exponents p, q")
    if a.steps != b.steps or not np.array_equal(a.tau_steps(), b.tau_steps()):
        raise ConfigError("comparison needs identical step grids")
    if a.K != b.K:
        raise ConfigError("comparison needs the same reaction (same K)")


def comparison_pair(spec_a: EvolutionSpec, spec_b: EvolutionSpec, K: Optional[float] = None,
                    tolerance: float = 1e-3) -> ComparisonResult:
    """
    Defect of the monotone dependence estimate at every t_k:
        ||(wA-wB)+|| - [e^(K t_k) ||(wA0-wB0)+|| + sum_s e^(K (t_k - t_s)) ||(hA_s-hB_s)+|| dt_s]

    t_s is the start of step s. Passes iff max defect <= tolerance * max(1, max bound).
    """
    _check_comparable(spec_a, spec_b)
    K = spec_a.K if K is None else float(K)
    traj_a = evolve(spec_a)
    traj_b = evolve(spec_b)
    count = min(len(traj_a.w), len(traj_b.w))
    times = traj_a.times[:count]

    initial = l2_norm(positive_part(traj_a.w[0] - traj_b.w[0]))
    m = spec_a.mesh.cell_measure
    forcing_gaps = np.array([
        math.sqrt(m * float(np.sum(np.maximum(ha - hb, 0.0) ** 2)))
        for ha, hb in zip(traj_a.forcing_samples[:count - 1], traj_b.forcing_samples[:count - 1])
    ])
    durations = np.diff(times)

    defects = np.zeros(count)
    bounds = np.zeros(count)
    ordered_initial = bool(np.all(spec_a.u0.values >= spec_b.u0.values))
    ordered_forcing = all(np.all(ha >= hb) for ha, hb in zip(traj_a.forcing_samples, traj_b.forcing_samples))
    ordered = True if ordered_initial and ordered_forcing else None

    for k in range(count):
        accumulated = float(np.sum(np.exp(K * (times[k] - times[:k])) * forcing_gaps[:k] * durations[:k]))
        bounds[k] = math.exp(K * times[k]) * initial + accumulated
        defects[k] = l2_norm(positive_part(traj_a.w[k] - traj_b.w[k])) - bounds[k]
        if ordered is not None and np.any(traj_a.w[k].values < traj_b.w[k].values - 1e-8):
            ordered = False

    scale = max(1.0, float(np.max(bounds)))
    max_defect = float(np.max(defects))
    completed = traj_a.completed and traj_b.completed
    result = ComparisonResult(
        times=times,
        defects=defects,
        bounds=bounds,
        max_defect=max_defect,
        tolerance=tolerance * scale,
        passed=completed and max_defect <= tolerance * scale,
        ordered=ordered,
        completed=completed,
    )
    logger.debug(f"Comparison: {result.to_dict()}")
    return result
