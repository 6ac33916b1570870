"""
Resolvent module - Résolution de w + mu dJ_{0,q}(w) ∋ g par minimisation projetée

Scaled spectral projected gradient in v = w^(1/q) over the nonnegative
cone: each nodal gradient is divided by a clipped estimate of the node's
own curvature, then Barzilai-Borwein trial step, projection and Armijo
backtracking along the projected direction. Nodes close to zero are stiff
in v when q < 2; the scaling turns their moves into Newton-like steps.

The objective gradient vanishes identically at v = 0 for q > 1, so a
converged iterate with zero nodes is retried from small lifts before being
accepted. A run that stalls at float resolution is accepted only when the
w-space residual certifies it.
"""
import logging
from dataclasses import asdict, dataclass, fields
from typing import Any, Dict, Optional

import numpy as np

from config.settings import SOLVER_CONFIG
from src.discretization.field import Field, power_values
from src.discretization.plap import laplacian_values
from src.exceptions import ConfigError
from src.model.energy import StepObjective

logger = logging.getLogger(__name__)

_MIN_STEP = 1e-20
_MAX_STEP = 1e20


@dataclass(frozen=True)
class SolverConfig:
    tol_grad_abs: float = SOLVER_CONFIG['tol_grad_abs']
    tol_grad_rel: float = SOLVER_CONFIG['tol_grad_rel']
    tol_residual: float = SOLVER_CONFIG['tol_residual']
    max_iters: int = SOLVER_CONFIG['max_iters']
    armijo_c: float = SOLVER_CONFIG['armijo_c']
    backtrack_factor: float = SOLVER_CONFIG['backtrack_factor']
    lift_factor: float = SOLVER_CONFIG['lift_factor']
    scaling_floor: float = SOLVER_CONFIG['scaling_floor']
    scaling_cap: float = SOLVER_CONFIG['scaling_cap']
    seed: int = SOLVER_CONFIG['seed']
    max_escape_rounds: int = SOLVER_CONFIG['max_escape_rounds']

    def __post_init__(self):
        for name in ('tol_grad_abs', 'tol_grad_rel', 'tol_residual', 'armijo_c', 'lift_factor'):
            if not getattr(self, name) > 0:
                raise ConfigError(f"solver.{name} must be positive, got {getattr(self, name)}")
        if not 0.0 < self.backtrack_factor < 1.0:
            raise ConfigError(f"solver.backtrack_factor must lie in (0,1), got {self.backtrack_factor}")
        if not 0.0 < self.scaling_floor <= 1.0 <= self.scaling_cap:
            raise ConfigError(
                f"solver scaling bounds must satisfy 0 < scaling_floor <= 1 <= scaling_cap, "
                f"got {self.scaling_floor}, {self.scaling_cap}"
            )
        if self.max_iters < 1:
            raise ConfigError(f"solver.max_iters must be at least 1, got {self.max_iters}")
        if self.max_escape_rounds < 0:
            raise ConfigError(f"solver.max_escape_rounds must be >= 0, got {self.max_escape_rounds}")

    @classmethod
    def from_dict(cls, overrides: Optional[Dict[str, Any]] = None) -> 'SolverConfig':
        overrides = overrides or {}
        known = {f.name for f in fields(cls)}
        unknown = set(overrides) - known
        if unknown:
            raise ConfigError(f"unknown solver keys: {', '.join(sorted(unknown))}")
        return cls(**overrides)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class ResolventResult:
    v: Field
    w: Field
    converged: bool
    iterations: int
    escape_rounds: int
    projected_gradient: float
    objective: float
    threshold: float
    # Renseigné quand l'arrêt a dû être certifié dans les coordonnées w
    residual: Optional[float] = None

    def diagnostics(self) -> Dict[str, Any]:
        return {
            'converged': self.converged,
            'iterations': self.iterations,
            'escape_rounds': self.escape_rounds,
            'projected_gradient': self.projected_gradient,
            'threshold': self.threshold,
            'objective': self.objective,
            'residual': self.residual,
        }


def projected_gradient(v: np.ndarray, grad: np.ndarray) -> np.ndarray:
    """Gradient with components at active zero nodes clipped to min(grad, 0)"""
    out = np.array(grad, dtype=float)
    active = v <= 0
    out[active] = np.minimum(grad[active], 0.0)
    return out


def nodal_optimum(obj: StepObjective) -> np.ndarray:
    """(g + mu a0)_+ : the minimizer in w of each node once diffusion is dropped"""
    return np.maximum(obj.g.values + obj.mu * obj.a0, 0.0)


def _lift(obj: StepObjective, cfg: SolverConfig) -> np.ndarray:
    """c_lift * (g + mu a0)_+^(1/q): a small fraction of the diffusion-free nodal optimum"""
    return cfg.lift_factor * power_values(nodal_optimum(obj), 1.0 / obj.q)


def diagonal_scaling(obj: StepObjective, v: np.ndarray, cfg: SolverConfig) -> np.ndarray:
    """
    median curvature / nodal curvature, clipped to [scaling_floor, scaling_cap].

    Singular nodes (infinite curvature) sit on the floor.
    """
    curvature = obj.curvature_of(v)
    usable = curvature[np.isfinite(curvature) & (curvature > 0)]
    reference = float(np.median(usable)) if usable.size else 1.0
    with np.errstate(divide='ignore'):
        scale = reference / curvature
    return np.clip(np.nan_to_num(scale, nan=1.0, posinf=cfg.scaling_cap), cfg.scaling_floor, cfg.scaling_cap)


# ============================================================
# SCALED SPECTRAL PROJECTED GRADIENT
# ============================================================

class _Descent:
    """State of one projected-gradient run on a fixed objective"""

    def __init__(self, obj: StepObjective, cfg: SolverConfig, v: np.ndarray, threshold: float):
        self.obj = obj
        self.cfg = cfg
        self.threshold = threshold
        self.v = v
        self.f = obj.value_of(v)
        self.grad = obj.gradient_of(v)
        self.scale = diagonal_scaling(obj, v, cfg)
        pg = projected_gradient(v, self.grad)
        self.pg = float(np.max(np.abs(pg))) if v.size else 0.0
        scaled = float(np.max(np.abs(self.scale * pg))) if v.size else 0.0
        self.step = max(float(np.max(v)) if v.size else 0.0, 1.0) / max(scaled, 1e-300)
        self.iterations = 0
        self.stalled = False

    def run(self, budget: int) -> bool:
        """Iterate until the stopping rule holds, the line search stalls or the budget is spent"""
        obj, cfg = self.obj, self.cfg
        for _ in range(budget):
            if self.pg <= self.threshold:
                return True
            trial = np.maximum(self.v - self.step * self.scale * self.grad, 0.0)
            direction = trial - self.v
            slope = float(np.dot(self.grad, direction))
            if slope >= 0:
                # projected step collapsed onto the current point
                self.step = max(self.step * cfg.backtrack_factor, _MIN_STEP)
                self.iterations += 1
                continue

            t = 1.0
            while True:
                candidate = np.maximum(self.v + t * direction, 0.0)
                f_new = obj.value_of(candidate)
                if f_new <= self.f + cfg.armijo_c * t * slope:
                    break
                t *= cfg.backtrack_factor
                if t < 1e-16:
                    logger.debug(f"Line search stalled at |P|={self.pg:.3e}")
                    self.stalled = True
                    return self.pg <= self.threshold

            grad_new = obj.gradient_of(candidate)
            s = candidate - self.v
            y = grad_new - self.grad
            sy = float(np.dot(s, y))
            if sy > 0:
                # BB step in the metric of the current scaling
                self.step = min(max(float(np.dot(s, s / self.scale)) / sy, _MIN_STEP), _MAX_STEP)

            self.v, self.f, self.grad = candidate, f_new, grad_new
            self.scale = diagonal_scaling(obj, self.v, cfg)
            self.pg = float(np.max(np.abs(projected_gradient(self.v, self.grad))))
            self.iterations += 1
            if self.iterations % 1000 == 0:
                logger.debug(f"  iter {self.iterations}: Phi={self.f:.12g}, |P|={self.pg:.3e}")
        return self.pg <= self.threshold


def _escape(obj: StepObjective, cfg: SolverConfig, v: np.ndarray, f: float) -> Optional[np.ndarray]:
    """
    Lift the zero nodes whose diffusion-free optimum is positive. Returns
    an improved point or None when no lift helps: first all nodes
    together, then one by one.
    """
    lift = _lift(obj, cfg)
    candidates = np.flatnonzero((v <= 0) & (lift > 0))
    if candidates.size == 0:
        return None

    together = v.copy()
    together[candidates] = lift[candidates]
    if obj.value_of(together) < f:
        return together

    improved = v.copy()
    best = f
    found = False
    for j in candidates:
        trial = improved.copy()
        trial[j] = lift[j]
        value = obj.value_of(trial)
        if value < best:
            improved, best, found = trial, value, True
    return improved if found else None


def solve_resolvent(obj: StepObjective, v_init: Optional[Field] = None,
                    cfg: Optional[SolverConfig] = None) -> ResolventResult:
    """
    Minimize the step objective over v >= 0.

    Never raises on non-convergence: the last (best) iterate is returned
    with converged=False.
    """
    cfg = cfg or SolverConfig()
    mesh = obj.mesh
    if v_init is None:
        v_init = Field.zeros(mesh)
    if not v_init.mesh.same_as(mesh):
        raise ConfigError("initial iterate lives on a different mesh")
    if np.any(v_init.values < 0):
        raise ConfigError("initial iterate must be nonnegative")

    v = np.maximum(v_init.values, _lift(obj, cfg))
    start_pg = projected_gradient(v, obj.gradient_of(v))
    scale = max(
        float(np.max(np.abs(start_pg))) if v.size else 0.0,
        float(np.max(mesh.cell_measure * np.abs(obj.g.values))) if v.size else 0.0,
    )
    threshold = cfg.tol_grad_abs + cfg.tol_grad_rel * scale

    descent = _Descent(obj, cfg, v, threshold)
    escape_rounds = 0
    converged = False
    while True:
        converged = descent.run(cfg.max_iters - descent.iterations)
        if not converged or escape_rounds >= cfg.max_escape_rounds:
            break
        lifted = _escape(obj, cfg, descent.v, descent.f)
        if lifted is None:
            break
        escape_rounds += 1
        logger.debug(f"  escape round {escape_rounds}: resuming from lifted zero nodes")
        iterations = descent.iterations
        descent = _Descent(obj, cfg, lifted, threshold)
        descent.iterations = iterations

    w_final = Field(mesh, power_values(descent.v, obj.q))
    residual = None
    if not converged:
        residual = residual_check(w_final, obj)
        limit = cfg.tol_residual * max(1.0, float(np.max(np.abs(obj.g.values))))
        if residual <= limit:
            converged = True
            logger.debug(
                f"  accepted on the w-residual ({residual:.3e} <= {limit:.3e}) with |P|={descent.pg:.3e}"
                f"{' after a stalled line search' if descent.stalled else ''}"
            )
        else:
            logger.warning(
                f"⚠️ Resolvent not converged after {descent.iterations} iterations "
                f"(|P|={descent.pg:.3e} > {threshold:.3e}, residual {residual:.3e})"
            )

    return ResolventResult(
        v=Field(mesh, descent.v),
        w=w_final,
        converged=converged,
        iterations=descent.iterations,
        escape_rounds=escape_rounds,
        projected_gradient=descent.pg,
        objective=descent.f,
        threshold=threshold,
        residual=residual,
    )


# ============================================================
# CERTIFICATES
# ============================================================

def residual_check(w: Field, obj: StepObjective) -> float:
    """
    Sup-norm of the discrete Euler-Lagrange residual, per unit cell measure:
        (w - g) - mu Delta_p v / v^(q-1) - mu f1(v) / v^(q-1)   where w > 0
        max(0, -one-sided dPhi/dw / m)                           where w = 0

    At a zero node with a positive neighbour dPhi/dw is unbounded below and
    the v-derivative max(0, -dPhi/dv / m) is measured instead.
    """
    if np.any(w.values < 0):
        raise ConfigError("residual_check needs w >= 0")
    m = obj.mesh.cell_measure
    q = obj.q
    v = power_values(w.values, 1.0 / q)
    grad = obj.gradient_of(v)
    positive = w.values > 0
    attached = ~positive & (laplacian_values(v, obj.mesh, obj.p) > 0)
    isolated = ~positive & ~attached

    residual = np.zeros_like(v)
    residual[positive] = grad[positive] / (q * power_values(v[positive], q - 1.0) * m)
    residual[attached] = np.maximum(-grad[attached] / m, 0.0)
    residual[isolated] = np.maximum(-obj.zero_node_slope()[isolated], 0.0)
    return float(np.max(np.abs(residual))) if residual.size else 0.0


def maximum_bound_check(w: Field, g: Field, tol: float = 1e-8) -> bool:
    """max w <= max g_+ + tol (L-infinity invariance of the resolvent)"""
    return float(np.max(w.values)) <= max(float(np.max(g.values)), 0.0) + tol


def maximum_bound_margin(w: Field, g: Field) -> float:
    """max g_+ - max w; nonnegative when the bound holds exactly"""
    return max(float(np.max(g.values)), 0.0) - float(np.max(w.values))
