"""
Suites module - Suites d'audit du résolvant et de la fonctionnelle J_{0,q}
"""
import logging
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from config.settings import VERIFY_CONFIG
from src.discretization.field import Field, l2_norm, positive_part, power_values, sup_norm
from src.discretization.mesh import build_interval
from src.discretization.profiles import evaluate_profile
from src.model.energy import (
    StepObjective,
    convexity_gap,
    j0q,
    j0q_gradient,
    monotonicity_gap,
    objective_value_w,
    operator_a,
    picone_gap,
    shifted_submodularity_gap,
    submodularity_gap,
)
from src.solver.brute_force import brute_force_resolvent
from src.solver.resolvent import SolverConfig, maximum_bound_margin, solve_resolvent
from src.verification import BaseSuite, merge_reports
from src.verification.fitting import expected_boundary_exponent, fit_boundary_exponent

logger = logging.getLogger(__name__)


def _case_name(suite: str, p: float, q: float) -> str:
    return f"{suite}[p={p:g},q={q:g}]"


# ============================================================
# CONTRACTION
# ============================================================

class ContractionSuite(BaseSuite):
    """||(w - w^)+|| <= ||(g - g^)+|| + slack, plus max w <= max g_+ for both solves"""

    def __init__(self, p: float, q: float, mu: float, n: int, trials: int, seed: int,
                 slack: float = 1e-6, max_bound_tol: float = 1e-8,
                 solver: Optional[SolverConfig] = None, threads: Optional[int] = None):
        super().__init__(
            _case_name('contraction', p, q),
            {'p': p, 'q': q, 'mu': mu, 'n': n, 'trials': trials, 'seed': seed,
             'slack': slack, 'max_bound_tol': max_bound_tol},
            threads,
        )
        self.p, self.q, self.mu = p, q, mu
        self.mesh = build_interval(1.0, n)
        self.count = trials
        self.seed = seed
        self.slack = slack
        self.max_bound_tol = max_bound_tol
        self.solver = solver or SolverConfig()

    def generate_trials(self) -> List[Dict[str, Any]]:
        rng = np.random.default_rng(self.seed)
        return [
            {'g': rng.uniform(-1.0, 1.0, self.mesh.size), 'g_hat': rng.uniform(-1.0, 1.0, self.mesh.size)}
            for _ in range(self.count)
        ]

    def run_trial(self, trial: Dict[str, Any]) -> Dict[str, Any]:
        g = Field(self.mesh, trial['g'])
        g_hat = Field(self.mesh, trial['g_hat'])
        res = solve_resolvent(StepObjective(self.mesh, self.p, self.q, self.mu, g), cfg=self.solver)
        res_hat = solve_resolvent(StepObjective(self.mesh, self.p, self.q, self.mu, g_hat), cfg=self.solver)

        lhs = l2_norm(positive_part(res.w - res_hat.w))
        rhs = l2_norm(positive_part(g - g_hat))
        contraction_margin = rhs + self.slack - lhs
        bound_margin = min(maximum_bound_margin(res.w, g), maximum_bound_margin(res_hat.w, g_hat)) + self.max_bound_tol
        converged = res.converged and res_hat.converged
        margin = min(contraction_margin, bound_margin)
        return {
            'passed': converged and margin >= 0,
            'margin': margin,
            'lhs': lhs,
            'rhs': rhs,
            'max_bound_margin': bound_margin,
            'converged': converged,
        }


def suite_contraction(p: float, q: float, mu: float, n: int, trials: int, seed: int, **kwargs) -> Dict[str, Any]:
    return ContractionSuite(p, q, mu, n, trials, seed, **kwargs).run()


# ============================================================
# HOMOGENEITY
# ============================================================

class HomogeneitySuite(BaseSuite):
    """A(r w) = r^theta A(w), theta = (p-q)/q, normwise relative deviation"""

    def __init__(self, p: float, q: float, n: int, trials: int, seed: int,
                 radii: Sequence[float] = (0.5, 2.0, 10.0), tolerance: float = 1e-12,
                 threads: Optional[int] = None):
        super().__init__(
            _case_name('homogeneity', p, q),
            {'p': p, 'q': q, 'n': n, 'trials': trials, 'seed': seed,
             'radii': list(radii), 'tolerance': tolerance},
            threads,
        )
        self.p, self.q = p, q
        self.theta = (p - q) / q
        self.mesh = build_interval(1.0, n)
        self.count = trials
        self.seed = seed
        self.radii = list(radii)
        self.tolerance = tolerance

    def generate_trials(self) -> List[Dict[str, Any]]:
        rng = np.random.default_rng(self.seed)
        return [{'v': rng.uniform(0.1, 1.0, self.mesh.size)} for _ in range(self.count)]

    def run_trial(self, trial: Dict[str, Any]) -> Dict[str, Any]:
        w = Field(self.mesh, power_values(trial['v'], self.q))
        base = operator_a(w, self.p, self.q)
        worst = 0.0
        for r in self.radii:
            expected = base * (r ** self.theta)
            scaled = operator_a(w * r, self.p, self.q)
            deviation = sup_norm(scaled - expected) / max(sup_norm(expected), 1e-300)
            worst = max(worst, deviation)
        return {'passed': worst <= self.tolerance, 'margin': self.tolerance - worst, 'deviation': worst}


def suite_homogeneity(p: float, q: float, n: int, trials: int, seed: int, **kwargs) -> Dict[str, Any]:
    return HomogeneitySuite(p, q, n, trials, seed, **kwargs).run()


# ============================================================
# CONVEXITY / SUBMODULARITY / PICONE
# ============================================================

def _random_cone_point(rng: np.random.Generator, size: int, zero_fraction: float = 0.2) -> np.ndarray:
    values = rng.uniform(0.0, 1.0, size)
    values[rng.uniform(size=size) < zero_fraction] = 0.0
    return values


class ConvexitySuite(BaseSuite):
    """
    Checks on random nonnegative pairs: midpoint and random-weight convexity
    of j0q, submodularity, monotonicity of its gradient (strictly positive
    pairs) and convexity of the step objective in w.
    """

    def __init__(self, p: float, q: float, n: int, trials: int, seed: int,
                 tolerance: float = 1e-12, threads: Optional[int] = None):
        super().__init__(
            _case_name('convexity', p, q),
            {'p': p, 'q': q, 'n': n, 'trials': trials, 'seed': seed, 'tolerance': tolerance},
            threads,
        )
        self.p, self.q = p, q
        self.mesh = build_interval(1.0, n)
        self.count = trials
        self.seed = seed
        self.tolerance = tolerance

    def generate_trials(self) -> List[Dict[str, Any]]:
        rng = np.random.default_rng(self.seed)
        size = self.mesh.size
        return [
            {
                'w1': _random_cone_point(rng, size),
                'w2': _random_cone_point(rng, size),
                'lam': float(rng.uniform(0.05, 0.95)),
                'g': rng.uniform(-1.0, 1.0, size),
                'mu': float(rng.uniform(0.01, 0.5)),
            }
            for _ in range(self.count)
        ]

    def describe_trial(self, trial: Dict[str, Any]) -> Dict[str, Any]:
        return {'lam': trial['lam'], 'mu': trial['mu']}

    def run_trial(self, trial: Dict[str, Any]) -> Dict[str, Any]:
        p, q, tol = self.p, self.q, self.tolerance
        w1 = Field(self.mesh, trial['w1'])
        w2 = Field(self.mesh, trial['w2'])
        j1, j2 = j0q(w1, p, q), j0q(w2, p, q)
        scale = max(j1 + j2, 1e-300)

        margins = {
            'midpoint': convexity_gap(w1, w2, 0.5, p, q) + tol * scale,
            'weighted': convexity_gap(w1, w2, trial['lam'], p, q) + tol * scale,
            'submodular': submodularity_gap(w1, w2, p, q) + tol * scale,
        }

        # monotonicity needs w > 0 everywhere
        pos1, pos2 = w1 + 0.05, w2 + 0.05
        step = (pos1 - pos2).values
        pairing_scale = (abs(float(np.dot(j0q_gradient(pos1, p, q).values, step)))
                         + abs(float(np.dot(j0q_gradient(pos2, p, q).values, step))))
        margins['monotone'] = monotonicity_gap(pos1, pos2, p, q) + 1e-10 * max(pairing_scale, 1e-300)

        obj = StepObjective(self.mesh, p, q, trial['mu'], Field(self.mesh, trial['g']))
        f1, f2 = objective_value_w(w1, obj), objective_value_w(w2, obj)
        mid = objective_value_w(w1 * 0.5 + w2 * 0.5, obj)
        margins['objective'] = 0.5 * (f1 + f2) - mid + tol * max(abs(f1) + abs(f2), 1e-300)

        worst = min(margins.values())
        return {'passed': worst >= 0, 'margin': worst, **{f'{k}_margin': v for k, v in margins.items()}}


class PiconeRefinementSuite(BaseSuite):
    """
    Picone gap for u = sin(pi x), z = x(1-x) on refining meshes. Its
    negative part must vanish at least linearly in 1/n; an exactly
    nonnegative gap passes outright.
    """

    def __init__(self, p: float, q: float, sizes: Sequence[int] = (32, 64, 128),
                 ratio: float = 1.8, threads: Optional[int] = None):
        super().__init__(
            _case_name('picone', p, q),
            {'p': p, 'q': q, 'sizes': list(sizes), 'ratio': ratio},
            threads,
        )
        self.p, self.q = p, q
        self.sizes = list(sizes)
        self.ratio = ratio

    def generate_trials(self) -> List[Dict[str, Any]]:
        return [{'n_coarse': a, 'n_fine': b} for a, b in zip(self.sizes[:-1], self.sizes[1:])]

    def _negative_part(self, n: int) -> float:
        mesh = build_interval(1.0, n)
        u = evaluate_profile(mesh, {'profile': 'sin', 'amplitude': 1.0})
        z = evaluate_profile(mesh, {'profile': 'parabola', 'amplitude': 0.25})
        gap = picone_gap(u, z, self.p, self.q)
        return max(-gap, 0.0)

    def run_trial(self, trial: Dict[str, Any]) -> Dict[str, Any]:
        coarse = self._negative_part(trial['n_coarse'])
        fine = self._negative_part(trial['n_fine'])
        if coarse <= 1e-14:
            return {'passed': fine <= 1e-14, 'margin': -fine, 'negative_coarse': coarse, 'negative_fine': fine}
        achieved = coarse / max(fine, 1e-300)
        return {
            'passed': achieved >= self.ratio,
            'margin': achieved - self.ratio,
            'negative_coarse': coarse,
            'negative_fine': fine,
        }


def suite_convexity_picone(p: float, q: float, n: int, trials: int, seed: int,
                           tolerance: float = 1e-12,
                           picone_sizes: Sequence[int] = (32, 64, 128),
                           picone_ratio: float = 1.8,
                           threads: Optional[int] = None) -> Dict[str, Any]:
    sampled = ConvexitySuite(p, q, n, trials, seed, tolerance, threads).run()
    picone = PiconeRefinementSuite(p, q, picone_sizes, picone_ratio, threads).run()
    return merge_reports(_case_name('convexity_picone', p, q), [sampled, picone])


# ============================================================
# ORACLE
# ============================================================

class OracleSuite(BaseSuite):
    """solve_resolvent against the coordinate golden-section oracle"""

    def __init__(self, sizes: Sequence[int], trials: int, p: float, q: float, mu: float,
                 seed: int, tolerance: float = 1e-6, solver: Optional[SolverConfig] = None,
                 threads: Optional[int] = None):
        super().__init__(
            'oracle',
            {'sizes': list(sizes), 'trials': trials, 'p': p, 'q': q, 'mu': mu,
             'seed': seed, 'tolerance': tolerance},
            threads,
        )
        self.sizes = list(sizes)
        self.count = trials
        self.p, self.q, self.mu = p, q, mu
        self.seed = seed
        self.tolerance = tolerance
        self.solver = solver or SolverConfig()

    def generate_trials(self) -> List[Dict[str, Any]]:
        rng = np.random.default_rng(self.seed)
        return [
            {'n': n, 'g': rng.uniform(-1.0, 1.0, n)}
            for n in self.sizes
            for _ in range(self.count)
        ]

    def run_trial(self, trial: Dict[str, Any]) -> Dict[str, Any]:
        mesh = build_interval(1.0, trial['n'])
        obj = StepObjective(mesh, self.p, self.q, self.mu, Field(mesh, trial['g']))
        solved = solve_resolvent(obj, cfg=self.solver)
        oracle = brute_force_resolvent(obj)
        distance = sup_norm(solved.w - oracle)
        return {
            'passed': solved.converged and distance <= self.tolerance,
            'margin': self.tolerance - distance,
            'distance': distance,
        }


def suite_oracle(sizes: Sequence[int], trials: int, seed: int, **kwargs) -> Dict[str, Any]:
    params = {k: VERIFY_CONFIG['oracle'][k] for k in ('p', 'q', 'mu', 'tolerance')}
    params.update(kwargs)
    return OracleSuite(sizes, trials, seed=seed, **params).run()


# ============================================================
# BOUNDARY DECAY
# ============================================================

class BoundarySuite(BaseSuite):
    """Resolvent of a constant positive datum: all nodes positive, vanishing exponent <= slack * bound"""

    def __init__(self, p: float, q: float, mu: float, n: int, band: float,
                 datum: float = 1.0, slack_factor: float = 1.1,
                 solver: Optional[SolverConfig] = None, threads: Optional[int] = None):
        super().__init__(
            _case_name('boundary', p, q),
            {'p': p, 'q': q, 'mu': mu, 'n': n, 'band': band, 'datum': datum, 'slack_factor': slack_factor},
            threads,
        )
        self.p, self.q, self.mu = p, q, mu
        self.n = n
        self.band = band
        self.datum = datum
        self.slack_factor = slack_factor
        self.solver = solver or SolverConfig()

    def generate_trials(self) -> List[Dict[str, Any]]:
        return [{'n': self.n}]

    def run_trial(self, trial: Dict[str, Any]) -> Dict[str, Any]:
        mesh = build_interval(1.0, trial['n'])
        g = Field.constant(mesh, self.datum)
        result = solve_resolvent(StepObjective(mesh, self.p, self.q, self.mu, g), cfg=self.solver)
        case, bound = expected_boundary_exponent(self.p, self.q, h_negative_near_boundary=self.datum < 0)
        positive = bool(np.all(result.v.values > 0))
        exponent = fit_boundary_exponent(result.v, self.band) if positive else float('inf')
        margin = self.slack_factor * bound - exponent
        return {
            'passed': result.converged and positive and margin >= 0,
            'margin': margin,
            'case': case,
            'bound': bound,
            'exponent': exponent,
            'min_v': float(np.min(result.v.values)),
            'converged': result.converged,
        }


def suite_boundary(p: float, q: float, mu: float, n: int, band: float, **kwargs) -> Dict[str, Any]:
    return BoundarySuite(p, q, mu, n, band, **kwargs).run()


# ============================================================
# SHIFTED TRUNCATION (informational)
# ============================================================

class ShiftedTruncationSuite(BaseSuite):
    """j(w) + j(w^) - j(min(w, w^ + k)) - j(max(w - k, w^)) for k > 0; reported, never asserted"""

    informational = True

    def __init__(self, p: float, q: float, n: int, trials: int, seed: int,
                 shifts: Sequence[float] = (0.01, 0.1, 0.5), threads: Optional[int] = None):
        super().__init__(
            _case_name('shifted_truncation', p, q),
            {'p': p, 'q': q, 'n': n, 'trials': trials, 'seed': seed, 'shifts': list(shifts)},
            threads,
        )
        self.p, self.q = p, q
        self.mesh = build_interval(1.0, n)
        self.count = trials
        self.seed = seed
        self.shifts = list(shifts)

    def generate_trials(self) -> List[Dict[str, Any]]:
        rng = np.random.default_rng(self.seed)
        size = self.mesh.size
        return [{'w1': _random_cone_point(rng, size), 'w2': _random_cone_point(rng, size)} for _ in range(self.count)]

    def describe_trial(self, trial: Dict[str, Any]) -> Dict[str, Any]:
        return {}

    def run_trial(self, trial: Dict[str, Any]) -> Dict[str, Any]:
        w1 = Field(self.mesh, trial['w1'])
        w2 = Field(self.mesh, trial['w2'])
        scale = max(j0q(w1, self.p, self.q) + j0q(w2, self.p, self.q), 1e-300)
        gaps = {f'gap_k{k:g}': shifted_submodularity_gap(w1, w2, k, self.p, self.q) / scale for k in self.shifts}
        worst = min(gaps.values())
        return {'passed': worst >= -1e-12, 'margin': worst, **gaps}


def suite_shifted_truncation(p: float, q: float, n: int, trials: int, seed: int, **kwargs) -> Dict[str, Any]:
    return ShiftedTruncationSuite(p, q, n, trials, seed, **kwargs).run()
