"""
Parabolic module - Scénarios d'évolution: comparaison, extinction, décroissance, dissipation
"""
import logging
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from config.settings import VERIFY_CONFIG
from src.discretization.field import Field
from src.discretization.mesh import Mesh, build_interval
from src.discretization.profiles import evaluate_profile
from src.exceptions import ConfigError
from src.model.forcing import ForcingSpec, constant_forcing, zero_forcing
from src.model.reaction import ReactionSpec, validate
from src.solver.evolve import EvolutionSpec, comparison_pair, evolve
from src.solver.resolvent import SolverConfig
from src.verification import BaseSuite
from src.verification.fitting import decay_exponent_bound, fit_decay_exponent, stated_decay_exponent

logger = logging.getLogger(__name__)

SCENARIOS = ('comparison_k0', 'comparison_k05', 'extinction', 'decay', 'dissipation')


def _sin(mesh: Mesh, amplitude: float = 1.0) -> Field:
    return evaluate_profile(mesh, {'profile': 'sin', 'amplitude': amplitude})


class ParabolicSuite(BaseSuite):
    """Each scenario is one trial; a failing solve fails its scenario only"""

    def __init__(self, scenarios: Optional[Sequence[str]] = None, params: Optional[Dict[str, Any]] = None,
                 solver: Optional[SolverConfig] = None, threads: Optional[int] = None):
        merged = dict(VERIFY_CONFIG['parabolic'])
        merged.update(params or {})
        if scenarios is not None:
            merged['scenarios'] = list(scenarios)
        unknown = [s for s in merged['scenarios'] if s not in SCENARIOS]
        if unknown:
            raise ConfigError(f"unknown parabolic scenarios: {', '.join(unknown)} (known: {', '.join(SCENARIOS)})")
        super().__init__('parabolic', merged, threads)
        self.solver = solver or SolverConfig()

    def generate_trials(self) -> List[Dict[str, Any]]:
        return [{'scenario': name} for name in self.params['scenarios']]

    def run_trial(self, trial: Dict[str, Any]) -> Dict[str, Any]:
        return getattr(self, f"_scenario_{trial['scenario']}")()

    def _spec(self, mesh: Mesh, p: float, q: float, u0: Field, T: float, steps: int,
              forcing: Optional[ForcingSpec] = None, reaction: Optional[ReactionSpec] = None,
              **kwargs) -> EvolutionSpec:
        return EvolutionSpec(
            mesh=mesh, p=p, q=q, u0=u0, T=T, steps=steps,
            forcing=forcing or zero_forcing(), reaction=reaction,
            solver=self.solver, progress=False, **kwargs,
        )

    # ---------- comparison ----------

    def _comparison(self, spec_a: EvolutionSpec, spec_b: EvolutionSpec) -> Dict[str, Any]:
        result = comparison_pair(spec_a, spec_b, tolerance=self.params['comparison_tolerance'])
        return {
            'passed': result.passed,
            'margin': result.tolerance - result.max_defect,
            'max_defect': result.max_defect,
            'K': spec_a.K,
            'ordered': result.ordered,
        }

    def _scenario_comparison_k0(self) -> Dict[str, Any]:
        mesh = build_interval(1.0, self.params['n'])
        parabola = evaluate_profile(mesh, {'profile': 'parabola', 'amplitude': 1.0})
        forcing_b = ForcingSpec(kind='separable', profile=parabola, times=[0.0, 0.5], values=[0.5, -0.5])
        T, steps = self.params['comparison_T'], self.params['comparison_steps']
        spec_a = self._spec(mesh, 2.0, 1.5, _sin(mesh), T, steps, forcing=constant_forcing(_sin(mesh, 0.5)))
        spec_b = self._spec(mesh, 2.0, 1.5, _sin(mesh, 0.8), T, steps, forcing=forcing_b)
        return self._comparison(spec_a, spec_b)

    def _scenario_comparison_k05(self) -> Dict[str, Any]:
        mesh = build_interval(1.0, self.params['n'])
        T, steps = self.params['comparison_T'], self.params['comparison_steps']
        reaction = ReactionSpec(f2_kind='sin_ratio', f2_lambda=0.5)
        validate(reaction, 1.5, mesh)
        h_a = Field.constant(mesh, 1.0) + _sin(mesh, 0.1)
        h_b = Field.constant(mesh, 1.0)
        spec_a = self._spec(mesh, 2.0, 1.5, _sin(mesh), T, steps, constant_forcing(h_a), reaction)
        spec_b = self._spec(mesh, 2.0, 1.5, _sin(mesh), T, steps, constant_forcing(h_b), reaction)
        return self._comparison(spec_a, spec_b)

    # ---------- extinction / decay ----------

    def _scenario_extinction(self) -> Dict[str, Any]:
        mesh = build_interval(1.0, self.params['n'])
        T, steps = self.params['extinction_T'], self.params['extinction_steps']
        coarse = evolve(self._spec(mesh, 2.0, 2.0, _sin(mesh), T, steps))
        fine = evolve(self._spec(mesh, 2.0, 2.0, _sin(mesh), T, 2 * steps))
        te_coarse, te_fine = coarse.extinction_time, fine.extinction_time
        if te_coarse is None or te_fine is None:
            return {'passed': False, 'margin': -1.0, 'te_coarse': te_coarse, 'te_fine': te_fine}
        shift = abs(te_coarse - te_fine) / te_fine
        margin = self.params['extinction_shift'] - shift
        return {
            'passed': coarse.completed and fine.completed and margin > 0,
            'margin': margin,
            'te_coarse': te_coarse,
            'te_fine': te_fine,
        }

    def _scenario_decay(self) -> Dict[str, Any]:
        p, q = 3.0, 1.2
        mesh = build_interval(1.0, self.params['n'])
        spec = self._spec(
            mesh, p, q, _sin(mesh), self.params['decay_T'], self.params['decay_steps'],
            policy='geometric', ratio=self.params['decay_ratio'],
        )
        traj = evolve(spec)
        positive = bool(np.all(traj.l2_w > 0)) and traj.extinction_time is None
        alpha = fit_decay_exponent(traj, self.params['decay_window']) if positive else float('inf')
        bound = decay_exponent_bound(p, q)
        margin = bound + self.params['decay_slack'] - alpha
        return {
            'passed': traj.completed and positive and margin >= 0,
            'margin': margin,
            'alpha': alpha,
            'bound': bound,
            'stated_exponent': stated_decay_exponent(p, q),
            'diffusion_class': spec.diffusion_class,
        }

    # ---------- dissipation + first order ----------

    def _scenario_dissipation(self) -> Dict[str, Any]:
        mesh = build_interval(1.0, self.params['dissipation_n'])
        T, steps = self.params['dissipation_T'], self.params['dissipation_steps']
        tol = self.params['energy_tolerance']
        runs = {
            factor: evolve(self._spec(mesh, 2.0, 2.0, _sin(mesh), T, factor * steps))
            for factor in (1, 2, 4)
        }
        base = runs[1]
        l2, energy, sup = base.l2_w, base.j0q, base.sup_w
        margins = {
            'l2': float(np.min(l2[:-1] - l2[1:])) + tol * l2[0],
            'j0q': float(np.min(energy[:-1] - energy[1:])) + tol * energy[0],
            'max_bound': float(np.min(sup[:-1] - sup[1:])) + 1e-8,
        }

        # limite de Richardson (ordre 1) tirée des pas divisés par 2 et 4
        reference = 2.0 * runs[4].l2_w[-1] - runs[2].l2_w[-1]
        err_coarse = abs(runs[1].l2_w[-1] - reference)
        err_fine = abs(runs[2].l2_w[-1] - reference)
        ratio = err_coarse / err_fine if err_fine > 0 else float('inf')
        lo, hi = self.params['convergence_band']
        margins['convergence'] = min(ratio - lo, hi - ratio)

        worst = min(margins.values())
        return {
            'passed': all(r.completed for r in runs.values()) and worst >= 0,
            'margin': worst,
            'convergence_ratio': ratio,
            **{f'{k}_margin': v for k, v in margins.items()},
        }


def suite_parabolic(pack: Optional[Sequence[str]] = None, **kwargs) -> Dict[str, Any]:
    """Run a named scenario set (default: every scenario)"""
    return ParabolicSuite(pack, **kwargs).run()
