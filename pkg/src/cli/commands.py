"""
Commandes - resolvent / evolve / verify, avec codes de sortie
    0 OK, 1 erreur de configuration, 2 non-convergence ou vérification échouée, 3 instabilité (dtau*K >= 1)
"""
import logging
import sys
from typing import Any, Callable, Dict, List, Optional

import pandas as pd

from src.discretization.field import sup_norm, to_frame
from src.exceptions import AdmissibilityError, ConfigError, MeshMismatchError, StabilityError
from src.output.plots import plot_series
from src.output.writers import write_csv, write_json, write_report
from src.solver.evolve import evolve
from src.solver.resolvent import maximum_bound_check, residual_check, solve_resolvent
from src.verification import merge_reports
from src.verification.parabolic import suite_parabolic
from src.verification.suites import (
    suite_boundary,
    suite_contraction,
    suite_convexity_picone,
    suite_homogeneity,
    suite_oracle,
    suite_shifted_truncation,
)
from src.cli.run_config import RunConfig, load_run_config

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_FAILED = 2
EXIT_UNSTABLE = 3

CONFIG_ERRORS = (ConfigError, MeshMismatchError, AdmissibilityError)


def _banner(title: str) -> None:
    logger.info("=" * 70)
    logger.info(title)
    logger.info("=" * 70)


def _config_failure(e: Exception) -> int:
    logger.error(f"✗ Configuration invalide: {e}")
    print(f"error: {e}", file=sys.stderr)
    return EXIT_CONFIG


# ============================================================
# RESOLVENT
# ============================================================

def cmd_resolvent(config_path: Optional[str], overrides: Optional[List[str]] = None,
                  out: Optional[str] = None, seed: Optional[int] = None, plot: bool = False) -> int:
    _banner("SUBFLOW - Resolvent")
    try:
        cfg = load_run_config(config_path, 'resolvent', overrides, out, seed, plot)
        obj = cfg.resolvent_objective()
        solver = cfg.solver_config()
    except CONFIG_ERRORS as e:
        return _config_failure(e)

    logger.info(f"\n[1/2] Résolution (n={obj.mesh.size}, p={obj.p}, q={obj.q}, mu={obj.mu})...")
    result = solve_resolvent(obj, cfg=solver)
    logger.info(f"  ✓ {result.iterations} itérations, |P|={result.projected_gradient:.3e}")

    logger.info("\n[2/2] Sauvegarde...")
    out_dir = cfg.output_dir
    write_csv(to_frame(result.w, 'w'), out_dir / 'w.csv', cfg.sha)
    write_csv(to_frame(result.v, 'v'), out_dir / 'v.csv', cfg.sha)
    diagnostics = {
        **result.diagnostics(),
        'residual': residual_check(result.w, obj),
        'sup_w': sup_norm(result.w),
        'maximum_bound': maximum_bound_check(result.w, obj.g) if obj.reaction is None else None,
        'mesh': obj.mesh.describe(),
        'solver': solver.to_dict(),
    }
    write_json(diagnostics, out_dir / 'diagnostics.json', cfg.sha)

    if not result.converged:
        logger.warning("⚠️ Resolvent non convergé")
        return EXIT_FAILED
    logger.info("✅ RESOLVENT OK")
    return EXIT_OK


# ============================================================
# EVOLVE
# ============================================================

def cmd_evolve(config_path: Optional[str], overrides: Optional[List[str]] = None,
               out: Optional[str] = None, seed: Optional[int] = None, plot: bool = False) -> int:
    _banner("SUBFLOW - Evolve")
    try:
        cfg = load_run_config(config_path, 'evolve', overrides, out, seed, plot)
        spec = cfg.evolution_spec()
        spec.check_stability()
    except StabilityError as e:
        logger.error(f"✗ {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_UNSTABLE
    except CONFIG_ERRORS as e:
        return _config_failure(e)

    logger.info(f"\n[1/2] Évolution ({spec.steps} pas, T={spec.T}, classe {spec.diffusion_class})...")
    traj = evolve(spec)
    logger.info(f"  ✓ {len(traj.w) - 1} pas, extinction: {traj.extinction_time}")

    logger.info("\n[2/2] Sauvegarde...")
    out_dir = cfg.output_dir
    write_csv(traj.to_frame(), out_dir / 'trajectory.csv', cfg.sha)
    for index, t in enumerate(cfg.outputs.get('snapshot_times', [])):
        w = traj.snapshot(float(t))
        frame = to_frame(w, 'w')
        frame.insert(0, 't', traj.snapshot_time(float(t)))
        write_csv(frame, out_dir / f'snapshot_{index:03d}.csv', cfg.sha)
    write_json({**traj.diagnostics(), 'spec': spec.describe()}, out_dir / 'diagnostics.json', cfg.sha)

    if cfg.outputs.get('plot', False):
        plot_series(
            traj.times,
            {'||w||': traj.l2_w, 'sup u': traj.sup_u},
            out_dir / 'norms.svg',
            cfg.sha,
            loglog=bool(cfg.outputs.get('loglog', False)),
            title=f"p={spec.p:g}, q={spec.q:g}",
        )

    if not traj.completed:
        logger.warning("⚠️ Trajectoire tronquée (pas non convergé)")
        return EXIT_FAILED
    logger.info("✅ EVOLVE OK")
    return EXIT_OK


# ============================================================
# VERIFY
# ============================================================

def _run_contraction(params: Dict[str, Any]) -> Dict[str, Any]:
    reports = [
        suite_contraction(p, q, params['mu'], params['n'], params['trials'], params['seed'],
                          slack=params['slack'], max_bound_tol=params['max_bound_tol'])
        for p, q in params['cases']
    ]
    return merge_reports('contraction', reports)


def _run_homogeneity(params: Dict[str, Any]) -> Dict[str, Any]:
    reports = [
        suite_homogeneity(p, q, params['n'], params['trials'], params['seed'],
                          radii=params['radii'], tolerance=params['tolerance'])
        for p, q in params['cases']
    ]
    return merge_reports('homogeneity', reports)


def _run_convexity(params: Dict[str, Any]) -> Dict[str, Any]:
    reports = [
        suite_convexity_picone(p, q, params['n'], params['trials'], params['seed'],
                               tolerance=params['tolerance'],
                               picone_sizes=params['picone_sizes'],
                               picone_ratio=params['picone_ratio'])
        for p, q in params['cases']
    ]
    return merge_reports('convexity', reports)


def _run_oracle(params: Dict[str, Any]) -> Dict[str, Any]:
    return suite_oracle(params['sizes'], params['trials'], params['seed'],
                        p=params['p'], q=params['q'], mu=params['mu'], tolerance=params['tolerance'])


def _run_boundary(params: Dict[str, Any]) -> Dict[str, Any]:
    return suite_boundary(params['p'], params['q'], params['mu'], params['n'], params['band'],
                          datum=params['datum'], slack_factor=params['slack_factor'])


def _run_shifted_truncation(params: Dict[str, Any]) -> Dict[str, Any]:
    reports = [
        suite_shifted_truncation(p, q, params['n'], params['trials'], params['seed'], shifts=params['shifts'])
        for p, q in params['cases']
    ]
    return merge_reports('shifted_truncation', reports)


def _run_parabolic(params: Dict[str, Any]) -> Dict[str, Any]:
    return suite_parabolic(params['scenarios'], params=params)


SUITES: Dict[str, Callable[[Dict[str, Any]], Dict[str, Any]]] = {
    'contraction': _run_contraction,
    'homogeneity': _run_homogeneity,
    'convexity': _run_convexity,
    'oracle': _run_oracle,
    'boundary': _run_boundary,
    'parabolic': _run_parabolic,
    'shifted_truncation': _run_shifted_truncation,
}


def run_suite(name: str, cfg: RunConfig) -> Dict[str, Any]:
    if name == 'all':
        return merge_reports('all', [SUITES[s](cfg.verify_params(s)) for s in SUITES])
    if name not in SUITES:
        raise ConfigError(f"unknown suite '{name}' (known: {', '.join(list(SUITES) + ['all'])})")
    return SUITES[name](cfg.verify_params(name))


def cmd_verify(suite_name: str, config_path: Optional[str] = None, overrides: Optional[List[str]] = None,
               out: Optional[str] = None, seed: Optional[int] = None, plot: bool = False) -> int:
    _banner(f"SUBFLOW - Verify [{suite_name}]")
    try:
        cfg = load_run_config(config_path, 'verify', overrides, out, seed, plot)
        if suite_name != 'all' and suite_name not in SUITES:
            raise ConfigError(f"unknown suite '{suite_name}' (known: {', '.join(list(SUITES) + ['all'])})")
        report = run_suite(suite_name, cfg)
    except CONFIG_ERRORS as e:
        return _config_failure(e)

    write_report(report, cfg.output_dir, cfg.sha)
    summary = pd.Series({
        'status': report['status'],
        'trials': report['trials_count'],
        'passed': report['passed_count'],
        'failed': report['failed_count'],
        'errors': report['errors_count'],
        'worst margin': report['worst_margin'],
    })
    logger.info("\n" + summary.to_string())

    if report['status'] == 'fail':
        logger.error(f"✗ Suite {suite_name} en échec")
        return EXIT_FAILED
    logger.info(f"✅ SUITE {suite_name.upper()} OK")
    return EXIT_OK
