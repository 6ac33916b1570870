"""
Module de vérification - Base pour toutes les suites d'audit numérique
"""
import logging
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, Optional, Tuple

from tqdm import tqdm

from config.settings import THREADS

logger = logging.getLogger(__name__)


class BaseSuite(ABC):
    """
    Classe abstraite pour toutes les suites de vérification.

    A suite draws all of its trial data up front (deterministic given the
    seed), runs the trials, possibly in parallel, and merges the results in
    trial order. A trial that raises is recorded in `errors` and the suite
    carries on.
    """

    informational = False

    def __init__(self, suite_name: str, params: Dict[str, Any], threads: Optional[int] = None):
        self.suite_name = suite_name
        self.params = params
        self.threads = max(1, threads or THREADS)
        self.trials: List[Dict[str, Any]] = []
        self.errors: List[str] = []

    @abstractmethod
    def generate_trials(self) -> List[Dict[str, Any]]:
        """
        Construire les essais (données tirées du générateur seedé)
        Doit retourner une liste de descripteurs passés à run_trial
        """
        pass

    @abstractmethod
    def run_trial(self, trial: Dict[str, Any]) -> Dict[str, Any]:
        """
        Exécuter un essai
        Doit retourner au minimum {'passed': bool, 'margin': float}
        (margin >= 0 when the checked inequality holds)
        """
        pass

    def describe_trial(self, trial: Dict[str, Any]) -> Dict[str, Any]:
        """JSON-friendly part of a trial descriptor kept in the report (à override si besoin)"""
        return {k: v for k, v in trial.items() if isinstance(v, (int, float, str, bool)) or v is None}

    def _safe_run(self, indexed: Tuple[int, Dict[str, Any]]) -> Tuple[Optional[Dict[str, Any]], Optional[str]]:
        index, trial = indexed
        try:
            result = self.run_trial(trial)
            return {'trial': index, **self.describe_trial(trial), **result}, None
        except Exception as e:
            return None, f"Essai {index}: {type(e).__name__}: {e}"

    def run(self) -> Dict[str, Any]:
        """Processus de vérification complet"""
        logger.info(f"🔄 Démarrage suite: {self.suite_name}")
        try:
            trials = self.generate_trials()
        except Exception as e:
            logger.error(f"✗ Erreur suite {self.suite_name}: {e}")
            self.errors.append(f"Génération: {type(e).__name__}: {e}")
            return self.report()

        show = logger.isEnabledFor(logging.INFO) and len(trials) > 1
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            outcomes = list(tqdm(
                pool.map(self._safe_run, enumerate(trials)),
                total=len(trials), desc=self.suite_name, disable=not show, leave=False,
            ))

        for result, error in outcomes:
            if error is not None:
                self.errors.append(error)
            else:
                self.trials.append(result)

        report = self.report()
        logger.info(
            f"✓ {self.suite_name}: {report['passed_count']}/{report['trials_count']} essais OK, "
            f"{report['errors_count']} erreurs, marge min {report['worst_margin']}"
        )
        return report

    def report(self) -> Dict[str, Any]:
        passed = sum(1 for t in self.trials if t.get('passed'))
        failed = len(self.trials) - passed
        margins = [t['margin'] for t in self.trials if t.get('margin') is not None]
        if self.informational:
            status = 'info'
        else:
            status = 'pass' if failed == 0 and not self.errors else 'fail'
        return {
            'suite': self.suite_name,
            'status': status,
            'trials_count': len(self.trials),
            'passed_count': passed,
            'failed_count': failed,
            'errors_count': len(self.errors),
            'worst_margin': min(margins) if margins else None,
            'params': self.params,
            'trials': self.trials,
            'errors': self.errors,
        }


def merge_reports(suite_name: str, reports: List[Dict[str, Any]]) -> Dict[str, Any]:
    """Combine sub-reports (one per case) into one, keeping case order"""
    trials = []
    errors = []
    for sub in reports:
        for trial in sub['trials']:
            trials.append({'case': sub['suite'], **trial})
        errors.extend(f"{sub['suite']}: {e}" for e in sub['errors'])
    margins = [r['worst_margin'] for r in reports if r['worst_margin'] is not None]
    statuses = {r['status'] for r in reports}
    if 'fail' in statuses:
        status = 'fail'
    elif statuses == {'info'}:
        status = 'info'
    else:
        status = 'pass'
    return {
        'suite': suite_name,
        'status': status,
        'trials_count': sum(r['trials_count'] for r in reports),
        'passed_count': sum(r['passed_count'] for r in reports),
        'failed_count': sum(r['failed_count'] for r in reports),
        'errors_count': sum(r['errors_count'] for r in reports),
        'worst_margin': min(margins) if margins else None,
        'params': {r['suite']: r['params'] for r in reports},
        'trials': trials,
        'errors': errors,
    }
