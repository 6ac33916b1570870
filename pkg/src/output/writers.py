"""
Writers - Sauvegarde des résultats (CSV, JSON, rapport texte) avec empreinte de configuration
"""
import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np
import pandas as pd

from config.settings import CSV_FLOAT_FORMAT
from src.discretization.field import Field, to_frame

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

# Colonnes du tableau texte, dans cet ordre quand elles existent
REPORT_COLUMNS = ['case', 'trial', 'scenario', 'n', 'passed', 'margin']


def config_hash(config: Dict[str, Any]) -> str:
    """sha256 of the canonical JSON form of a config document"""
    canonical = json.dumps(config, sort_keys=True, separators=(',', ':'), default=_json_default)
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"Object of type {type(obj).__name__} is not JSON serializable")


def write_csv(frame: pd.DataFrame, path: PathLike, config_sha: str) -> Path:
    """CSV with a '# config_sha256=<hex>' first line and 17 significant digits"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as handle:
        handle.write(f"# config_sha256={config_sha}\n")
        frame.to_csv(handle, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator='\n')
    logger.info(f"✓ Saved {len(frame)} rows to {path.name}")
    return path


def write_field_csv(field: Field, path: PathLike, config_sha: str, column: str = 'value') -> Path:
    return write_csv(to_frame(field, column), path, config_sha)


def write_json(data: Dict[str, Any], path: PathLike, config_sha: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    document = {'config_sha256': config_sha, **data}
    with open(path, 'w', encoding='utf-8', newline='\n') as handle:
        json.dump(document, handle, indent=2, sort_keys=True, default=_json_default)
        handle.write('\n')
    logger.info(f"✓ Saved {path.name}")
    return path


def read_csv(path: PathLike) -> pd.DataFrame:
    """Read back a CSV written by write_csv (the hash line is a comment)"""
    return pd.read_csv(path, comment='#')


# ============================================================
# VERIFY REPORTS
# ============================================================

def report_frame(report: Dict[str, Any]) -> pd.DataFrame:
    """One row per trial with the summary columns"""
    frame = pd.DataFrame(report.get('trials', []))
    if frame.empty:
        return pd.DataFrame(columns=['trial', 'passed', 'margin'])
    columns = [c for c in REPORT_COLUMNS if c in frame.columns]
    return frame[columns]


def report_text(report: Dict[str, Any], config_sha: Optional[str] = None) -> str:
    lines = []
    if config_sha is not None:
        lines.append(f"# config_sha256={config_sha}")
    lines += [
        "=" * 70,
        f"SUITE: {report['suite']}   STATUS: {report['status'].upper()}",
        "=" * 70,
        f"trials: {report['trials_count']}   passed: {report['passed_count']}   "
        f"failed: {report['failed_count']}   errors: {report['errors_count']}",
        f"worst margin: {report['worst_margin']}",
        "",
    ]
    frame = report_frame(report)
    if not frame.empty:
        lines.append(frame.to_string(index=False, float_format=lambda x: f"{x:.6e}"))
    if report.get('errors'):
        lines.append("")
        lines.append("Errors:")
        lines.extend(f"  ✗ {e}" for e in report['errors'])
    return "\n".join(lines) + "\n"


def write_report(report: Dict[str, Any], out_dir: PathLike, config_sha: str) -> Dict[str, Path]:
    """report.json (machine) + report.txt (aligned table)"""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    json_path = write_json(report, out_dir / 'report.json', config_sha)
    text_path = out_dir / 'report.txt'
    with open(text_path, 'w', encoding='utf-8', newline='\n') as handle:
        handle.write(report_text(report, config_sha))
    logger.info(f"✓ Saved {text_path.name}")
    return {'json': json_path, 'text': text_path}
