"""
Plots - Courbes des normes de trajectoire en SVG
"""
import logging
from pathlib import Path
from typing import Dict, Union

import matplotlib

matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from config.settings import SVG_HASH_SALT  # noqa: E402

logger = logging.getLogger(__name__)


def plot_series(times: np.ndarray, series: Dict[str, np.ndarray], path: Union[str, Path],
                config_sha: str, loglog: bool = False, title: str = '') -> Path:
    """
    Line plot of one or more time series. Log-log axes drop the
    nonpositive samples (t = 0, extinct states).
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    times = np.asarray(times, dtype=float)

    with plt.rc_context({'svg.hashsalt': SVG_HASH_SALT, 'svg.fonttype': 'none'}):
        fig, ax = plt.subplots(figsize=(7, 4.5))
        for label, values in series.items():
            values = np.asarray(values, dtype=float)
            keep = np.isfinite(values)
            if loglog:
                keep &= (times > 0) & (values > 0)
            ax.plot(times[keep], values[keep], label=label, linewidth=1.2)
        if loglog:
            ax.set_xscale('log')
            ax.set_yscale('log')
        ax.set_xlabel('t')
        ax.set_title(title)
        ax.grid(True, which='both', alpha=0.3)
        ax.legend()
        fig.tight_layout()
        fig.savefig(path, format='svg', metadata={'Date': None, 'Description': f"config_sha256={config_sha}"})
        plt.close(fig)

    logger.info(f"✓ Saved plot {path.name}")
    return path
