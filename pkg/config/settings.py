"""
Configuration centralisée du projet Subflow
"""
import os
from dotenv import load_dotenv

# Charger les variables d'environnement
load_dotenv()

# ========== PATHS ==========
PROJECT_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
OUTPUT_DIR = os.getenv('SUBFLOW_OUTPUT_DIR', os.path.join(PROJECT_ROOT, 'data'))

# ========== LOGGING ==========
LOG_LEVEL = os.getenv('SUBFLOW_LOG_LEVEL', 'INFO')
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
LOG_FILENAME = 'subflow.log'

# ========== PARALLELISM ==========
THREADS = max(1, int(os.getenv('SUBFLOW_THREADS', '1')))

# ========== OUTPUT FORMAT ==========
CSV_FLOAT_FORMAT = '%.17g'
SVG_HASH_SALT = 'subflow'

# ========== RESOLVENT SOLVER ==========
SOLVER_CONFIG = {
    'tol_grad_abs': 1e-10,
    'tol_grad_rel': 1e-8,
    'tol_residual': 1e-7,
    'max_iters': 20000,
    'armijo_c': 1e-4,
    'backtrack_factor': 0.5,
    'lift_factor': 1e-3,
    'scaling_floor': 1e-12,
    'scaling_cap': 1e4,
    'seed': 0,
    'max_escape_rounds': 5,
}

# ========== TIME STEPPING ==========
TIME_CONFIG = {
    'steps': 200,
    'policy': 'uniform',
    'ratio': 1.05,
    'extinction_threshold': 1e-12,
}

# ========== VERIFICATION ==========
VERIFY_CONFIG = {
    'contraction': {
        'cases': [[2.0, 1.5], [2.0, 2.0], [3.0, 1.2], [3.0, 3.0], [1.5, 1.2]],
        'mu': 0.05,
        'n': 32,
        'trials': 50,
        'seed': 2024,
        'slack': 1e-6,
        'max_bound_tol': 1e-8,
    },
    'homogeneity': {
        'cases': [[3.0, 1.5], [3.0, 1.2], [2.0, 1.5], [2.0, 2.0], [4.0, 4.0]],
        'n': 32,
        'trials': 20,
        'seed': 7,
        'radii': [0.5, 2.0, 10.0],
        'tolerance': 1e-12,
    },
    'convexity': {
        'cases': [[2.0, 1.5], [2.0, 2.0], [3.0, 1.2], [3.0, 2.0], [3.0, 3.0], [1.5, 1.2]],
        'n': 16,
        'trials': 200,
        'seed': 11,
        'tolerance': 1e-12,
        'picone_sizes': [32, 64, 128],
        'picone_p': 3.0,
        'picone_q': 1.5,
        'picone_ratio': 1.8,
    },
    'oracle': {
        'sizes': [3, 6],
        'trials': 20,
        'p': 2.0,
        'q': 1.5,
        'mu': 0.1,
        'seed': 5,
        'tolerance': 1e-6,
    },
    'boundary': {
        'p': 3.0,
        'q': 1.2,
        'mu': 0.05,
        'n': 256,
        'band': 0.1,
        'datum': 1.0,
        'slack_factor': 1.1,
    },
    'shifted_truncation': {
        'cases': [[3.0, 1.2], [2.0, 1.5], [2.0, 2.0]],
        'n': 16,
        'trials': 100,
        'seed': 13,
        'shifts': [0.01, 0.1, 0.5],
    },
    'parabolic': {
        'n': 64,
        'scenarios': ['comparison_k0', 'comparison_k05', 'extinction', 'decay', 'dissipation'],
        'comparison_steps': 200,
        'comparison_T': 1.0,
        'comparison_tolerance': 1e-3,
        'extinction_T': 0.5,
        'extinction_steps': 100,
        'extinction_shift': 0.2,
        'decay_T': 100.0,
        'decay_steps': 240,
        'decay_ratio': 1.03,
        'decay_window': [10.0, 100.0],
        'decay_slack': 0.02,
        'dissipation_T': 0.05,
        'dissipation_steps': 10,
        'dissipation_n': 32,
        'convergence_band': [1.5, 2.5],
        'energy_tolerance': 1e-10,
    },
}
