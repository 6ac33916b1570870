"""
RunConfig - Lecture, surcharge et validation stricte des configurations JSON
"""
import copy
import json
import logging
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from config.settings import OUTPUT_DIR, TIME_CONFIG, VERIFY_CONFIG
from src.discretization.field import Field
from src.discretization.mesh import Mesh, build_interval, build_rectangle
from src.discretization.profiles import evaluate_profile
from src.exceptions import ConfigError
from src.model.energy import StepObjective
from src.model.forcing import ForcingSpec, forcing_from_config
from src.model.reaction import ReactionSpec, reaction_from_config
from src.output.writers import config_hash
from src.solver.evolve import EvolutionSpec
from src.solver.resolvent import SolverConfig

logger = logging.getLogger(__name__)

# Clés autorisées par section (None = valeur libre, validée plus loin)
SCHEMA: Dict[str, Optional[set]] = {
    'mesh': {'dim', 'L', 'n'},
    'p': None,
    'q': None,
    'u0': None,
    'forcing': None,
    'reaction': None,
    'resolvent': {'mu', 'datum'},
    'time': {'T', 'steps', 'policy', 'ratio', 'extinction_threshold'},
    'solver': {f.name for f in fields(SolverConfig)},
    'outputs': {'dir', 'snapshot_times', 'plot', 'loglog'},
    'seed': None,
    'verify': set(VERIFY_CONFIG),
}

REQUIRED = {
    'resolvent': ['mesh', 'p', 'q', 'resolvent', 'resolvent.mu', 'resolvent.datum', 'mesh.L', 'mesh.n'],
    'evolve': ['mesh', 'p', 'q', 'u0', 'time', 'time.T', 'mesh.L', 'mesh.n'],
    'verify': [],
}

# Exclu de l'empreinte: le même calcul écrit ailleurs garde le même hash
HASH_EXCLUDED = ('outputs.dir',)


# ============================================================
# RAW DOCUMENT
# ============================================================

def parse_override(text: str) -> tuple:
    """'a.b.c=value' -> (['a','b','c'], value); value parsed as JSON when possible"""
    if '=' not in text:
        raise ConfigError(f"override must look like key.path=value, got '{text}'")
    key, raw = text.split('=', 1)
    path = [part for part in key.strip().split('.') if part]
    if not path:
        raise ConfigError(f"empty key in override '{text}'")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return path, value


def apply_overrides(document: Dict[str, Any], overrides: Optional[List[str]]) -> Dict[str, Any]:
    document = copy.deepcopy(document)
    for text in overrides or []:
        path, value = parse_override(text)
        node = document
        for part in path[:-1]:
            child = node.get(part)
            if not isinstance(child, dict):
                child = {}
                node[part] = child
            node = child
        node[path[-1]] = value
        logger.debug(f"Override {'.'.join(path)} = {value!r}")
    return document


def load_document(path: Optional[str]) -> Dict[str, Any]:
    if path is None:
        return {}
    try:
        with open(path, 'r', encoding='utf-8') as handle:
            document = json.load(handle)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file {path} is not valid JSON: {e}")
    if not isinstance(document, dict):
        raise ConfigError("config document must be a JSON object")
    return document


def _lookup(document: Dict[str, Any], dotted: str) -> bool:
    node: Any = document
    for part in dotted.split('.'):
        if not isinstance(node, dict) or part not in node:
            return False
        node = node[part]
    return True


def validate_document(document: Dict[str, Any], command: str) -> None:
    """Unknown keys and missing required keys raise ConfigError naming the key path"""
    for key, value in document.items():
        if key not in SCHEMA:
            raise ConfigError(f"unknown config key '{key}'")
        allowed = SCHEMA[key]
        if allowed is not None:
            if not isinstance(value, dict):
                raise ConfigError(f"config key '{key}' must be an object")
            unknown = set(value) - allowed
            if unknown:
                raise ConfigError(f"unknown config key '{key}.{sorted(unknown)[0]}'")
    for suite, params in document.get('verify', {}).items():
        if not isinstance(params, dict):
            raise ConfigError(f"config key 'verify.{suite}' must be an object")
        unknown = set(params) - set(VERIFY_CONFIG[suite])
        if unknown:
            raise ConfigError(f"unknown config key 'verify.{suite}.{sorted(unknown)[0]}'")
    for dotted in REQUIRED.get(command, []):
        if not _lookup(document, dotted):
            raise ConfigError(f"missing required config key '{dotted}'")
    for name in ('p', 'q'):
        if name in document and (isinstance(document[name], bool) or not isinstance(document[name], (int, float))):
            raise ConfigError(f"config key '{name}' must be a number, got {document[name]!r}")


# ============================================================
# RUN CONFIG
# ============================================================

@dataclass
class RunConfig:
    document: Dict[str, Any]
    command: str
    sha: str = field(init=False)

    def __post_init__(self):
        validate_document(self.document, self.command)
        hashed = copy.deepcopy(self.document)
        for dotted in HASH_EXCLUDED:
            section, key = dotted.split('.')
            hashed.get(section, {}).pop(key, None)
        self.sha = config_hash(hashed)

    # ---------- scalars ----------

    @property
    def p(self) -> float:
        return float(self.document['p'])

    @property
    def q(self) -> float:
        return float(self.document['q'])

    @property
    def seed(self) -> int:
        return int(self.document.get('seed', 0))

    @property
    def outputs(self) -> Dict[str, Any]:
        return self.document.get('outputs', {})

    @property
    def output_dir(self) -> Path:
        return Path(self.outputs.get('dir', OUTPUT_DIR))

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    # ---------- builders ----------

    def build_mesh(self) -> Mesh:
        section = self.document['mesh']
        L, n = section['L'], section['n']
        two_d = isinstance(L, list) or isinstance(n, list)
        dim = section.get('dim', 2 if two_d else 1)
        if isinstance(dim, bool) or dim not in (1, 2):
            raise ConfigError(f"config key 'mesh.dim' must be 1 or 2, got {dim!r}")
        if dim != (2 if two_d else 1):
            raise ConfigError(f"config key 'mesh.dim' is {dim} but 'mesh.L' and 'mesh.n' describe a "
                              f"{2 if two_d else 1}D mesh")
        if two_d:
            if not (isinstance(L, list) and isinstance(n, list) and len(L) == 2 and len(n) == 2):
                raise ConfigError("2D mesh needs 'L': [Lx, Ly] and 'n': [nx, ny]")
            return build_rectangle(L[0], L[1], n[0], n[1])
        return build_interval(L, n)

    def solver_config(self) -> SolverConfig:
        return SolverConfig.from_dict(self.document.get('solver'))

    def build_inputs(self, mesh: Mesh) -> Dict[str, Any]:
        """Profiles drawn in a fixed order from one seeded generator: u0, datum, forcing, reaction"""
        rng = self.rng()
        inputs: Dict[str, Any] = {}
        if 'u0' in self.document:
            inputs['u0'] = evaluate_profile(mesh, self.document['u0'], rng)
        if 'resolvent' in self.document and 'datum' in self.document['resolvent']:
            inputs['datum'] = evaluate_profile(mesh, self.document['resolvent']['datum'], rng)
        inputs['forcing'] = forcing_from_config(mesh, self.document.get('forcing'), rng)
        inputs['reaction'] = reaction_from_config(mesh, self.document.get('reaction'), self.q, rng)
        return inputs

    def resolvent_objective(self) -> StepObjective:
        mesh = self.build_mesh()
        inputs = self.build_inputs(mesh)
        reaction: ReactionSpec = inputs['reaction']
        return StepObjective(mesh, self.p, self.q, float(self.document['resolvent']['mu']),
                             inputs['datum'], reaction)

    def evolution_spec(self) -> EvolutionSpec:
        mesh = self.build_mesh()
        inputs = self.build_inputs(mesh)
        u0: Field = inputs['u0']
        forcing: ForcingSpec = inputs['forcing']
        time = self.document['time']
        return EvolutionSpec(
            mesh=mesh,
            p=self.p,
            q=self.q,
            u0=u0,
            T=float(time['T']),
            steps=time.get('steps', TIME_CONFIG['steps']),
            forcing=forcing,
            reaction=inputs['reaction'],
            solver=self.solver_config(),
            policy=time.get('policy', TIME_CONFIG['policy']),
            ratio=float(time.get('ratio', TIME_CONFIG['ratio'])),
            extinction_threshold=float(time.get('extinction_threshold', TIME_CONFIG['extinction_threshold'])),
        )

    def verify_params(self, suite: str) -> Dict[str, Any]:
        """Suite defaults with the document's 'verify.<suite>' section and --seed on top"""
        params = copy.deepcopy(VERIFY_CONFIG[suite])
        params.update(self.document.get('verify', {}).get(suite, {}))
        if 'seed' in self.document and 'seed' in params:
            params['seed'] = self.seed
        return params


def load_run_config(path: Optional[str], command: str, overrides: Optional[List[str]] = None,
                    out: Optional[str] = None, seed: Optional[int] = None,
                    plot: bool = False) -> RunConfig:
    """Read the JSON document, apply --set/--out/--seed/--plot, validate"""
    document = apply_overrides(load_document(path), overrides)
    if out is not None:
        document.setdefault('outputs', {})['dir'] = out
    if seed is not None:
        document['seed'] = int(seed)
    if plot:
        document.setdefault('outputs', {})['plot'] = True
    return RunConfig(document, command)
