"""
Forcing module - Termes sources h(t,x) sans condition de signe
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from src.discretization.field import Field
from src.discretization.mesh import Mesh
from src.discretization.profiles import evaluate_profile
from src.exceptions import ConfigError

logger = logging.getLogger(__name__)

FORCING_KINDS = ('zero', 'constant', 'separable')


@dataclass
class ForcingSpec:
    """
    h(t,x) for the evolution.

    - zero:      h = 0
    - constant:  h(t,x) = profile(x), time independent
    - separable: h(t,x) = phi(t) * profile(x), phi piecewise constant,
                 phi(t) = values[i] on [times[i], times[i+1])
    """
    kind: str = 'zero'
    profile: Optional[Field] = None
    times: List[float] = field(default_factory=list)
    values: List[float] = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in FORCING_KINDS:
            raise ConfigError(f"unknown forcing kind '{self.kind}' (known: {', '.join(FORCING_KINDS)})")
        if self.kind != 'zero' and self.profile is None:
            raise ConfigError(f"forcing '{self.kind}' needs a spatial profile")
        if self.kind == 'separable':
            times = np.asarray(self.times, dtype=float)
            if times.size == 0 or times.size != len(self.values):
                raise ConfigError("separable forcing needs as many sample times as values (at least one)")
            if times[0] != 0.0:
                raise ConfigError(f"separable forcing samples must start at t=0, got {times[0]}")
            if np.any(np.diff(times) <= 0):
                raise ConfigError("separable forcing sample times must be strictly increasing")

    @property
    def is_zero(self) -> bool:
        return self.kind == 'zero'

    def amplitude(self, t: float) -> float:
        """phi(t); the last sample extends to every later time"""
        if self.kind == 'zero':
            return 0.0
        if self.kind == 'constant':
            return 1.0
        idx = int(np.searchsorted(self.times, t, side='right')) - 1
        return float(self.values[max(idx, 0)])

    def describe(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {'kind': self.kind}
        if self.kind == 'separable':
            out['times'] = list(self.times)
            out['values'] = list(self.values)
        return out


def zero_forcing() -> ForcingSpec:
    return ForcingSpec(kind='zero')


def constant_forcing(profile: Field) -> ForcingSpec:
    return ForcingSpec(kind='constant', profile=profile)


def sample(forcing: ForcingSpec, t: float, mesh: Mesh) -> Field:
    """h(t,.) as a Field on the given mesh"""
    if forcing.is_zero:
        return Field.zeros(mesh)
    return forcing.profile * forcing.amplitude(t)


def sample_values(forcing: ForcingSpec, t: float, mesh: Mesh) -> np.ndarray:
    if forcing.is_zero:
        return np.zeros(mesh.size)
    return forcing.amplitude(t) * forcing.profile.values


def forcing_from_config(mesh: Mesh, cfg: Optional[Dict[str, Any]],
                        rng: Optional[np.random.Generator] = None) -> ForcingSpec:
    """
    Build a ForcingSpec from the 'forcing' config section:
        {"kind": "zero"}
        {"kind": "constant", "profile": <profile>}
        {"kind": "separable", "profile": <profile>, "times": [...], "values": [...]}
    """
    cfg = cfg or {'kind': 'zero'}
    kind = cfg.get('kind', 'zero')
    allowed = {
        'zero': {'kind'},
        'constant': {'kind', 'profile'},
        'separable': {'kind', 'profile', 'times', 'values'},
    }
    if kind not in allowed:
        raise ConfigError(f"unknown forcing kind '{kind}' (known: {', '.join(FORCING_KINDS)})")
    unknown = set(cfg) - allowed[kind]
    if unknown:
        raise ConfigError(f"unknown keys in forcing: {', '.join(sorted(unknown))}")
    if kind == 'zero':
        return zero_forcing()
    if 'profile' not in cfg:
        raise ConfigError("forcing.profile is required")
    profile = evaluate_profile(mesh, cfg['profile'], rng)
    if kind == 'constant':
        return constant_forcing(profile)
    return ForcingSpec(
        kind='separable',
        profile=profile,
        times=[float(t) for t in cfg.get('times', [])],
        values=[float(v) for v in cfg.get('values', [])],
    )
