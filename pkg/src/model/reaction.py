"""
Reaction module - Catalogue des termes f = f1 + f2 et validation des hypothèses structurelles

f1(x,u) = sum_i c_i(x) u^(s_i - 1) is treated implicitly: its ratio
f1/u^(q-1) = sum_i c_i u^(s_i - q) must be nonincreasing in u, which is
what keeps the per-step objective convex in w. f2(x,u) = u^(q-1) * ratio(u)
is treated explicitly and only its Lipschitz constant K matters.
The surjectivity hypothesis required for x-dependent f1 is assumed, not checked.
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from src.discretization.field import Field
from src.discretization.mesh import Mesh
from src.discretization.profiles import evaluate_profile
from src.exceptions import AdmissibilityError, ConfigError

logger = logging.getLogger(__name__)

# ratio f2/u^(q-1) -> constante de Lipschitz connue
F2_KINDS = ('none', 'constant_ratio', 'sin_ratio', 'tanh_ratio')


@dataclass
class PowerTerm:
    """c(x) * u^(s-1)"""
    coeff: Field
    exponent: float


@dataclass
class ReactionSpec:
    f1_terms: List[PowerTerm] = field(default_factory=list)
    f2_kind: str = 'none'
    f2_lambda: float = 0.0
    # Remplis par validate()
    a0_field: Optional[Field] = None
    K: Optional[float] = None
    q: Optional[float] = None

    @property
    def validated(self) -> bool:
        return self.K is not None

    @property
    def is_trivial(self) -> bool:
        return not self.f1_terms and self.f2_kind == 'none'

    def describe(self) -> Dict[str, Any]:
        return {
            'f1': [
                {'s': t.exponent, 'c_min': float(t.coeff.values.min()), 'c_max': float(t.coeff.values.max())}
                for t in self.f1_terms
            ],
            'f2': {'kind': self.f2_kind, 'lambda': self.f2_lambda},
            'K': self.K,
        }


def no_reaction(mesh: Mesh, q: float) -> ReactionSpec:
    """Validated empty reaction (f = 0)"""
    spec = ReactionSpec()
    validate(spec, q, mesh)
    return spec


def reaction_from_config(mesh: Mesh, cfg: Optional[Dict[str, Any]], q: float,
                         rng: Optional[np.random.Generator] = None) -> ReactionSpec:
    """Build and validate a ReactionSpec from the 'reaction' config section"""
    cfg = cfg or {}
    terms = []
    for i, term in enumerate(cfg.get('f1', [])):
        if not isinstance(term, dict) or set(term) != {'c', 's'}:
            raise ConfigError(f"reaction.f1[{i}] must have exactly the keys 'c' and 's'")
        terms.append(PowerTerm(coeff=evaluate_profile(mesh, term['c'], rng), exponent=float(term['s'])))

    f2 = cfg.get('f2', {'kind': 'none'})
    unknown = set(f2) - {'kind', 'lambda'}
    if unknown:
        raise ConfigError(f"unknown keys in reaction.f2: {', '.join(sorted(unknown))}")
    spec = ReactionSpec(
        f1_terms=terms,
        f2_kind=f2.get('kind', 'none'),
        f2_lambda=float(f2.get('lambda', 0.0)),
    )
    validate(spec, q, mesh)
    return spec


# ============================================================
# VALIDATION
# ============================================================

def validate(spec: ReactionSpec, q: float, mesh: Optional[Mesh] = None) -> float:
    """
    Check the structural assumptions and return the Lipschitz constant K.

    - sign rule: c >= 0 with s <= q, or c <= 0 with s >= q
    - the limit a0 of f1(x,r)/r^(q-1) as r -> 0 must exist: terms with
      s < q must vanish identically; a0 is the coefficient of the s = q term
    """
    q = float(q)
    mesh = mesh or (spec.f1_terms[0].coeff.mesh if spec.f1_terms else None)

    kept = []
    a0 = None
    for i, term in enumerate(spec.f1_terms):
        s = float(term.exponent)
        c = term.coeff.values
        if not s > 0:
            raise AdmissibilityError(f"f1 term {i}: singular exponent s={s} is not supported")
        nonneg, nonpos = bool(np.all(c >= 0)), bool(np.all(c <= 0))
        if not ((nonneg and s <= q) or (nonpos and s >= q)):
            raise AdmissibilityError(
                f"f1 term {i}: sign rule violated (s={s}, q={q}, c in "
                f"[{c.min():.3g}, {c.max():.3g}]); f1/u^(q-1) would not be nonincreasing"
            )
        if s < q:
            if np.any(c != 0):
                raise AdmissibilityError(
                    f"f1 term {i}: s={s} < q={q} with nonzero coefficient; "
                    f"f1/u^(q-1) blows up at 0 and a0 does not exist"
                )
            continue
        if np.all(c == 0):
            continue
        if s == q:
            a0 = term.coeff if a0 is None else a0 + term.coeff
        kept.append(PowerTerm(coeff=term.coeff, exponent=s))

    if spec.f2_kind not in F2_KINDS:
        raise AdmissibilityError(f"unknown f2 kind '{spec.f2_kind}' (known: {', '.join(F2_KINDS)})")
    if spec.f2_kind in ('none', 'constant_ratio'):
        K = 0.0
    else:
        K = abs(float(spec.f2_lambda))

    spec.f1_terms = kept
    spec.a0_field = a0 if a0 is not None else (Field.zeros(mesh) if mesh is not None else None)
    spec.K = K
    spec.q = q
    logger.debug(f"Reaction validated: {len(kept)} f1 terms, f2={spec.f2_kind}, K={K}")
    return K


def _require_validated(spec: ReactionSpec) -> None:
    if not spec.validated:
        raise AdmissibilityError("reaction must be validated before evaluation")


# ============================================================
# EVALUATION (vectorised over nodes)
# ============================================================

def f1_values(spec: ReactionSpec, v: np.ndarray) -> np.ndarray:
    """f1(x_j, v_j) for every node"""
    _require_validated(spec)
    out = np.zeros_like(v, dtype=float)
    for term in spec.f1_terms:
        out += term.coeff.values * np.power(v, term.exponent - 1.0)
    return out


def f1_ratio_values(spec: ReactionSpec, u: np.ndarray) -> np.ndarray:
    """f1(x_j,u_j)/u_j^(q-1) = sum c u^(s-q); equals a0 at u = 0"""
    _require_validated(spec)
    out = np.zeros_like(u, dtype=float)
    for term in spec.f1_terms:
        out += term.coeff.values * np.power(u, term.exponent - spec.q)
    return out


def f1_potential_values(spec: ReactionSpec, v: np.ndarray) -> np.ndarray:
    """F1(x_j, v_j) = integral_0^v f1 = sum c v^s / s"""
    _require_validated(spec)
    out = np.zeros_like(v, dtype=float)
    for term in spec.f1_terms:
        out += term.coeff.values * np.power(v, term.exponent) / term.exponent
    return out


def f2_ratio_values(spec: ReactionSpec, u: np.ndarray) -> np.ndarray:
    """f2(x_j,u_j)/u_j^(q-1) for every node"""
    _require_validated(spec)
    lam = spec.f2_lambda
    if spec.f2_kind == 'none':
        return np.zeros_like(u, dtype=float)
    if spec.f2_kind == 'constant_ratio':
        return np.full_like(u, lam, dtype=float)
    if spec.f2_kind == 'sin_ratio':
        return lam * np.sin(u)
    return lam * np.tanh(u)


def f1_potential(spec: ReactionSpec, x_index: int, v: float) -> float:
    return float(f1_potential_values(spec, _at_node(spec, x_index, v))[x_index])


def f1_value(spec: ReactionSpec, x_index: int, v: float) -> float:
    return float(f1_values(spec, _at_node(spec, x_index, v))[x_index])


def f2_ratio(spec: ReactionSpec, x_index: int, u: float) -> float:
    return float(f2_ratio_values(spec, _at_node(spec, x_index, u))[x_index])


def _at_node(spec: ReactionSpec, x_index: int, value: float) -> np.ndarray:
    size = spec.a0_field.values.size if spec.a0_field is not None else x_index + 1
    arr = np.zeros(size)
    arr[x_index] = float(value)
    return arr
