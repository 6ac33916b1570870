"""
Energy module - Fonctionnelle J_{0,q}, objectif d'un pas implicite et sondes de convexité

j0q(w) = q * p_energy(w^(1/q)) is convex in w although p_energy(v) composed
with v = w^(1/q) is not convex in v. The step objective is written in v
(smooth for v > 0) and certified in w.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.discretization.field import Field, check_same_mesh, nodal_max, nodal_min, power_values
from src.discretization.mesh import Mesh
from src.discretization.plap import (
    as_exponent,
    edge_differences,
    energy_gradient_values,
    energy_values,
    laplacian_values,
)
from src.exceptions import ConfigError
from src.model.reaction import ReactionSpec, f1_potential_values, f1_values

logger = logging.getLogger(__name__)

INFINITY = math.inf


def check_exponents(p: float, q: float) -> None:
    p = as_exponent(p)
    if not (1.0 < float(q) <= p):
        raise ConfigError(f"exponents must satisfy 1 < q <= p, got p={p}, q={q}")


# ============================================================
# STEP OBJECTIVE
# ============================================================

@dataclass
class StepObjective:
    """
    Phi(v) = 1/2 sum m (v^q - g)^2 + mu q p_energy(v) - mu q sum m F1(x, v)

    g is the resolvent datum: h for a plain resolvent, or
    w_k + dtau * (h_k + explicit f2 term) inside the time stepper.
    """
    mesh: Mesh
    p: float
    q: float
    mu: float
    g: Field
    reaction: Optional[ReactionSpec] = None

    def __post_init__(self):
        check_exponents(self.p, self.q)
        self.p, self.q = float(self.p), float(self.q)
        if not (np.isfinite(self.mu) and self.mu > 0):
            raise ConfigError(f"step weight mu must be positive, got {self.mu}")
        self.mu = float(self.mu)
        if not self.g.mesh.same_as(self.mesh):
            raise ConfigError("resolvent datum g lives on a different mesh")
        if self.reaction is not None:
            if not self.reaction.validated:
                raise ConfigError("reaction must be validated before building a step objective")
            if self.reaction.q != self.q:
                raise ConfigError(f"reaction was validated for q={self.reaction.q}, objective uses q={self.q}")
            if not self.reaction.f1_terms:
                self.reaction = None

    def with_datum(self, g: Field) -> 'StepObjective':
        return StepObjective(self.mesh, self.p, self.q, self.mu, g, self.reaction)

    # ---------- array kernels ----------

    def value_of(self, v: np.ndarray) -> float:
        m = self.mesh.cell_measure
        misfit = power_values(v, self.q) - self.g.values
        total = 0.5 * m * float(np.dot(misfit, misfit))
        total += self.mu * self.q * energy_values(v, self.mesh, self.p)
        if self.reaction is not None:
            total -= self.mu * self.q * m * float(np.sum(f1_potential_values(self.reaction, v)))
        return total

    def gradient_of(self, v: np.ndarray) -> np.ndarray:
        m = self.mesh.cell_measure
        q = self.q
        vq1 = power_values(v, q - 1.0)
        grad = m * q * vq1 * (vq1 * v - self.g.values)
        grad += self.mu * q * energy_gradient_values(v, self.mesh, self.p)
        if self.reaction is not None:
            grad -= self.mu * q * m * f1_values(self.reaction, v)
        return grad

    def curvature_of(self, v: np.ndarray) -> np.ndarray:
        """
        Positive estimate of the Hessian diagonal of Phi in v.

        Every term is taken in absolute value. Singular terms (v = 0 with
        q < 2, a flat edge with p < 2) give +inf at their node.
        """
        m, p, q, mu = self.mesh.cell_measure, self.p, self.q, self.mu
        g = np.abs(self.g.values)
        with np.errstate(divide='ignore', invalid='ignore'):
            misfit = (2.0 * q - 1.0) * np.power(v, 2.0 * q - 2.0)
            misfit += np.where(g > 0, (q - 1.0) * g * np.power(v, q - 2.0), 0.0)

            diffusion = np.zeros(self.mesh.shape)
            for axis, (d, h) in enumerate(edge_differences(v, self.mesh)):
                c = np.power(np.abs(d), p - 2.0) / (h * h)
                n_a = self.mesh.shape[axis]
                diffusion += np.take(c, np.arange(n_a), axis=axis) + np.take(c, np.arange(1, n_a + 1), axis=axis)

            total = m * q * misfit + mu * q * m * (p - 1.0) * diffusion.reshape(-1)
            if self.reaction is not None:
                for term in self.reaction.f1_terms:
                    c = np.abs(term.coeff.values)
                    s = term.exponent
                    total += np.where(c > 0, mu * q * m * c * (s - 1.0) * np.power(v, s - 2.0), 0.0)
        return total

    @property
    def a0(self) -> np.ndarray:
        """Nodal limit of f1(v)/v^(q-1) at v = 0 (zero without implicit reaction)"""
        if self.reaction is None or self.reaction.a0_field is None:
            return np.zeros(self.mesh.size)
        return self.reaction.a0_field.values

    def zero_node_slope(self) -> np.ndarray:
        """
        One-sided dPhi/dw per unit cell measure at w_j = 0, for a node whose
        neighbours are all zero: -g - mu a0, plus the edge term when p = q.
        """
        slope = -self.g.values - self.mu * self.a0
        if self.p == self.q:
            slope = slope + self.mu * sum(2.0 / h ** self.p for h in self.mesh.spacing)
        return slope


def _check_nonnegative(v: Field, name: str = 'v') -> None:
    if np.any(v.values < 0):
        raise ConfigError(f"{name} must be nonnegative at every node")


def objective_value(v: Field, obj: StepObjective) -> float:
    _check_nonnegative(v)
    return obj.value_of(v.values)


def objective_gradient(v: Field, obj: StepObjective) -> Field:
    """Exact gradient of objective_value with respect to the nodal v"""
    _check_nonnegative(v)
    return Field(v.mesh, obj.gradient_of(v.values))


def objective_value_w(w: Field, obj: StepObjective) -> float:
    """The same objective in w = v^q coordinates (convex)"""
    _check_nonnegative(w, 'w')
    return obj.value_of(power_values(w.values, 1.0 / obj.q))


# ============================================================
# J_{0,q}
# ============================================================

def j0q_values(w: np.ndarray, mesh: Mesh, p: float, q: float) -> float:
    if np.any(w < 0):
        return INFINITY
    return q * energy_values(power_values(w, 1.0 / q), mesh, p)


def j0q(w: Field, p, q) -> float:
    """q * p_energy(w^(1/q)) on the nonnegative cone, +inf outside"""
    return j0q_values(w.values, w.mesh, as_exponent(p), float(q))


def operator_a(w: Field, p, q) -> Field:
    """A(w) = -Delta_p v / v^(q-1), v = w^(1/q); needs w > 0 at every node"""
    p, q = as_exponent(p), float(q)
    if np.any(w.values <= 0):
        raise ConfigError("operator A needs w > 0 at every node")
    v = power_values(w.values, 1.0 / q)
    return Field(w.mesh, -laplacian_values(v, w.mesh, p) / power_values(v, q - 1.0))


def j0q_gradient(w: Field, p, q) -> Field:
    """d j0q / dw = m A(w) for w > 0"""
    return operator_a(w, p, q) * w.mesh.cell_measure


# ============================================================
# CONVEXITY GAPS
# ============================================================

def convexity_gap(w1: Field, w2: Field, lam: float, p, q) -> float:
    """lam j(w1) + (1-lam) j(w2) - j(lam w1 + (1-lam) w2)"""
    if not 0.0 < lam < 1.0:
        raise ConfigError(f"convexity weight must lie in (0,1), got {lam}")
    check_same_mesh(w1, w2)
    mixed = w1 * lam + w2 * (1.0 - lam)
    return lam * j0q(w1, p, q) + (1.0 - lam) * j0q(w2, p, q) - j0q(mixed, p, q)


def submodularity_gap(w1: Field, w2: Field, p, q) -> float:
    """j(w1) + j(w2) - j(min) - j(max); nonnegative for the edge energy"""
    return (j0q(w1, p, q) + j0q(w2, p, q)
            - j0q(nodal_min(w1, w2), p, q) - j0q(nodal_max(w1, w2), p, q))


def shifted_submodularity_gap(w1: Field, w2: Field, k: float, p, q) -> float:
    """j(w1) + j(w2) - j(min(w1, w2 + k)) - j(max(w1 - k, w2)), k > 0"""
    if not k > 0:
        raise ConfigError(f"shift k must be positive, got {k}")
    return (j0q(w1, p, q) + j0q(w2, p, q)
            - j0q(nodal_min(w1, w2 + k), p, q) - j0q(nodal_max(w1 - k, w2), p, q))


def monotonicity_gap(w1: Field, w2: Field, p, q) -> float:
    """<grad j(w1) - grad j(w2), w1 - w2> (plain dot product)"""
    check_same_mesh(w1, w2)
    diff = j0q_gradient(w1, p, q) - j0q_gradient(w2, p, q)
    return float(np.dot(diff.values, (w1 - w2).values))


def picone_gap(u: Field, z: Field, p, q) -> float:
    """
    q E(z) + (p-q) E(u) - sum_edges m |D u|^(p-2) D u . D(z^q / u^(q-1))

    The edge pairing equals <z^q/u^(q-1), grad E(u)> by summation by parts
    (the ratio is extended by zero on the boundary like every nodal field).
    """
    p, q = as_exponent(p), float(q)
    check_same_mesh(u, z)
    if np.any(u.values <= 0):
        raise ConfigError("picone_gap needs u > 0 at every node")
    if np.any(z.values < 0):
        raise ConfigError("picone_gap needs z >= 0 at every node")
    mesh = u.mesh
    ratio = power_values(z.values, q) / power_values(u.values, q - 1.0)
    pairing = float(np.dot(ratio, energy_gradient_values(u.values, mesh, p)))
    return (q * energy_values(z.values, mesh, p)
            + (p - q) * energy_values(u.values, mesh, p)
            - pairing)
