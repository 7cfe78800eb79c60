"""
functionals/densities.py - Pointwise integrands of the volume functionals
G2 Variational Lab

Every density is evaluated on an (N, 7) array of nodes with the structure
recovered pointwise, so the same code serves constant and non-constant
bases and backs both the analytic variations and the finite-difference
oracles. Nodes are processed in chunks to bound the size of the per-node
projector stacks.
"""

import logging
from functools import lru_cache

import numpy as np

from errors import OrbitViolationError
from exterior.algebra import DIM, wedge_tensor
from exterior.fields import FormField
from functionals.kinds import FunctionalKind
from g2structure.batch import MetricBatch, metrics_for, star_batch
from typedecomp.batch import pairing_stack, projector_stack

logger = logging.getLogger(__name__)

DENSITY_CHUNK = 4096


@lru_cache(maxsize=None)
def _top_pairing(grade: int) -> np.ndarray:
    return wedge_tensor(grade, DIM - grade)[:, :, 0].astype(float)


def _chunked(fn, points: np.ndarray) -> np.ndarray:
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if len(points) <= DENSITY_CHUNK:
        return fn(points)
    parts = [fn(points[s:s + DENSITY_CHUNK]) for s in range(0, len(points), DENSITY_CHUNK)]
    return np.concatenate(parts)


def recover(kind: FunctionalKind, values: np.ndarray, points: np.ndarray) -> MetricBatch:
    """Pointwise metrics, raising on the first node outside the functional's orbit."""
    batch = metrics_for(kind.grade, values)
    inside = batch.in_orbit(kind.orbit)
    if not np.all(inside):
        k = int(np.argmin(inside))
        point = tuple(float(x) for x in points[k])
        raise OrbitViolationError(
            f"{kind.name}: form is not in the {kind.orbit} orbit",
            point=point,
        )
    return batch


def volume_from_values(kind: FunctionalKind, values: np.ndarray,
                       points: np.ndarray) -> np.ndarray:
    return recover(kind, values, points).vol


def volume_density(kind: FunctionalKind, field: FormField, points) -> np.ndarray:
    return _chunked(lambda pts: volume_from_values(kind, field.evaluate(pts), pts), points)


def _companions(kind: FunctionalKind, base_values: np.ndarray, points: np.ndarray):
    batch = recover(kind, base_values, points)
    dual = star_batch(batch, kind.grade, base_values)
    if kind.grade == 3:
        return batch, base_values, dual
    return batch, dual, base_values


def first_variation_density(kind: FunctionalKind, base: FormField, variation: FormField,
                            points) -> np.ndarray:
    """prefactor · (V ^ ⋆F)_top at each node."""
    W = _top_pairing(kind.grade)
    prefactor = float(kind.prefactor)

    def evaluate(pts):
        F = base.evaluate(pts)
        batch = recover(kind, F, pts)
        dual = star_batch(batch, kind.grade, F)
        return prefactor * np.einsum('ni,nj,ij->n', variation.evaluate(pts), dual, W)

    return _chunked(evaluate, points)


def hessian_from_values(kind: FunctionalKind, base_values: np.ndarray, v1: np.ndarray,
                        v2: np.ndarray, points: np.ndarray) -> np.ndarray:
    batch, phi, psi = _companions(kind, base_values, points)
    stacks = projector_stack(kind.grade, phi, psi, batch)
    M = pairing_stack(batch, kind.grade)
    total = np.zeros(len(points))
    for label, coeff in kind.operator.coefficients:
        P = stacks[label]
        a = np.einsum('nij,nj->ni', P, v1)
        b = np.einsum('nij,nj->ni', P, v2)
        total += float(coeff) * np.einsum('ni,nij,nj->n', a, M, b)
    return float(kind.prefactor) * total


def hessian_density(kind: FunctionalKind, base: FormField, v1: FormField, v2: FormField,
                    points) -> np.ndarray:
    """prefactor · Σ_d c_d ⟨π_d V1, π_d V2⟩ vol at each node."""
    return _chunked(
        lambda pts: hessian_from_values(kind, base.evaluate(pts), v1.evaluate(pts),
                                        v2.evaluate(pts), pts),
        points,
    )


def type_norm_densities(kind: FunctionalKind, base: FormField, variation: FormField,
                        points) -> dict:
    """label -> signed squared norm ⟨π_d V, π_d V⟩ (without the volume factor)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    F = base.evaluate(points)
    V = variation.evaluate(points)
    batch, phi, psi = _companions(kind, F, points)
    stacks = projector_stack(kind.grade, phi, psi, batch)
    M = pairing_stack(batch, kind.grade) / batch.vol[:, None, None]
    out = {}
    for label, P in stacks.items():
        a = np.einsum('nij,nj->ni', P, V)
        out[label] = np.einsum('ni,nij,nj->n', a, M, a)
    return out


def fd_first_variation_density(kind: FunctionalKind, base: FormField, variation: FormField,
                               points, step: float = 1e-4) -> np.ndarray:
    """Central difference (v(F + tV) - v(F - tV)) / 2t at each node."""

    def evaluate(pts):
        F, V = base.evaluate(pts), variation.evaluate(pts)
        plus = volume_from_values(kind, F + step * V, pts)
        minus = volume_from_values(kind, F - step * V, pts)
        return (plus - minus) / (2.0 * step)

    return _chunked(evaluate, points)


def fd_hessian_density(kind: FunctionalKind, base: FormField, v1: FormField, v2: FormField,
                       points, step: float = 1e-4) -> np.ndarray:
    """Mixed central difference of the volume density along V1 and V2."""

    def evaluate(pts):
        F, a, b = base.evaluate(pts), v1.evaluate(pts), v2.evaluate(pts)
        total = np.zeros(len(pts))
        for sa, sb, sign in ((1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)):
            total += sign * volume_from_values(kind, F + step * (sa * a + sb * b), pts)
        return total / (4.0 * step * step)

    return _chunked(evaluate, points)


__all__ = [
    'DENSITY_CHUNK',
    'fd_first_variation_density',
    'fd_hessian_density',
    'first_variation_density',
    'hessian_density',
    'hessian_from_values',
    'recover',
    'type_norm_densities',
    'volume_density',
    'volume_from_values',
]
