"""
perturbations/primitive.py - Radial homotopy primitives and gluing to the model form
G2 Variational Lab

K(W)|_x = ∫₀¹ t^(p-1) (x ⌟ W)|_(tx) dt. On a polynomial term c·x^m dx^I the
integral is exact:

    K = c/(p + |m|) · Σ_k (-1)^k x^(m + e_(i_k)) dx^(I without i_k)

Any other field goes through Gauss–Legendre quadrature in t.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import roots_legendre

from errors import ClosednessError, GlueError
from exterior.algebra import DIM, ConstForm, is_exact, to_exact
from exterior.fields import ORIGIN, FormField, contract_position, exterior_derivative
from exterior.models import PSI0
from exterior.profiles import BumpProfile
from quadrature.domains import Domain7, QuadratureSpec
from quadrature.integrate import monte_carlo_chunks

logger = logging.getLogger(__name__)

CLOSEDNESS_TOLERANCE = 1e-10
HOMOTOPY_NODES = 32
BOUND_GRID = (0.5, 0.25, 0.125)
GLUE_PLATEAU = 0.5
GLUE_CUTOFF = 0.95
GLUE_GRID = tuple(2.0 ** -k for k in range(1, 13))
FD_RESIDUAL_STEP = 1e-5
NUMERIC_RESIDUAL_TOLERANCE = 1e-6


def _unit_ball_nodes(samples: int, seed: int) -> np.ndarray:
    spec = QuadratureSpec.monte_carlo(samples=samples, seed=seed)
    chunks = [np.zeros((1, DIM))] + list(monte_carlo_chunks(Domain7.ball(), spec))
    return np.concatenate(chunks)


def _sup_norm(F: FormField, points: np.ndarray) -> float:
    values = F.evaluate(points)
    return float(np.max(np.linalg.norm(values, axis=1))) if len(values) else 0.0


def _polynomial_primitive(W: FormField) -> FormField:
    p = W.grade
    terms = {}
    for (_, _, mono, I), c in W.terms:
        degree = p + sum(mono)
        scale = to_exact(c) / degree if is_exact(c) else float(c) / degree
        for k, axis in enumerate(I):
            shifted = list(mono)
            shifted[axis - 1] += 1
            rest = tuple(a for a in I if a != axis)
            key = (tuple(shifted), rest)
            value = scale if k % 2 == 0 else -scale
            terms[key] = terms.get(key, 0) + value
    return FormField.polynomial(p - 1, terms)


def _quadrature_primitive(W: FormField, nodes: int) -> FormField:
    t, w = roots_legendre(nodes)
    t = 0.5 * (t + 1.0)
    w = 0.5 * w
    p = W.grade

    def evaluate(points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        out = 0.0
        for tk, wk in zip(t, w):
            values = W.evaluate(tk * points)
            out = out + wk * tk ** (p - 1) * contract_position(values, points, p)
        return out

    return FormField.from_callable(p - 1, evaluate, fd_step=FD_RESIDUAL_STEP)


def closedness_residual(W: FormField, points: Optional[np.ndarray] = None) -> float:
    dW = exterior_derivative(W)
    if dW.structured:
        return dW.max_abs_coefficient()
    points = _unit_ball_nodes(2048, 0) if points is None else points
    return _sup_norm(dW, points)


@dataclass
class PrimitiveReport:
    """The primitive of a closed form with its measured bound constants."""

    primitive: FormField
    residual: float
    vanishes_at_origin: bool
    c1: float
    c2: float
    exponent: float
    rows: List[dict] = field(default_factory=list)
    exact: bool = True

    @property
    def quadratic_bound(self) -> bool:
        return self.vanishes_at_origin

    def to_json(self) -> dict:
        return {
            'grade': self.primitive.grade,
            'exact': self.exact,
            'residual': self.residual,
            'vanishes_at_origin': self.vanishes_at_origin,
            'quadratic_bound': self.quadratic_bound,
            'C1': self.c1,
            'C2': self.c2,
            'exponent': self.exponent,
            'rows': self.rows,
        }


def poincare_primitive(W: FormField, eta_grid: Sequence[float] = BOUND_GRID,
                       tolerance: float = CLOSEDNESS_TOLERANCE, samples: int = 4096,
                       seed: int = 0) -> PrimitiveReport:
    """ϖ with dϖ = W, plus sup-norm bounds of ϖ and W over B_2η for each η."""
    if W.grade < 1:
        raise ValueError("primitives exist for forms of grade at least 1")
    closure = closedness_residual(W)
    if closure > tolerance:
        raise ClosednessError("input form is not closed", closure)

    exact = W.is_polynomial()
    primitive = _polynomial_primitive(W) if exact else _quadrature_primitive(W, HOMOTOPY_NODES)
    nodes = _unit_ball_nodes(samples, seed)
    check = exterior_derivative(primitive) - W
    if check.structured:
        residual = check.max_abs_coefficient()
    else:
        residual = _sup_norm(check, 0.5 * nodes)
    limit = tolerance if exact else NUMERIC_RESIDUAL_TOLERANCE
    if residual > limit:
        raise ClosednessError("dϖ does not reproduce the input form", residual)

    at_origin = float(np.max(np.abs(W.evaluate(np.zeros((1, DIM))))))
    rows = []
    for eta in sorted((float(e) for e in eta_grid), reverse=True):
        points = 2.0 * eta * nodes
        rows.append({
            'eta': eta,
            'sup_primitive': _sup_norm(primitive, points),
            'sup_form': _sup_norm(W, points),
        })
    c1 = max(row['sup_form'] / row['eta'] for row in rows)
    c2 = max(row['sup_primitive'] / row['eta'] ** 2 for row in rows)
    exponent = _fitted_exponent(rows)
    logger.info(f"primitive of a {W.grade}-form: residual {residual:.2e}, exponent {exponent:.3f}")
    return PrimitiveReport(primitive, float(residual), at_origin <= tolerance, c1, c2, exponent,
                           rows, exact)


def _fitted_exponent(rows) -> float:
    usable = [(r['eta'], r['sup_primitive']) for r in rows if r['sup_primitive'] > 0]
    if len(usable) < 2:
        return float('nan')
    eta, sup = np.log(np.array(usable)).T
    return float(np.polyfit(eta, sup, 1)[0])


# -- gluing -----------------------------------------------------------------------------


@dataclass
class GlueResult:
    field: FormField
    eta: float
    deviation: float
    delta: float
    agreement: float
    rows: List[dict]

    def to_json(self) -> dict:
        return {
            'eta': self.eta,
            'deviation': self.deviation,
            'delta': self.delta,
            'agreement_on_inner_ball': self.agreement,
            'passed': self.deviation < self.delta,
            'rows': self.rows,
        }


def _cutoff_product(profile: BumpProfile, primitive: FormField) -> FormField:
    if primitive.is_polynomial():
        return primitive.with_profile(profile, ORIGIN)

    def evaluate(points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        weights = profile(np.linalg.norm(points, axis=1))
        return weights[:, None] * primitive.evaluate(points)

    return FormField.from_callable(primitive.grade, evaluate, support_center=ORIGIN,
                                   support_radius=profile.support, fd_step=FD_RESIDUAL_STEP)


def glue_to_standard(psi_prime: FormField, delta: float,
                     eta_grid: Sequence[float] = GLUE_GRID, model: ConstForm = PSI0,
                     samples: int = 4096, seed: int = 0) -> GlueResult:
    """ψ″ = ψ′ + d(f_η ϖ) equal to the model form on B_η and within δ of ψ′.

    ϖ is the primitive of model - ψ′ and f_η is 1 on B_η and 0 outside B_(1.9η).
    """
    if psi_prime.grade != model.grade:
        raise ValueError(f"expected a {model.grade}-form, got grade {psi_prime.grade}")
    difference = FormField.constant(model) - psi_prime
    gap = float(np.max(np.abs(difference.evaluate(np.zeros((1, DIM))))))
    if gap > CLOSEDNESS_TOLERANCE:
        raise GlueError("form does not agree with the model form at the origin", gap)

    report = poincare_primitive(difference, samples=samples, seed=seed)
    nodes = _unit_ball_nodes(samples, seed)
    rows, best = [], None
    for eta in sorted((float(e) for e in eta_grid), reverse=True):
        profile = BumpProfile(2.0 * eta, GLUE_PLATEAU, GLUE_CUTOFF)
        correction = exterior_derivative(_cutoff_product(profile, report.primitive))
        deviation = _sup_norm(correction, 2.0 * eta * nodes)
        rows.append({'eta': eta, 'deviation': deviation})
        logger.debug(f"glue: η={eta:.3e} deviation {deviation:.3e}")
        if best is None or deviation < best[1]:
            best = (eta, deviation)
        if deviation < delta:
            glued = psi_prime + correction
            inner = eta * nodes
            agreement = float(np.max(np.abs(glued.evaluate(inner) - model.array())))
            logger.info(f"glued at η={eta:.3e} with deviation {deviation:.3e}")
            return GlueResult(glued, eta, deviation, float(delta), agreement, rows)

    raise GlueError(f"no η in the grid keeps the correction below δ={delta:.3e}", best[1],
                    best[0])


__all__ = [
    'BOUND_GRID',
    'GLUE_GRID',
    'GlueResult',
    'PrimitiveReport',
    'closedness_residual',
    'glue_to_standard',
    'poincare_primitive',
]
