"""
g2structure/structure.py - Stable 3-forms and 4-forms and their structures
G2 Variational Lab

3-forms: B(u, v) = [(u⌟φ) ^ (v⌟φ) ^ φ]_top / 6, g = B / det(B)^{1/9},
vol = det(B)^{1/9}. The two open GL+ orbits are told apart by the
signature of g: (7,0) compact, (3,4) split. det(B) <= 0 or any other
signature is the degenerate bucket.

4-forms: fixed point g_{k+1} = metric(⋆_{g_k} ψ) seeded at the Euclidean
metric.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from errors import DegenerateFormError, DegenerateMetricError, MetricIterationError
from exterior.algebra import DIM, ConstForm, interior, top_coefficient, unit_vector, wedge
from g2structure.metric import (
    Metric7,
    exact_determinant,
    exact_root,
    hodge_star,
)

logger = logging.getLogger(__name__)

COMPACT = 'compact-G2'
SPLIT = 'split-G2'
DEGENERATE = 'degenerate'

SIGNATURE_ORBITS = {(7, 0): COMPACT, (3, 4): SPLIT}

METRIC_TOLERANCE = 1e-12  # successive-iterate difference
METRIC_MAX_ITERS = 50


@dataclass(frozen=True)
class G2Structure:
    """A stable form with its recovered metric, volume density and Hodge dual."""

    threeform: ConstForm
    fourform: Optional[ConstForm]
    metric: Optional[Metric7]
    orbit: str
    error: Optional[str] = None
    iterations: int = 0
    residual: float = 0.0

    @property
    def stable(self) -> bool:
        return self.orbit != DEGENERATE

    @property
    def exact(self) -> bool:
        return self.metric is not None and self.metric.exact and self.threeform.exact

    def require_stable(self) -> 'G2Structure':
        if not self.stable:
            raise DegenerateFormError(self.error or "form is not stable")
        return self

    def to_json(self) -> dict:
        return {
            'orbit': self.orbit,
            'error': self.error,
            'metric': None if self.metric is None else self.metric.to_json(),
            'iterations': self.iterations,
            'residual': self.residual,
        }


def bilinear_form(phi: ConstForm) -> np.ndarray:
    """Unnormalized B(e_i, e_j); object array of Fractions for exact input."""
    if phi.grade != 3:
        raise ValueError(f"expected a 3-form, got grade {phi.grade}")
    contractions = [interior(unit_vector(a, phi.exact), phi) for a in range(1, DIM + 1)]
    B = np.empty((DIM, DIM), dtype=object if phi.exact else float)
    for i in range(DIM):
        for j in range(i, DIM):
            value = top_coefficient(wedge(wedge(contractions[i], contractions[j]), phi)) / 6
            B[i, j] = B[j, i] = value
    return B


def _degenerate(phi: ConstForm, reason: str) -> G2Structure:
    logger.debug(f"Degenerate 3-form: {reason}")
    return G2Structure(phi, None, None, DEGENERATE, error=reason)


def classify_and_metric_3(phi: ConstForm) -> G2Structure:
    """Orbit class, metric, volume density and dual 4-form of a 3-form."""
    B = bilinear_form(phi)
    if phi.exact:
        det = exact_determinant(B)
    else:
        det = float(np.linalg.det(B.astype(float)))
    if det <= 0:
        return _degenerate(phi, f"det B = {float(det):.3e} is not positive")

    vol = exact_root(det, 9) if phi.exact else det ** (1.0 / 9.0)
    if phi.exact and not isinstance(vol, float):
        g = B / vol
    else:
        g = B.astype(float) / float(vol)
    try:
        metric = Metric7.from_matrix(g, vol)
    except DegenerateMetricError as e:
        return _degenerate(phi, str(e))

    orbit = SIGNATURE_ORBITS.get(metric.signature)
    if orbit is None:
        return _degenerate(phi, f"signature {metric.signature} is not an open orbit")
    return G2Structure(phi, hodge_star(metric, phi), metric, orbit)


def _metric_gap(a: Metric7, b: Metric7) -> float:
    return float(np.max(np.abs(a.array() - b.array())))


def metric_from_4form(psi: ConstForm, max_iters: int = METRIC_MAX_ITERS,
                      tol: float = METRIC_TOLERANCE) -> G2Structure:
    """Recover (φ, g) with ⋆_g φ = ψ by fixed-point iteration."""
    if psi.grade != 4:
        raise ValueError(f"expected a 4-form, got grade {psi.grade}")
    metric = Metric7.euclidean()
    if not psi.exact:
        metric = Metric7.from_matrix(metric.array(), 1.0)

    gap = float('inf')
    for iteration in range(1, max_iters + 1):
        phi = hodge_star(metric, psi)
        candidate = classify_and_metric_3(phi)
        if not candidate.stable:
            raise MetricIterationError(
                f"4-form left the open orbit during recovery: {candidate.error}",
                gap, iteration,
            )
        gap = _metric_gap(candidate.metric, metric)
        metric = candidate.metric
        logger.debug(f"metric_from_4form iteration {iteration}: gap {gap:.3e}")
        if gap <= tol:
            break
    else:
        raise MetricIterationError("metric recovery did not converge", gap, max_iters)

    phi = hodge_star(metric, psi)
    structure = classify_and_metric_3(phi)
    if not structure.stable:
        raise DegenerateFormError(structure.error)
    residual = (structure.fourform - psi).max_abs()
    return G2Structure(phi, psi, structure.metric, structure.orbit,
                       iterations=iteration, residual=residual)


def structure_of(form: ConstForm) -> G2Structure:
    """Dispatch on grade: 3-forms are classified, 4-forms recovered."""
    if form.grade == 3:
        return classify_and_metric_3(form)
    if form.grade == 4:
        return metric_from_4form(form)
    raise ValueError(f"stable forms have grade 3 or 4, got {form.grade}")
