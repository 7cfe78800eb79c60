"""
functionals/hitchin.py - Volume functionals and their first and second variations
G2 Variational Lab

At a constant base the variation integrands are radial×monomial and are
reduced exactly by the quadrature module. Non-constant bases and
unstructured variations are sampled with Monte Carlo over the support ball
of the variation, using the pointwise densities.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Optional, Tuple

import numpy as np

from errors import ClosednessError, OrbitViolationError, QuadratureError, SupportError
from exterior.algebra import ConstForm, index_map
from exterior.fields import ORIGIN, FormField, exterior_derivative, shift_monomial
from functionals.densities import (
    fd_first_variation_density,
    fd_hessian_density,
    first_variation_density,
    hessian_density,
    volume_density,
)
from functionals.kinds import FunctionalKind
from g2structure.metric import pairing_matrix
from g2structure.structure import G2Structure, structure_of
from quadrature.domains import MOMENT_REDUCTION, MONTE_CARLO, TORUS, Domain7, QuadratureSpec
from quadrature.integrate import (
    QuadratureResult,
    RadialMonomialIntegrand,
    integrate,
    monte_carlo_chunks,
    torus_nodes,
)
from typedecomp.projections import projectors

logger = logging.getLogger(__name__)

FD_STEP = 1e-4


# -- constant bases --------------------------------------------------------------


def constant_structure(kind: FunctionalKind, base: FormField,
                       where=ORIGIN) -> Optional[G2Structure]:
    """The structure of a constant base field, checked against the functional's orbit."""
    if base.grade != kind.grade:
        raise ValueError(f"{kind.name} needs a grade-{kind.grade} field, got grade {base.grade}")
    form = base.constant_form()
    if form is None:
        return None
    structure = structure_of(form)
    if structure.orbit != kind.orbit:
        raise OrbitViolationError(
            f"{kind.name}: form is {structure.orbit}, not {kind.orbit}", point=where
        )
    return structure


@lru_cache(maxsize=64)
def hessian_matrix(kind: FunctionalKind, structure: G2Structure) -> np.ndarray:
    """Q with D²H density = aᵀ Q b for coefficient vectors a, b at a constant base."""
    P = projectors(structure, kind.grade)
    G = np.asarray(pairing_matrix(structure.metric, kind.grade), dtype=float)
    G = G * float(structure.metric.voldensity)
    Q = np.zeros_like(G)
    for label, coeff in kind.operator.coefficients:
        Pd = np.asarray(P[label], dtype=float)
        Q += float(coeff) * Pd.T @ G @ Pd
    return float(kind.prefactor) * Q


def dual_form(kind: FunctionalKind, structure: G2Structure) -> ConstForm:
    return structure.fourform if kind.grade == 3 else structure.threeform


def _group_center(radial) -> Tuple[float, ...]:
    return ORIGIN if radial is None else radial[1]


def _shifted_terms(terms: Dict, center: Tuple[float, ...]):
    """Re-express polynomial terms in powers of x - center."""
    out = []
    for (radial, level, mono, I), c in terms.items():
        if radial is None and any(center):
            for shifted, weight in shift_monomial(mono, center):
                out.append((level, shifted, I, float(c) * weight))
        else:
            out.append((level, mono, I, c))
    return out


def _disjoint(g1, g2) -> bool:
    (p1, c1), (p2, c2) = g1, g2
    return float(np.linalg.norm(np.subtract(c1, c2))) >= p1.support + p2.support


def linear_integrand(kind: FunctionalKind, structure: G2Structure,
                     variation: FormField) -> list:
    """First-variation integrands, one per radial group of the variation."""
    dual = dual_form(kind, structure)
    top = variation.wedge_const(dual)
    integrands = []
    for radial, terms in top.radial_groups().items():
        center = _group_center(radial)
        profile = None if radial is None else radial[0]
        acc = {}
        for level, mono, _, c in _shifted_terms(terms, center):
            key = (() if level is None else (level,), mono)
            acc[key] = acc.get(key, 0) + float(kind.prefactor) * float(c)
        integrands.append(RadialMonomialIntegrand.build(profile, center, acc))
    return integrands


def quadratic_integrands(kind: FunctionalKind, structure: G2Structure, v1: FormField,
                         v2: FormField) -> list:
    """Second-variation integrands per pair of radial groups with overlapping supports."""
    Q = hessian_matrix(kind, structure)
    idx = index_map(kind.grade)
    integrands = []
    for g1, terms1 in v1.radial_groups().items():
        for g2, terms2 in v2.radial_groups().items():
            if g1 is not None and g2 is not None and g1 != g2:
                if _disjoint(g1, g2):
                    continue
                raise QuadratureError(
                    "overlapping supports with different profiles or centers need monte-carlo"
                )
            radial = g1 if g1 is not None else g2
            center = _group_center(radial)
            profile = None if radial is None else radial[0]
            acc = {}
            for l1, m1, I1, c1 in _shifted_terms(terms1, center):
                for l2, m2, I2, c2 in _shifted_terms(terms2, center):
                    q = Q[idx[I1], idx[I2]]
                    if q == 0.0:
                        continue
                    levels = tuple(k for k in (l1, l2) if k is not None)
                    mono = tuple(a + b for a, b in zip(m1, m2))
                    key = (tuple(sorted(levels)), mono)
                    acc[key] = acc.get(key, 0.0) + q * float(c1) * float(c2)
            integrands.append(RadialMonomialIntegrand.build(profile, center, acc))
    return integrands


def _sum_results(results, method: str) -> QuadratureResult:
    value = float(sum(r.value for r in results))
    error = float(sum(r.error for r in results))
    evaluations = sum(r.evaluations for r in results)
    return QuadratureResult(value, error, method, evaluations)


# -- support handling ------------------------------------------------------------


def require_support(domain: Domain7, field: FormField, name: str = "variation"):
    center, radius = field.support
    if domain.kind == TORUS:
        return center, radius
    if radius is None:
        raise SupportError(f"{name} has no compact support")
    if not domain.contains_ball(center, radius):
        raise SupportError(
            f"{name} support (center {np.round(center, 6).tolist()}, radius {radius:.4g}) "
            f"is not compactly inside the domain"
        )
    return center, radius


def require_closed(field: FormField):
    if field.structured:
        residual = exterior_derivative(field).max_abs_coefficient()
        if residual > 0:
            raise ClosednessError("variation is not closed, so it cannot be exact", residual)


def _sampling_ball(domain: Domain7, fields) -> Domain7:
    """Smallest declared support ball among the fields."""
    best = None
    for field in fields:
        center, radius = require_support(domain, field)
        if best is None or radius < best[1]:
            best = (center, radius)
    center, radius = best
    return Domain7.ball(center, max(radius, 1e-12))


def _sampled(domain: Domain7, density, spec: QuadratureSpec) -> QuadratureResult:
    """Monte Carlo of a density that vanishes outside the sampling domain."""
    if domain.kind == TORUS:
        points, weight = torus_nodes(domain, spec.nodes)
        values = density(points)
        return QuadratureResult(float(weight * np.sum(values)), 0.0, 'trapezoid', len(points))
    return integrate(domain, density, spec if spec.stochastic else spec.with_method(MONTE_CARLO))


# -- operations ----------------------------------------------------------------------


def evaluate(kind: FunctionalKind, domain: Domain7, field: FormField,
             spec: QuadratureSpec) -> QuadratureResult:
    """∫_D vol of the pointwise recovered structure.

    For a constant form plus a compactly supported structured perturbation
    V the value is vol(D)·v0 + ∫ linear density (reduced exactly) + a sampled
    integral of the nonlinear remainder v(F) - v0 - linear density over the
    support of V. The remainder is always sampled.
    """
    structure = constant_structure(kind, field, domain.center) if field.structured else None
    if structure is not None:
        volume = domain.volume * float(structure.metric.voldensity)
        return QuadratureResult(volume, 0.0, 'exact', 0)

    if domain.kind == TORUS:
        return _sampled(domain, lambda pts: volume_density(kind, field, pts), spec)

    if field.structured:
        base_form, perturbation = field.split_constant()
        center, radius = perturbation.support
        if (radius is not None and domain.contains_ball(center, radius)
                and not base_form.is_zero()):
            base = FormField.constant(base_form)
            structure = constant_structure(kind, base, domain.center)
            v0 = float(structure.metric.voldensity)
            deterministic = spec if not spec.stochastic else spec.with_method(MOMENT_REDUCTION)
            linear = [integrate(domain, g, deterministic)
                      for g in linear_integrand(kind, structure, perturbation)]

            def remainder(pts):
                lin = first_variation_density(kind, base, perturbation, pts)
                return volume_density(kind, field, pts) - v0 - lin

            sampled = _sampled(Domain7.ball(center, radius), remainder, spec)
            value = domain.volume * v0 + sum(r.value for r in linear) + sampled.value
            error = sum(r.error for r in linear) + sampled.error
            logger.debug(f"{kind.name}: remainder {sampled.value:.6e} ± {sampled.error:.2e}")
            return QuadratureResult(value, error, sampled.method, sampled.evaluations)

    return _sampled(domain, lambda pts: volume_density(kind, field, pts), spec)


def first_variation(kind: FunctionalKind, domain: Domain7, base: FormField,
                    variation: FormField, spec: QuadratureSpec) -> QuadratureResult:
    """prefactor · ∫ V ^ ⋆F for an exact, compactly supported V."""
    if variation.grade != kind.grade:
        raise ValueError(f"variation must have grade {kind.grade}, got {variation.grade}")
    require_support(domain, variation)
    require_closed(variation)
    structure = constant_structure(kind, base, domain.center) if base.structured else None

    reducible = domain.kind != TORUS and not spec.stochastic
    if structure is not None and variation.structured and reducible:
        results = [integrate(domain, g, spec)
                   for g in linear_integrand(kind, structure, variation)]
        return _sum_results(results, spec.method)
    if reducible:
        raise QuadratureError(f"{spec.method} needs a constant base and a structured variation")
    ball = _sampling_ball(domain, [variation]) if domain.kind != TORUS else domain
    return _sampled(ball, lambda pts: first_variation_density(kind, base, variation, pts), spec)


def second_variation(kind: FunctionalKind, domain: Domain7, base: FormField, v1: FormField,
                     v2: FormField, spec: QuadratureSpec) -> QuadratureResult:
    """prefactor · ∫ Σ_d c_d ⟨π_d V1, π_d V2⟩ vol."""
    for v in (v1, v2):
        if v.grade != kind.grade:
            raise ValueError(f"variation must have grade {kind.grade}, got {v.grade}")
        require_support(domain, v)
        require_closed(v)
    structure = constant_structure(kind, base, domain.center) if base.structured else None

    reducible = domain.kind != TORUS and not spec.stochastic
    if structure is not None and v1.structured and v2.structured and reducible:
        results = [integrate(domain, g, spec)
                   for g in quadratic_integrands(kind, structure, v1, v2)]
        return _sum_results(results, spec.method)
    if reducible:
        raise QuadratureError(f"{spec.method} needs a constant base and structured variations")
    ball = _sampling_ball(domain, [v1, v2]) if domain.kind != TORUS else domain
    return _sampled(ball, lambda pts: hessian_density(kind, base, v1, v2, pts), spec)


# -- cross-checks ----------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteDifferenceCheck:
    """Analytic and finite-difference densities integrated on common nodes."""

    order: int
    analytic: float
    finite_difference: float
    step: float
    samples: int

    @property
    def relative_error(self) -> float:
        scale = max(abs(self.analytic), 1e-300)
        return abs(self.analytic - self.finite_difference) / scale

    def passed(self, tolerance: float = 1e-4) -> bool:
        return self.relative_error <= tolerance

    def to_json(self) -> dict:
        return {
            'order': self.order,
            'analytic': self.analytic,
            'finite_difference': self.finite_difference,
            'relative_error': self.relative_error,
            'step': self.step,
            'samples': self.samples,
        }


def finite_difference_check(kind: FunctionalKind, domain: Domain7, base: FormField,
                            variation: FormField, spec: QuadratureSpec, order: int = 2,
                            step: float = FD_STEP) -> FiniteDifferenceCheck:
    """Compare analytic and difference-quotient variations node by node."""
    ball = _sampling_ball(domain, [variation])
    sample_spec = spec if spec.stochastic else spec.with_method(MONTE_CARLO)
    analytic, fd, count = 0.0, 0.0, 0
    for points in monte_carlo_chunks(ball, sample_spec):
        if order == 1:
            analytic += float(np.sum(first_variation_density(kind, base, variation, points)))
            fd += float(np.sum(fd_first_variation_density(kind, base, variation, points, step)))
        else:
            analytic += float(np.sum(hessian_density(kind, base, variation, variation, points)))
            fd += float(np.sum(
                fd_hessian_density(kind, base, variation, variation, points, step)))
        count += len(points)
    weight = ball.volume / count
    check = FiniteDifferenceCheck(order, analytic * weight, fd * weight, step, count)
    logger.info(f"{kind.name} order-{order} FD check: relative error {check.relative_error:.2e}")
    return check


def scaling_check(kind: FunctionalKind, form: ConstForm, factor, domain: Domain7) -> dict:
    """H(λσ) against λ^{7/p} H(σ) for a constant form."""
    base = evaluate(kind, domain, FormField.constant(form), QuadratureSpec())
    scaled = evaluate(kind, domain, FormField.constant(form * factor), QuadratureSpec())
    expected = float(factor) ** float(kind.scaling_exponent()) * base.value
    relative = abs(scaled.value - expected) / abs(expected)
    return {
        'functional': kind.name,
        'factor': float(factor),
        'exponent': str(kind.scaling_exponent()),
        'value': scaled.value,
        'expected': expected,
        'relative_error': relative,
        'passed': relative <= 1e-12,
    }


__all__ = [
    'FD_STEP',
    'FiniteDifferenceCheck',
    'constant_structure',
    'evaluate',
    'finite_difference_check',
    'first_variation',
    'hessian_matrix',
    'linear_integrand',
    'quadratic_integrands',
    'require_support',
    'scaling_check',
    'second_variation',
]
