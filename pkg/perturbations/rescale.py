"""
perturbations/rescale.py - Rescaling and localization of structures
G2 Variational Lab

rescale(F, η) = η^(-p)·μ_η*F with μ_η(x) = η·x. On coefficients this is
simply x ↦ F(η·x); structured terms are rewritten exactly, so the rescaled
field keeps its exact exterior derivative.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from exterior.algebra import ConstForm
from exterior.fields import FormField
from exterior.profiles import BumpProfile
from functionals.hitchin import evaluate, second_variation
from functionals.kinds import FunctionalKind
from g2structure.batch import metrics_for
from perturbations.families import PerturbationFamily, make_family
from quadrature.domains import MONTE_CARLO, Domain7, QuadratureSpec
from quadrature.integrate import monte_carlo_chunks

logger = logging.getLogger(__name__)

INVARIANCE_TOLERANCE = 1e-8


def _rescale_term(key, coeff, eta: float):
    radial, level, mono, I = key
    power = sum(mono)
    if radial is None:
        return key, float(coeff) * eta ** power
    profile, center = radial
    scaled_profile = BumpProfile(profile.eta / eta, profile.plateau, profile.cutoff)
    scaled_center = tuple(c / eta for c in center)
    new_key = ((scaled_profile, scaled_center), level, mono, I)
    return new_key, float(coeff) * eta ** (power - 2 * level)


def rescale(F: FormField, eta: float) -> FormField:
    """η^(-p)·μ_η*F."""
    if not eta > 0:
        raise ValueError(f"rescaling factor must be positive, got {eta}")
    eta = float(eta)
    if eta == 1.0:
        return F
    if F.structured:
        return FormField(F.grade, terms=tuple(_rescale_term(k, c, eta) for k, c in F.terms))

    center, radius = F.support
    return FormField.from_callable(
        F.grade,
        lambda pts: F.evaluate(eta * np.atleast_2d(np.asarray(pts, dtype=float))),
        support_center=None if center is None else tuple(c / eta for c in center),
        support_radius=None if radius is None else radius / eta,
        fd_step=None if F.fd_step is None else F.fd_step / eta,
    )


def distance_to_constant(F: FormField, form: ConstForm, radius: float = 2.0,
                         samples: int = 4096, seed: int = 0) -> float:
    """Sampled sup over the closed ball of the coefficient distance |F(x) - form|."""
    ball = Domain7.ball(radius=radius)
    spec = QuadratureSpec.monte_carlo(samples=samples, seed=seed)
    target = form.array()
    worst = float(np.max(np.abs(F.evaluate(np.zeros((1, 7))) - target)))
    for points in monte_carlo_chunks(ball, spec):
        worst = max(worst, float(np.max(np.abs(F.evaluate(points) - target))))
    return worst


# -- invariance of the relative functional change -------------------------------------------


def relative_change(kind: FunctionalKind, base: ConstForm, variation: FormField,
                    domain: Domain7, spec: QuadratureSpec) -> float:
    base_field = FormField.constant(base)
    h0 = evaluate(kind, domain, base_field, spec).value
    h1 = evaluate(kind, domain, base_field + variation, spec).value
    return (h1 - h0) / h0


def rescaling_invariance(family: PerturbationFamily, factor: float = 16.0,
                         spec: Optional[QuadratureSpec] = None) -> dict:
    """Relative change at (η, F, β) against (λ^(1/p)·η, λF, λβ) on the same ball.

    Scaling the form by λ scales its metric lengths by λ^(1/p), so the same
    Euclidean ball has metric radius λ^(1/p)·η.
    """
    spec = spec or QuadratureSpec.monte_carlo(samples=50_000)
    kind = family.kind
    base = family.definition.base
    _, dalpha = make_family(family)
    domain = family.ball

    before = relative_change(kind, base, dalpha, domain, spec)
    after = relative_change(kind, base * factor, dalpha * factor, domain, spec)
    difference = abs(after - before) / max(abs(before), 1e-300)
    logger.info(f"{family.name}: relative change {before:.6e} vs {after:.6e} at λ={factor}")
    return {
        'family': family.name,
        'lambda': float(factor),
        'eta': family.eta,
        'metric_radius': family.eta * float(factor) ** (1.0 / kind.grade),
        'relative_change': before,
        'rescaled_relative_change': after,
        'relative_difference': difference,
        'tolerance': INVARIANCE_TOLERANCE,
        'passed': difference <= INVARIANCE_TOLERANCE,
    }


# -- flat-ball sandwich ----------------------------------------------------------------


@dataclass(frozen=True)
class SandwichReport:
    eta: float
    min_eigenvalue: float
    max_eigenvalue: float
    radius: float
    samples: int

    @property
    def inner(self) -> float:
        return 1.0 / np.sqrt(self.max_eigenvalue)

    @property
    def outer(self) -> float:
        return 1.0 / np.sqrt(self.min_eigenvalue)

    @property
    def valid(self) -> bool:
        """The outer ball must stay inside the sampled region B̄₂."""
        return self.outer <= 2.0

    def to_json(self) -> dict:
        return {
            'eta': self.eta,
            'min_eigenvalue': self.min_eigenvalue,
            'max_eigenvalue': self.max_eigenvalue,
            'inner_radius': self.inner,
            'outer_radius': self.outer,
            'r': self.radius,
            'valid': self.valid,
            'samples': self.samples,
        }


def hausdorff_sandwich(field: FormField, eta: float, samples: int = 4096,
                       seed: int = 0) -> SandwichReport:
    """Smallest r with B_(1-r) ⊂ η⁻¹B_η(F) ⊂ B_(1+r) for a compact G2 field.

    The rescaled metric is bracketed by its extreme eigenvalues m ≤ g ≤ M on
    B̄₂, which puts its unit ball between the flat balls of radii 1/√M and 1/√m.
    """
    scaled = rescale(field, eta)
    ball = Domain7.ball(radius=2.0)
    spec = QuadratureSpec(MONTE_CARLO, samples=samples, seed=seed)
    lo, hi, count = np.inf, -np.inf, 0
    chunks = [np.zeros((1, 7))] + list(monte_carlo_chunks(ball, spec))
    for points in chunks:
        batch = metrics_for(field.grade, scaled.evaluate(points))
        eigenvalues = np.linalg.eigvalsh(batch.g)
        lo = min(lo, float(np.min(eigenvalues)))
        hi = max(hi, float(np.max(eigenvalues)))
        count += len(points)
    if lo <= 0:
        raise ValueError("hausdorff_sandwich needs a positive definite metric on B̄₂")
    r = max(1.0 - 1.0 / np.sqrt(hi), 1.0 / np.sqrt(lo) - 1.0)
    return SandwichReport(float(eta), lo, hi, float(r), count)


# -- sign of the Hessian at shrinking radii -----------------------------------------------


def sign_threshold(base: FormField, family: PerturbationFamily, eta_grid: Sequence[float],
                   spec: Optional[QuadratureSpec] = None) -> dict:
    """Largest tested η below which D²H along the family keeps the family's sign.

    At each η the base is rescaled about the family center and paired with the
    unit-radius family, which is the rescaled picture of a radius-η bump.
    """
    spec = spec or QuadratureSpec.monte_carlo(samples=50_000)
    if not spec.stochastic:
        spec = spec.with_method(MONTE_CARLO)
    kind = family.kind
    unit = PerturbationFamily(family.name, eta=1.0, amplitude=family.amplitude,
                              plateau=family.plateau, cutoff=family.cutoff)
    _, dalpha = make_family(unit)
    domain = unit.ball
    shift = np.asarray(family.center)

    rows: List[dict] = []
    for eta in sorted(float(e) for e in eta_grid):
        moved = _translated(base, shift)
        value = second_variation(kind, domain, rescale(moved, eta), dalpha, dalpha, spec)
        ok = family.sign * value.value > 0
        rows.append({'eta': eta, 'value': value.value, 'error': value.error, 'sign_ok': ok})
        logger.debug(f"{family.name}: η={eta:.3e} D²H={value.value:.6e}")

    threshold = None
    for row in rows:
        if not row['sign_ok']:
            break
        threshold = row['eta']
    return {'family': family.name, 'rows': rows, 'threshold': threshold,
            'passed': threshold is not None}


def _translated(F: FormField, shift: np.ndarray) -> FormField:
    if not np.any(shift):
        return F
    return FormField.from_callable(
        F.grade, lambda pts: F.evaluate(np.atleast_2d(pts) + shift), fd_step=F.fd_step
    )


__all__ = [
    'SandwichReport',
    'distance_to_constant',
    'hausdorff_sandwich',
    'relative_change',
    'rescale',
    'rescaling_invariance',
    'sign_threshold',
]
