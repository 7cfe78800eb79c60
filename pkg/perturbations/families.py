"""
perturbations/families.py - Named perturbation families and amplitude search
G2 Variational Lab

Each family is a compactly supported potential α = t·η·f(|x - c|/η)·form,
whose exterior derivative dα is the exact variation fed to the volume
functionals. The η factor keeps the size of dα independent of the ball
radius, so relative functional changes survive translation and rescaling.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from errors import AmplitudeSearchError, OrbitViolationError
from exterior.algebra import ConstForm
from exterior.fields import ORIGIN, FormField, exterior_derivative
from exterior.models import PHI0, PHI0_SPLIT, PSI0, PSI0_SPLIT
from exterior.profiles import DEFAULT_CUTOFF, DEFAULT_PLATEAU, BumpProfile
from functionals.densities import first_variation_density, hessian_density, volume_from_values
from functionals.hitchin import evaluate
from functionals.kinds import H3, H3_SPLIT, H4, H4_SPLIT, FunctionalKind
from quadrature.domains import MONTE_CARLO, Domain7, QuadratureSpec
from quadrature.integrate import monte_carlo_chunks

logger = logging.getLogger(__name__)

DEFAULT_AMPLITUDE_GRID = tuple(float(t) for t in np.logspace(-3, -0.5, 6))
DEFAULT_TAYLOR_GRID = tuple(float(t) for t in np.logspace(-3, -1.5, 7))
TAYLOR_EXPONENT = 3.0
TAYLOR_TOLERANCE = 0.2


@dataclass(frozen=True)
class FamilyDefinition:
    name: str
    potential: ConstForm
    kind: FunctionalKind
    base: ConstForm
    sign: int
    description: str

    def to_json(self) -> dict:
        return {
            'name': self.name,
            'functional': self.kind.name,
            'potential_grade': self.potential.grade,
            'sign': '+' if self.sign > 0 else '-',
            'description': self.description,
        }


FAMILIES: Dict[str, FamilyDefinition] = {
    'P0+': FamilyDefinition(
        'P0+', PHI0, H4, PSI0, 1, "f·⋆ψ0 at ψ0; dα is pure type 7"),
    'P0-': FamilyDefinition(
        'P0-', ConstForm.basis_form((1, 2, 3)), H4, PSI0, -1, "f·dx123 at ψ0"),
    'SG3+': FamilyDefinition(
        'SG3+', ConstForm.basis_form((1, 2)), H3_SPLIT, PHI0_SPLIT, 1, "f·dx12 at split φ0"),
    'SG3-': FamilyDefinition(
        'SG3-', ConstForm.basis_form((1, 4)), H3_SPLIT, PHI0_SPLIT, -1, "f·dx14 at split φ0"),
    'SG4+': FamilyDefinition(
        'SG4+', ConstForm.basis_form((1, 2, 3)), H4_SPLIT, PSI0_SPLIT, 1,
        "f·dx123 at split ψ0"),
    'SG4-': FamilyDefinition(
        'SG4-', ConstForm.basis_form((1, 2, 4)), H4_SPLIT, PSI0_SPLIT, -1,
        "f·dx124 at split ψ0"),
    'CH-': FamilyDefinition(
        'CH-', ConstForm.basis_form((1, 2)), H3, PHI0, -1, "f·dx12 at φ0"),
}

LEMMA_FAMILIES = {
    'p0': ('P0+', 'P0-'),
    'sg3': ('SG3+', 'SG3-'),
    'sg4': ('SG4+', 'SG4-'),
    'ch': ('CH-',),
}


def family_definition(name: str) -> FamilyDefinition:
    try:
        return FAMILIES[name]
    except KeyError:
        raise ValueError(
            f"unknown perturbation family '{name}'; expected one of {sorted(FAMILIES)}"
        ) from None


@dataclass(frozen=True)
class PerturbationFamily:
    """A family member placed at a center with radius eta and amplitude t."""

    name: str
    center: Tuple[float, ...] = ORIGIN
    eta: float = 1.0
    amplitude: float = 1.0
    plateau: float = DEFAULT_PLATEAU
    cutoff: float = DEFAULT_CUTOFF

    def __post_init__(self):
        family_definition(self.name)
        if not self.eta > 0:
            raise ValueError(f"family radius must be positive, got {self.eta}")
        center = tuple(float(x) for x in self.center)
        if len(center) != 7:
            raise ValueError(f"center needs 7 coordinates, got {len(center)}")
        object.__setattr__(self, 'center', center)

    @property
    def definition(self) -> FamilyDefinition:
        return FAMILIES[self.name]

    @property
    def kind(self) -> FunctionalKind:
        return self.definition.kind

    @property
    def sign(self) -> int:
        return self.definition.sign

    @property
    def profile(self) -> BumpProfile:
        return BumpProfile(self.eta, self.plateau, self.cutoff)

    @property
    def ball(self) -> Domain7:
        return Domain7.ball(self.center, self.eta)

    def base_field(self) -> FormField:
        return FormField.constant(self.definition.base)

    def with_amplitude(self, amplitude: float) -> 'PerturbationFamily':
        return replace(self, amplitude=amplitude)

    def moved(self, center) -> 'PerturbationFamily':
        return replace(self, center=tuple(center))

    def to_json(self) -> dict:
        return {
            'family': self.name,
            'center': list(self.center),
            'eta': self.eta,
            'amplitude': self.amplitude,
            'bump': self.profile.to_json(),
        }


def make_family(family: PerturbationFamily) -> Tuple[FormField, FormField]:
    """(α, dα) for a placed family member."""
    alpha = FormField.radial(
        family.profile, family.center, family.definition.potential,
        coeff=family.amplitude * family.eta,
    )
    return alpha, exterior_derivative(alpha)


# -- amplitude search ----------------------------------------------------------------


@dataclass
class AmplitudeResult:
    family: str
    functional: str
    sign: int
    amplitude: float
    base_value: float
    value: float
    relative_change: float
    error: float
    trials: List[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.sign * (self.value - self.base_value) > 0

    def to_json(self) -> dict:
        return {
            'family': self.family,
            'functional': self.functional,
            'sign': '+' if self.sign > 0 else '-',
            'amplitude': self.amplitude,
            'base_value': self.base_value,
            'value': self.value,
            'relative_change': self.relative_change,
            'error': self.error,
            'passed': self.passed,
            'trials': self.trials,
        }


def optimize_amplitude(kind: FunctionalKind, base: FormField, family: PerturbationFamily,
                       t_grid: Sequence[float] = DEFAULT_AMPLITUDE_GRID,
                       spec: Optional[QuadratureSpec] = None) -> AmplitudeResult:
    """Best t in the grid for H(base + t·dα) against H(base), in the family's direction.

    ε̂ is sign·(H(base + t*·dα) - H(base)) / H(base) at the chosen t*.
    """
    spec = spec or QuadratureSpec.monte_carlo()
    domain = family.ball
    _, dalpha = make_family(family.with_amplitude(1.0))
    base_result = evaluate(kind, domain, base, spec)
    h0 = base_result.value

    trials, best = [], None
    for t in sorted(float(t) for t in t_grid):
        try:
            result = evaluate(kind, domain, base + dalpha * t, spec)
        except OrbitViolationError as e:
            logger.debug(f"{family.name}: t={t:.3e} leaves the orbit ({e})")
            trials.append({'t': t, 'in_orbit': False, 'point': list(e.point or ())})
            continue
        relative = family.sign * (result.value - h0) / h0
        trials.append({'t': t, 'in_orbit': True, 'value': result.value,
                       'relative_change': relative, 'error': result.error})
        logger.debug(f"{family.name}: t={t:.3e} H={result.value:.10e} ε={relative:.3e}")
        if relative > 0 and (best is None or relative > best[1]):
            best = (t, relative, result)

    if not any(trial['in_orbit'] for trial in trials):
        raise AmplitudeSearchError(
            f"{family.name}: no amplitude in the grid keeps the form in the {kind.orbit} orbit"
        )
    if best is None:
        raise AmplitudeSearchError(
            f"{family.name}: no amplitude in the grid moves {kind.name} in the "
            f"{'+' if family.sign > 0 else '-'} direction"
        )
    t, relative, result = best
    logger.info(f"{family.name}: chose t={t:.3e} with relative change {relative:.3e}")
    return AmplitudeResult(
        family.name, kind.name, family.sign, t, h0, result.value, relative,
        result.error + base_result.error, trials,
    )


# -- Taylor remainder ------------------------------------------------------------------


def _slope(ts: np.ndarray, values: np.ndarray) -> float:
    with np.errstate(divide='ignore'):
        logs = np.log(np.abs(values))
    if not np.all(np.isfinite(logs)):
        return float('nan')
    return float(np.polyfit(np.log(ts), logs, 1)[0])


@dataclass
class TaylorReport:
    """Remainders of H(F + tV) after the second-order Taylor polynomial.

    `signed` is the functional remainder H(F + tV) - H(F) - t²/2·D²H and
    `exponent` its log-log slope; `integrated` is ∫|pointwise remainder| with
    slope `integrated_exponent`. The check is the Taylor bound: the
    functional remainder decays at least like t³.
    """

    family: str
    functional: str
    steps: Tuple[float, ...]
    integrated: Tuple[float, ...]
    signed: Tuple[float, ...]
    exponent: float
    integrated_exponent: float
    samples: int
    expected: float = TAYLOR_EXPONENT
    tolerance: float = TAYLOR_TOLERANCE

    @property
    def passed(self) -> bool:
        return bool(self.exponent >= self.expected - self.tolerance)

    @property
    def sharp(self) -> bool:
        """The pointwise remainder is genuinely cubic."""
        return bool(abs(self.integrated_exponent - self.expected) <= self.tolerance)

    def to_json(self) -> dict:
        return {
            'family': self.family,
            'functional': self.functional,
            'steps': list(self.steps),
            'functional_remainder': [abs(r) for r in self.signed],
            'signed_remainder': list(self.signed),
            'integrated_abs_remainder': list(self.integrated),
            'exponent': self.exponent,
            'integrated_exponent': self.integrated_exponent,
            'expected': self.expected,
            'tolerance': self.tolerance,
            'samples': self.samples,
            'sharp': self.sharp,
            'passed': self.passed,
        }


def taylor_remainder(kind: FunctionalKind, base: FormField, family: PerturbationFamily,
                     t_grid: Sequence[float] = DEFAULT_TAYLOR_GRID,
                     spec: Optional[QuadratureSpec] = None) -> TaylorReport:
    """Functional and integrated pointwise Taylor remainders with their log-log slopes.

    Nodes come in antithetic pairs x, 2c - x about the family center, so odd
    terms of the remainder cancel in the functional remainder as they do in
    the exact integral. DH vanishes on exact compactly supported variations;
    subtracting its density only removes sampling noise.
    """
    spec = spec or QuadratureSpec.monte_carlo(samples=20_000)
    if not spec.stochastic:
        spec = spec.with_method(MONTE_CARLO)
    ts = np.asarray(sorted(float(t) for t in t_grid))
    _, V = make_family(family.with_amplitude(1.0))
    ball = family.ball
    center = np.asarray(family.center)

    absolute = np.zeros(len(ts))
    signed = np.zeros(len(ts))
    count = 0
    for chunk in monte_carlo_chunks(ball, spec):
        points = np.vstack([chunk, 2.0 * center - chunk])
        F = base.evaluate(points)
        dV = V.evaluate(points)
        v0 = volume_from_values(kind, F, points)
        linear = first_variation_density(kind, base, V, points)
        quadratic = hessian_density(kind, base, V, V, points)
        for i, t in enumerate(ts):
            vt = volume_from_values(kind, F + t * dV, points)
            remainder = vt - v0 - t * linear - 0.5 * t * t * quadratic
            absolute[i] += float(np.sum(np.abs(remainder)))
            signed[i] += float(np.sum(remainder))
        count += len(points)

    weight = ball.volume / count
    absolute *= weight
    signed *= weight
    exponent = _slope(ts, signed)
    integrated_exponent = _slope(ts, absolute)
    logger.info(f"{family.name}: Taylor exponents {exponent:.3f} (functional), "
                f"{integrated_exponent:.3f} (pointwise)")
    return TaylorReport(
        family.name, kind.name, tuple(ts.tolist()), tuple(absolute.tolist()),
        tuple(signed.tolist()), exponent, integrated_exponent, count,
    )


__all__ = [
    'DEFAULT_AMPLITUDE_GRID',
    'DEFAULT_TAYLOR_GRID',
    'FAMILIES',
    'LEMMA_FAMILIES',
    'AmplitudeResult',
    'FamilyDefinition',
    'PerturbationFamily',
    'TaylorReport',
    'family_definition',
    'make_family',
    'optimize_amplitude',
    'taylor_remainder',
]
