"""
quadrature/integrate.py - Integration over balls, boxes and flat tori
G2 Variational Lab

Structured integrands (RadialMonomialIntegrand) are reduced exactly to
sphere moments times 1D radial integrals. Plain callables go through
counter-based Monte Carlo on balls and boxes, or the tensor trapezoid
rule on tori.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import ceil
from typing import Callable, Dict, Iterator, Optional, Tuple, Union

import numpy as np

from errors import QuadratureError
from exterior.algebra import DIM, is_exact, to_exact
from exterior.fields import monomial_values
from exterior.profiles import BumpProfile
from quadrature.domains import (
    BALL,
    MOMENT_REDUCTION,
    MONTE_CARLO,
    TORUS,
    Domain7,
    QuadratureSpec,
)
from quadrature.moments import PI_CUBED, angular_moment, polynomial_ball_moment, radial_integral

logger = logging.getLogger(__name__)

MC_CHUNK = 65536  # samples per counter-keyed generator

Levels = Tuple[int, ...]
Monomial = Tuple[int, ...]
ScalarField = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error: float
    method: str
    evaluations: int = 0
    exact: Optional[Fraction] = None  # value / π³ when known exactly

    def __float__(self):
        return float(self.value)

    def to_json(self) -> dict:
        payload = {
            'value': float(self.value),
            'error': float(self.error),
            'method': self.method,
            'evaluations': self.evaluations,
        }
        if self.exact is not None:
            payload['exact_pi3_coefficient'] = str(self.exact)
        return payload


@dataclass(frozen=True)
class RadialMonomialIntegrand:
    """Σ coeff · Π_k u_k(|x - c|) · (x - c)^m over terms ((k, ...), m).

    A term with no levels is a plain polynomial in x - c.
    """

    profile: Optional[BumpProfile]
    center: Tuple[float, ...]
    terms: Tuple[Tuple[Tuple[Levels, Monomial], object], ...]

    @classmethod
    def build(cls, profile: Optional[BumpProfile], center,
              terms: Dict[Tuple[Levels, Monomial], object]) -> 'RadialMonomialIntegrand':
        acc: Dict[Tuple[Levels, Monomial], object] = {}
        for (levels, mono), c in terms.items():
            key = (tuple(sorted(levels)), tuple(int(e) for e in mono))
            if key in acc:
                if is_exact(acc[key]) and is_exact(c):
                    acc[key] = to_exact(acc[key]) + to_exact(c)
                else:
                    acc[key] = float(acc[key]) + float(c)
            else:
                acc[key] = c
        if profile is None and any(levels for levels, _ in acc):
            raise ValueError("radial terms need a bump profile")
        return cls(profile, tuple(float(x) for x in center),
                   tuple((k, c) for k, c in sorted(acc.items()) if c != 0))

    @classmethod
    def constant(cls, value, center=(0.0,) * DIM) -> 'RadialMonomialIntegrand':
        return cls.build(None, center, {((), (0,) * DIM): value})

    @property
    def support_radius(self) -> Optional[float]:
        if any(not levels for (levels, _), _ in self.terms):
            return None
        return self.profile.support if self.profile is not None else 0.0

    def scaled(self, factor) -> 'RadialMonomialIntegrand':
        return RadialMonomialIntegrand(
            self.profile, self.center, tuple((k, c * factor) for k, c in self.terms)
        )

    def evaluate(self, points) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        shifted = points - np.asarray(self.center)
        r = np.linalg.norm(shifted, axis=1)
        out = np.zeros(points.shape[0])
        level_cache = {}
        for (levels, mono), c in self.terms:
            values = float(c) * monomial_values(shifted, mono)
            for k in levels:
                if k not in level_cache:
                    level_cache[k] = self.profile.level(k, r)
                values = values * level_cache[k]
            out += values
        return out

    __call__ = evaluate


Integrand = Union[RadialMonomialIntegrand, ScalarField]


# -- node generation ---------------------------------------------------------------


def _generator(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=np.array([seed, chunk], dtype=np.uint64)))


def sample_domain(domain: Domain7, n: int, rng: np.random.Generator) -> np.ndarray:
    """n uniform points in the domain."""
    if domain.kind == BALL:
        directions = rng.standard_normal((n, DIM))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        radii = domain.radius * rng.random(n) ** (1.0 / DIM)
        return np.asarray(domain.center) + directions * radii[:, None]
    return np.asarray(domain.corner) + rng.random((n, DIM)) * np.asarray(domain.edges)


def monte_carlo_chunks(domain: Domain7, spec: QuadratureSpec) -> Iterator[np.ndarray]:
    """Point chunks keyed by (seed, chunk index); identical for identical specs."""
    remaining = spec.samples
    for chunk in range(ceil(spec.samples / MC_CHUNK)):
        size = min(MC_CHUNK, remaining)
        remaining -= size
        yield sample_domain(domain, size, _generator(spec.seed, chunk))


def torus_nodes(domain: Domain7, nodes: int) -> Tuple[np.ndarray, float]:
    """Tensor trapezoid grid over the active axes and the common node weight."""
    if domain.kind != TORUS:
        raise QuadratureError(f"trapezoid nodes need a torus, got a {domain.kind}")
    axes = [a - 1 for a in domain.active_axes]
    grids = [domain.corner[a] + domain.edges[a] * np.arange(nodes) / nodes for a in axes]
    mesh = np.meshgrid(*grids, indexing='ij') if grids else []
    count = nodes ** len(axes)
    points = np.tile(np.asarray(domain.corner), (count, 1))
    for a, coords in zip(axes, mesh):
        points[:, a] = coords.ravel()
    return points, domain.volume / count


# -- integration paths ---------------------------------------------------------------


def _reduce(domain: Domain7, integrand: RadialMonomialIntegrand,
            spec: QuadratureSpec) -> QuadratureResult:
    radial_method = 'adaptive' if spec.method == MOMENT_REDUCTION else 'gauss-legendre'
    total, error, evaluations = 0.0, 0.0, 0
    exact = Fraction(0)
    all_exact = True
    for (levels, mono), coeff in integrand.terms:
        angular = angular_moment(mono)
        if angular == 0:
            continue
        if not levels:
            concentric = np.allclose(domain.center, integrand.center, atol=1e-12)
            if domain.kind != BALL or not concentric:
                raise QuadratureError(
                    "polynomial terms need a ball domain centered at the integrand center"
                )
            moment = polynomial_ball_moment(mono, domain.radius)
            if is_exact(coeff):
                exact += to_exact(coeff) * moment
            else:
                all_exact = False
            total += float(coeff) * float(moment) * PI_CUBED
            continue

        if not domain.contains_ball(integrand.center, integrand.profile.support):
            raise QuadratureError(
                f"integrand support (center {integrand.center}, radius "
                f"{integrand.profile.support:.4g}) is not inside the domain"
            )
        all_exact = False
        value, err = radial_integral(
            integrand.profile, levels, sum(mono) + DIM - 1, radial_method, spec.tolerance,
            spec.nodes,
        )
        weight = float(coeff) * float(angular) * PI_CUBED
        total += weight * value
        error += abs(weight) * err
        evaluations += 1
    return QuadratureResult(total, error, spec.method, evaluations, exact if all_exact else None)


def _monte_carlo(domain: Domain7, fn: ScalarField, spec: QuadratureSpec) -> QuadratureResult:
    sums, squares = [], []
    for points in monte_carlo_chunks(domain, spec):
        values = np.asarray(fn(points), dtype=float).reshape(-1)
        sums.append(np.sum(values))
        squares.append(np.sum(values * values))
    n = spec.samples
    mean = np.sum(sums) / n
    variance = max(np.sum(squares) / n - mean * mean, 0.0) * n / max(n - 1, 1)
    volume = domain.volume
    value = volume * mean
    error = volume * np.sqrt(variance / n)
    logger.debug(f"Monte Carlo over {domain.kind}: {value:.6e} ± {error:.2e} ({n} samples)")
    return QuadratureResult(float(value), float(error), MONTE_CARLO, n)


def _trapezoid(domain: Domain7, fn: ScalarField, spec: QuadratureSpec) -> QuadratureResult:
    points, weight = torus_nodes(domain, spec.nodes)
    values = np.asarray(fn(points), dtype=float).reshape(-1)
    return QuadratureResult(float(weight * np.sum(values)), 0.0, 'trapezoid', len(values))


def integrate(domain: Domain7, integrand: Integrand, spec: QuadratureSpec) -> QuadratureResult:
    """∫_D F with an error estimate (standard error for Monte Carlo)."""
    structured = isinstance(integrand, RadialMonomialIntegrand)
    if spec.method == MONTE_CARLO:
        fn = integrand.evaluate if structured else integrand
        return _monte_carlo(domain, fn, spec)
    if structured:
        return _reduce(domain, integrand, spec)
    if domain.kind == TORUS:
        return _trapezoid(domain, integrand, spec)
    raise QuadratureError(
        f"{spec.method} needs a structured radial×monomial integrand; use monte-carlo for "
        f"plain callables"
    )


__all__ = [
    'MC_CHUNK',
    'QuadratureResult',
    'RadialMonomialIntegrand',
    'integrate',
    'monte_carlo_chunks',
    'sample_domain',
    'torus_nodes',
]
