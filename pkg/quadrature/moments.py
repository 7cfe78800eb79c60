"""
quadrature/moments.py - Sphere moments and radial integrals
G2 Variational Lab

Angular moments of monomials over the unit 6-sphere are returned as the
exact rational coefficient of π³; radial integrals of products of bump
profile levels are done on the transition band only, since every level
is constant on the plateau and zero past the cutoff.
"""

import logging
from fractions import Fraction
from functools import lru_cache
from math import factorial, pi
from typing import Sequence, Tuple

import numpy as np
from scipy.integrate import quad
from scipy.special import roots_legendre

from exterior.algebra import DIM
from exterior.profiles import BumpProfile

logger = logging.getLogger(__name__)

PI_CUBED = pi ** 3

SPHERE_AREA = Fraction(16, 15)   # Area(S^6) / π³
BALL_VOLUME = Fraction(16, 105)  # Vol(B^7) / π³

QUAD_LIMIT = 200


def _half_gamma(k: int) -> Fraction:
    """Γ(k + 1/2) / √π."""
    return Fraction(factorial(2 * k), 4 ** k * factorial(k))


@lru_cache(maxsize=4096)
def _moment(exponents: Tuple[int, ...]) -> Fraction:
    if any(e % 2 for e in exponents):
        return Fraction(0)
    halves = [e // 2 for e in exponents]
    numerator = Fraction(2)
    for k in halves:
        numerator *= _half_gamma(k)
    # Γ(|m|/2 + 7/2) = Γ((K + 3) + 1/2)
    return numerator / _half_gamma(sum(halves) + 3)


def angular_moment(exponents: Sequence[int]) -> Fraction:
    """∫_{S^6} x^m dA as a rational multiple of π³."""
    exponents = tuple(int(e) for e in exponents)
    if len(exponents) != DIM:
        raise ValueError(f"monomial needs {DIM} exponents, got {len(exponents)}")
    if any(e < 0 for e in exponents):
        raise ValueError(f"exponents must be nonnegative, got {exponents}")
    return _moment(exponents)


def sphere_area_coefficient(eta=1) -> Fraction:
    return SPHERE_AREA * Fraction(eta) ** 6


def ball_volume_coefficient(eta=1) -> Fraction:
    return BALL_VOLUME * Fraction(eta) ** 7


def sphere_area(eta: float = 1.0) -> float:
    return float(sphere_area_coefficient(eta)) * PI_CUBED


def ball_volume(eta: float = 1.0) -> float:
    return float(ball_volume_coefficient(eta)) * PI_CUBED


def polynomial_ball_moment(exponents: Sequence[int], radius: float) -> Fraction:
    """∫_{|y| <= R} y^m dy / π³, exact for rational R."""
    degree = sum(exponents)
    return angular_moment(exponents) * Fraction(radius) ** (degree + DIM) / (degree + DIM)


def _integrand(profile: BumpProfile, levels: Tuple[int, ...], power: int):
    def evaluate(r):
        value = np.asarray(r, dtype=float) ** power
        for k in levels:
            value = value * profile.level(k, r)
        return value

    return evaluate


def _gauss_legendre(fn, lo: float, hi: float, nodes: int) -> float:
    x, w = roots_legendre(nodes)
    half = 0.5 * (hi - lo)
    return float(half * np.sum(w * fn(lo + half * (x + 1.0))))


@lru_cache(maxsize=4096)
def radial_integral(profile: BumpProfile, levels: Tuple[int, ...], power: int,
                    method: str = 'adaptive', tolerance: float = 1e-10,
                    nodes: int = 64) -> Tuple[float, float]:
    """∫_0^∞ Π_k u_k(r) r^power dr as (value, error estimate).

    method 'adaptive' uses scipy's QUADPACK with relative tolerance;
    'gauss-legendre' applies a fixed rule with the given node count.
    """
    if not levels:
        raise ValueError("radial integral needs at least one profile level")
    lo, hi = profile.breakpoints
    plateau = 0.0
    if all(k == 0 for k in levels):
        plateau = lo ** (power + 1) / (power + 1)
    fn = _integrand(profile, tuple(levels), power)

    if method == 'adaptive':
        band, error = quad(lambda r: float(fn(r)), lo, hi, epsabs=0.0, epsrel=tolerance,
                           limit=QUAD_LIMIT)
    elif method == 'gauss-legendre':
        band = _gauss_legendre(fn, lo, hi, nodes)
        error = abs(band - _gauss_legendre(fn, lo, hi, max(2, nodes // 2)))
    else:
        raise ValueError(f"unknown radial method '{method}'")
    logger.debug(f"radial integral levels={levels} power={power}: {plateau + band:.6e}")
    return plateau + band, error
