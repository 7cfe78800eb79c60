# tests/unit/test_quadrature.py - Quadrature tests
"""
Unit tests for integration over 7-dimensional domains.

Tests cover:
- Closed-form ball volumes and sphere moments
- Exact reduction of radial×monomial integrands
- Agreement between moment reduction, Gauss-Legendre and Monte Carlo
- Trapezoid rule on flat tori
- Domain and spec validation
"""

from fractions import Fraction
from math import pi

import numpy as np
import pytest

from errors import QuadratureError
from exterior.profiles import BumpProfile
from quadrature import (
    Domain7,
    QuadratureSpec,
    RadialMonomialIntegrand,
    angular_moment,
    ball_volume,
    ball_volume_coefficient,
    integrate,
    sphere_area,
)

ORIGIN = (0.0,) * 7
X1_SQUARED = (2, 0, 0, 0, 0, 0, 0)


def _bump_integrand(eta=1.0, center=ORIGIN):
    """f(|x - c|) as a structured integrand."""
    return RadialMonomialIntegrand.build(BumpProfile(eta), center, {((0,), (0,) * 7): 1})


@pytest.mark.unit
class TestMoments:
    """Tests for closed-form sphere and ball integrals."""

    def test_unit_ball_volume(self):
        """Test Vol(B^7) = 16π³/105."""
        assert ball_volume_coefficient(1) == Fraction(16, 105)
        assert ball_volume() == pytest.approx(16 * pi ** 3 / 105, rel=1e-15)

    def test_sphere_area(self):
        """Test Area(S^6) = 16π³/15."""
        assert sphere_area() == pytest.approx(16 * pi ** 3 / 15, rel=1e-15)

    def test_volume_scales_with_seventh_power(self):
        """Test Vol(B_η) = η^7 Vol(B)."""
        assert ball_volume(2.0) == pytest.approx(128 * ball_volume(), rel=1e-15)

    def test_angular_moments(self):
        """Test ∫ x1² over S^6 and a vanishing odd moment."""
        assert angular_moment(X1_SQUARED) == Fraction(16, 105)
        assert angular_moment((1, 0, 0, 0, 0, 0, 0)) == 0
        assert angular_moment((0,) * 7) == Fraction(16, 15)

    def test_bad_monomial_raises(self):
        """Test that a monomial needs seven nonnegative exponents."""
        with pytest.raises(ValueError):
            angular_moment((2, 0))
        with pytest.raises(ValueError):
            angular_moment((-1, 0, 0, 0, 0, 0, 0))


@pytest.mark.unit
class TestIntegrate:
    """Tests for the integrate() dispatcher."""

    def test_constant_is_exact(self, moment_spec):
        """Test that ∫_B 1 is reported as an exact multiple of π³."""
        result = integrate(Domain7.ball(), RadialMonomialIntegrand.constant(1), moment_spec)
        assert result.exact == Fraction(16, 105)
        assert result.value == pytest.approx(ball_volume(), rel=1e-15)

    def test_polynomial_moment(self, moment_spec):
        """Test ∫_B x1² = 16π³/945 via the exact reduction."""
        integrand = RadialMonomialIntegrand.build(None, ORIGIN, {((), X1_SQUARED): 1})
        result = integrate(Domain7.ball(), integrand, moment_spec)
        assert result.exact == Fraction(16, 105) / 9

    def test_reduction_matches_gauss_legendre(self, moment_spec):
        """Test the adaptive and fixed-node radial rules agree."""
        integrand = _bump_integrand()
        adaptive = integrate(Domain7.ball(), integrand, moment_spec)
        fixed = integrate(Domain7.ball(), integrand, QuadratureSpec.radial_1d(64))
        assert fixed.value == pytest.approx(adaptive.value, rel=1e-4)

    def test_reduction_matches_monte_carlo(self, moment_spec, mc_spec):
        """Test Monte Carlo against the reduction within five standard errors."""
        integrand = _bump_integrand()
        reference = integrate(Domain7.ball(), integrand, moment_spec)
        sampled = integrate(Domain7.ball(), integrand, mc_spec)
        assert abs(sampled.value - reference.value) <= 5 * sampled.error

    def test_bump_lies_between_plateau_and_support_volumes(self, moment_spec):
        """Test Vol(B_0.3) < ∫ f < Vol(B_0.8)."""
        value = integrate(Domain7.ball(), _bump_integrand(), moment_spec).value
        assert ball_volume(0.3) < value < ball_volume(0.8)

    def test_monte_carlo_is_reproducible(self, mc_spec):
        """Test that identical specs give identical samples."""
        integrand = _bump_integrand()
        first = integrate(Domain7.ball(), integrand, mc_spec)
        second = integrate(Domain7.ball(), integrand, mc_spec)
        other = integrate(Domain7.ball(), integrand, QuadratureSpec.monte_carlo(20_000, seed=8))
        assert first.value == second.value
        assert first.value != other.value

    def test_monte_carlo_of_constant(self, mc_spec):
        """Test that a constant integrand has zero sampling error."""
        result = integrate(Domain7.ball(), lambda pts: np.ones(len(pts)), mc_spec)
        assert result.value == pytest.approx(ball_volume(), rel=1e-12)
        assert result.error == 0.0

    def test_support_outside_domain_raises(self, moment_spec):
        """Test that a bump sticking out of the ball is rejected."""
        integrand = _bump_integrand(center=(0.5, 0, 0, 0, 0, 0, 0))
        with pytest.raises(QuadratureError):
            integrate(Domain7.ball(), integrand, moment_spec)

    def test_plain_callable_needs_monte_carlo(self, moment_spec):
        """Test that moment reduction refuses an unstructured integrand on a ball."""
        with pytest.raises(QuadratureError):
            integrate(Domain7.ball(), lambda pts: np.ones(len(pts)), moment_spec)

    def test_torus_trapezoid(self, moment_spec):
        """Test the trapezoid rule on a periodic function."""
        torus = Domain7.torus((1.0,) * 7, active_axes=(1,))
        spec = QuadratureSpec(nodes=8)
        wave = integrate(torus, lambda pts: np.cos(2 * pi * pts[:, 0]), spec)
        unit = integrate(torus, lambda pts: np.ones(len(pts)), spec)
        assert abs(wave.value) < 1e-12
        assert unit.value == pytest.approx(1.0)


@pytest.mark.unit
class TestValidation:
    """Tests for domain and spec validation."""

    def test_unknown_method(self):
        """Test that an unknown quadrature method raises ValueError."""
        with pytest.raises(ValueError):
            QuadratureSpec('simpson')

    def test_nonpositive_samples(self):
        """Test that Monte Carlo needs at least one sample."""
        with pytest.raises(ValueError):
            QuadratureSpec.monte_carlo(samples=0)

    def test_nonpositive_radius(self):
        """Test that a ball needs a positive radius."""
        with pytest.raises(ValueError):
            Domain7.ball(radius=0.0)

    def test_contains_ball(self):
        """Test ball-in-ball containment."""
        domain = Domain7.ball()
        assert domain.contains_ball(ORIGIN, 1.0)
        assert not domain.contains_ball((0.5, 0, 0, 0, 0, 0, 0), 0.6)
