# tests/unit/test_exterior.py - Exterior algebra and form field tests
"""
Unit tests for constant forms, form literals, bump profiles and form fields.

Tests cover:
- Wedge and interior products with exact coefficients
- Graded anticommutativity and the derivation rule of the interior product
- Pullback and compound matrices
- Form literal parsing and formatting
- Bump profile plateau, cutoff and derivative
- Structured form fields and their exterior derivative
"""

from fractions import Fraction
from math import comb

import numpy as np
import pytest

from errors import FormLiteralError, InteriorProductError, NonDifferentiableFieldError
from exterior.algebra import (
    ConstForm,
    compound_matrix,
    interior,
    pullback,
    unit_vector,
    wedge,
)
from exterior.fields import FormField, exterior_derivative
from exterior.literals import format_form, parse_form
from exterior.models import PHI0, PSI0, VOL0
from exterior.profiles import BumpProfile

DX1 = ConstForm.basis_form((1,))
DX2 = ConstForm.basis_form((2,))
DX12 = ConstForm.basis_form((1, 2))


@pytest.mark.unit
class TestConstForm:
    """Tests for constant form arithmetic."""

    def test_unsorted_index_picks_up_sign(self):
        """Test that from_terms reorders indices with the permutation sign."""
        assert ConstForm.from_terms(2, {(2, 1): 1}) == DX12 * -1

    def test_wedge_is_graded_commutative(self):
        """Test that dx1 ^ dx2 = -dx2 ^ dx1."""
        assert wedge(DX1, DX2) == DX12
        assert wedge(DX2, DX1) == DX12 * -1

    def test_wedge_above_top_degree_is_zero(self):
        """Test that a wedge past degree 7 gives the zero 7-form."""
        result = wedge(PSI0, PSI0)
        assert result.grade == 7
        assert result.is_zero()

    def test_phi_wedge_psi_is_seven_times_volume(self):
        """Test that φ0 ^ ψ0 = 7 vol0 exactly."""
        assert wedge(PHI0, PSI0) == VOL0 * 7

    def test_interior_product(self):
        """Test contraction of dx12 with the first two basis vectors."""
        assert interior(unit_vector(1), DX12) == DX2
        assert interior(unit_vector(2), DX12) == DX1 * -1

    def test_interior_of_scalar_raises(self):
        """Test that contracting a 0-form raises InteriorProductError."""
        with pytest.raises(InteriorProductError):
            interior(unit_vector(1), ConstForm.scalar(1))

    def test_exact_arithmetic_stays_exact(self):
        """Test that rational coefficients survive addition and scaling."""
        form = DX12 * Fraction(1, 3) + DX12 * Fraction(2, 3)
        assert form.exact
        assert form == DX12

    def test_mixed_grades_cannot_be_added(self):
        """Test that adding forms of different grades raises."""
        with pytest.raises(ValueError):
            DX1 + DX12

    def test_json_round_trip(self):
        """Test that to_json/from_json preserves an exact form."""
        assert ConstForm.from_json(PHI0.to_json()) == PHI0


def _random_form(p, rng):
    return ConstForm.from_array(p, rng.standard_normal(comb(7, p)))


@pytest.mark.unit
class TestAlgebraLaws:
    """Tests for wedge and interior identities on random forms."""

    @pytest.mark.parametrize('p,q', [(1, 1), (1, 2), (2, 2), (2, 3), (3, 1), (3, 4)])
    def test_graded_anticommutativity(self, p, q):
        """Test a ^ b = (-1)^(pq) b ^ a."""
        rng = np.random.default_rng(10 * p + q)
        a, b = _random_form(p, rng), _random_form(q, rng)
        assert wedge(a, b).allclose(wedge(b, a) * (-1) ** (p * q))

    @pytest.mark.parametrize('p,q', [(1, 1), (1, 2), (2, 2), (2, 3), (3, 1), (3, 4)])
    def test_interior_is_a_graded_derivation(self, p, q):
        """Test v ⌟ (a ^ b) = (v ⌟ a) ^ b + (-1)^p a ^ (v ⌟ b)."""
        rng = np.random.default_rng(100 + 10 * p + q)
        a, b = _random_form(p, rng), _random_form(q, rng)
        v = tuple(rng.standard_normal(7))
        left = interior(v, wedge(a, b))
        right = wedge(interior(v, a), b) + wedge(a, interior(v, b)) * (-1) ** p
        assert left.allclose(right)

    def test_derivation_rule_exact(self):
        """Test the derivation rule on φ0 and dx12 with a rational vector."""
        v = (Fraction(1, 2), 0, 3, 0, 0, -1, 0)
        left = interior(v, wedge(PHI0, DX12))
        right = wedge(interior(v, PHI0), DX12) - wedge(PHI0, interior(v, DX12))
        assert left == right


@pytest.mark.unit
class TestPullback:
    """Tests for pullback under linear maps."""

    def test_compound_of_identity_is_identity(self):
        """Test that the p-th compound of the identity is the identity."""
        M = compound_matrix(np.eye(7), 3)
        assert np.allclose(M, np.eye(35))

    def test_swap_reverses_orientation(self):
        """Test that swapping x1 and x2 negates dx12."""
        swap = [[int(j == {0: 1, 1: 0}.get(i, i)) for j in range(7)] for i in range(7)]
        assert pullback(swap, DX12) == DX12 * -1

    def test_scaling_multiplies_by_power(self):
        """Test that (λI)* scales a p-form by λ^p."""
        scale = [[2 * int(i == j) for j in range(7)] for i in range(7)]
        assert pullback(scale, PHI0) == PHI0 * 8

    def test_float_pullback_matches_exact(self):
        """Test that a float matrix gives the same result numerically."""
        A = np.diag([1.0, 2.0, 1.0, 1.0, 1.0, 1.0, 1.0])
        result = pullback(A, PHI0)
        assert not result.exact
        assert result.allclose(pullback(A.astype(int).tolist(), PHI0))


@pytest.mark.unit
class TestLiterals:
    """Tests for parsing and formatting form literals."""

    def test_parse_exact_literal(self):
        """Test a two-term rational literal."""
        form = parse_form('2*dx[1,2] - 1/3*dx[3,4]')
        assert form.exact
        assert form[(1, 2)] == 2
        assert form[(3, 4)] == Fraction(-1, 3)

    def test_parse_reordered_axes(self):
        """Test that dx[2,1] means -dx12."""
        assert parse_form('dx[2,1]') == DX12 * -1

    def test_parse_decimal_is_numeric(self):
        """Test that a decimal coefficient yields a float form."""
        assert not parse_form('0.5*dx[1,2]').exact

    def test_parse_named_fixture(self):
        """Test a scaled named fixture."""
        assert parse_form('8*phi0') == PHI0 * 8
        assert parse_form('psi0') == PSI0

    @pytest.mark.parametrize('text', [
        '', 'dx[1,1]', 'dx[1,8]', 'dx[1] + dx[1,2]', 'dx[1,2] dx[3,4]',
    ])
    def test_invalid_literals_raise(self, text):
        """Test that malformed literals raise FormLiteralError."""
        with pytest.raises(FormLiteralError):
            parse_form(text)

    def test_format_parses_back(self):
        """Test that format_form output parses to the same form."""
        assert parse_form(format_form(PHI0)) == PHI0


@pytest.mark.unit
class TestBumpProfile:
    """Tests for the smooth radial cutoff."""

    def test_plateau_and_cutoff(self):
        """Test f = 1 inside the plateau and 0 past the cutoff."""
        profile = BumpProfile(1.0)
        values = profile(np.array([0.0, 0.2, 0.85, 2.0]))
        assert np.allclose(values, [1.0, 1.0, 0.0, 0.0])

    def test_values_in_band_are_between_zero_and_one(self):
        """Test monotone decay across the transition band."""
        profile = BumpProfile(1.0)
        r = np.linspace(0.35, 0.75, 25)
        values = profile(r)
        assert np.all((values > 0) & (values < 1))
        assert np.all(np.diff(values) < 0)

    def test_derivative_matches_difference_quotient(self):
        """Test f'(r) against a central difference."""
        profile = BumpProfile(1.0)
        r, h = 0.55, 1e-6
        fd = (profile(r + h) - profile(r - h)) / (2 * h)
        assert abs(float(profile.derivative(r)) - float(fd)) < 1e-6

    def test_scaled_profile(self):
        """Test that scaled(λ) is r -> f(λr)."""
        profile = BumpProfile(1.0)
        scaled = profile.scaled(2.0)
        assert scaled.eta == 0.5
        assert np.isclose(float(scaled(0.25)), float(profile(0.5)))

    def test_invalid_breakpoints_raise(self):
        """Test that plateau must lie below cutoff."""
        with pytest.raises(ValueError):
            BumpProfile(1.0, plateau=0.9, cutoff=0.5)


@pytest.mark.unit
class TestFormField:
    """Tests for structured form fields."""

    def test_polynomial_derivative(self):
        """Test d(x1 dx2) = dx12."""
        F = FormField.polynomial(1, {((1, 0, 0, 0, 0, 0, 0), (2,)): 1})
        dF = exterior_derivative(F)
        assert dF.constant_form() == DX12

    def test_derivative_of_radial_field_is_closed(self):
        """Test d(d(f·dx12)) vanishes term by term."""
        alpha = FormField.radial(BumpProfile(1.0), (0.0,) * 7, DX12)
        ddalpha = exterior_derivative(exterior_derivative(alpha))
        assert ddalpha.max_abs_coefficient() == 0.0

    def test_radial_field_support(self):
        """Test that a radial field vanishes outside its cutoff radius."""
        center = (1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
        alpha = FormField.radial(BumpProfile(0.5), center, DX12)
        assert alpha.support == (center, 0.4)
        outside = np.array([[1.5, 0, 0, 0, 0, 0, 0]], dtype=float)
        assert np.all(alpha.evaluate(outside) == 0.0)

    def test_radial_derivative_matches_finite_difference(self):
        """Test the structured derivative against the finite-difference path."""
        alpha = FormField.radial(BumpProfile(1.0), (0.0,) * 7, DX12)
        numeric = FormField.from_callable(2, alpha.evaluate, support_center=(0.0,) * 7,
                                          support_radius=0.8, fd_step=1e-5)
        points = np.random.default_rng(3).uniform(-0.5, 0.5, size=(50, 7))
        exact = exterior_derivative(alpha).evaluate(points)
        approx = exterior_derivative(numeric).evaluate(points)
        assert np.max(np.abs(exact - approx)) < 1e-6

    def test_callable_without_step_is_not_differentiable(self):
        """Test that a plain callable field refuses d."""
        F = FormField.from_callable(2, lambda pts: np.zeros((len(pts), 21)))
        with pytest.raises(NonDifferentiableFieldError):
            exterior_derivative(F)

    def test_constant_split(self):
        """Test splitting ψ0 + dα into its constant and perturbation parts."""
        alpha = FormField.radial(BumpProfile(1.0), (0.0,) * 7, ConstForm.basis_form((1, 2, 3)))
        field = FormField.constant(PSI0) + exterior_derivative(alpha)
        base, rest = field.split_constant()
        assert base == PSI0
        assert rest.support[1] == pytest.approx(0.8)
