# tests/unit/test_perturbations.py - Perturbation family tests
"""
Unit tests for perturbation families and the constructions built on them.

Tests cover:
- Family placement and exactness of dα
- Amplitude search and the Taylor remainder
- Rescaling, invariance of relative changes and the flat-ball sandwich
- Radial homotopy primitives and gluing to the model form
- Saddle Gram matrices on disjoint bumps
- Packings, ν resolution and the unboundedness iteration
"""

import numpy as np
import pytest

from errors import (
    AmplitudeSearchError,
    ClosednessError,
    CoverageError,
    GlueError,
    PackingError,
)
from exterior.fields import FormField, exterior_derivative
from exterior.models import PHI0, PSI0
from functionals import H4
from perturbations import (
    FAMILIES,
    LEMMA_FAMILIES,
    PACKINGS,
    Packing,
    PerturbationFamily,
    glue_to_standard,
    hausdorff_sandwich,
    line_bumps,
    make_family,
    optimize_amplitude,
    poincare_primitive,
    rescale,
    rescaling_invariance,
    saddle_gram,
    sign_threshold,
    taylor_remainder,
    unbounded_iterate,
)
from perturbations.families import TaylorReport
from perturbations.unbounded import UnboundedResult, free_subcubes, nu_bound, resolve_nu
from quadrature import Domain7

SMALL_GRID = (1e-2, 3e-2, 1e-1)


def _x1_times(form_index, coeff=1.0):
    """coeff · x1 · dx^I as a polynomial field."""
    return FormField.polynomial(len(form_index),
                                {((1, 0, 0, 0, 0, 0, 0), form_index): coeff})


@pytest.mark.unit
class TestFamilies:
    """Tests for family definitions and placement."""

    def test_seven_families_in_four_groups(self):
        """Test the family table and its grouping."""
        assert len(FAMILIES) == 7
        grouped = [name for names in LEMMA_FAMILIES.values() for name in names]
        assert sorted(grouped) == sorted(FAMILIES)

    def test_unknown_family(self):
        """Test that an unknown family name raises ValueError."""
        with pytest.raises(ValueError):
            PerturbationFamily('Q7+')

    def test_nonpositive_radius(self):
        """Test that η must be positive."""
        with pytest.raises(ValueError):
            PerturbationFamily('P0+', eta=0.0)

    @pytest.mark.parametrize('name', sorted(FAMILIES))
    def test_variation_is_closed(self, name):
        """Test d(dα) = 0 term by term."""
        _, dalpha = make_family(PerturbationFamily(name))
        assert exterior_derivative(dalpha).max_abs_coefficient() == 0.0

    def test_support_follows_center_and_radius(self):
        """Test that dα is supported in the cutoff ball of the member."""
        family = PerturbationFamily('CH-', center=(1, 2, 0, 0, 0, 0, 0), eta=0.5)
        _, dalpha = make_family(family)
        center, radius = dalpha.support
        assert center == (1.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0)
        assert radius == pytest.approx(0.4)


@pytest.mark.unit
class TestAmplitudeSearch:
    """Tests for optimize_amplitude and taylor_remainder."""

    def test_plus_family_increases_functional(self, mc_spec):
        """Test that P0+ finds an amplitude with a positive relative change."""
        family = PerturbationFamily('P0+')
        result = optimize_amplitude(H4, family.base_field(), family, SMALL_GRID, mc_spec)
        assert result.passed
        assert result.amplitude in SMALL_GRID
        assert result.relative_change > 0

    def test_minus_family_decreases_functional(self, mc_spec):
        """Test that P0- finds an amplitude lowering H4."""
        family = PerturbationFamily('P0-')
        result = optimize_amplitude(H4, family.base_field(), family, SMALL_GRID, mc_spec)
        assert result.passed
        assert result.value < result.base_value

    def test_empty_grid_raises(self, mc_spec):
        """Test that a search without amplitudes raises AmplitudeSearchError."""
        family = PerturbationFamily('P0+')
        with pytest.raises(AmplitudeSearchError):
            optimize_amplitude(H4, family.base_field(), family, (), mc_spec)

    @pytest.mark.slow
    def test_taylor_remainder_is_cubic(self, mc_spec):
        """Test that the pointwise remainder of CH- decays like t³."""
        family = PerturbationFamily('CH-')
        report = taylor_remainder(family.kind, family.base_field(), family, spec=mc_spec)
        assert report.sharp, report.integrated_exponent
        assert report.passed, report.exponent

    @pytest.mark.slow
    @pytest.mark.parametrize('name', sorted(FAMILIES))
    def test_functional_remainder_is_third_order(self, name, mc_spec):
        """Test |H(F + tV) - H(F) - t²/2·D²H| = O(t³) for every family."""
        family = PerturbationFamily(name)
        report = taylor_remainder(family.kind, family.base_field(), family, spec=mc_spec)
        assert report.passed, report.to_json()
        remainders = report.to_json()['functional_remainder']
        assert remainders[0] < remainders[-1]

    def test_taylor_verdict_is_a_lower_bound(self):
        """Test that the check accepts faster decay and rejects slower decay."""
        def taylor(exponent):
            return TaylorReport('P0+', 'H4', (1e-3, 1e-2), (1.0, 1.0), (1.0, 1.0), exponent,
                                4.0, 100)

        assert taylor(4.0).passed
        assert taylor(2.85).passed
        assert not taylor(2.5).passed
        assert not taylor(float('nan')).passed
        assert not taylor(4.0).sharp


@pytest.mark.unit
class TestRescale:
    """Tests for rescaling and the flat-ball sandwich."""

    def test_unit_factor_is_identity(self):
        """Test rescale(F, 1) is F."""
        field = FormField.constant(PSI0)
        assert rescale(field, 1.0) is field

    def test_nonpositive_factor(self):
        """Test that the rescaling factor must be positive."""
        with pytest.raises(ValueError):
            rescale(FormField.constant(PSI0), 0.0)

    def test_small_bump_rescales_to_unit_bump(self):
        """Test that rescaling a radius-η bump by η gives the unit bump."""
        _, small = make_family(PerturbationFamily('P0-', eta=0.5))
        _, unit = make_family(PerturbationFamily('P0-'))
        points = np.random.default_rng(5).uniform(-0.6, 0.6, size=(64, 7))
        assert np.allclose(rescale(small, 0.5).evaluate(points), unit.evaluate(points))

    def test_constant_field_has_trivial_sandwich(self):
        """Test that the flat model needs no slack."""
        report = hausdorff_sandwich(FormField.constant(PHI0), 0.5, samples=512)
        assert report.radius == pytest.approx(0.0, abs=1e-12)
        assert report.valid

    def test_scaled_model_sandwich(self):
        """Test r = 1 - 2^(-1/3) for 2φ0."""
        report = hausdorff_sandwich(FormField.constant(PHI0 * 2), 0.5, samples=512)
        assert report.radius == pytest.approx(1.0 - 2.0 ** (-1.0 / 3.0), rel=1e-9)

    def test_relative_change_is_scale_invariant(self, mc_spec):
        """Test that (η, F, β) and (λ^(1/4)η, λF, λβ) give the same relative change."""
        family = PerturbationFamily('P0-', amplitude=0.05)
        result = rescaling_invariance(family, 16.0, mc_spec)
        assert result['passed'], result['relative_difference']
        assert result['metric_radius'] == pytest.approx(2.0)

    def test_sign_threshold_on_flat_base(self, mc_spec):
        """Test that a flat base keeps the family sign at every radius."""
        family = PerturbationFamily('P0-')
        report = sign_threshold(family.base_field(), family, (0.25, 1.0), mc_spec)
        assert report['passed']
        assert report['threshold'] == 1.0


@pytest.mark.unit
class TestPrimitive:
    """Tests for poincare_primitive and glue_to_standard."""

    def test_constant_form_primitive(self):
        """Test dϖ = dx1234 with linear growth."""
        W = FormField.polynomial(4, {((0,) * 7, (1, 2, 3, 4)): 1})
        report = poincare_primitive(W, samples=512)
        assert report.exact
        assert report.residual == 0.0
        assert not report.vanishes_at_origin
        assert report.exponent == pytest.approx(1.0, abs=1e-9)

    def test_vanishing_form_has_quadratic_primitive(self):
        """Test that x1 dx1234 has a primitive of order |x|²."""
        report = poincare_primitive(_x1_times((1, 2, 3, 4)), samples=512)
        assert report.vanishes_at_origin
        assert report.quadratic_bound
        assert report.exponent == pytest.approx(2.0, abs=1e-9)

    def test_non_closed_input_raises(self):
        """Test that x1 dx2345 is rejected."""
        with pytest.raises(ClosednessError):
            poincare_primitive(_x1_times((2, 3, 4, 5)), samples=512)

    def test_glue_reaches_model_on_inner_ball(self):
        """Test gluing ψ0 + 0.2·x1·dx1234 to ψ0 near the origin."""
        psi_prime = FormField.constant(PSI0) + _x1_times((1, 2, 3, 4), 0.2)
        result = glue_to_standard(psi_prime, 1e-2, samples=512)
        assert result.deviation < 1e-2
        assert result.agreement <= 1e-10

    def test_glue_needs_agreement_at_origin(self):
        """Test that a form away from ψ0 at the origin cannot be glued."""
        psi_prime = FormField.constant(PSI0 * 2)
        with pytest.raises(GlueError):
            glue_to_standard(psi_prime, 1e-2, samples=512)


@pytest.mark.unit
class TestSaddle:
    """Tests for the Gram matrix on disjoint bumps."""

    @pytest.mark.parametrize('name,verdict', [
        ('P0+', 'positive-definite'), ('P0-', 'negative-definite'),
    ])
    def test_line_bumps_are_definite(self, name, verdict, moment_spec):
        """Test a diagonal definite Gram matrix for three disjoint bumps."""
        bumps = line_bumps(name, 3)
        report = saddle_gram(bumps[0].base_field(), bumps, moment_spec)
        assert report.verdict == verdict
        assert report.off_diagonal == 0.0
        assert report.passed

    def test_overlapping_bumps_raise(self, moment_spec):
        """Test that bumps closer than η + η are rejected."""
        bumps = [PerturbationFamily('P0-'),
                 PerturbationFamily('P0-', center=(1.0, 0, 0, 0, 0, 0, 0))]
        with pytest.raises(PackingError):
            saddle_gram(bumps[0].base_field(), bumps, moment_spec)

    def test_empty_bump_list(self):
        """Test that at least one bump is required."""
        with pytest.raises(ValueError):
            saddle_gram(FormField.constant(PSI0), [])


@pytest.mark.unit
class TestPackings:
    """Tests for packings and ν."""

    def test_named_packings(self):
        """Test top-level ball counts and validity of the named packings."""
        assert {name: p.level_count(0) for name, p in PACKINGS.items()} == {
            'single': 1, 'grid-64': 64, 'grid-128': 128, 'nested-1': 1, 'nested-64': 64}
        assert PACKINGS['grid-64'].count == 64
        for p in PACKINGS.values():
            p.validate()

    def test_free_subcubes_closed_form(self):
        """Test the subcube counts for small subdivisions by hand.

        m = 4: a subcube meets the ball iff at most three offsets are 1,
        so 128·(1 + 7 + 21 + 35) of the 4^7 subcubes meet it.
        """
        assert free_subcubes(2) == 0
        assert free_subcubes(4) == 4 ** 7 - 128 * 64
        assert free_subcubes(6) == 6 ** 7 - 128 * 548

    def test_free_subcubes_match_enumeration(self):
        """Test the convolution count against every subcube of a 4^7 cut of [-1, 1]^7."""
        m = 4
        lower = -1.0 + 2.0 * np.indices((m,) * 7).reshape(7, -1).T / m
        nearest = np.clip(0.0, lower, lower + 2.0 / m)
        free = int(np.sum(np.sum(nearest ** 2, axis=1) >= 1.0))
        assert free == free_subcubes(m)

    @pytest.mark.parametrize('m', [0, 3, 5])
    def test_bad_subdivision(self, m):
        """Test that the subdivision must be even and at least 2."""
        with pytest.raises(PackingError):
            free_subcubes(m)

    @pytest.mark.parametrize('name', ['nested-1', 'nested-64'])
    def test_nested_packings_cover_ninety_percent(self, name):
        """Test that the nested presets admit ν = 0.1."""
        pack = PACKINGS[name]
        assert 0.9 <= pack.covered_fraction < 1.0
        assert resolve_nu(0.1, pack) == 0.1
        assert pack.to_json()['log10_balls'] > 100

    def test_single_scale_packings_cover_little(self):
        """Test that one ball per cell leaves most of the box uncovered."""
        with pytest.raises(CoverageError) as excinfo:
            resolve_nu(0.1, PACKINGS['grid-128'])
        assert excinfo.value.deficit == pytest.approx(
            0.9 - PACKINGS['grid-128'].covered_fraction)

    def test_level_fractions_are_geometric(self):
        """Test that each level covers the free share of the one above."""
        pack = PACKINGS['nested-1']
        fractions = pack.level_fractions()
        assert len(fractions) == pack.depth
        assert fractions[1] / fractions[0] == pytest.approx(pack.free_ratio)
        assert pack.level_radius(2) == pytest.approx(1.0 / 720 ** 2)

    def test_auto_nu_is_uncovered_fraction(self):
        """Test ν = 1 - covered fraction for 'auto'."""
        pack = PACKINGS['grid-64']
        assert resolve_nu('auto', pack) == pytest.approx(1.0 - pack.covered_fraction)

    def test_nu_out_of_range(self):
        """Test that ν must lie in [0, 1)."""
        with pytest.raises(ValueError):
            resolve_nu(1.0, PACKINGS['single'])

    def test_insufficient_coverage(self):
        """Test that a small ν needs more coverage than a grid of balls has."""
        with pytest.raises(CoverageError):
            resolve_nu(0.5, PACKINGS['single'])

    def test_overlapping_balls_raise(self):
        """Test that validate() rejects overlapping balls."""
        pack = Packing('bad', Domain7.box((0.0,) * 7, (4.0,) * 7),
                       ((1.0,) * 7, (1.5,) + (1.0,) * 6), 0.5)
        with pytest.raises(PackingError):
            pack.validate()

    def test_overlapping_nested_cubes_raise(self):
        """Test that disjoint balls in overlapping cubes are rejected when nested."""
        centers = ((1.0,) * 7, (2.9, 2.9) + (1.0,) * 5)
        domain = Domain7.box((0.0,) * 7, (4.0,) * 7)
        Packing('flat', domain, centers, 1.0).validate()
        with pytest.raises(PackingError):
            Packing('bad', domain, centers, 1.0, subdivision=4, depth=2).validate()

    def test_nested_depth_must_be_positive(self):
        """Test that a nested packing needs at least one level."""
        with pytest.raises(PackingError):
            Packing.nested('bad', (1,) * 7, subdivision=4, depth=0).validate()


@pytest.mark.unit
class TestUnbounded:
    """Tests for the unboundedness iteration."""

    def test_invalid_sign(self):
        """Test that the sign must be + or -."""
        with pytest.raises(ValueError):
            unbounded_iterate('x', 'single', 1)

    def test_zero_rounds(self, mc_spec):
        """Test that zero rounds report only the starting value."""
        result = unbounded_iterate('+', 'nested-1', 0, nu=0.1, spec=mc_spec)
        assert len(result.values) == 1
        assert result.ratios == []
        assert result.nu == 0.1

    def test_epsilon_is_the_per_ball_change(self):
        """Test that ε̂ is the smallest per-ball change, not scaled by 1 - ν."""
        result = UnboundedResult('+', 'P0+', PACKINGS['nested-1'], 0.1, [1.0, 1.2, 1.5],
                                 ball_changes=[0.4, 0.3])
        assert result.epsilon_hat == 0.3
        assert result.passed

    def test_ratio_check_is_not_vacuous(self):
        """Test that a ratio below 1 + ε̂/2 fails even though H grows."""
        result = UnboundedResult('+', 'P0+', PACKINGS['nested-1'], 0.1, [1.0, 1.1],
                                 ball_changes=[0.3])
        assert not result.passed

    def test_decay_ratio(self):
        """Test the mirrored check for the minus sign."""
        result = UnboundedResult('-', 'P0-', PACKINGS['nested-1'], 0.1, [1.0, 0.85],
                                 ball_changes=[0.2])
        assert result.passed
        assert result.nu_choice['holds']

    def test_nu_choice(self):
        """Test (1+ε)(1-ν) ≥ 1+ε/2 at and around its largest ν."""
        assert nu_bound('+', 0.5) == pytest.approx(1.0 / 6.0)
        eps = 0.3
        nu = nu_bound('+', eps)
        assert (1 + eps) * (1 - nu) == pytest.approx(1 + eps / 2)
        holds = UnboundedResult('+', 'P0+', PACKINGS['nested-1'], 0.1, [1.0],
                                ball_changes=[eps]).nu_choice
        fails = UnboundedResult('+', 'P0+', PACKINGS['nested-1'], 0.1, [1.0],
                                ball_changes=[0.1]).nu_choice
        assert holds['holds'] and not fails['holds']
        assert nu_bound('-', 0.1) == 0.5

    @pytest.mark.slow
    @pytest.mark.parametrize('sign', ['+', '-'])
    def test_nested_packing_at_nu_tenth(self, sign, mc_spec):
        """Test three monotone rounds with ratios beyond 1 ± ε̂/2 at ν = 0.1."""
        result = unbounded_iterate(sign, 'nested-64', 3, nu=0.1, amplitude_grid=SMALL_GRID,
                                   spec=mc_spec)
        eps = result.epsilon_hat
        assert len(result.values) == 4
        assert eps > 0
        if sign == '+':
            assert all(r >= 1.0 + eps / 2.0 for r in result.ratios), result.to_json()
        else:
            assert all(r <= 1.0 - eps / 2.0 for r in result.ratios), result.to_json()
        assert result.passed
        assert result.scale_spread <= 1e-8

    @pytest.mark.slow
    def test_sparse_packing_does_not_certify_growth(self, mc_spec):
        """Test that 3% coverage grows H by less than ε̂/2 per round."""
        result = unbounded_iterate('+', 'single', 1, amplitude_grid=SMALL_GRID, spec=mc_spec)
        assert result.ratios[0] > 1.0
        assert not result.passed
