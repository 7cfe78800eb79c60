"""
coflow/hk.py - Mean-curvature volume bound and the non-convergence certificate
G2 Variational Lab

For the flat ball the comparison integral ∫₀^η (1 - r/η)^k dr · Area(S⁶_η)
equals η/(k+1) · Area. Saturation Vol(B_η) = (η/7)·Area holds for k = 6;
both k = 6 and k = 7 are reported.
"""

import logging
from fractions import Fraction
from typing import Optional, Sequence

from scipy.integrate import quad

from coflow.flow import periodic_perturbation, run_coflow
from functionals.hitchin import evaluate
from perturbations.families import PerturbationFamily, make_family
from quadrature.domains import QuadratureSpec
from quadrature.moments import (
    PI_CUBED,
    ball_volume_coefficient,
    sphere_area_coefficient,
)

logger = logging.getLogger(__name__)

SATURATION_TOLERANCE = 1e-12
EXPONENTS = (6, 7)


def comparison_integral(eta: float, exponent: int) -> dict:
    """∫₀^η (1 - r/η)^k dr · Area(S⁶_η), exact and by quadrature."""
    area = float(sphere_area_coefficient(eta)) * PI_CUBED
    radial, error = quad(lambda r: (1.0 - r / eta) ** exponent, 0.0, eta, epsabs=0.0,
                         epsrel=1e-14)
    return {
        'exponent': exponent,
        'radial_factor': str(Fraction(1, exponent + 1)) + '·η',
        'value': radial * area,
        'exact_value': eta / (exponent + 1) * area,
        'quadrature_error': error * area,
    }


def hk_bound_check(eta: float) -> dict:
    """Vol(B_η) against (η/7)·Area(S⁶_η) for the flat structure."""
    if not eta > 0:
        raise ValueError(f"radius must be positive, got {eta}")
    eta = float(eta)
    volume = float(ball_volume_coefficient(eta)) * PI_CUBED
    area = float(sphere_area_coefficient(eta)) * PI_CUBED
    bound = eta / 7.0 * area
    relative = abs(volume - bound) / volume
    integrals = {str(k): comparison_integral(eta, k) for k in EXPONENTS}
    discrepancy = abs(integrals['7']['value'] - bound) / bound
    return {
        'eta': eta,
        'ball_volume': volume,
        'sphere_area': area,
        'bound': bound,
        'relative_difference': relative,
        'saturated': relative <= SATURATION_TOLERANCE,
        'integrals': integrals,
        'exponent_7_relative_gap': discrepancy,
        'tolerance': SATURATION_TOLERANCE,
        'passed': relative <= SATURATION_TOLERANCE,
    }


def nonconvergence_certificate(s_grid: Sequence[float] = (1e-3, 3e-3, 1e-2), eta: float = 1.0,
                               spec: Optional[QuadratureSpec] = None, nodes: int = 64,
                               dt: float = 1e-6, steps: int = 3) -> dict:
    """HK saturation at η, H⁴(ψ0 + s·dα⁺) > H⁴(ψ0) on the grid, and coflow volume growth."""
    spec = spec or QuadratureSpec.monte_carlo(samples=50_000)
    hk = hk_bound_check(eta)

    family = PerturbationFamily('P0+', eta=eta)
    _, dalpha = make_family(family)
    base = family.base_field()
    domain = family.ball
    h0 = evaluate(family.kind, domain, base, spec).value
    rows = []
    for s in s_grid:
        value = evaluate(family.kind, domain, base + dalpha * float(s), spec)
        rows.append({'s': float(s), 'H4': value.value, 'error': value.error,
                     'above_model': value.value > h0})

    run = run_coflow(periodic_perturbation(max(s_grid), nodes=nodes), dt, steps)
    obstruction = all(row['above_model'] for row in rows)
    growth = run.passed()
    logger.info(f"certificate: saturated={hk['saturated']} obstruction={obstruction} "
                f"growth={growth}")
    return {
        'hk': hk,
        'model_value': h0,
        'perturbed': rows,
        'coflow': run.to_json(),
        'obstruction': obstruction,
        'volume_growth': growth,
        'passed': hk['saturated'] and obstruction and growth,
    }


__all__ = ['comparison_integral', 'hk_bound_check', 'nonconvergence_certificate']
