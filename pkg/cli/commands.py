"""
cli/commands.py - Verification runners shared by the CLI and the API blueprint
G2 Variational Lab

Every runner takes plain parameters plus the resolved configuration and
returns (Report, rows), where rows is an optional CSV series. Library
errors propagate; the callers turn them into failed Reports.
"""

import logging
from typing import List, Optional, Tuple

from cli.config import quadrature_spec
from cli.report import Report
from coflow.flow import periodic_perturbation, run_coflow, volume_monotonicity_check
from coflow.hk import hk_bound_check
from errors import TypeLabelError
from exterior.fields import FormField
from exterior.literals import format_form, parse_form
from exterior.models import NAMED_FORMS, PSI0
from functionals.hitchin import finite_difference_check, second_variation
from g2structure.structure import classify_and_metric_3, metric_from_4form
from perturbations.families import (
    FAMILIES,
    LEMMA_FAMILIES,
    PerturbationFamily,
    make_family,
    optimize_amplitude,
    taylor_remainder,
)
from perturbations.primitive import glue_to_standard
from perturbations.rescale import INVARIANCE_TOLERANCE
from perturbations.saddle import line_bumps, saddle_gram
from perturbations.unbounded import unbounded_iterate
from quadrature.domains import MONTE_CARLO, QuadratureSpec
from typedecomp.projections import VALID_LABELS, characterize, decompose, projector_ranks

logger = logging.getLogger(__name__)

Result = Tuple[Report, Optional[List[dict]]]


def _report(command: str, parameters: dict, config: dict,
            spec: Optional[QuadratureSpec] = None) -> Report:
    return Report(command, parameters, config, None if spec is None else spec.to_json())


def _family(name: str, eta: float, config: dict, **kwargs) -> PerturbationFamily:
    bump = config['bump']
    return PerturbationFamily(name, eta=eta, plateau=bump['plateau'], cutoff=bump['cutoff'],
                              **kwargs)


def _sampling_spec(spec: QuadratureSpec, config: dict) -> QuadratureSpec:
    if spec.stochastic:
        return spec
    q = config['quadrature']
    return QuadratureSpec(MONTE_CARLO, int(q['samples']), int(q['seed']), spec.nodes,
                          spec.tolerance)


def structure_for(name: str, config: dict):
    form = NAMED_FORMS.get(name) or parse_form(name)
    if form.grade == 4:
        return metric_from_4form(form, int(config['metric']['max_iters']),
                                 float(config['tolerances']['metric_iteration']))
    return classify_and_metric_3(form).require_stable()


# -- decompose ------------------------------------------------------------------------------


def run_decompose(form: str, structure: str, config: dict) -> Result:
    report = _report('decompose', {'form': form, 'structure': structure}, config)
    value = parse_form(form)
    if value.grade not in VALID_LABELS:
        raise TypeLabelError(f"grade-{value.grade} forms are irreducible; nothing to decompose")
    g2 = structure_for(structure, config)
    components = decompose(g2, value)
    ranks = projector_ranks(g2, value.grade)
    report.add_value('orbit', g2.orbit)
    report.add_value('ranks', {str(k): v for k, v in ranks.items()})
    total = None
    for label, component in components.items():
        certificate = characterize(g2, component)
        report.add_value(f'component_{label}', format_form(component.form),
                         certificate=certificate.to_json())
        report.add_verdict(f'membership_{label}', certificate.passed, certificate.tolerance,
                           max((r for _, r in certificate.conditions), default=0.0))
        total = component.form if total is None else total + component.form
    residual = (total - value).max_abs()
    report.add_verdict('reconstruction', residual <= config['tolerances']['numeric'],
                       config['tolerances']['numeric'], residual)
    return report, None


# -- Hessian and lemma checks ---------------------------------------------------------------


def run_hessian(family: str, eta: float, config: dict,
                spec: Optional[QuadratureSpec] = None) -> Result:
    spec = spec or quadrature_spec(config)
    report = _report('hessian', {'family': family, 'eta': eta}, config, spec)
    placed = _family(family, eta, config)
    _, dalpha = make_family(placed)
    value = second_variation(placed.kind, placed.ball, placed.base_field(), dalpha, dalpha, spec)
    report.add_value('second_variation', value.value, value.error, functional=placed.kind.name)
    report.add_verdict('sign', placed.sign * value.value > 0, None,
                       '+' if value.value > 0 else '-')
    return report, None


def _lemma_row(name: str, eta: float, config: dict, spec: QuadratureSpec) -> dict:
    placed = _family(name, eta, config)
    kind, base = placed.kind, placed.base_field()
    _, dalpha = make_family(placed)
    analytic = second_variation(kind, placed.ball, base, dalpha, dalpha, spec)
    fd = finite_difference_check(kind, placed.ball, base, dalpha, _sampling_spec(spec, config))
    search = optimize_amplitude(kind, base, placed, config['unbounded']['amplitude_grid'],
                                _sampling_spec(spec, config))
    taylor = taylor_remainder(kind, base, placed, spec=_sampling_spec(spec, config))
    return {
        'family': name,
        'functional': kind.name,
        'expected_sign': '+' if placed.sign > 0 else '-',
        'second_variation': analytic.value,
        'error': analytic.error,
        'fd_analytic': fd.analytic,
        'fd_value': fd.finite_difference,
        'fd_relative_error': fd.relative_error,
        'amplitude': search.amplitude,
        'relative_change': search.relative_change,
        'sign_ok': placed.sign * analytic.value > 0,
        'fd_ok': fd.passed(config['tolerances']['fd_relative']),
        'amplitude_ok': search.passed,
        'taylor_exponent': taylor.exponent,
        'taylor_integrated_exponent': taylor.integrated_exponent,
        'taylor_ok': taylor.passed,
        'taylor': taylor,
    }


def run_verify_lemma(lemma: str, eta: float, config: dict,
                     spec: Optional[QuadratureSpec] = None) -> Result:
    if lemma not in LEMMA_FAMILIES:
        raise ValueError(f"unknown lemma '{lemma}'; expected one of {sorted(LEMMA_FAMILIES)}")
    spec = spec or quadrature_spec(config)
    report = _report('verify-lemma', {'lemma': lemma, 'eta': eta}, config, spec)
    rows = []
    for name in LEMMA_FAMILIES[lemma]:
        row = _lemma_row(name, eta, config, spec)
        taylor = row.pop('taylor')
        rows.append(row)
        report.add_value(f'{name}_second_variation', row['second_variation'], row['error'])
        report.add_value(f'{name}_taylor', taylor.exponent, detail=taylor.to_json())
        report.add_verdict(f'{name}_sign', row['sign_ok'], None, row['expected_sign'])
        report.add_verdict(f'{name}_finite_difference', row['fd_ok'],
                           config['tolerances']['fd_relative'], row['fd_relative_error'])
        report.add_verdict(f'{name}_amplitude', row['amplitude_ok'], None,
                           row['relative_change'])
        report.add_verdict(f'{name}_taylor_exponent', row['taylor_ok'],
                           taylor.expected - taylor.tolerance, taylor.exponent)
    return report, rows


# -- iterations -------------------------------------------------------------------------------


def run_unbounded(sign: str, config: dict, rounds: Optional[int] = None, nu=None,
                  packing: Optional[str] = None,
                  spec: Optional[QuadratureSpec] = None) -> Result:
    settings = config['unbounded']
    rounds = settings['rounds'] if rounds is None else rounds
    nu = settings['nu'] if nu is None else nu
    packing = packing or settings['packing']
    spec = _sampling_spec(spec or quadrature_spec(config), config)
    report = _report('unbounded', {'sign': sign, 'rounds': rounds, 'nu': nu,
                                   'packing': packing}, config, spec)
    result = unbounded_iterate(sign, packing, rounds, nu, settings['amplitude_grid'], spec)
    report.add_value('values', result.values)
    report.add_value('ratios', result.ratios)
    report.add_value('epsilon_hat', result.epsilon_hat, ball_changes=result.ball_changes)
    report.add_value('packing', result.packing.to_json())
    report.add_value('nu_choice', result.nu_choice['holds'], nu=result.nu,
                     nu_max=result.nu_choice['nu_max'])
    report.add_value('scale_changes', result.scale_changes, spread=result.scale_spread)
    if rounds > 0:
        report.add_verdict('monotone_growth' if sign == '+' else 'monotone_decay',
                           result.passed, result.epsilon_hat / 2.0, result.ratios)
        report.add_verdict('scale_invariance', result.scale_spread <= INVARIANCE_TOLERANCE,
                           INVARIANCE_TOLERANCE, result.scale_spread)
    return report, result.rows()


def run_saddle(k: int, sign: str, eta: float, config: dict,
               spec: Optional[QuadratureSpec] = None) -> Result:
    spec = spec or quadrature_spec(config)
    report = _report('saddle', {'k': k, 'sign': sign, 'eta': eta}, config, spec)
    name = 'P0+' if sign == '+' else 'P0-'
    bumps = [_family(name, eta, config, center=b.center) for b in line_bumps(name, k, eta)]
    gram = saddle_gram(FormField.constant(PSI0), bumps, spec)
    report.add_value('gram', gram.matrix, eigenvalues=gram.eigenvalues)
    report.add_verdict('definite', gram.verdict == ('positive-definite' if sign == '+'
                                                    else 'negative-definite'),
                       None, gram.verdict)
    report.add_verdict('off_diagonal', gram.off_diagonal <= 1e-12, 1e-12, gram.off_diagonal)
    return report, None


# -- coflow and bounds --------------------------------------------------------------------------


def run_coflow_command(config: dict, grid: Optional[int] = None, s: Optional[float] = None,
                       dt: Optional[float] = None, steps: Optional[int] = None) -> Result:
    settings = config['coflow']
    grid = settings['grid'] if grid is None else grid
    s = settings['s'] if s is None else s
    dt = settings['dt'] if dt is None else dt
    steps = settings['steps'] if steps is None else steps
    report = _report('coflow', {'grid': grid, 's': s, 'dt': dt, 'steps': steps}, config)
    state = periodic_perturbation(s, nodes=grid, period=settings['period'])
    tolerance = config['tolerances']['volume_rate']
    check = volume_monotonicity_check(state, dt, settings['cfl_factor'], tolerance)
    run = run_coflow(state, dt, steps, settings['cfl_factor'])
    report.add_value('initial_rate', check['min_rate'], halving_ratio=check['halving_ratio'])
    report.add_value('final', run.rows[-1])
    report.add_value('exactness_residual', run.exactness)
    report.add_verdict('pointwise_volume_growth', run.passed(tolerance) and check['passed'],
                       tolerance, min(run.min_rate, check['min_rate']))
    report.add_verdict('functional_nondecreasing', run.functional_nondecreasing)
    report.add_verdict('exactness', run.exactness <= 1e-10, 1e-10, run.exactness)
    return report, run.rows


def run_hk_bound(eta: float, config: dict) -> Result:
    report = _report('hk-bound', {'eta': eta}, config)
    check = hk_bound_check(eta)
    report.add_value('ball_volume', check['ball_volume'])
    report.add_value('bound', check['bound'])
    for k, integral in check['integrals'].items():
        report.add_value(f'exponent_{k}', integral['value'], integral['quadrature_error'])
    report.add_value('exponent_7_relative_gap', check['exponent_7_relative_gap'])
    report.add_verdict('saturation', check['saturated'], check['tolerance'],
                       check['relative_difference'])
    return report, None


def run_glue(epsilon: float, delta: float, config: dict) -> Result:
    """Glue ψ0 + ε·2x¹dx¹²³⁴ back to ψ0 near the origin."""
    report = _report('glue', {'epsilon': epsilon, 'delta': delta}, config)
    perturbation = FormField.polynomial(4, {((1, 0, 0, 0, 0, 0, 0), (1, 2, 3, 4)): 2 * epsilon})
    psi_prime = FormField.constant(PSI0) + perturbation
    result = glue_to_standard(psi_prime, delta)
    report.add_value('eta', result.eta, deviation=result.deviation)
    report.add_value('agreement_on_inner_ball', result.agreement)
    report.add_verdict('deviation_below_delta', result.deviation < delta, delta,
                       result.deviation)
    report.add_verdict('model_on_inner_ball', result.agreement <= 1e-10, 1e-10,
                       result.agreement)
    return report, result.rows


def family_table() -> List[dict]:
    return [definition.to_json() for definition in FAMILIES.values()]


__all__ = [
    'family_table',
    'run_coflow_command',
    'run_decompose',
    'run_glue',
    'run_hessian',
    'run_hk_bound',
    'run_saddle',
    'run_unbounded',
    'run_verify_lemma',
    'structure_for',
]
