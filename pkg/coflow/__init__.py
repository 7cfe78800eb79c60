"""
coflow/__init__.py - Laplacian coflow on flat tori and the volume bound
G2 Variational Lab
"""

from coflow.flow import (
    CoflowRun,
    coflow_step,
    constant_state,
    exactness_residual,
    functional_value,
    periodic_perturbation,
    run_coflow,
    torsion,
    volume_monotonicity_check,
)
from coflow.hk import hk_bound_check, nonconvergence_certificate
from coflow.state import CoflowState, TorsionReport

__all__ = [
    'CoflowRun',
    'CoflowState',
    'TorsionReport',
    'coflow_step',
    'constant_state',
    'exactness_residual',
    'functional_value',
    'hk_bound_check',
    'nonconvergence_certificate',
    'periodic_perturbation',
    'run_coflow',
    'torsion',
    'volume_monotonicity_check',
]
