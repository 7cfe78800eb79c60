"""
functionals/__init__.py - Volume functionals, their variations and oracles
G2 Variational Lab
"""

from functionals.densities import (
    fd_first_variation_density,
    fd_hessian_density,
    first_variation_density,
    hessian_density,
    type_norm_densities,
    volume_density,
)
from functionals.hitchin import (
    FD_STEP,
    FiniteDifferenceCheck,
    evaluate,
    finite_difference_check,
    first_variation,
    scaling_check,
    second_variation,
)
from functionals.kinds import H3, H3_SPLIT, H4, H4_SPLIT, FunctionalKind, VariationOperator
from functionals.oracles import closed_form_integrands

__all__ = [
    'FD_STEP',
    'H3',
    'H3_SPLIT',
    'H4',
    'H4_SPLIT',
    'FiniteDifferenceCheck',
    'FunctionalKind',
    'VariationOperator',
    'closed_form_integrands',
    'evaluate',
    'fd_first_variation_density',
    'fd_hessian_density',
    'finite_difference_check',
    'first_variation',
    'first_variation_density',
    'hessian_density',
    'scaling_check',
    'second_variation',
    'type_norm_densities',
    'volume_density',
]
