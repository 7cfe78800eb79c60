"""
perturbations/__init__.py - Perturbation families, rescaling, primitives and iterations
G2 Variational Lab
"""

from exterior.profiles import BumpProfile
from perturbations.families import (
    FAMILIES,
    LEMMA_FAMILIES,
    AmplitudeResult,
    PerturbationFamily,
    TaylorReport,
    make_family,
    optimize_amplitude,
    taylor_remainder,
)
from perturbations.primitive import (
    GlueResult,
    PrimitiveReport,
    glue_to_standard,
    poincare_primitive,
)
from perturbations.rescale import (
    SandwichReport,
    hausdorff_sandwich,
    rescale,
    rescaling_invariance,
    sign_threshold,
)
from perturbations.saddle import SaddleReport, line_bumps, saddle_gram
from perturbations.unbounded import PACKINGS, Packing, UnboundedResult, unbounded_iterate

__all__ = [
    'FAMILIES',
    'LEMMA_FAMILIES',
    'PACKINGS',
    'AmplitudeResult',
    'BumpProfile',
    'GlueResult',
    'Packing',
    'PerturbationFamily',
    'PrimitiveReport',
    'SaddleReport',
    'SandwichReport',
    'TaylorReport',
    'UnboundedResult',
    'glue_to_standard',
    'hausdorff_sandwich',
    'line_bumps',
    'make_family',
    'optimize_amplitude',
    'poincare_primitive',
    'rescale',
    'rescaling_invariance',
    'saddle_gram',
    'sign_threshold',
    'taylor_remainder',
    'unbounded_iterate',
]
