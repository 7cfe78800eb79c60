"""
g2structure/__init__.py - Metrics and orbits of stable 3- and 4-forms
G2 Variational Lab
"""

from g2structure.cartan import CartanInvolution, cartan_check, involution_metric
from g2structure.metric import Metric7, hodge_star, pairing, signed_norm_squared
from g2structure.structure import (
    COMPACT,
    DEGENERATE,
    SPLIT,
    G2Structure,
    classify_and_metric_3,
    metric_from_4form,
    structure_of,
)

__all__ = [
    'COMPACT',
    'DEGENERATE',
    'SPLIT',
    'CartanInvolution',
    'G2Structure',
    'Metric7',
    'cartan_check',
    'classify_and_metric_3',
    'hodge_star',
    'involution_metric',
    'metric_from_4form',
    'pairing',
    'signed_norm_squared',
    'structure_of',
]
