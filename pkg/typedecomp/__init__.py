"""
typedecomp/__init__.py - G2 type decomposition of forms
G2 Variational Lab
"""

from typedecomp.batch import pairing_stack, projector_stack
from typedecomp.projections import (
    VALID_LABELS,
    Certificate,
    TypeComponent,
    characterize,
    decompose,
    project,
    projector_ranks,
    projectors,
)

__all__ = [
    'Certificate',
    'TypeComponent',
    'VALID_LABELS',
    'characterize',
    'decompose',
    'pairing_stack',
    'project',
    'projector_ranks',
    'projector_stack',
    'projectors',
]
