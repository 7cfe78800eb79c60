"""
exterior/__init__.py - Coordinate exterior calculus on R^7
G2 Variational Lab
"""

from exterior.algebra import (
    DIM,
    ConstForm,
    basis,
    compound_matrix,
    dimension,
    interior,
    pullback,
    unit_vector,
    wedge,
)
from exterior.fields import FormField, exterior_derivative
from exterior.profiles import BumpProfile

__all__ = [
    'DIM',
    'BumpProfile',
    'ConstForm',
    'FormField',
    'basis',
    'compound_matrix',
    'dimension',
    'exterior_derivative',
    'interior',
    'pullback',
    'unit_vector',
    'wedge',
]
