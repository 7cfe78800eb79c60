"""
quadrature/__init__.py - Integration over 7-dimensional balls, boxes and tori
G2 Variational Lab
"""

from quadrature.domains import (
    METHODS,
    MOMENT_REDUCTION,
    MONTE_CARLO,
    RADIAL_1D,
    Domain7,
    QuadratureSpec,
)
from quadrature.integrate import (
    QuadratureResult,
    RadialMonomialIntegrand,
    integrate,
    monte_carlo_chunks,
    torus_nodes,
)
from quadrature.moments import (
    PI_CUBED,
    angular_moment,
    ball_volume,
    ball_volume_coefficient,
    sphere_area,
    sphere_area_coefficient,
)

__all__ = [
    'METHODS',
    'MOMENT_REDUCTION',
    'MONTE_CARLO',
    'PI_CUBED',
    'RADIAL_1D',
    'Domain7',
    'QuadratureResult',
    'QuadratureSpec',
    'RadialMonomialIntegrand',
    'angular_moment',
    'ball_volume',
    'ball_volume_coefficient',
    'integrate',
    'monte_carlo_chunks',
    'sphere_area',
    'sphere_area_coefficient',
    'torus_nodes',
]
