"""
quadrature/domains.py - Integration domains and quadrature settings
G2 Variational Lab
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from exterior.algebra import DIM
from quadrature.moments import ball_volume

BALL = 'ball'
BOX = 'box'
TORUS = 'torus'

MOMENT_REDUCTION = 'moment-reduction'
MONTE_CARLO = 'monte-carlo'
RADIAL_1D = 'radial-1d'
METHODS = (MOMENT_REDUCTION, MONTE_CARLO, RADIAL_1D)

CONTAINMENT_SLACK = 1e-12


def _vector(values, name: str) -> Tuple[float, ...]:
    values = tuple(float(v) for v in values)
    if len(values) != DIM:
        raise ValueError(f"{name} needs {DIM} components, got {len(values)}")
    return values


@dataclass(frozen=True)
class Domain7:
    """A closed ball, an axis-aligned box or a flat torus in R^7."""

    kind: str
    center: Tuple[float, ...] = (0.0,) * DIM
    radius: float = 1.0
    corner: Tuple[float, ...] = (0.0,) * DIM
    edges: Tuple[float, ...] = (1.0,) * DIM
    active_axes: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in (BALL, BOX, TORUS):
            raise ValueError(f"unknown domain kind '{self.kind}'")
        if self.kind == BALL and not self.radius > 0:
            raise ValueError(f"ball radius must be positive, got {self.radius}")
        if self.kind in (BOX, TORUS) and not all(e > 0 for e in self.edges):
            raise ValueError(f"edge lengths / periods must be positive, got {self.edges}")

    @classmethod
    def ball(cls, center=(0.0,) * DIM, radius: float = 1.0) -> 'Domain7':
        return cls(BALL, center=_vector(center, 'center'), radius=float(radius))

    @classmethod
    def box(cls, corner, edges) -> 'Domain7':
        return cls(BOX, corner=_vector(corner, 'corner'), edges=_vector(edges, 'edges'))

    @classmethod
    def torus(cls, periods, active_axes=None) -> 'Domain7':
        """Flat torus R^7 / (periods); fields vary only along active_axes (1-based)."""
        axes = tuple(range(1, DIM + 1)) if active_axes is None else tuple(active_axes)
        if not all(1 <= a <= DIM for a in axes):
            raise ValueError(f"active axes must lie in 1..{DIM}, got {axes}")
        return cls(TORUS, edges=_vector(periods, 'periods'), active_axes=axes)

    @property
    def volume(self) -> float:
        if self.kind == BALL:
            return ball_volume(self.radius)
        return float(np.prod(self.edges))

    def contains(self, points) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if self.kind == BALL:
            distance = np.linalg.norm(points - np.asarray(self.center), axis=1)
            return distance <= self.radius * (1 + CONTAINMENT_SLACK)
        lower = np.asarray(self.corner)
        upper = lower + np.asarray(self.edges)
        return np.all((points >= lower) & (points <= upper), axis=1)

    def contains_ball(self, center, radius: float) -> bool:
        center = np.asarray(center, dtype=float)
        slack = CONTAINMENT_SLACK * max(1.0, float(radius))
        if self.kind == BALL:
            gap = float(np.linalg.norm(center - np.asarray(self.center)))
            return gap + radius <= self.radius + slack
        lower = np.asarray(self.corner)
        upper = lower + np.asarray(self.edges)
        inside_low = np.all(center - radius >= lower - slack)
        return bool(inside_low and np.all(center + radius <= upper + slack))

    def to_json(self) -> dict:
        if self.kind == BALL:
            return {'kind': BALL, 'center': list(self.center), 'radius': self.radius}
        if self.kind == BOX:
            return {'kind': BOX, 'corner': list(self.corner), 'edges': list(self.edges)}
        return {'kind': TORUS, 'periods': list(self.edges), 'active_axes': list(self.active_axes)}


@dataclass(frozen=True)
class QuadratureSpec:
    method: str = MOMENT_REDUCTION
    samples: int = 200_000
    seed: int = 0
    nodes: int = 64
    tolerance: float = 1e-10

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(
                f"unknown quadrature method '{self.method}'; expected one of {METHODS}"
            )
        if self.samples < 1:
            raise ValueError(f"samples must be at least 1, got {self.samples}")
        if self.nodes < 2:
            raise ValueError(f"nodes must be at least 2, got {self.nodes}")
        if not self.tolerance > 0:
            raise ValueError(f"tolerance must be positive, got {self.tolerance}")

    @classmethod
    def moment_reduction(cls, tolerance: float = 1e-10) -> 'QuadratureSpec':
        return cls(MOMENT_REDUCTION, tolerance=tolerance)

    @classmethod
    def monte_carlo(cls, samples: int = 200_000, seed: int = 0) -> 'QuadratureSpec':
        return cls(MONTE_CARLO, samples=int(samples), seed=int(seed))

    @classmethod
    def radial_1d(cls, nodes: int = 64) -> 'QuadratureSpec':
        return cls(RADIAL_1D, nodes=int(nodes))

    @property
    def stochastic(self) -> bool:
        return self.method == MONTE_CARLO

    def with_method(self, method: str) -> 'QuadratureSpec':
        return QuadratureSpec(method, self.samples, self.seed, self.nodes, self.tolerance)

    def to_json(self) -> dict:
        return {
            'method': self.method,
            'samples': self.samples,
            'seed': self.seed,
            'nodes': self.nodes,
            'tolerance': self.tolerance,
        }


def support_domain(center: Optional[Tuple[float, ...]], radius: float) -> Domain7:
    return Domain7.ball(center if center is not None else (0.0,) * DIM, radius)
