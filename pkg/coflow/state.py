"""
coflow/state.py - Periodic grid states for the Laplacian coflow
G2 Variational Lab

Fields depend on at most two coordinates of the flat 7-torus of period L;
every algebraic operation still acts on full 7-dimensional forms.
"""

from dataclasses import dataclass, field, replace
from math import pi
from typing import Optional, Tuple

import numpy as np

from exterior.algebra import DIM, dimension

DEFAULT_PERIOD = 2.0 * pi


@dataclass(frozen=True, eq=False)
class CoflowState:
    """ψ on an n^k grid over the active axes, with its accumulated primitive."""

    axes: Tuple[int, ...]
    nodes: int
    values: np.ndarray                 # (n, ..., n, 35)
    period: float = DEFAULT_PERIOD
    time: float = 0.0
    primitive: Optional[np.ndarray] = None  # (n, ..., n, 35) 3-form coefficients
    initial: Optional[np.ndarray] = None

    def __post_init__(self):
        axes = tuple(int(a) for a in self.axes)
        if not 1 <= len(axes) <= 2 or any(not 1 <= a <= DIM for a in axes):
            raise ValueError(f"coflow grids use one or two active axes in 1..7, got {axes}")
        if len(set(axes)) != len(axes):
            raise ValueError(f"active axes must be distinct, got {axes}")
        if self.nodes < 4:
            raise ValueError(f"coflow grids need at least 4 nodes per axis, got {self.nodes}")
        values = np.asarray(self.values, dtype=float)
        expected = (self.nodes,) * len(axes) + (dimension(4),)
        if values.shape != expected:
            raise ValueError(f"expected values of shape {expected}, got {values.shape}")
        object.__setattr__(self, 'axes', axes)
        object.__setattr__(self, 'values', values)
        if self.primitive is None:
            object.__setattr__(self, 'primitive', np.zeros(self.shape + (dimension(3),)))
        if self.initial is None:
            object.__setattr__(self, 'initial', values.copy())

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.nodes,) * len(self.axes)

    @property
    def spacing(self) -> float:
        return self.period / self.nodes

    @property
    def node_count(self) -> int:
        return self.nodes ** len(self.axes)

    @property
    def cell_volume(self) -> float:
        """Volume of the torus slab carried by one node."""
        return self.spacing ** len(self.axes) * self.period ** (DIM - len(self.axes))

    def coordinates(self) -> np.ndarray:
        """(N, 7) node positions with inactive coordinates at 0."""
        grid = np.arange(self.nodes) * self.spacing
        mesh = np.meshgrid(*([grid] * len(self.axes)), indexing='ij')
        points = np.zeros((self.node_count, DIM))
        for axis, coords in zip(self.axes, mesh):
            points[:, axis - 1] = coords.ravel()
        return points

    def flat(self, array: Optional[np.ndarray] = None) -> np.ndarray:
        array = self.values if array is None else array
        return array.reshape(self.node_count, array.shape[-1])

    def node(self, index: int) -> Tuple[int, ...]:
        return tuple(int(i) for i in np.unravel_index(index, self.shape))

    def advanced(self, values: np.ndarray, dt: float, primitive: np.ndarray) -> 'CoflowState':
        return replace(self, values=values, time=self.time + dt, primitive=primitive,
                       initial=self.initial)

    def to_json(self) -> dict:
        return {
            'axes': list(self.axes),
            'nodes': self.nodes,
            'period': self.period,
            'spacing': self.spacing,
            'time': self.time,
        }


@dataclass(frozen=True, eq=False)
class TorsionReport:
    """dψ (a 5-form) and d⋆ψ (a 4-form) at every node."""

    dpsi: np.ndarray
    dstar_psi: np.ndarray
    norms: dict = field(default_factory=dict)

    @classmethod
    def build(cls, dpsi: np.ndarray, dstar_psi: np.ndarray) -> 'TorsionReport':
        norms = {
            'dpsi': float(np.max(np.abs(dpsi))) if dpsi.size else 0.0,
            'dstar_psi': float(np.max(np.abs(dstar_psi))) if dstar_psi.size else 0.0,
        }
        return cls(dpsi, dstar_psi, norms)

    @property
    def dpsi_norm(self) -> float:
        return self.norms['dpsi']

    @property
    def dstar_norm(self) -> float:
        return self.norms['dstar_psi']

    def torsion_free(self, tolerance: float = 1e-10) -> bool:
        return self.dpsi_norm <= tolerance and self.dstar_norm <= tolerance

    def to_json(self) -> dict:
        return {'dpsi_sup': self.dpsi_norm, 'dstar_psi_sup': self.dstar_norm}


__all__ = ['DEFAULT_PERIOD', 'CoflowState', 'TorsionReport']
