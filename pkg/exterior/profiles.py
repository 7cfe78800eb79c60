"""
exterior/profiles.py - Radial bump profiles
G2 Variational Lab

f(r) = S((b - r/eta) / (b - a)) with S the exp(-1/s) smoothstep, so f == 1 on
r <= a*eta and f == 0 on r >= b*eta. The level functions u_k are
u_0 = f and u_{k+1} = u_k'(r) / r; they close the derivative rule
d/dx^i [u_k(r)] = u_{k+1}(r) * x^i used by structured form fields.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import sympy

DEFAULT_PLATEAU = 0.3  # a: f == 1 below a*eta
DEFAULT_CUTOFF = 0.8   # b: f == 0 above b*eta


@lru_cache(maxsize=None)
def _level_expression(k: int):
    r, eta, a, b = sympy.symbols('r eta a b', positive=True)
    s = (b - r / eta) / (b - a)
    rise = sympy.exp(-1 / s)
    fall = sympy.exp(-1 / (1 - s))
    expr = rise / (rise + fall)
    for _ in range(k):
        expr = sympy.diff(expr, r) / r
    return (r, eta, a, b), expr


@lru_cache(maxsize=None)
def _level_function(k: int):
    symbols, expr = _level_expression(k)
    return sympy.lambdify(symbols, expr, modules='numpy', cse=True)


@dataclass(frozen=True)
class BumpProfile:
    """Smooth radial cutoff of radius eta."""

    eta: float = 1.0
    plateau: float = DEFAULT_PLATEAU
    cutoff: float = DEFAULT_CUTOFF

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError(f"bump radius must be positive, got {self.eta}")
        if not 0 < self.plateau < self.cutoff < 1:
            raise ValueError(
                f"need 0 < plateau < cutoff < 1, got ({self.plateau}, {self.cutoff})"
            )
        object.__setattr__(self, 'eta', float(self.eta))
        object.__setattr__(self, 'plateau', float(self.plateau))
        object.__setattr__(self, 'cutoff', float(self.cutoff))

    @property
    def breakpoints(self):
        return self.plateau * self.eta, self.cutoff * self.eta

    @property
    def support(self) -> float:
        """Radius outside which the profile and all its levels vanish."""
        return self.cutoff * self.eta

    def level(self, k: int, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        flat = np.atleast_1d(r).ravel()
        lo, hi = self.breakpoints
        out = np.zeros_like(flat)
        if k == 0:
            out[flat <= lo] = 1.0
        band = (flat > lo) & (flat < hi)
        if np.any(band):
            with np.errstate(all='ignore'):
                values = _level_function(k)(flat[band], self.eta, self.plateau, self.cutoff)
            values = np.broadcast_to(np.asarray(values, dtype=float), flat[band].shape)
            out[band] = np.where(np.isfinite(values), values, 0.0)
        return out.reshape(r.shape)

    def __call__(self, r) -> np.ndarray:
        return self.level(0, r)

    def derivative(self, r) -> np.ndarray:
        """f'(r)."""
        r = np.asarray(r, dtype=float)
        return r * self.level(1, r)

    def scaled(self, factor: float) -> 'BumpProfile':
        """Profile of r -> f(factor * r)."""
        return BumpProfile(self.eta / factor, self.plateau, self.cutoff)

    def to_json(self) -> dict:
        return {
            'kind': 'exp-smoothstep',
            'eta': self.eta,
            'plateau': self.plateau,
            'cutoff': self.cutoff,
        }
