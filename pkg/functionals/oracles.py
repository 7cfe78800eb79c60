"""
functionals/oracles.py - Closed-form second-variation integrands
G2 Variational Lab

Pointwise formulas for the seven unit-radius perturbation families at
their model bases, written with u = f'(r)/r and Q = (x⁴)² + ... + (x⁷)².
They are independent of the projector machinery and serve as oracles
for hessian_density and type_norm_densities.
"""

from typing import Callable, Dict

import numpy as np

from exterior.profiles import BumpProfile

Oracle = Callable[[np.ndarray, BumpProfile], np.ndarray]


def _parts(points: np.ndarray, profile: BumpProfile):
    points = np.atleast_2d(np.asarray(points, dtype=float))
    r = np.linalg.norm(points, axis=1)
    u2 = profile.level(1, r) ** 2
    x = {a: points[:, a - 1] for a in range(1, 8)}
    q = x[4] ** 2 + x[5] ** 2 + x[6] ** 2 + x[7] ** 2
    return u2, x, q, r


def _p0_plus(points, profile):
    u2, _, _, r = _parts(points, profile)
    return u2 * r ** 2


def _p0_minus(points, profile):
    u2, _, q, _ = _parts(points, profile)
    return -u2 * q / 8.0


def _sg3_plus(points, profile):
    u2, x, q, _ = _parts(points, profile)
    return u2 * (-2.0 / 3.0 * x[3] ** 2 + 0.5 * q) / 3.0


def _sg3_minus(points, profile):
    u2, x, _, _ = _parts(points, profile)
    inner = (0.5 * x[2] ** 2 + 0.5 * x[3] ** 2 - 2.0 / 3.0 * x[5] ** 2
             - 0.5 * x[6] ** 2 - 0.5 * x[7] ** 2)
    return u2 * inner / 3.0


def _sg4_plus(points, profile):
    u2, _, q, _ = _parts(points, profile)
    return u2 * 0.5 * q / 4.0


def _sg4_minus(points, profile):
    u2, x, _, _ = _parts(points, profile)
    inner = 0.5 * x[3] ** 2 - 0.5 * x[5] ** 2 - 0.5 * x[6] ** 2 - 0.75 * x[7] ** 2
    return u2 * inner / 4.0


def _ch_minus(points, profile):
    u2, x, q, _ = _parts(points, profile)
    return -u2 * (2.0 / 3.0 * x[3] ** 2 + 0.5 * q) / 3.0


HESSIAN_INTEGRANDS: Dict[str, Oracle] = {
    'P0+': _p0_plus,
    'P0-': _p0_minus,
    'SG3+': _sg3_plus,
    'SG3-': _sg3_minus,
    'SG4+': _sg4_plus,
    'SG4-': _sg4_minus,
    'CH-': _ch_minus,
}


def _p0_minus_norms(points, profile):
    u2, _, q, _ = _parts(points, profile)
    return {1: np.zeros_like(u2), 7: 0.25 * u2 * q, 27: 0.75 * u2 * q}


def _sg3_plus_norms(points, profile):
    u2, x, q, _ = _parts(points, profile)
    return {
        1: u2 * x[3] ** 2 / 7.0,
        7: -0.25 * u2 * q,
        27: u2 * (6.0 / 7.0 * x[3] ** 2 - 0.75 * q),
    }


def _sg3_minus_norms(points, profile):
    u2, x, _, _ = _parts(points, profile)
    w = -x[2] ** 2 - x[3] ** 2 + x[6] ** 2 + x[7] ** 2
    return {
        1: u2 * x[5] ** 2 / 7.0,
        7: 0.25 * u2 * w,
        27: u2 * (6.0 / 7.0 * x[5] ** 2 + 0.75 * w),
    }


TYPE_NORMS = {
    'P0-': _p0_minus_norms,
    'SG3+': _sg3_plus_norms,
    'SG3-': _sg3_minus_norms,
}


def closed_form_integrands() -> Dict[str, Dict[str, Callable]]:
    """{'hessian': name -> density, 'norms': name -> label -> signed squared norm}."""
    return {'hessian': dict(HESSIAN_INTEGRANDS), 'norms': dict(TYPE_NORMS)}


__all__ = ['HESSIAN_INTEGRANDS', 'TYPE_NORMS', 'closed_form_integrands']
