"""
typedecomp/batch.py - Type projectors at every node of a non-constant structure
G2 Variational Lab

Same construction as projections.py, vectorized over an (N, 35) array of
3-forms and the matching 4-forms. Used by the functionals when the base
structure varies across quadrature nodes.
"""

from functools import lru_cache
from typing import Dict

import numpy as np

from errors import TypeLabelError
from exterior.algebra import complement_matrix, interior_tensor, wedge_tensor
from g2structure.batch import MetricBatch, star_matrices


@lru_cache(maxsize=None)
def _tensors():
    return {
        'iota3': interior_tensor(3).astype(float),
        'iota4': interior_tensor(4).astype(float),
        'w24': wedge_tensor(2, 4).astype(float),
        'w33': wedge_tensor(3, 3).astype(float),
        'w34': wedge_tensor(3, 4)[:, :, 0].astype(float),
    }


def _grade2(phi: np.ndarray, psi: np.ndarray) -> Dict[int, np.ndarray]:
    T = _tensors()
    U = np.einsum('aik,ni->nka', T['iota3'], phi)        # (N, 21, 7)
    L = np.einsum('ick,nc->nki', T['w24'], psi)           # (N, 7, 21)
    P7 = U @ np.linalg.solve(L @ U, L)
    return {7: P7, 14: np.eye(21) - P7}


def _grade3(phi: np.ndarray, psi: np.ndarray) -> Dict[int, np.ndarray]:
    T = _tensors()
    U7 = np.einsum('aik,ni->nka', T['iota4'], psi)        # (N, 35, 7)
    U = np.concatenate([phi[:, :, None], U7], axis=2)     # (N, 35, 8)
    L_phi = np.einsum('ick,nc->nki', T['w33'], phi)       # (N, 7, 35)
    L_psi = np.einsum('ic,nc->ni', T['w34'], psi)[:, None, :]
    L = np.concatenate([L_phi, L_psi], axis=1)            # (N, 8, 35)
    coords = np.linalg.solve(L @ U, L)
    P1 = U[:, :, :1] @ coords[:, :1, :]
    P7 = U[:, :, 1:] @ coords[:, 1:, :]
    return {1: P1, 7: P7, 27: np.eye(35) - P1 - P7}


def projector_stack(grade: int, phi, psi, batch: MetricBatch) -> Dict[int, np.ndarray]:
    """label -> (N, C, C) projection matrices at each node."""
    phi = np.atleast_2d(np.asarray(phi, dtype=float))
    psi = np.atleast_2d(np.asarray(psi, dtype=float))
    if grade == 2:
        return _grade2(phi, psi)
    if grade == 3:
        return _grade3(phi, psi)
    if grade in (4, 5):
        lower = 7 - grade
        inner = _grade3(phi, psi) if lower == 3 else _grade2(phi, psi)
        to_upper = star_matrices(batch, lower)
        to_lower = star_matrices(batch, grade)
        return {d: to_upper @ P @ to_lower for d, P in inner.items()}
    raise TypeLabelError(f"grade {grade} has no type decomposition (use 2, 3, 4 or 5)")


def pairing_stack(batch: MetricBatch, grade: int) -> np.ndarray:
    """(N, C, C) matrices M with aᵀ M b vol0 = a ^ ⋆b at each node."""
    Pc = complement_matrix(grade).astype(float)
    return np.einsum('kj,nki->nji', Pc, star_matrices(batch, grade))


__all__ = ['pairing_stack', 'projector_stack']
