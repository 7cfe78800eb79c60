"""
g2structure/cartan.py - Cartan involutions of split-G2 structures
G2 Variational Lab
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from errors import AutomorphismError, CartanInvolutionError
from exterior.algebra import DIM, is_exact, pullback, to_exact
from g2structure.metric import Metric7
from g2structure.structure import SPLIT, G2Structure

CARTAN_TOLERANCE = 1e-10


@dataclass(frozen=True)
class CartanInvolution:
    map: Tuple[Tuple, ...]
    h: Metric7

    def array(self) -> np.ndarray:
        return np.asarray(self.map, dtype=float)

    def to_json(self) -> dict:
        return {
            'map': [[float(x) for x in row] for row in self.map],
            'h': self.h.to_json(),
        }


def _as_matrix(C):
    arr = np.asarray(C, dtype=object)
    if arr.shape != (DIM, DIM):
        raise ValueError(f"linear map must be {DIM}x{DIM}, got {arr.shape}")
    if all(is_exact(x) for x in arr.ravel()):
        return np.vectorize(to_exact, otypes=[object])(arr), True
    return np.asarray(C, dtype=float), False


def involution_metric(structure: G2Structure, C) -> np.ndarray:
    """h(u, v) = g(u, C v) as a matrix."""
    C, exact = _as_matrix(C)
    if exact and structure.metric.exact:
        return np.asarray(structure.metric.matrix, dtype=object).dot(C)
    return structure.metric.array() @ np.asarray(C, dtype=float)


def cartan_check(structure: G2Structure, C, tol: float = CARTAN_TOLERANCE) -> CartanInvolution:
    """Certify C as a Cartan involution of a split structure."""
    if structure.orbit != SPLIT:
        raise CartanInvolutionError(f"structure is {structure.orbit}, not split-G2")
    C, exact = _as_matrix(C)
    exact = exact and structure.exact

    square = C.dot(C) if exact else C @ C
    if exact:
        involutive = all(square[i, j] == int(i == j) for i in range(DIM) for j in range(DIM))
    else:
        involutive = np.max(np.abs(square - np.eye(DIM))) <= tol
    if not involutive:
        raise CartanInvolutionError("not a Cartan involution: C∘C is not the identity")

    moved = pullback(C if exact else np.asarray(C, dtype=float), structure.threeform)
    drift = (moved - structure.threeform).max_abs()
    if drift > (0 if exact else tol):
        raise AutomorphismError(f"not an automorphism of the structure (drift {drift:.3e})")

    h = involution_metric(structure, C)
    h_float = np.asarray(h, dtype=float)
    if np.max(np.abs(h_float - h_float.T)) > (0 if exact else tol):
        raise CartanInvolutionError("not a Cartan involution: g(-, C-) is not symmetric")
    if np.min(np.linalg.eigvalsh(0.5 * (h_float + h_float.T))) <= 0:
        raise CartanInvolutionError("not a Cartan involution: g(-, C-) is not positive definite")

    metric = Metric7.from_matrix(h if exact else 0.5 * (h_float + h_float.T))
    rows = tuple(tuple(x for x in row) for row in C.tolist())
    return CartanInvolution(rows, metric)
