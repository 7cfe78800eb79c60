"""
g2structure/metric.py - Metrics, Hodge star and the induced pairing
G2 Variational Lab

A Metric7 stores its matrix as nested tuples so it can key the projector
and star-matrix caches. Exact metrics keep Fraction entries throughout.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence, Tuple

import numpy as np
import sympy

from errors import DegenerateMetricError
from exterior.algebra import (
    ConstForm,
    DIM,
    complement_matrix,
    compound_matrix,
    is_exact,
    to_exact,
)

logger = logging.getLogger(__name__)

EIGENVALUE_FLOOR = 1e-13  # eigenvalues below this count as zero


def _to_sympy(x):
    x = to_exact(x)
    return sympy.Rational(x.numerator, x.denominator)


def _from_sympy(x) -> Fraction:
    x = sympy.nsimplify(x) if not isinstance(x, sympy.Rational) else x
    return Fraction(int(x.p), int(x.q))


def exact_inverse(rows) -> np.ndarray:
    M = sympy.Matrix([[_to_sympy(x) for x in row] for row in rows])
    inv = M.inv()
    n = M.shape[0]
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            out[i, j] = _from_sympy(inv[i, j])
    return out


def exact_determinant(rows) -> Fraction:
    M = sympy.Matrix([[_to_sympy(x) for x in row] for row in rows])
    return _from_sympy(M.det())


def exact_root(value: Fraction, n: int):
    """n-th root of a positive Fraction; exact when it is a perfect power, else float."""
    value = to_exact(value)
    num, num_exact = sympy.integer_nthroot(value.numerator, n)
    den, den_exact = sympy.integer_nthroot(value.denominator, n)
    if num_exact and den_exact:
        return Fraction(int(num), int(den))
    return float(value) ** (1.0 / n)


def signature_of(matrix) -> Tuple[int, int]:
    eigenvalues = np.linalg.eigvalsh(np.asarray(matrix, dtype=float))
    scale = max(1.0, float(np.max(np.abs(eigenvalues))))
    if np.any(np.abs(eigenvalues) <= EIGENVALUE_FLOOR * scale):
        raise DegenerateMetricError(f"metric is degenerate (eigenvalues {eigenvalues})")
    positive = int(np.sum(eigenvalues > 0))
    return positive, DIM - positive


@dataclass(frozen=True)
class Metric7:
    """Symmetric nondegenerate bilinear form on R^7 with its volume density."""

    matrix: Tuple[Tuple, ...]
    signature: Tuple[int, int]
    voldensity: object
    exact: bool = False

    @classmethod
    def from_matrix(cls, matrix, voldensity=None) -> 'Metric7':
        arr = np.asarray(matrix, dtype=object)
        if arr.shape != (DIM, DIM):
            raise ValueError(f"metric must be {DIM}x{DIM}, got {arr.shape}")
        exact = all(is_exact(x) for x in arr.ravel()) and (
            voldensity is None or is_exact(voldensity)
        )
        if exact:
            rows = tuple(tuple(to_exact(x) for x in row) for row in arr)
            if any(rows[i][j] != rows[j][i] for i in range(DIM) for j in range(DIM)):
                raise ValueError("metric matrix is not symmetric")
        else:
            numeric = np.asarray(matrix, dtype=float)
            if not np.allclose(numeric, numeric.T, atol=1e-10 * max(1.0, np.abs(numeric).max())):
                raise ValueError("metric matrix is not symmetric")
            numeric = 0.5 * (numeric + numeric.T)
            rows = tuple(tuple(float(x) for x in row) for row in numeric)
        signature = signature_of(rows)
        if voldensity is None:
            if exact:
                det = exact_determinant(rows)
                voldensity = exact_root(abs(det), 2)
                exact = isinstance(voldensity, Fraction)
            else:
                voldensity = float(np.sqrt(abs(np.linalg.det(np.asarray(rows, dtype=float)))))
        if exact:
            voldensity = to_exact(voldensity)
        else:
            rows = tuple(tuple(float(x) for x in row) for row in rows)
            voldensity = float(voldensity)
        return cls(rows, signature, voldensity, exact)

    @classmethod
    def euclidean(cls) -> 'Metric7':
        return cls.from_matrix([[int(i == j) for j in range(DIM)] for i in range(DIM)], 1)

    def array(self) -> np.ndarray:
        return np.asarray(self.matrix, dtype=float)

    def inverse(self) -> np.ndarray:
        if self.exact:
            return exact_inverse(self.matrix)
        return np.linalg.inv(self.array())

    @property
    def riemannian(self) -> bool:
        return self.signature == (DIM, 0)

    def to_json(self) -> dict:
        def encode(x):
            return str(x) if isinstance(x, Fraction) else float(x)

        return {
            'matrix': [[encode(x) for x in row] for row in self.matrix],
            'signature': list(self.signature),
            'voldensity': encode(self.voldensity),
            'exact': self.exact,
        }


@lru_cache(maxsize=256)
def pairing_matrix(metric: Metric7, p: int) -> np.ndarray:
    """Gram matrix of the induced pairing on p-form coefficients."""
    return compound_matrix(metric.inverse(), p)


@lru_cache(maxsize=256)
def star_matrix(metric: Metric7, p: int) -> np.ndarray:
    """Matrix of the Hodge star from p-forms to (7-p)-forms (column convention)."""
    C = pairing_matrix(metric, p)
    Pc = complement_matrix(p)
    if metric.exact and C.dtype == object:
        return Pc.astype(object).dot(C) * metric.voldensity
    return float(metric.voldensity) * (Pc.astype(float) @ np.asarray(C, dtype=float))


def _require(metric):
    if metric is None:
        raise DegenerateMetricError("no metric: the form is degenerate")
    return metric


def hodge_star(metric: Metric7, a: ConstForm) -> ConstForm:
    """⋆a, characterized by b ^ ⋆a = <b, a> vol for all b."""
    S = star_matrix(_require(metric), a.grade)
    if S.dtype == object and a.exact:
        return ConstForm(7 - a.grade, tuple(S.dot(np.array(a.coeffs, dtype=object))))
    return ConstForm.from_array(7 - a.grade, np.asarray(S, dtype=float) @ a.array())


def pairing(metric: Metric7, a: ConstForm, b: ConstForm):
    if a.grade != b.grade:
        raise ValueError(f"cannot pair grades {a.grade} and {b.grade}")
    G = pairing_matrix(_require(metric), a.grade)
    if G.dtype == object and a.exact and b.exact:
        return np.array(a.coeffs, dtype=object).dot(G.dot(np.array(b.coeffs, dtype=object)))
    return float(a.array() @ np.asarray(G, dtype=float) @ b.array())


def signed_norm_squared(metric: Metric7, a: ConstForm):
    """<a, a>; negative values are possible for indefinite metrics."""
    return pairing(metric, a, a)


def congruence(metric: Metric7, A: Sequence[Sequence]) -> np.ndarray:
    """Matrix of the pulled-back metric A^T g A."""
    A = np.asarray(A, dtype=float)
    return A.T @ metric.array() @ A
