"""
exterior/algebra.py - Constant exterior forms on R^7
G2 Variational Lab

Coefficients are stored in lexicographic multi-index order. Exact forms
carry fractions.Fraction coefficients, numeric forms carry floats; mixing
the two yields a numeric form.
"""

import logging
import numbers
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Dict, Mapping, Sequence, Tuple

import numpy as np

from errors import InteriorProductError

logger = logging.getLogger(__name__)

DIM = 7
AXES = tuple(range(1, DIM + 1))

MultiIndex = Tuple[int, ...]


def is_exact(value) -> bool:
    return isinstance(value, numbers.Rational) and not isinstance(value, bool)


def to_exact(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, numbers.Integral):
        return Fraction(int(value))
    return Fraction(value.numerator, value.denominator)


def dimension(p: int) -> int:
    return comb(DIM, p)


@lru_cache(maxsize=None)
def basis(p: int) -> Tuple[MultiIndex, ...]:
    """Increasing multi-indices of length p, lexicographic."""
    if not 0 <= p <= DIM:
        raise ValueError(f"grade must lie in 0..{DIM}, got {p}")
    return tuple(combinations(AXES, p))


@lru_cache(maxsize=None)
def index_map(p: int) -> Dict[MultiIndex, int]:
    return {I: k for k, I in enumerate(basis(p))}


def permutation_sign(seq: Sequence[int]) -> int:
    inversions = sum(
        1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j]
    )
    return -1 if inversions % 2 else 1


def merge_sign(I: Sequence[int], J: Sequence[int]) -> Tuple[int, MultiIndex]:
    """Sign and sorted index of dx^I ^ dx^J (sign 0 on a shared axis)."""
    if set(I) & set(J):
        return 0, ()
    joined = tuple(I) + tuple(J)
    return permutation_sign(joined), tuple(sorted(joined))


def normalize_index(I: Sequence[int]) -> Tuple[int, MultiIndex]:
    """Sort an arbitrary index list, returning (sign, sorted); sign 0 on repeats."""
    I = tuple(int(a) for a in I)
    if len(set(I)) != len(I):
        return 0, ()
    return permutation_sign(I), tuple(sorted(I))


def complement(I: Sequence[int]) -> MultiIndex:
    return tuple(a for a in AXES if a not in I)


@dataclass(frozen=True)
class ConstForm:
    """An alternating form on R^7 with one coefficient per increasing multi-index."""

    grade: int
    coeffs: Tuple
    exact: bool = True

    def __post_init__(self):
        if len(self.coeffs) != dimension(self.grade):
            raise ValueError(
                f"grade-{self.grade} form needs {dimension(self.grade)} coefficients, "
                f"got {len(self.coeffs)}"
            )
        if self.exact:
            object.__setattr__(self, 'coeffs', tuple(to_exact(c) for c in self.coeffs))
        else:
            object.__setattr__(self, 'coeffs', tuple(float(c) for c in self.coeffs))

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, p: int, exact: bool = True) -> 'ConstForm':
        return cls(p, (0,) * dimension(p), exact)

    @classmethod
    def scalar(cls, value) -> 'ConstForm':
        return cls(0, (value,), is_exact(value))

    @classmethod
    def from_terms(cls, p: int, terms: Mapping[Sequence[int], object]) -> 'ConstForm':
        """Build from {index: coefficient}; unsorted indices pick up their sign."""
        exact = all(is_exact(c) for c in terms.values())
        zero = Fraction(0) if exact else 0.0
        coeffs = [zero] * dimension(p)
        idx = index_map(p)
        for I, c in terms.items():
            if len(I) != p:
                raise ValueError(f"index {tuple(I)} does not have length {p}")
            sign, key = normalize_index(I)
            if sign:
                coeffs[idx[key]] += sign * (to_exact(c) if exact else float(c))
        return cls(p, tuple(coeffs), exact)

    @classmethod
    def basis_form(cls, I: Sequence[int], coeff=1) -> 'ConstForm':
        return cls.from_terms(len(I), {tuple(I): coeff})

    @classmethod
    def from_array(cls, p: int, values) -> 'ConstForm':
        return cls(p, tuple(np.asarray(values, dtype=float).ravel()), False)

    @classmethod
    def from_vector(cls, v: Sequence) -> 'ConstForm':
        v = tuple(v)
        return cls(1, v, all(is_exact(x) for x in v))

    # -- views --------------------------------------------------------------

    def array(self) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs], dtype=float)

    def numeric(self) -> 'ConstForm':
        return self if not self.exact else ConstForm(self.grade, self.coeffs, False)

    def terms(self) -> Dict[MultiIndex, object]:
        return {I: c for I, c in zip(basis(self.grade), self.coeffs) if c != 0}

    def __getitem__(self, I: Sequence[int]):
        sign, key = normalize_index(I)
        if not sign or len(key) != self.grade:
            return Fraction(0) if self.exact else 0.0
        return sign * self.coeffs[index_map(self.grade)[key]]

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(abs(c) <= tol for c in self.coeffs)

    def max_abs(self) -> float:
        return max((abs(float(c)) for c in self.coeffs), default=0.0)

    def allclose(self, other: 'ConstForm', tol: float = 1e-12) -> bool:
        if self.grade != other.grade:
            return False
        return (self - other).max_abs() <= tol

    # -- arithmetic ---------------------------------------------------------

    def _combine(self, other: 'ConstForm', sign: int) -> 'ConstForm':
        if not isinstance(other, ConstForm):
            return NotImplemented
        if self.grade != other.grade:
            raise ValueError(f"cannot add forms of grade {self.grade} and {other.grade}")
        if self.exact and other.exact:
            return ConstForm(
                self.grade, tuple(a + sign * b for a, b in zip(self.coeffs, other.coeffs))
            )
        return ConstForm.from_array(self.grade, self.array() + sign * other.array())

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return self * -1

    def __mul__(self, scalar):
        if isinstance(scalar, ConstForm):
            return NotImplemented
        if self.exact and is_exact(scalar):
            s = to_exact(scalar)
            return ConstForm(self.grade, tuple(s * c for c in self.coeffs))
        return ConstForm.from_array(self.grade, float(scalar) * self.array())

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if self.exact and is_exact(scalar):
            return self * (1 / to_exact(scalar))
        return self * (1.0 / float(scalar))

    def __xor__(self, other):
        return wedge(self, other)

    # -- serialization --------------------------------------------------------

    def to_json(self) -> dict:
        def encode(c):
            if isinstance(c, Fraction):
                return str(c) if c.denominator != 1 else int(c)
            return float(c)

        return {
            'grade': self.grade,
            'exact': self.exact,
            'coeffs': {''.join(str(a) for a in I): encode(c) for I, c in self.terms().items()},
        }

    @classmethod
    def from_json(cls, payload: dict) -> 'ConstForm':
        p = int(payload['grade'])
        exact = bool(payload.get('exact', True))
        terms = {}
        for key, value in payload.get('coeffs', {}).items():
            index = tuple(int(ch) for ch in key)
            if exact:
                terms[index] = Fraction(str(value))
            else:
                terms[index] = float(value)
        if not terms:
            return cls.zero(p, exact)
        form = cls.from_terms(p, terms)
        return form if exact else form.numeric()


# -- cached coefficient-space tensors ---------------------------------------


@lru_cache(maxsize=None)
def wedge_tensor(p: int, q: int) -> np.ndarray:
    """T[i, j, k]: sign with which basis(p)[i] ^ basis(q)[j] lands on basis(p+q)[k]."""
    T = np.zeros((dimension(p), dimension(q), dimension(p + q)), dtype=np.int8)
    out = index_map(p + q)
    for i, I in enumerate(basis(p)):
        for j, J in enumerate(basis(q)):
            sign, K = merge_sign(I, J)
            if sign:
                T[i, j, out[K]] = sign
    T.setflags(write=False)
    return T


@lru_cache(maxsize=None)
def interior_tensor(p: int) -> np.ndarray:
    """T[a, i, k]: e_{a+1} contracted into basis(p)[i] gives T * basis(p-1)[k]."""
    T = np.zeros((DIM, dimension(p), dimension(p - 1)), dtype=np.int8)
    out = index_map(p - 1)
    for i, I in enumerate(basis(p)):
        for k, axis in enumerate(I):
            rest = I[:k] + I[k + 1:]
            T[axis - 1, i, out[rest]] = -1 if k % 2 else 1
    T.setflags(write=False)
    return T


@lru_cache(maxsize=None)
def complement_matrix(p: int) -> np.ndarray:
    """Pc[idx(Jc), idx(J)] = sign of dx^J ^ dx^Jc against dx^{1..7}."""
    Pc = np.zeros((dimension(DIM - p), dimension(p)), dtype=np.int8)
    out = index_map(DIM - p)
    for j, J in enumerate(basis(p)):
        Jc = complement(J)
        sign, _ = merge_sign(J, Jc)
        Pc[out[Jc], j] = sign
    Pc.setflags(write=False)
    return Pc


# -- operations ---------------------------------------------------------------


def wedge(a: ConstForm, b: ConstForm) -> ConstForm:
    p, q = a.grade, b.grade
    exact = a.exact and b.exact
    if p + q > DIM:
        return ConstForm.zero(DIM, exact)
    if exact:
        out = [Fraction(0)] * dimension(p + q)
        idx = index_map(p + q)
        b_terms = b.terms()
        for I, x in a.terms().items():
            for J, y in b_terms.items():
                sign, K = merge_sign(I, J)
                if sign:
                    out[idx[K]] += sign * x * y
        return ConstForm(p + q, tuple(out))
    coeffs = np.einsum('i,j,ijk->k', a.array(), b.array(), wedge_tensor(p, q))
    return ConstForm.from_array(p + q, coeffs)


def interior(v: Sequence, a: ConstForm) -> ConstForm:
    """Contraction v ⌟ a."""
    if a.grade == 0:
        raise InteriorProductError("cannot contract a scalar")
    v = tuple(v)
    if len(v) != DIM:
        raise ValueError(f"vector needs {DIM} components, got {len(v)}")
    p = a.grade
    if a.exact and all(is_exact(x) for x in v):
        out = [Fraction(0)] * dimension(p - 1)
        idx = index_map(p - 1)
        for I, c in a.terms().items():
            for k, axis in enumerate(I):
                component = to_exact(v[axis - 1])
                if component:
                    sign = -1 if k % 2 else 1
                    out[idx[I[:k] + I[k + 1:]]] += sign * component * c
        return ConstForm(p - 1, tuple(out))
    coeffs = np.einsum('a,i,aik->k', np.asarray(v, dtype=float), a.array(), interior_tensor(p))
    return ConstForm.from_array(p - 1, coeffs)


def unit_vector(axis: int, exact: bool = True) -> Tuple:
    one, zero = (Fraction(1), Fraction(0)) if exact else (1.0, 0.0)
    return tuple(one if a == axis else zero for a in AXES)


def _matrix_is_exact(A) -> bool:
    arr = np.asarray(A, dtype=object)
    return arr.ndim == 2 and all(is_exact(x) for x in arr.ravel())


def compound_matrix(A, p: int) -> np.ndarray:
    """Matrix of p x p minors: M[I, J] = det A[I, J].

    Exact input (ints / Fractions) gives an object array of Fractions built by
    wedging the rows as 1-forms; float input may carry leading batch axes.
    """
    if _matrix_is_exact(A):
        rows = [ConstForm.from_vector(row) for row in np.asarray(A, dtype=object)]
        n = dimension(p)
        M = np.empty((n, n), dtype=object)
        for i, I in enumerate(basis(p)):
            acc = ConstForm.scalar(Fraction(1))
            for axis in I:
                acc = wedge(acc, rows[axis - 1])
            M[i, :] = acc.coeffs
        return M
    A = np.asarray(A, dtype=float)
    if p == 0:
        return np.ones(A.shape[:-2] + (1, 1))
    idx = np.array(basis(p)) - 1
    sub = A[..., idx[:, None, :, None], idx[None, :, None, :]]
    return np.linalg.det(sub)


def pullback(A, a: ConstForm) -> ConstForm:
    """A*a for the linear map x -> A x, so A*dx^i = sum_j A[i, j] dx^j."""
    M = compound_matrix(A, a.grade)
    if M.dtype == object and a.exact:
        coeffs = M.T.dot(np.array(a.coeffs, dtype=object))
        return ConstForm(a.grade, tuple(coeffs))
    return ConstForm.from_array(a.grade, np.asarray(M, dtype=float).T @ a.array())


def top_coefficient(a: ConstForm):
    if a.grade != DIM:
        raise ValueError(f"expected a top-degree form, got grade {a.grade}")
    return a.coeffs[0]
