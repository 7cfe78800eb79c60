"""
typedecomp/projections.py - Type projections of forms for a G2 / split-G2 structure
G2 Variational Lab

Projectors are assembled from the linear conditions that characterize each
type, never by orthonormalization, so the indefinite split pairing is
handled the same way as the Euclidean one:

    Λ²:  image {v⌟φ},  kernel {α : α ^ ψ = 0}
    Λ³:  image span{φ} + {v⌟ψ},  kernel {a : a ^ φ = 0, a ^ ψ = 0}
    Λ⁴, Λ⁵:  conjugate the Λ³, Λ² projectors by the Hodge star
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Tuple

import numpy as np

from errors import TypeLabelError
from exterior.algebra import (
    ConstForm,
    basis,
    interior,
    top_coefficient,
    unit_vector,
    wedge,
)
from g2structure.metric import exact_inverse, star_matrix
from g2structure.structure import G2Structure

logger = logging.getLogger(__name__)

VALID_LABELS = {2: (7, 14), 3: (1, 7, 27), 4: (1, 7, 27), 5: (7, 14)}

NUMERIC_TOLERANCE = 1e-10

DESCRIPTIONS = {
    (2, 7): "{v ⌟ φ}",
    (2, 14): "{α : α ^ ψ = 0}",
    (3, 1): "R·φ",
    (3, 7): "{v ⌟ ψ}",
    (3, 27): "{a : a ^ φ = 0, a ^ ψ = 0}",
    (4, 1): "⋆(R·φ)",
    (4, 7): "⋆{v ⌟ ψ}",
    (4, 27): "⋆{a : a ^ φ = 0, a ^ ψ = 0}",
    (5, 7): "⋆{v ⌟ φ}",
    (5, 14): "⋆{α : α ^ ψ = 0}",
}


def check_label(grade: int, label: int):
    if grade not in VALID_LABELS:
        raise TypeLabelError(f"grade {grade} has no type decomposition (use 2, 3, 4 or 5)")
    if label not in VALID_LABELS[grade]:
        raise TypeLabelError(
            f"label {label} is not valid for grade {grade}; expected one of {VALID_LABELS[grade]}"
        )


@dataclass(frozen=True)
class TypeComponent:
    grade: int
    label: int
    form: ConstForm

    def __post_init__(self):
        check_label(self.grade, self.label)
        if self.form.grade != self.grade:
            raise ValueError(f"component form has grade {self.form.grade}, not {self.grade}")


@dataclass(frozen=True)
class Certificate:
    grade: int
    label: int
    passed: bool
    conditions: Tuple[Tuple[str, float], ...]
    tolerance: float
    description: str

    def failures(self) -> Dict[str, float]:
        return {name: r for name, r in self.conditions if r > self.tolerance}

    def to_json(self) -> dict:
        return {
            'grade': self.grade,
            'label': self.label,
            'passed': self.passed,
            'description': self.description,
            'tolerance': self.tolerance,
            'conditions': {name: residual for name, residual in self.conditions},
        }


# -- assembly ---------------------------------------------------------------------


def _columns(forms, exact: bool) -> np.ndarray:
    return np.array([f.coeffs for f in forms], dtype=object if exact else float).T


def _linear_map(fn, p: int, exact: bool) -> np.ndarray:
    """Matrix of a linear map on p-forms, one column per basis form."""
    unit = Fraction(1) if exact else 1.0
    return _columns([fn(ConstForm.basis_form(I, unit)) for I in basis(p)], exact)


def _identity(n: int, exact: bool) -> np.ndarray:
    if not exact:
        return np.eye(n)
    return np.array([[Fraction(int(i == j)) for j in range(n)] for i in range(n)], dtype=object)


def _solve(M: np.ndarray, R: np.ndarray, exact: bool) -> np.ndarray:
    if exact:
        return exact_inverse(M).dot(R)
    return np.linalg.solve(M, R)


def _product(A, B, exact: bool):
    return A.dot(B) if exact else A @ B


def _threeform_pieces(structure: G2Structure, exact: bool):
    phi, psi = structure.threeform, structure.fourform
    if not exact:
        phi, psi = phi.numeric(), psi.numeric()
    return phi, psi


def _grade2(structure: G2Structure, exact: bool) -> Dict[int, np.ndarray]:
    phi, psi = _threeform_pieces(structure, exact)
    U = _columns([interior(unit_vector(a, exact), phi) for a in range(1, 8)], exact)
    L = _linear_map(lambda form: wedge(form, psi), 2, exact)
    P7 = _product(U, _solve(_product(L, U, exact), L, exact), exact)
    return {7: P7, 14: _identity(21, exact) - P7}


def _grade3(structure: G2Structure, exact: bool) -> Dict[int, np.ndarray]:
    phi, psi = _threeform_pieces(structure, exact)
    U = _columns([phi] + [interior(unit_vector(a, exact), psi) for a in range(1, 8)], exact)
    L_phi = _linear_map(lambda form: wedge(form, phi), 3, exact)
    L_psi = _linear_map(lambda form: wedge(form, psi), 3, exact)
    L = np.vstack([L_phi, L_psi])
    coords = _solve(_product(L, U, exact), L, exact)
    P1 = _product(U[:, :1], coords[:1, :], exact)
    P7 = _product(U[:, 1:], coords[1:, :], exact)
    return {1: P1, 7: P7, 27: _identity(35, exact) - P1 - P7}


def _conjugated(structure: G2Structure, grade: int, exact: bool) -> Dict[int, np.ndarray]:
    lower = 7 - grade
    inner = _grade3(structure, exact) if lower == 3 else _grade2(structure, exact)
    to_upper = star_matrix(structure.metric, lower)
    to_lower = star_matrix(structure.metric, grade)
    if not exact:
        to_upper = np.asarray(to_upper, dtype=float)
        to_lower = np.asarray(to_lower, dtype=float)
    return {
        d: _product(_product(to_upper, P, exact), to_lower, exact) for d, P in inner.items()
    }


@lru_cache(maxsize=64)
def _projector_items(structure: G2Structure, grade: int):
    structure.require_stable()
    exact = structure.exact
    if grade == 2:
        table = _grade2(structure, exact)
    elif grade == 3:
        table = _grade3(structure, exact)
    elif grade in (4, 5):
        table = _conjugated(structure, grade, exact)
    else:
        raise TypeLabelError(f"grade {grade} has no type decomposition (use 2, 3, 4 or 5)")
    logger.debug(f"Assembled grade-{grade} projectors ({'exact' if exact else 'numeric'})")
    return tuple(sorted(table.items()))


def projectors(structure: G2Structure, grade: int) -> Dict[int, np.ndarray]:
    """label -> projection matrix on C(7, grade)-dimensional coefficient space."""
    return dict(_projector_items(structure, grade))


def projector_ranks(structure: G2Structure, grade: int) -> Dict[int, int]:
    ranks = {}
    for label, P in projectors(structure, grade).items():
        if P.dtype == object:
            # Trace equals rank for an idempotent matrix.
            ranks[label] = int(sum(P[i, i] for i in range(P.shape[0])))
        else:
            ranks[label] = int(np.linalg.matrix_rank(P, tol=1e-9))
    return ranks


def _apply(P: np.ndarray, form: ConstForm) -> ConstForm:
    if P.dtype == object and form.exact:
        return ConstForm(form.grade, tuple(P.dot(np.array(form.coeffs, dtype=object))))
    return ConstForm.from_array(form.grade, np.asarray(P, dtype=float) @ form.array())


def project(structure: G2Structure, label: int, form: ConstForm) -> TypeComponent:
    check_label(form.grade, label)
    P = projectors(structure, form.grade)[label]
    return TypeComponent(form.grade, label, _apply(P, form))


def decompose(structure: G2Structure, form: ConstForm) -> Dict[int, TypeComponent]:
    check_label(form.grade, VALID_LABELS.get(form.grade, (None,))[0])
    return {d: project(structure, d, form) for d in VALID_LABELS[form.grade]}


# -- certificates ------------------------------------------------------------------


def _representation_residual(form: ConstForm, spanning, test_map, exact: bool) -> float:
    """Residual of writing form as a combination of the spanning forms."""
    U = _columns(spanning, exact)
    L = _linear_map(test_map, form.grade, exact)
    target = np.array(form.coeffs, dtype=object if exact else float)
    if not exact:
        target = form.array()
    coords = _solve(_product(L, U, exact), _product(L, target, exact), exact)
    fitted = _product(U, coords, exact)
    return max(abs(float(x)) for x in (fitted - target))


def _conditions(structure: G2Structure, grade: int, label: int, form: ConstForm, exact: bool):
    phi, psi = _threeform_pieces(structure, exact)
    if grade == 2 and label == 7:
        spanning = [interior(unit_vector(a, exact), phi) for a in range(1, 8)]
        residual = _representation_residual(form, spanning, lambda f: wedge(f, psi), exact)
        return [("α = v ⌟ φ", residual)]
    if grade == 2 and label == 14:
        return [("α ^ ψ = 0", wedge(form, psi).max_abs())]
    if grade == 3 and label == 1:
        scale = top_coefficient(wedge(form, psi)) / top_coefficient(wedge(phi, psi))
        return [("a ∈ R·φ", (form - phi * scale).max_abs())]
    if grade == 3 and label == 7:
        spanning = [interior(unit_vector(a, exact), psi) for a in range(1, 8)]
        residual = _representation_residual(form, spanning, lambda f: wedge(f, phi), exact)
        return [("a = v ⌟ ψ", residual)]
    if grade == 3 and label == 27:
        return [("a ^ φ = 0", wedge(form, phi).max_abs()),
                ("a ^ ψ = 0", wedge(form, psi).max_abs())]
    lower = 7 - grade
    starred = _apply(star_matrix(structure.metric, grade), form)
    return [(f"⋆: {name}", r) for name, r in _conditions(structure, lower, label, starred, exact)]


def characterize(structure: G2Structure, component: TypeComponent) -> Certificate:
    """Check the defining membership equations of a type component."""
    exact = structure.exact and component.form.exact
    form = component.form if exact else component.form.numeric()
    tolerance = 0.0 if exact else NUMERIC_TOLERANCE * max(1.0, form.max_abs())
    conditions = _conditions(structure, component.grade, component.label, form, exact)
    conditions = tuple((name, float(r)) for name, r in conditions)
    passed = all(r <= tolerance for _, r in conditions)
    return Certificate(
        component.grade, component.label, passed, conditions, tolerance,
        DESCRIPTIONS[(component.grade, component.label)],
    )


def dimension_check(structure: G2Structure) -> Dict[int, Dict[int, int]]:
    return {p: projector_ranks(structure, p) for p in sorted(VALID_LABELS)}


__all__ = [
    'Certificate',
    'TypeComponent',
    'VALID_LABELS',
    'characterize',
    'decompose',
    'dimension_check',
    'project',
    'projector_ranks',
    'projectors',
]
