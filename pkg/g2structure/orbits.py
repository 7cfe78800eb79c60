"""
g2structure/orbits.py - Orbit tangent space and stabilizer of a form
G2 Variational Lab
"""

import logging
from typing import List

import numpy as np
from scipy.linalg import expm, null_space

from errors import AutomorphismError
from exterior.algebra import AXES, DIM, ConstForm, pullback

logger = logging.getLogger(__name__)

RANK_TOLERANCE = 1e-9


def _replace_axis(form: ConstForm, a: int, b: int) -> ConstForm:
    """Derivation induced by E_ab: each dx^a is replaced by dx^b."""
    terms = {}
    for I, c in form.terms().items():
        if a in I:
            J = tuple(b if x == a else x for x in I)
            terms[J] = terms.get(J, 0) + c
    if not terms:
        return ConstForm.zero(form.grade, form.exact)
    return ConstForm.from_terms(form.grade, terms)


def infinitesimal_action(form: ConstForm) -> np.ndarray:
    """Jacobian of A -> A*form at the identity; column (a-1)*7 + (b-1) is E_ab."""
    columns = [_replace_axis(form, a, b).array() for a in AXES for b in AXES]
    return np.column_stack(columns)


def orbit_rank(form: ConstForm) -> int:
    return int(np.linalg.matrix_rank(infinitesimal_action(form), tol=RANK_TOLERANCE))


def stabilizer_algebra(form: ConstForm) -> List[np.ndarray]:
    """Basis of {X : d/ds (exp sX)* form = 0} as 7x7 matrices."""
    kernel = null_space(infinitesimal_action(form), rcond=RANK_TOLERANCE)
    return [kernel[:, k].reshape(DIM, DIM) for k in range(kernel.shape[1])]


def sample_automorphism(form: ConstForm, rng: np.random.Generator, scale: float = 0.3,
                        tol: float = 1e-9) -> np.ndarray:
    """exp of a random stabilizer element; verified to preserve the form."""
    algebra = stabilizer_algebra(form)
    weights = rng.normal(scale=scale, size=len(algebra))
    X = sum(w * K for w, K in zip(weights, algebra))
    A = expm(X)
    drift = (pullback(A, form) - form).max_abs()
    if drift > tol:
        raise AutomorphismError(f"sampled map moves the form by {drift:.3e}")
    logger.debug(f"Sampled automorphism with drift {drift:.3e}")
    return A
