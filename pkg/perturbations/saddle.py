"""
perturbations/saddle.py - Gram matrices of the second variation on bump subspaces
G2 Variational Lab
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from errors import PackingError
from exterior.fields import FormField, enclosing_ball
from functionals.hitchin import second_variation
from perturbations.families import PerturbationFamily, make_family
from quadrature.domains import Domain7, QuadratureSpec

logger = logging.getLogger(__name__)

OFF_DIAGONAL_TOLERANCE = 1e-12
BUMP_SPACING = 2.5  # center distance in units of η


@dataclass
class SaddleReport:
    families: List[str]
    matrix: np.ndarray
    eigenvalues: np.ndarray
    expected_sign: int

    @property
    def off_diagonal(self) -> float:
        off = self.matrix - np.diag(np.diag(self.matrix))
        return float(np.max(np.abs(off))) if off.size else 0.0

    @property
    def verdict(self) -> str:
        if np.all(self.eigenvalues > 0):
            return 'positive-definite'
        if np.all(self.eigenvalues < 0):
            return 'negative-definite'
        return 'indefinite'

    @property
    def passed(self) -> bool:
        expected = 'positive-definite' if self.expected_sign > 0 else 'negative-definite'
        return self.verdict == expected and self.off_diagonal <= OFF_DIAGONAL_TOLERANCE

    def to_json(self) -> dict:
        return {
            'families': self.families,
            'gram': self.matrix.tolist(),
            'eigenvalues': self.eigenvalues.tolist(),
            'off_diagonal_max': self.off_diagonal,
            'verdict': self.verdict,
            'expected_sign': '+' if self.expected_sign > 0 else '-',
            'passed': self.passed,
        }


def line_bumps(name: str, k: int, eta: float = 1.0) -> List[PerturbationFamily]:
    """k members of one family spaced along the x¹ axis."""
    return [
        PerturbationFamily(name, center=(BUMP_SPACING * eta * i,) + (0.0,) * 6, eta=eta)
        for i in range(k)
    ]


def _check_disjoint(bumps: Sequence[PerturbationFamily]):
    for i, a in enumerate(bumps):
        for j in range(i + 1, len(bumps)):
            b = bumps[j]
            gap = float(np.linalg.norm(np.subtract(a.center, b.center)))
            if gap < a.eta + b.eta:
                raise PackingError(f"bumps {i} and {j} overlap (center distance {gap:.4g})")


def saddle_gram(base: FormField, bumps: Sequence[PerturbationFamily],
                spec: Optional[QuadratureSpec] = None) -> SaddleReport:
    """D²H on span{dα_i} and its definiteness verdict."""
    if not bumps:
        raise ValueError("saddle_gram needs at least one bump")
    _check_disjoint(bumps)
    kinds = {bump.kind for bump in bumps}
    if len(kinds) != 1:
        raise ValueError("all bumps must belong to the same functional")
    kind = kinds.pop()
    spec = spec or QuadratureSpec.moment_reduction()

    center, radius = enclosing_ball([(b.center, b.eta) for b in bumps])
    domain = Domain7.ball(center, radius * (1.0 + 1e-9) + 1e-9)
    variations = [make_family(bump)[1] for bump in bumps]
    k = len(bumps)
    G = np.zeros((k, k))
    for i in range(k):
        for j in range(i, k):
            value = second_variation(kind, domain, base, variations[i], variations[j], spec)
            G[i, j] = G[j, i] = value.value
    eigenvalues = np.linalg.eigvalsh(G)
    signs = {bump.sign for bump in bumps}
    expected = signs.pop() if len(signs) == 1 else 0
    report = SaddleReport([b.name for b in bumps], G, eigenvalues, expected)
    logger.info(f"saddle Gram of {k} bumps: {report.verdict}")
    return report


__all__ = ['SaddleReport', 'line_bumps', 'saddle_gram']
