"""
functionals/kinds.py - The four volume functionals and their variation operators
G2 Variational Lab
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Tuple

import numpy as np

from g2structure.structure import COMPACT, SPLIT

COMPACT_FLAVOR = 'compact'
SPLIT_FLAVOR = 'split'

OPERATOR_COEFFICIENTS = {
    3: ((1, Fraction(4, 3)), (7, Fraction(1)), (27, Fraction(-1))),
    4: ((1, Fraction(3, 4)), (7, Fraction(1)), (27, Fraction(-1))),
}

PREFACTORS = {3: Fraction(1, 3), 4: Fraction(1, 4)}


@dataclass(frozen=True)
class VariationOperator:
    """σ ↦ Σ_d c_d π_d(σ) on the types of Λ³ or Λ⁴."""

    coefficients: Tuple[Tuple[int, Fraction], ...]

    @classmethod
    def for_grade(cls, grade: int) -> 'VariationOperator':
        if grade not in OPERATOR_COEFFICIENTS:
            raise ValueError(f"variation operators exist for grade 3 and 4, got {grade}")
        return cls(OPERATOR_COEFFICIENTS[grade])

    def as_dict(self) -> Dict[int, Fraction]:
        return dict(self.coefficients)

    def matrix(self, projectors: Dict[int, np.ndarray]) -> np.ndarray:
        return sum(float(c) * np.asarray(projectors[d], dtype=float) for d, c in self.coefficients)

    def to_json(self) -> dict:
        return {str(d): str(c) for d, c in self.coefficients}


@dataclass(frozen=True)
class FunctionalKind:
    """H³, H⁴ and their split analogues."""

    grade: int
    flavor: str = COMPACT_FLAVOR

    def __post_init__(self):
        if self.grade not in (3, 4):
            raise ValueError(f"functional grade must be 3 or 4, got {self.grade}")
        if self.flavor not in (COMPACT_FLAVOR, SPLIT_FLAVOR):
            raise ValueError(f"flavor must be '{COMPACT_FLAVOR}' or '{SPLIT_FLAVOR}'")

    @classmethod
    def parse(cls, name: str) -> 'FunctionalKind':
        """'H3', 'H4', 'H3~', 'H4~'."""
        text = name.strip()
        flavor = SPLIT_FLAVOR if text.endswith('~') else COMPACT_FLAVOR
        digits = text.rstrip('~').upper().lstrip('H')
        if digits not in ('3', '4'):
            raise ValueError(f"unknown functional '{name}'")
        return cls(int(digits), flavor)

    @property
    def orbit(self) -> str:
        return SPLIT if self.flavor == SPLIT_FLAVOR else COMPACT

    @property
    def prefactor(self) -> Fraction:
        return PREFACTORS[self.grade]

    @property
    def operator(self) -> VariationOperator:
        return VariationOperator.for_grade(self.grade)

    @property
    def name(self) -> str:
        return f"H{self.grade}" + ('~' if self.flavor == SPLIT_FLAVOR else '')

    def scaling_exponent(self) -> Fraction:
        return Fraction(7, self.grade)

    def to_json(self) -> dict:
        return {
            'name': self.name,
            'grade': self.grade,
            'flavor': self.flavor,
            'prefactor': str(self.prefactor),
            'operator': self.operator.to_json(),
        }


H3 = FunctionalKind(3, COMPACT_FLAVOR)
H4 = FunctionalKind(4, COMPACT_FLAVOR)
H3_SPLIT = FunctionalKind(3, SPLIT_FLAVOR)
H4_SPLIT = FunctionalKind(4, SPLIT_FLAVOR)
