"""
exterior/fields.py - Form-valued fields on R^7
G2 Variational Lab

A FormField is evaluable on arrays of points and may carry a structured
representation: a sum of terms

    coeff * u_k(|x - c|) * (x - c)^m * dx^I      (radial terms)
    coeff * x^m * dx^I                            (polynomial terms)

keyed by (radial, level, monomial, index). Exterior differentiation on the
structured representation is exact, so d(dF) == 0 term by term.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from errors import NonDifferentiableFieldError
from exterior.algebra import (
    AXES,
    DIM,
    ConstForm,
    dimension,
    index_map,
    interior_tensor,
    is_exact,
    merge_sign,
    to_exact,
    wedge_tensor,
)
from exterior.profiles import BumpProfile

logger = logging.getLogger(__name__)

Monomial = Tuple[int, ...]
Radial = Optional[Tuple[BumpProfile, Tuple[float, ...]]]
TermKey = Tuple[Radial, Optional[int], Monomial, Tuple[int, ...]]

ZERO_MONOMIAL = (0,) * DIM
ORIGIN = (0.0,) * DIM


def _add_coeff(x, y):
    if is_exact(x) and is_exact(y):
        return to_exact(x) + to_exact(y)
    return float(x) + float(y)


def _mul_coeff(x, y):
    if is_exact(x) and is_exact(y):
        return to_exact(x) * to_exact(y)
    return float(x) * float(y)


def _bump(mono: Monomial, axis: int, step: int) -> Monomial:
    out = list(mono)
    out[axis - 1] += step
    return tuple(out)


def monomial_values(points: np.ndarray, mono: Monomial) -> np.ndarray:
    if not any(mono):
        return np.ones(points.shape[0])
    return np.prod(points ** np.asarray(mono), axis=1)


def _collect(pairs) -> Tuple[Tuple[TermKey, object], ...]:
    acc: Dict[TermKey, object] = {}
    for key, coeff in pairs:
        acc[key] = _add_coeff(acc[key], coeff) if key in acc else coeff
    return tuple((k, c) for k, c in acc.items() if c != 0)


def enclosing_ball(balls) -> Tuple[Optional[Tuple[float, ...]], float]:
    balls = [(np.asarray(c, dtype=float), float(r)) for c, r in balls]
    if not balls:
        return None, 0.0
    if len(balls) == 1:
        return tuple(balls[0][0]), balls[0][1]
    center = np.mean([c for c, _ in balls], axis=0)
    radius = max(float(np.linalg.norm(c - center)) + r for c, r in balls)
    return tuple(center), radius


@dataclass(frozen=True, eq=False)
class FormField:
    """A p-form valued function on R^7."""

    grade: int
    terms: Optional[Tuple[Tuple[TermKey, object], ...]] = None
    evaluator: Optional[Callable[[np.ndarray], np.ndarray]] = None
    support_center: Optional[Tuple[float, ...]] = None
    support_radius: Optional[float] = None
    fd_step: Optional[float] = None

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, p: int) -> 'FormField':
        return cls(p, terms=())

    @classmethod
    def constant(cls, form: ConstForm) -> 'FormField':
        pairs = [((None, None, ZERO_MONOMIAL, I), c) for I, c in form.terms().items()]
        return cls(form.grade, terms=_collect(pairs))

    @classmethod
    def polynomial(cls, p: int, terms: Dict[Tuple[Monomial, Sequence[int]], object]) -> 'FormField':
        """Sum of coeff * x^m dx^I given as {(m, I): coeff}."""
        pairs = []
        for (mono, I), c in terms.items():
            form = ConstForm.from_terms(p, {tuple(I): c})
            for J, value in form.terms().items():
                pairs.append(((None, None, tuple(mono), J), value))
        return cls(p, terms=_collect(pairs))

    @classmethod
    def radial(cls, profile: BumpProfile, center: Sequence[float], form: ConstForm,
               coeff=1) -> 'FormField':
        """coeff * f(|x - center|) * form."""
        center = tuple(float(x) for x in center)
        pairs = [
            (((profile, center), 0, ZERO_MONOMIAL, I), _mul_coeff(coeff, c))
            for I, c in form.terms().items()
        ]
        return cls(form.grade, terms=_collect(pairs))

    @classmethod
    def from_callable(cls, p: int, fn: Callable[[np.ndarray], np.ndarray],
                      support_center=None, support_radius=None, fd_step=None) -> 'FormField':
        if support_radius is not None and support_center is None:
            support_center = ORIGIN
        return cls(
            p,
            evaluator=fn,
            support_center=None if support_center is None else tuple(map(float, support_center)),
            support_radius=support_radius,
            fd_step=fd_step,
        )

    # -- structure queries ----------------------------------------------------

    @property
    def structured(self) -> bool:
        return self.terms is not None

    def term_dict(self) -> Dict[TermKey, object]:
        if self.terms is None:
            raise NonDifferentiableFieldError("field has no structured representation")
        return dict(self.terms)

    @property
    def support(self) -> Tuple[Optional[Tuple[float, ...]], Optional[float]]:
        """(center, radius) of a closed ball outside which the field vanishes."""
        if not self.structured:
            return self.support_center, self.support_radius
        balls = set()
        for (radial, _, _, _), _ in self.terms:
            if radial is None:
                return None, None
            profile, center = radial
            balls.add((center, profile.support))
        if not balls:
            return ORIGIN, 0.0
        return enclosing_ball(sorted(balls))

    def radial_groups(self) -> Dict[Radial, Dict[TermKey, object]]:
        groups: Dict[Radial, Dict[TermKey, object]] = defaultdict(dict)
        for key, c in self.term_dict().items():
            groups[key[0]][key] = c
        return dict(groups)

    def is_polynomial(self) -> bool:
        return self.structured and all(key[0] is None for key, _ in self.terms)

    def constant_form(self) -> Optional[ConstForm]:
        """The field as a ConstForm when it is constant, else None."""
        if not self.structured:
            return None
        terms = {}
        for (radial, _, mono, I), c in self.terms:
            if radial is not None or any(mono):
                return None
            terms[I] = c
        if not terms:
            return ConstForm.zero(self.grade)
        return ConstForm.from_terms(self.grade, terms)

    def split_constant(self) -> Tuple[ConstForm, 'FormField']:
        """(constant part, remainder) for structured fields."""
        const_pairs, rest = [], []
        for key, c in self.term_dict().items():
            radial, _, mono, I = key
            (const_pairs if radial is None and not any(mono) else rest).append((key, c))
        const = FormField(self.grade, terms=tuple(const_pairs)).constant_form()
        return const, FormField(self.grade, terms=tuple(rest))

    # -- evaluation -----------------------------------------------------------

    def evaluate(self, points) -> np.ndarray:
        """Coefficient array of shape (N, C(7, p)) at points of shape (N, 7)."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if not self.structured:
            values = np.asarray(self.evaluator(points), dtype=float)
            values = values.reshape(points.shape[0], dimension(self.grade))
            center, radius = self.support
            if radius is not None:
                outside = np.linalg.norm(points - np.asarray(center), axis=1) > radius
                values = np.where(outside[:, None], 0.0, values)
            return values

        out = np.zeros((points.shape[0], dimension(self.grade)))
        idx = index_map(self.grade)
        levels_cache = {}
        for (radial, level, mono, I), c in self.terms:
            if radial is None:
                vals = monomial_values(points, mono)
            else:
                profile, center = radial
                shifted = points - np.asarray(center)
                cache_key = (radial, level)
                if cache_key not in levels_cache:
                    r = np.linalg.norm(shifted, axis=1)
                    levels_cache[cache_key] = profile.level(level, r)
                vals = levels_cache[cache_key] * monomial_values(shifted, mono)
            out[:, idx[I]] += float(c) * vals
        return out

    def at(self, x: Sequence) -> ConstForm:
        """Value at a single point; exact for polynomial fields at rational points."""
        x = tuple(x)
        if self.is_polynomial() and all(is_exact(v) for v in x) and all(
            is_exact(c) for _, c in self.terms
        ):
            terms: Dict[Tuple[int, ...], Fraction] = defaultdict(Fraction)
            for (_, _, mono, I), c in self.terms:
                value = to_exact(c)
                for a, e in zip(x, mono):
                    value *= to_exact(a) ** e
                terms[I] += value
            if not terms:
                return ConstForm.zero(self.grade)
            return ConstForm.from_terms(self.grade, dict(terms))
        return ConstForm.from_array(self.grade, self.evaluate(np.array([x], dtype=float))[0])

    # -- algebra ----------------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, ConstForm):
            other = FormField.constant(other)
        if not isinstance(other, FormField):
            return NotImplemented
        if self.grade != other.grade:
            raise ValueError(f"cannot add fields of grade {self.grade} and {other.grade}")
        if self.structured and other.structured:
            return FormField(self.grade, terms=_collect(self.terms + other.terms))
        return _callable_sum(self, other)

    __radd__ = __add__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        if isinstance(other, ConstForm):
            other = FormField.constant(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, scalar):
        if isinstance(scalar, (FormField, ConstForm)):
            return NotImplemented
        if self.structured:
            return FormField(
                self.grade, terms=_collect((k, _mul_coeff(scalar, c)) for k, c in self.terms)
            )
        fn = self.evaluator
        return FormField(
            self.grade,
            evaluator=lambda pts: float(scalar) * fn(pts),
            support_center=self.support_center,
            support_radius=self.support_radius,
            fd_step=self.fd_step,
        )

    __rmul__ = __mul__

    def wedge_const(self, form: ConstForm) -> 'FormField':
        """F ^ form for a constant form on the right."""
        p = self.grade + form.grade
        if p > DIM:
            return FormField.zero(DIM)
        if self.structured:
            pairs = []
            for (radial, level, mono, I), c in self.terms:
                for J, b in form.terms().items():
                    sign, K = merge_sign(I, J)
                    if sign:
                        pairs.append(((radial, level, mono, K), _mul_coeff(sign * c, b)))
            return FormField(p, terms=_collect(pairs))
        fn, T, b = self.evaluator, wedge_tensor(self.grade, form.grade), form.array()
        return FormField(
            p,
            evaluator=lambda pts: np.einsum('ni,j,ijk->nk', fn(pts), b, T),
            support_center=self.support_center,
            support_radius=self.support_radius,
            fd_step=self.fd_step,
        )

    def with_profile(self, profile: BumpProfile, center: Sequence[float] = ORIGIN) -> 'FormField':
        """f(|x - center|) * F for a polynomial field F."""
        if not self.is_polynomial():
            raise ValueError("only polynomial fields can be multiplied by a profile")
        center = tuple(float(v) for v in center)
        radial = (profile, center)
        pairs = []
        for (_, _, mono, I), c in self.terms:
            for shifted, weight in shift_monomial(mono, center):
                pairs.append(((radial, 0, shifted, I), _mul_coeff(c, weight)))
        return FormField(self.grade, terms=_collect(pairs))

    def with_fd_step(self, h: float) -> 'FormField':
        return FormField(
            self.grade, self.terms, self.evaluator, self.support_center, self.support_radius, h
        )

    def derivative(self) -> 'FormField':
        return exterior_derivative(self)

    def max_abs_coefficient(self) -> float:
        if not self.structured:
            raise NonDifferentiableFieldError("field has no structured representation")
        return max((abs(float(c)) for _, c in self.terms), default=0.0)

    def to_json(self) -> dict:
        center, radius = self.support
        return {
            'grade': self.grade,
            'structured': self.structured,
            'terms': len(self.terms) if self.structured else None,
            'support_center': None if center is None else list(center),
            'support_radius': radius,
            'fd_step': self.fd_step,
        }


def shift_monomial(mono: Monomial, center: Tuple[float, ...]):
    """Expand x^m in powers of y = x - center."""
    expansions = [((ZERO_MONOMIAL), 1)]
    for axis, e in enumerate(mono, start=1):
        if e == 0:
            continue
        c = center[axis - 1]
        nxt = []
        for base, weight in expansions:
            for j in range(e + 1):
                coeff = comb(e, j) * (c ** (e - j) if e - j else 1)
                if coeff == 0:
                    continue
                nxt.append((_bump(base, axis, j), weight * coeff))
        expansions = nxt
    return expansions


def _callable_sum(a: FormField, b: FormField) -> FormField:
    balls = []
    for field in (a, b):
        center, radius = field.support
        if radius is None:
            balls = None
            break
        balls.append((center, radius))
    center, radius = (None, None) if balls is None else enclosing_ball(balls)
    steps = [h for h in (a.fd_step, b.fd_step) if h is not None]
    return FormField(
        a.grade,
        evaluator=lambda pts: a.evaluate(pts) + b.evaluate(pts),
        support_center=center,
        support_radius=radius,
        fd_step=min(steps) if steps else None,
    )


def _structured_derivative(F: FormField) -> FormField:
    pairs = []
    for (radial, level, mono, I), c in F.terms:
        for i in AXES:
            sign, K = merge_sign((i,), I)
            if not sign:
                continue
            if radial is not None:
                pairs.append(((radial, level + 1, _bump(mono, i, 1), K), _mul_coeff(sign, c)))
            if mono[i - 1]:
                pairs.append(
                    ((radial, level, _bump(mono, i, -1), K), _mul_coeff(sign * mono[i - 1], c))
                )
    return FormField(F.grade + 1, terms=_collect(pairs))


def _finite_difference_derivative(F: FormField) -> FormField:
    h = float(F.fd_step)
    T = wedge_tensor(1, F.grade)

    def evaluate(points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        partials = np.empty((points.shape[0], DIM, dimension(F.grade)))
        for a in range(DIM):
            step = np.zeros(DIM)
            step[a] = h
            partials[:, a, :] = (F.evaluate(points + step) - F.evaluate(points - step)) / (2 * h)
        return np.einsum('nai,aik->nk', partials, T)

    center, radius = F.support
    return FormField(
        F.grade + 1,
        evaluator=evaluate,
        support_center=center,
        support_radius=None if radius is None else radius + h,
        fd_step=h,
    )


def exterior_derivative(F: FormField) -> FormField:
    """dF; exact on structured fields, central differences when fd_step is set."""
    if F.grade >= DIM:
        return FormField.zero(DIM)
    if F.structured:
        return _structured_derivative(F)
    if F.fd_step is None:
        raise NonDifferentiableFieldError(
            "field has no structured representation; enable finite differences with fd_step"
        )
    logger.debug(f"Finite-difference exterior derivative with step {F.fd_step}")
    return _finite_difference_derivative(F)


def contract_position(F_values: np.ndarray, points: np.ndarray, p: int) -> np.ndarray:
    """Pointwise x ⌟ F for arrays of p-form coefficients."""
    return np.einsum('na,ni,aik->nk', points, F_values, interior_tensor(p))


def constant_field_values(form: ConstForm, n: int) -> np.ndarray:
    return np.broadcast_to(form.array(), (n, dimension(form.grade))).copy()


__all__ = [
    'FormField',
    'contract_position',
    'constant_field_values',
    'enclosing_ball',
    'exterior_derivative',
    'monomial_values',
    'shift_monomial',
]
