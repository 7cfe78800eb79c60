"""
exterior/literals.py - Textual form literals
G2 Variational Lab

Grammar: a signed sum of `coeff*dx[i,j,...]` terms, e.g.
`2*dx[1,2,3] - 1/3*dx[4,5,6,7]`. Coefficients are integers or fractions
(exact) or decimals (numeric). A bare fixture name such as `psi0` or
`phi0~` is also accepted, optionally scaled: `8*phi0`.
"""

import re
from fractions import Fraction

from errors import FormLiteralError
from exterior.algebra import ConstForm, normalize_index
from exterior.models import NAMED_FORMS

_NUMBER = r'(?:\d+/\d+|\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)'
_TERM_RE = re.compile(
    r'\s*(?P<sign>[+-])?\s*(?:(?P<coeff>' + _NUMBER + r')\s*\*\s*)?'
    r'dx\[(?P<axes>[^\]]*)\]\s*'
)
_NAMED_RE = re.compile(
    r'^\s*(?P<sign>[+-])?\s*(?:(?P<coeff>' + _NUMBER + r')\s*\*\s*)?(?P<name>[a-z0-9~/]+)\s*$'
)


def _parse_number(text: str):
    if text is None:
        return Fraction(1)
    if '.' in text or 'e' in text.lower():
        return float(text)
    return Fraction(text)


def parse_form(text: str) -> ConstForm:
    """Parse a form literal or a named fixture."""
    if not text or not text.strip():
        raise FormLiteralError("empty form literal")

    named = _NAMED_RE.match(text)
    if named and named.group('name') in NAMED_FORMS:
        coeff = _parse_number(named.group('coeff'))
        if named.group('sign') == '-':
            coeff = -coeff
        return NAMED_FORMS[named.group('name')] * coeff

    terms = {}
    grade = None
    position = 0
    for match in _TERM_RE.finditer(text):
        if match.start() != position:
            break
        position = match.end()
        if match.group('sign') is None and terms:
            raise FormLiteralError(f"missing operator before term at offset {match.start()}")
        axes_text = match.group('axes').strip()
        try:
            axes = tuple(int(a) for a in axes_text.split(',')) if axes_text else ()
        except ValueError as e:
            raise FormLiteralError(f"bad axis list '{axes_text}'") from e
        if any(not 1 <= a <= 7 for a in axes):
            raise FormLiteralError(f"axes must lie in 1..7, got {axes}")
        sign, index = normalize_index(axes)
        if not sign:
            raise FormLiteralError(f"repeated axis in dx{list(axes)}")
        if grade is None:
            grade = len(index)
        elif grade != len(index):
            raise FormLiteralError(f"mixed grades {grade} and {len(index)} in one literal")
        coeff = _parse_number(match.group('coeff')) * sign
        if match.group('sign') == '-':
            coeff = -coeff
        terms[index] = terms.get(index, 0) + coeff

    if position != len(text) or grade is None:
        raise FormLiteralError(f"cannot parse form literal near offset {position}: '{text}'")
    if all(isinstance(c, Fraction) for c in terms.values()):
        return ConstForm.from_terms(grade, terms)
    return ConstForm.from_terms(grade, {I: float(c) for I, c in terms.items()})


def _format_coeff(c) -> str:
    if isinstance(c, Fraction):
        return str(c)
    return f"{c:.12g}"


def format_form(form: ConstForm) -> str:
    """Inverse of parse_form for non-named literals."""
    terms = form.terms()
    if not terms:
        return f"0*dx[{','.join(str(a) for a in range(1, form.grade + 1))}]"
    parts = []
    for I, c in terms.items():
        magnitude = -c if c < 0 else c
        body = f"dx[{','.join(str(a) for a in I)}]"
        if magnitude != 1:
            body = f"{_format_coeff(magnitude)}*{body}"
        if not parts:
            parts.append(f"-{body}" if c < 0 else body)
        else:
            parts.append(f"- {body}" if c < 0 else f"+ {body}")
    return ' '.join(parts)
