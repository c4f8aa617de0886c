"""Sparse multivariate polynomials with exact rational coefficients."""
import math
import re
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple, Union

import attr

from .exceptions import FormatError, MissingParameter

Exponents = Tuple[int, ...]
Number = Union[int, Fraction, float]

_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_COEFFICIENT = re.compile(r"^\d+(\.\d+)?(/\d+)?$")
_SIGNED_TERM = re.compile(r"([+-]?)([^+-]+)")


def _order_key(exponents: Exponents) -> Tuple[int, Exponents]:
    return (sum(exponents), exponents)


def _canonical(
    terms: Union[Mapping[Exponents, Fraction], Iterable[Tuple[Exponents, Fraction]]]
) -> Tuple[Tuple[Exponents, Fraction], ...]:
    """Drop zero coefficients and sort by descending graded lex order."""
    items = terms.items() if isinstance(terms, Mapping) else terms
    kept = [(tuple(exp), Fraction(coeff)) for exp, coeff in items if coeff != 0]
    kept.sort(key=lambda item: _order_key(item[0]), reverse=True)
    return tuple(kept)


def to_fraction(value: Union[Number, str]) -> Fraction:
    """Convert a number or rational literal to an exact fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exception:
            raise FormatError(f"Not a rational number: {value!r}") from exception
    return Fraction(value)


@attr.s(auto_attribs=True, frozen=True)
class PolyExpr:
    """Polynomial in named parameters with exact rational coefficients.

    Terms are stored in canonical order (descending total degree, then
    descending exponent tuple) without zero coefficients, so structural
    equality is polynomial equality.
    """

    params: Tuple[str, ...] = attr.ib(converter=tuple)
    terms: Tuple[Tuple[Exponents, Fraction], ...] = attr.ib(
        converter=_canonical, default=()
    )

    @terms.validator
    def _check_terms(self, _attribute, value) -> None:
        for exponents, _ in value:
            if len(exponents) != len(self.params) or min(exponents, default=0) < 0:
                raise ValueError(f"Bad exponent vector {exponents} for {self.params}")

    @staticmethod
    def zero(params: Sequence[str]) -> "PolyExpr":
        """Return the zero polynomial."""
        return PolyExpr(params)

    @staticmethod
    def constant(params: Sequence[str], value: Union[Number, str]) -> "PolyExpr":
        """Return a constant polynomial."""
        return PolyExpr(params, {(0,) * len(params): to_fraction(value)})

    @staticmethod
    def variable(params: Sequence[str], name: str) -> "PolyExpr":
        """Return the polynomial consisting of a single parameter."""
        params = tuple(params)
        if name not in params:
            raise FormatError(f"Unknown parameter {name!r}", params)
        exponents = tuple(1 if p == name else 0 for p in params)
        return PolyExpr(params, {exponents: Fraction(1)})

    @staticmethod
    def parse(text: str, params: Sequence[str]) -> "PolyExpr":
        """Parse `3/2*a^2*b - c + 1` style input over the given parameters."""
        params = tuple(params)
        compact = "".join(str(text).split())
        if not compact:
            raise FormatError("Empty polynomial")
        matches = list(_SIGNED_TERM.finditer(compact))
        if "".join(m.group(0) for m in matches) != compact:
            raise FormatError(f"Malformed polynomial {text!r}")

        result = PolyExpr.zero(params)
        for index, match in enumerate(matches):
            sign, body = match.group(1), match.group(2)
            if index > 0 and not sign:
                raise FormatError(f"Malformed polynomial {text!r}")
            term = PolyExpr.constant(params, -1 if sign == "-" else 1)
            for factor in body.split("*"):
                term = term * _parse_factor(factor, params, text)
            result = result + term
        return result

    @property
    def is_zero(self) -> bool:
        """Return True for the zero polynomial."""
        return not self.terms

    def as_dict(self) -> Dict[Exponents, Fraction]:
        """Return the terms as a plain mapping."""
        return dict(self.terms)

    def degree(self) -> int:
        """Total degree; the zero polynomial has degree -1."""
        return max((sum(exp) for exp, _ in self.terms), default=-1)

    def degree_in(self, name: str) -> int:
        """Degree in a single parameter."""
        slot = self.params.index(name)
        return max((exp[slot] for exp, _ in self.terms), default=-1)

    def variables(self) -> Tuple[str, ...]:
        """Parameters that actually occur, in parameter order."""
        used = [
            name
            for slot, name in enumerate(self.params)
            if any(exp[slot] for exp, _ in self.terms)
        ]
        return tuple(used)

    def leading_coefficient(self) -> Fraction:
        """Coefficient of the first term in canonical order."""
        return self.terms[0][1] if self.terms else Fraction(0)

    def _coerce(self, other: Union["PolyExpr", Number]) -> "PolyExpr":
        if isinstance(other, PolyExpr):
            if other.params != self.params:
                raise ValueError("Polynomials over different parameters")
            return other
        return PolyExpr.constant(self.params, other)

    def __add__(self, other: Union["PolyExpr", Number]) -> "PolyExpr":
        other = self._coerce(other)
        terms = self.as_dict()
        for exponents, coeff in other.terms:
            terms[exponents] = terms.get(exponents, Fraction(0)) + coeff
        return PolyExpr(self.params, terms)

    __radd__ = __add__

    def __neg__(self) -> "PolyExpr":
        return PolyExpr(self.params, [(exp, -coeff) for exp, coeff in self.terms])

    def __sub__(self, other: Union["PolyExpr", Number]) -> "PolyExpr":
        return self + (-self._coerce(other))

    def __rsub__(self, other: Union["PolyExpr", Number]) -> "PolyExpr":
        return self._coerce(other) - self

    def __mul__(self, other: Union["PolyExpr", Number]) -> "PolyExpr":
        other = self._coerce(other)
        terms: Dict[Exponents, Fraction] = {}
        for exp1, coeff1 in self.terms:
            for exp2, coeff2 in other.terms:
                exponents = tuple(a + b for a, b in zip(exp1, exp2))
                terms[exponents] = terms.get(exponents, Fraction(0)) + coeff1 * coeff2
        return PolyExpr(self.params, terms)

    __rmul__ = __mul__

    def __pow__(self, power: int) -> "PolyExpr":
        if power < 0:
            raise ValueError("Negative powers are not polynomials")
        result = PolyExpr.constant(self.params, 1)
        for _ in range(power):
            result = result * self
        return result

    def evaluate(self, values: Mapping[str, Number]) -> Number:
        """Evaluate at a full assignment; exact when the values are rational."""
        for name in self.variables():
            if name not in values:
                raise MissingParameter(f"No value for parameter {name!r}")
        total: Number = Fraction(0)
        for exponents, coeff in self.terms:
            term: Number = coeff
            for name, power in zip(self.params, exponents):
                if power:
                    term = term * values[name] ** power
            total = total + term
        return total

    def substitute(self, values: Mapping[str, Number]) -> "PolyExpr":
        """Substitute rational values for some parameters."""
        result: Dict[Exponents, Fraction] = {}
        for exponents, coeff in self.terms:
            remaining = list(exponents)
            for slot, name in enumerate(self.params):
                if name in values and remaining[slot]:
                    coeff = coeff * to_fraction(values[name]) ** remaining[slot]
                    remaining[slot] = 0
            key = tuple(remaining)
            result[key] = result.get(key, Fraction(0)) + coeff
        return PolyExpr(self.params, result)

    def linear_split(self, name: str) -> Optional[Tuple["PolyExpr", "PolyExpr"]]:
        """Write the polynomial as `name*q + r`; None unless linear in `name`."""
        if self.degree_in(name) != 1:
            return None
        slot = self.params.index(name)
        linear: Dict[Exponents, Fraction] = {}
        rest: Dict[Exponents, Fraction] = {}
        for exponents, coeff in self.terms:
            if exponents[slot]:
                reduced = exponents[:slot] + (0,) + exponents[slot + 1 :]
                linear[reduced] = coeff
            else:
                rest[exponents] = coeff
        return PolyExpr(self.params, linear), PolyExpr(self.params, rest)

    def normalize(self) -> "PolyExpr":
        """Primitive integer form with a positive leading coefficient."""
        if self.is_zero:
            return self
        denominators = 1
        for _, coeff in self.terms:
            denominators = denominators * coeff.denominator // math.gcd(
                denominators, coeff.denominator
            )
        numerators = 0
        for _, coeff in self.terms:
            numerators = math.gcd(numerators, (coeff * denominators).numerator)
        scale = Fraction(denominators, numerators)
        if self.leading_coefficient() < 0:
            scale = -scale
        terms = [(exp, coeff * scale) for exp, coeff in self.terms]
        return PolyExpr(self.params, terms)

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        pieces = []
        for index, (exponents, coeff) in enumerate(self.terms):
            factors = [
                name if power == 1 else f"{name}^{power}"
                for name, power in zip(self.params, exponents)
                if power
            ]
            magnitude = abs(coeff)
            if magnitude != 1 or not factors:
                factors.insert(0, str(magnitude))
            body = "*".join(factors)
            if index == 0:
                pieces.append(f"-{body}" if coeff < 0 else body)
            else:
                pieces.append(f"- {body}" if coeff < 0 else f"+ {body}")
        return " ".join(pieces)


def _parse_factor(factor: str, params: Tuple[str, ...], text: str) -> PolyExpr:
    if not factor:
        raise FormatError(f"Malformed polynomial {text!r}")
    if _COEFFICIENT.match(factor):
        return PolyExpr.constant(params, to_fraction(factor))
    name, _, power = factor.partition("^")
    if not _NAME.match(name):
        raise FormatError(f"Malformed factor {factor!r} in {text!r}")
    if name not in params:
        raise FormatError(f"Unknown parameter {name!r} in {text!r}", params)
    if power and not power.isdigit():
        raise FormatError(f"Malformed exponent in {factor!r}")
    return PolyExpr.variable(params, name) ** (int(power) if power else 1)


def span_dimension(polys: Sequence[PolyExpr]) -> int:
    """Exact rank of polynomials viewed as vectors over monomials."""
    rows = [p.as_dict() for p in polys if not p.is_zero]
    rank = 0
    pivots: list = []
    for row in rows:
        row = dict(row)
        for pivot_exp, pivot_row in pivots:
            if pivot_exp in row:
                factor = row[pivot_exp] / pivot_row[pivot_exp]
                for exp, coeff in pivot_row.items():
                    updated = row.get(exp, Fraction(0)) - factor * coeff
                    if updated:
                        row[exp] = updated
                    else:
                        row.pop(exp, None)
        if row:
            lead = max(row, key=_order_key)
            pivots.append((lead, row))
            rank += 1
    return rank
