"""Tests for exact multivariate polynomials."""
from fractions import Fraction

import pytest
from harmorph.exceptions import FormatError, MissingParameter
from harmorph.polynomial import PolyExpr, span_dimension, to_fraction

PARAMS = ("a", "b", "alpha", "x")


def test_parse_and_format():
    """Test the bracket-coefficient grammar survives formatting."""
    poly = PolyExpr.parse("3/2*a^2*b - x + 1", PARAMS)
    assert str(poly) == "3/2*a^2*b - x + 1"
    assert PolyExpr.parse(str(poly), PARAMS) == poly
    assert poly.degree() == 3
    assert poly.degree_in("a") == 2
    assert poly.variables() == ("a", "b", "x")


def test_parse_rejects_malformed_input():
    """Test malformed polynomials raise FormatError."""
    for text in ("", "a +", "2**a", "a^b", "q + 1", "a*+b", "1/0"):
        with pytest.raises(FormatError):
            PolyExpr.parse(text, PARAMS)


def test_arithmetic():
    """Test ring operations cancel exactly."""
    a = PolyExpr.variable(PARAMS, "a")
    b = PolyExpr.variable(PARAMS, "b")
    assert (a + b) * (a - b) == a ** 2 - b ** 2
    assert (a - a).is_zero
    assert 2 * a == a + a
    assert 1 - a == -(a - 1)
    assert (a + b) ** 0 == PolyExpr.constant(PARAMS, 1)
    with pytest.raises(ValueError):
        a ** -1


def test_evaluate_is_exact():
    """Test evaluation stays rational for rational inputs."""
    poly = PolyExpr.parse("a*alpha + b*x", PARAMS)
    point = {"a": Fraction(1, 3), "b": 2, "alpha": 3, "x": Fraction(-1, 2)}
    value = poly.evaluate(point)
    assert value == 0
    assert isinstance(value, Fraction)
    assert poly.evaluate({"a": 0.5, "b": 1, "alpha": 2.0, "x": 1}) == pytest.approx(2.0)


def test_evaluate_needs_used_parameters_only():
    """Test evaluation only requires parameters that occur."""
    poly = PolyExpr.parse("a - 1", PARAMS)
    assert poly.evaluate({"a": 1}) == 0
    with pytest.raises(MissingParameter):
        poly.evaluate({"b": 1})


def test_partial_substitution():
    """Test substituting some parameters leaves a polynomial in the rest."""
    poly = PolyExpr.parse("a*alpha + b*x", PARAMS)
    reduced = poly.substitute({"a": 2, "b": Fraction(1, 2)})
    assert reduced == PolyExpr.parse("2*alpha + 1/2*x", PARAMS)


def test_linear_split():
    """Test splitting off a linear variable."""
    poly = PolyExpr.parse("a*alpha + b*x", PARAMS)
    factor, rest = poly.linear_split("alpha")
    assert factor == PolyExpr.parse("a", PARAMS)
    assert rest == PolyExpr.parse("b*x", PARAMS)
    assert PolyExpr.parse("alpha^2 + a", PARAMS).linear_split("alpha") is None


def test_normalize():
    """Test normalization gives a primitive form with positive leading term."""
    poly = PolyExpr.parse("-1/2*a*alpha - 3/4*b*x", PARAMS)
    normalized = poly.normalize()
    assert normalized == PolyExpr.parse("2*a*alpha + 3*b*x", PARAMS)
    assert normalized.normalize() == normalized
    assert (-7 * normalized).normalize() == normalized
    assert PolyExpr.zero(PARAMS).normalize().is_zero


def test_span_dimension():
    """Test the exact rank over monomials."""
    p = PolyExpr.parse("a*alpha + b*x", PARAMS)
    q = PolyExpr.parse("a*x - b", PARAMS)
    assert span_dimension([p, q, p + q, 3 * p]) == 2
    assert span_dimension([]) == 0
    assert span_dimension([PolyExpr.zero(PARAMS)]) == 0


def test_to_fraction():
    """Test conversion of rational literals."""
    assert to_fraction("3/4") == Fraction(3, 4)
    assert to_fraction("0.25") == Fraction(1, 4)
    assert to_fraction(2) == Fraction(2)
    with pytest.raises(FormatError):
        to_fraction("half")
