"""Scalar expression language: parsing, precedence, evaluation, printing."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from excal import sexpr
from excal.errors import (
    ArityError,
    DivisionByZeroAtPoint,
    DomainError,
    ExprSyntaxError,
    UnknownIdentifier,
)

XY = ["x", "y"]


def ev(src, p=(0.0, 0.0)):
    return sexpr.eval_value(sexpr.parse(src, XY), p)


@pytest.mark.parametrize(
    "src,expected",
    [
        ("2+3*4", 14.0),
        ("(2+3)*4", 20.0),
        ("2+3*4^2", 50.0),
        ("2^3^2", 512.0),  # right-associative power
        ("-2^2", -4.0),  # unary minus binds looser than ^
        ("(-2)^2", 4.0),
        ("6/3/2", 1.0),  # left-associative division
        ("1 - 2 - 3", -4.0),
        ("pi", math.pi),
        ("e^2", math.e**2),
        ("2e3", 2000.0),
        ("1.5e-2", 0.015),
        ("pow(2, 10)", 1024.0),
        ("sqrt(2)*sqrt(2)", pytest.approx(2.0)),
    ],
)
def test_arithmetic(src, expected):
    assert ev(src) == expected


def test_variables_and_functions():
    p = (0.3, 1.7)
    assert ev("x*y + sin(x)", p) == pytest.approx(0.3 * 1.7 + math.sin(0.3))
    assert ev("cos(x)^2 + sin(x)^2", p) == pytest.approx(1.0)
    assert ev("log(exp(y))", p) == pytest.approx(1.7)
    assert ev("tan(x)", p) == pytest.approx(math.tan(0.3))


def test_jet_evaluation_derivatives():
    from excal.jets import jet_partial

    e = sexpr.parse("sin(x*y)", XY)
    j = sexpr.eval_jet(e, (0.5, 2.0), 2)
    assert j.value == pytest.approx(math.sin(1.0))
    assert jet_partial(j, (1, 0)) == pytest.approx(2.0 * math.cos(1.0))
    assert jet_partial(j, (0, 1)) == pytest.approx(0.5 * math.cos(1.0))
    # d2/dxdy sin(xy) = cos(xy) - xy sin(xy)
    assert jet_partial(j, (1, 1)) == pytest.approx(math.cos(1.0) - math.sin(1.0))


def test_jet_power_with_variable_exponent():
    e = sexpr.parse("x^y", XY)
    j = sexpr.eval_jet(e, (2.0, 3.0), 1)
    assert j.value == pytest.approx(8.0)
    from excal.jets import jet_partial

    assert jet_partial(j, (0, 1)) == pytest.approx(8.0 * math.log(2.0))


def test_negative_base_integer_exponent():
    assert ev("(-2)^3") == -8.0
    assert ev("pow(0-2, 2)") == 4.0
    j = sexpr.eval_jet(sexpr.parse("(x-1)^2", XY), (0.0, 0.0), 2)
    assert j.value == 1.0


@pytest.mark.parametrize(
    "src,exc",
    [
        ("x +", ExprSyntaxError),
        ("(x", ExprSyntaxError),
        ("x y", ExprSyntaxError),
        ("2..3", ExprSyntaxError),
        ("$x", ExprSyntaxError),
        ("z + 1", UnknownIdentifier),
        ("foo(x)", UnknownIdentifier),
        ("sin(x, y)", ArityError),
        ("pow(2)", ArityError),
    ],
)
def test_parse_errors(src, exc):
    with pytest.raises(exc):
        sexpr.parse(src, XY)


def test_syntax_error_offset():
    with pytest.raises(ExprSyntaxError) as ei:
        sexpr.parse("1 + @", XY)
    assert ei.value.offset == 4


@pytest.mark.parametrize(
    "src,exc",
    [
        ("1/ (x - x)", DivisionByZeroAtPoint),
        ("log(x - 1)", DomainError),
        ("sqrt(0 - 1)", DomainError),
        ("(x-1)^0.5", DomainError),
    ],
)
def test_evaluation_domain_errors(src, exc):
    with pytest.raises(exc):
        ev(src, (0.5, 0.5))
    with pytest.raises(exc):
        sexpr.eval_jet(sexpr.parse(src, XY), (0.5, 0.5), 2)


def test_pretty_round_trip():
    cases = [
        "x + y*2",
        "-(x + y)",
        "x^(y + 1)",
        "sin(x*pi) - cos(y)/2",
        "pow(x, 2) + sqrt(y + 3)",
        "1/(x + 2)^2",
        "-x^2",
    ]
    for src in cases:
        e = sexpr.parse(src, XY)
        printed = sexpr.pretty(e)
        again = sexpr.parse(printed, XY)
        for p in [(0.25, 0.5), (1.5, 2.5)]:
            assert sexpr.eval_value(again, p) == pytest.approx(
                sexpr.eval_value(e, p), rel=1e-15
            )
        # printing is idempotent
        assert sexpr.pretty(again) == printed


coords = st.floats(min_value=0.1, max_value=3.0)


@settings(max_examples=60, deadline=None)
@given(coords, coords)
def test_jet_value_agrees_with_float_eval(x, y):
    e = sexpr.parse("x^2*cos(y) + sqrt(x + y) - y/x", XY)
    want = sexpr.eval_value(e, (x, y))
    got = sexpr.eval_jet(e, (x, y), 2).value
    assert got == pytest.approx(want, rel=1e-12, abs=1e-12)
