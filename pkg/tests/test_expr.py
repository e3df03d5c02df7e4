import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qeflat.expr import (
    BinOp,
    Call,
    Const,
    EvalDomainError,
    Expression,
    FUNCTIONS,
    Neg,
    Num,
    ParseError,
    Var,
    evaluate,
    parse,
    pretty,
)
from qeflat.jets import seed


def test_power_binds_tighter_than_function_application_result():
    e = parse("sin(t)^2", ["t"])
    assert evaluate(e, {"t": 1.0}) == pytest.approx(0.7080734182735712, abs=1e-15)
    # structure: (sin t)^2, not sin(t^2)
    assert isinstance(e.root, BinOp) and e.root.op == "^"
    assert isinstance(e.root.left, Call)


def test_parse_constant_exponent():
    e = parse("e^(2*t)", ["t", "x", "y"])
    assert evaluate(e, {"t": 0.0, "x": 5.0, "y": -1.0}) == 1.0


def test_parse_reciprocal_power():
    e = parse("1/(r^2)", ["r", "th"])
    assert evaluate(e, {"r": 2.0, "th": 0.3}) == 0.25


def test_unary_minus_binds_looser_than_power():
    e = parse("-t^2", ["t"])
    assert evaluate(e, {"t": 3.0}) == -9.0


def test_jet_product_mixed_second_derivative():
    x, y = seed((3.0, 4.0), 2)
    value = evaluate(parse("x*y", ["x", "y"]), {"x": x, "y": y})
    assert value.value == 12.0
    assert value.partial((1, 1)) == 1.0


def test_division_by_zero_is_domain_error():
    e = parse("1/r", ["r"])
    with pytest.raises(EvalDomainError, match="division by zero"):
        evaluate(e, {"r": 0.0})


def test_log_domain_error_names_subexpression():
    e = parse("log(x - 2)", ["x"])
    with pytest.raises(EvalDomainError, match=r"log\(x - 2\.0\)"):
        evaluate(e, {"x": 1.0})


def test_sqrt_negative_rejected():
    with pytest.raises(EvalDomainError):
        evaluate(parse("sqrt(x)", ["x"]), {"x": -1.0})


def test_zero_to_negative_power_rejected():
    with pytest.raises(EvalDomainError):
        evaluate(parse("x^-2", ["x"]), {"x": 0.0})


def test_unknown_identifier_reports_position():
    with pytest.raises(ParseError, match="unknown identifier 'q'"):
        parse("x + q", ["x"])


def test_abs_rejected_as_non_smooth():
    with pytest.raises(ParseError, match="not smooth"):
        parse("abs(x)", ["x"])


def test_unknown_function_rejected():
    with pytest.raises(ParseError, match="unknown function"):
        parse("foo(x)", ["x"])


def test_empty_input_rejected():
    with pytest.raises(ParseError, match="empty input"):
        parse("   ", ["x"])


def test_trailing_garbage_rejected():
    with pytest.raises(ParseError, match="trailing"):
        parse("x + 1 )", ["x"])


def test_duplicate_coordinates_rejected():
    with pytest.raises(ParseError, match="distinct"):
        parse("x", ["x", "x"])


def test_constants_and_shadowing():
    assert evaluate(parse("pi", []), {}) == math.pi
    # a coordinate named pi shadows the constant
    e = parse("pi", ["pi"])
    assert evaluate(e, {"pi": 2.5}) == 2.5


def test_scientific_notation_literals():
    assert evaluate(parse("1.5e-3 + 2e2", ["x"]), {"x": 0.0}) == pytest.approx(200.0015)


def test_integer_power_of_negative_base():
    assert evaluate(parse("x^3", ["x"]), {"x": -2.0}) == -8.0
    assert evaluate(parse("x^-2", ["x"]), {"x": -2.0}) == 0.25


def test_non_integer_power_requires_positive_base():
    assert evaluate(parse("x^0.5", ["x"]), {"x": 4.0}) == pytest.approx(2.0)
    with pytest.raises(EvalDomainError):
        evaluate(parse("x^0.5", ["x"]), {"x": -4.0})


def test_constant_jet_bindings_match_float_evaluation_exactly():
    # same primitive operations in the value slot, so equality is exact
    sources = ["sin(x)*cos(x) + x^3/(1 + x^2)", "exp(x)/(2 + sin(x))", "tanh(x) - sqrt(x + 2)"]
    for src in sources:
        e = parse(src, ["x", "y"])
        for value in (0.3, -0.7, 1.1):
            jets = seed((value, 0.0), 2)
            jet_result = evaluate(e, {"x": jets[0], "y": jets[1]})
            float_result = evaluate(e, {"x": value, "y": 0.0})
            assert jet_result.value == float_result


_COORDS = ("x", "y", "z")


def _nodes():
    leaves = st.one_of(
        st.builds(Num, st.floats(min_value=0.0, max_value=1e6, allow_nan=False)),
        st.sampled_from([Var(c) for c in _COORDS]),
        st.sampled_from([Const("pi"), Const("e")]),
    )
    return st.recursive(
        leaves,
        lambda children: st.one_of(
            st.builds(Neg, children),
            st.builds(Call, st.sampled_from(FUNCTIONS), children),
            st.builds(BinOp, st.sampled_from("+-*/^"), children, children),
        ),
        max_leaves=25,
    )


@settings(max_examples=200, deadline=None)
@given(_nodes())
def test_pretty_print_round_trip(root):
    text = pretty(root)
    again = parse(text, _COORDS)
    assert again.root == root, f"{text!r} reparsed differently"


def test_expression_variables_and_str():
    e = parse("sin(x) + y*2", ["x", "y", "z"])
    assert e.variables() == {"x", "y"}
    assert parse(str(e), ["x", "y", "z"]).root == e.root


def test_expression_is_shareable_frozen():
    e = parse("x + 1", ["x"])
    assert isinstance(e, Expression)
    with pytest.raises(AttributeError):
        e.root = Num(1.0)  # type: ignore[misc]
