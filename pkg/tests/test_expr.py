import math
import operator

import numpy as np
import pytest

from sketchbind.errors import (
    DivisionByZeroError,
    DomainError,
    EvalError,
    ExpressionSyntaxError,
    UnknownIdentifierError,
)
from sketchbind.expr import (
    Binary,
    Call,
    Compare,
    Ident,
    Number,
    Unary,
    evaluate,
    free_variables,
    parse,
    unparse,
)


def test_angle_over_two_parses_to_division():
    expr = parse("angle / 2")
    assert expr == Binary("/", Ident("angle"), Number(2.0))


def test_precedence_mul_over_add():
    assert evaluate(parse("1+2*3"), {}) == 7.0


def test_power_is_right_associative():
    # independent check: fold exponents right to left
    expected = 3.0 ** 2.0
    expected = 2.0 ** expected
    assert evaluate(parse("2^3^2"), {}) == expected == 512.0


def test_comparison_parses_inside_parens():
    expr = parse("(length > 10)")
    assert expr == Compare(">", Ident("length"), Number(10.0))


def test_comparisons_are_exactly_binary():
    assert evaluate(parse("length > 10"), {"length": 8}) == 0.0
    assert evaluate(parse("length > 10"), {"length": 12}) == 1.0
    assert evaluate(parse("3 == 3"), {}) == 1.0


def test_trig_in_degrees():
    assert evaluate(parse("sin(30)"), {}) == pytest.approx(0.5, abs=1e-12)
    assert evaluate(parse("cos(60)"), {}) == pytest.approx(0.5, abs=1e-12)
    assert evaluate(parse("tan(45)"), {}) == pytest.approx(1.0, abs=1e-12)


def test_env_lookup():
    assert evaluate(parse("angle / 2"), {"angle": 40}) == 20.0


def test_unary_minus_binds_looser_than_power():
    assert evaluate(parse("-2^2"), {}) == -4.0
    assert evaluate(parse("2^-2"), {}) == 0.25


def test_hyphenated_identifiers_glue():
    expr = parse("dino-size * 2")
    assert free_variables(expr) == {"dino-size"}
    # without whitespace the tokenizer longest-matches the identifier
    assert free_variables(parse("a-b")) == {"a-b"}
    # with whitespace it is a subtraction
    assert evaluate(parse("a - b"), {"a": 5, "b": 2}) == 3.0
    # digits cannot start an identifier, so 2-1 stays arithmetic
    assert evaluate(parse("2-1"), {}) == 1.0


def test_syntax_error_carries_position():
    with pytest.raises(ExpressionSyntaxError) as err:
        parse("1 + * 2")
    assert err.value.position == 4
    with pytest.raises(ExpressionSyntaxError):
        parse("sin(1, 2)")
    with pytest.raises(ExpressionSyntaxError):
        parse("(1 + 2")
    with pytest.raises(ExpressionSyntaxError):
        parse("1 $ 2")


def test_eval_errors():
    with pytest.raises(UnknownIdentifierError):
        evaluate(parse("missing + 1"), {})
    with pytest.raises(DivisionByZeroError):
        evaluate(parse("1 / 0"), {})
    with pytest.raises(DomainError):
        evaluate(parse("sqrt(0 - 1)"), {})
    with pytest.raises(DivisionByZeroError):
        evaluate(parse("0 ^ -1"), {})
    with pytest.raises(UnknownIdentifierError):
        evaluate(parse("foo(3)"), {})


def test_free_variables():
    assert free_variables(parse("angle/2")) == {"angle"}
    assert free_variables(parse("3+4")) == set()
    assert free_variables(parse("a*b - a")) == {"a", "b"}
    assert free_variables(parse("sin(x) + max(y, 2)")) == {"x", "y"}


def test_supported_calls():
    env = {"x": 9.0}
    assert evaluate(parse("sqrt(x)"), env) == 3.0
    assert evaluate(parse("abs(0 - 4)"), env) == 4.0
    assert evaluate(parse("min(3, 5)"), env) == 3.0
    assert evaluate(parse("max(3, 5, 7)"), env) == 7.0
    assert evaluate(parse("pow(2, 10)"), env) == 1024.0


# --- reference evaluator (independent implementation for the agreement test)

_REF_BINOPS = {"+": operator.add, "-": operator.sub, "*": operator.mul}
_REF_CMP = {"<": operator.lt, ">": operator.gt, "<=": operator.le,
            ">=": operator.ge, "==": operator.eq}


def _ref_eval(node, env):
    if isinstance(node, Number):
        return node.value
    if isinstance(node, Ident):
        if node.name not in env:
            raise UnknownIdentifierError(node.name)
        return env[node.name]
    if isinstance(node, Unary):
        return 0.0 - _ref_eval(node.operand, env)
    if isinstance(node, Binary):
        a, b = _ref_eval(node.left, env), _ref_eval(node.right, env)
        if node.op in _REF_BINOPS:
            out = _REF_BINOPS[node.op](a, b)
        elif node.op == "/":
            if b == 0:
                raise DivisionByZeroError("ref: /0")
            out = a / b
        elif node.op == "^":
            if a == 0 and b < 0:
                raise DivisionByZeroError("ref: 0^-n")
            if a < 0 and b != int(b):
                raise DomainError("ref: fractional power of negative")
            try:
                out = math.pow(a, b)
            except OverflowError:
                raise DomainError("ref: overflow") from None
        else:
            raise AssertionError(node.op)
        if not math.isfinite(out):
            raise DomainError("ref: overflow")
        return out
    if isinstance(node, Compare):
        return float(_REF_CMP[node.op](_ref_eval(node.left, env),
                                       _ref_eval(node.right, env)))
    if isinstance(node, Call):
        args = [_ref_eval(a, env) for a in node.args]
        deg = math.pi / 180.0
        table = {
            "sin": lambda v: math.sin(v[0] * deg),
            "cos": lambda v: math.cos(v[0] * deg),
            "tan": lambda v: math.tan(v[0] * deg),
            "sqrt": lambda v: math.sqrt(v[0]),
            "abs": lambda v: abs(v[0]),
            "min": min,
            "max": max,
            "pow": lambda v: math.pow(v[0], v[1]),
        }
        if node.name == "sqrt" and args[0] < 0:
            raise DomainError("ref: sqrt of negative")
        if node.name == "pow":
            if args[0] == 0 and args[1] < 0:
                raise DivisionByZeroError("ref: 0^-n")
            if args[0] < 0 and args[1] != int(args[1]):
                raise DomainError("ref: fractional power of negative")
        if node.name not in table:
            raise UnknownIdentifierError(node.name)
        try:
            out = table[node.name](args)
        except OverflowError:
            raise DomainError("ref: overflow") from None
        if not math.isfinite(out):
            raise DomainError("ref: overflow")
        return out
    raise AssertionError(node)


def random_expression(rng, depth=0) -> str:
    """Random closed expression text; leans on small integers and calls."""
    if depth > 4 or rng.random() < 0.3:
        value = rng.integers(0, 50)
        if rng.random() < 0.3:
            return f"{value}.{rng.integers(0, 99)}"
        return str(value)
    roll = rng.random()
    a = random_expression(rng, depth + 1)
    b = random_expression(rng, depth + 1)
    if roll < 0.55:
        op = rng.choice(["+", "-", "*", "/"])
        return f"({a} {op} {b})"
    if roll < 0.65:
        return f"({a} ^ {rng.integers(0, 4)})"
    if roll < 0.75:
        op = rng.choice(["<", ">", "<=", ">=", "=="])
        return f"({a} {op} {b})"
    if roll < 0.85:
        return f"- {a}"
    fn = rng.choice(["sin", "cos", "tan", "sqrt", "abs"])
    if rng.random() < 0.3:
        fn2 = rng.choice(["min", "max", "pow"])
        return f"{fn2}({a}, {b})"
    return f"{fn}({a})"


def check_agreement(n, seed):
    rng = np.random.default_rng(seed)
    compared = 0
    for _ in range(n):
        text = random_expression(rng)
        expr = parse(text)
        try:
            expected = _ref_eval(expr, {})
            expected_error = None
        except EvalError as exc:
            expected, expected_error = None, type(exc)
        try:
            got = evaluate(expr, {})
            got_error = None
        except EvalError as exc:
            got, got_error = None, type(exc)
        if expected_error is not None:
            assert got_error is not None, text
            continue
        assert got_error is None, (text, got_error)
        tol = 1e-12 * max(1.0, abs(expected))
        assert abs(got - expected) <= tol, (text, got, expected)
        compared += 1
    return compared


def test_agreement_with_reference_evaluator():
    assert check_agreement(2000, seed=123) > 500


def test_unparse_parse_round_trip_on_corpus():
    rng = np.random.default_rng(42)
    corpus = ["angle / 2", "1+2*3", "2^3^2", "(length > 10)",
              "sin(30) + cos(x)", "-a^2", "min(a, b) * max(a, b)",
              "dino-size * 2"]
    corpus += [random_expression(rng) for _ in range(200)]
    for text in corpus:
        first = parse(text)
        again = parse(unparse(first))
        assert first == again, text
