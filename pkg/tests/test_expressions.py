# 3rd party
import numpy
import pytest

# this package
from cdfsense import ExpressionError
from cdfsense.expressions import Expression

inputs = numpy.array([[1.0, 2.0, -3.0], [0.0, 0.5, 4.0]])


@pytest.mark.parametrize(
		"source, expected",
		[
				pytest.param("X1", [1, 0], id="input"),
				pytest.param("2", [2, 2], id="constant"),
				pytest.param("X1 + X2 * X3", [-5, 2], id="precedence"),
				pytest.param("(X1 + X2) * X3", [-9, 2], id="parentheses"),
				pytest.param("-X3", [3, -4], id="unary_minus"),
				pytest.param("+X3", [-3, 4], id="unary_plus"),
				pytest.param("X2 / 2 - 1", [0, -0.75], id="division"),
				pytest.param("abs(X3)", [3, 4], id="abs"),
				pytest.param("exp(X1)", [numpy.e, 1], id="exp"),
				pytest.param("1 + 0.5 * exp(0 * X2)", [1.5, 1.5], id="nested_call"),
				]
		)
def test_evaluate(source: str, expected):
	assert Expression(source).evaluate(inputs).tolist() == pytest.approx(expected)


def test_inputs():
	expression = Expression("X1 + exp(X3) * 2")
	assert expression.inputs == frozenset({1, 3})
	assert expression.max_input == 3

	assert Expression("4.5").max_input == 0
	assert Expression("abs(X12)").inputs == frozenset({12})


@pytest.mark.parametrize(
		"source, match",
		[
				pytest.param("X1 +", "Could not parse", id="syntax"),
				pytest.param("X0", "Unknown name", id="zero_input"),
				pytest.param("x1", "Unknown name", id="lowercase"),
				pytest.param("foo", "Unknown name", id="name"),
				pytest.param("log(X1)", "Unknown function", id="function"),
				pytest.param("exp(X1, X2)", "exactly one argument", id="arity"),
				pytest.param("X1 ** 2", "Unsupported construct", id="power"),
				pytest.param("X1 if X2 else X3", "Unsupported construct", id="conditional"),
				pytest.param("'a'", "numeric constants", id="string"),
				pytest.param("True", "numeric constants", id="bool"),
				pytest.param("__import__('os')", "Unknown function", id="import"),
				pytest.param("X1.real", "Unsupported construct", id="attribute"),
				]
		)
def test_invalid(source: str, match: str):
	with pytest.raises(ExpressionError, match=match):
		Expression(source)


def test_input_out_of_range():
	with pytest.raises(ExpressionError, match="refers to X4 but there are 3 inputs"):
		Expression("X4").evaluate(inputs)


def test_not_finite():
	with pytest.raises(ExpressionError, match="not finite for input row 1"):
		Expression("1 / X1").evaluate(inputs)

	with pytest.raises(ExpressionError, match="not finite for input row 0"):
		Expression("exp(1000 * X1)").evaluate(inputs)


def test_single_row():
	assert Expression("X1 * X2").evaluate(numpy.array([2.0, 3.0])).tolist() == [6]


def test_equality():
	assert Expression("X1+X2") == Expression(" X1 + X2 ")
	assert Expression("X1 + X2") != Expression("X2 + X1")
	assert hash(Expression("exp(X1)")) == hash(Expression("exp( X1 )"))
	assert repr(Expression("X1 * 2")) == "Expression('X1 * 2')"
