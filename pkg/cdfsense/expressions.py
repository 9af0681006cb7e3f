#!/usr/bin/env python3
#
#  expressions.py
"""
A minimal arithmetic language for maps from code inputs to reals.

Expressions may use numeric constants, the inputs ``X1``, ``X2``, ...,
the operators ``+ - * /``, unary minus, ``exp(...)`` and ``abs(...)``.
"""
#
#  Copyright © 2024 The cdfsense developers
#
#  Permission is hereby granted, free of charge, to any person obtaining a copy
#  of this software and associated documentation files (the "Software"), to deal
#  in the Software without restriction, including without limitation the rights
#  to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
#  copies of the Software, and to permit persons to whom the Software is
#  furnished to do so, subject to the following conditions:
#
#  The above copyright notice and this permission notice shall be included in all
#  copies or substantial portions of the Software.
#
#  THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND,
#  EXPRESS OR IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF
#  MERCHANTABILITY, FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT.
#  IN NO EVENT SHALL THE AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM,
#  DAMAGES OR OTHER LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR
#  OTHERWISE, ARISING FROM, OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE
#  OR OTHER DEALINGS IN THE SOFTWARE.
#

# stdlib
import ast
import re
from typing import Callable, Dict, FrozenSet, Type

# 3rd party
import numpy

# this package
from cdfsense import ExpressionError

__all__ = ["Expression"]

_input_name = re.compile(r"^X([1-9][0-9]*)$")

_binary: Dict[Type[ast.operator], Callable[[numpy.ndarray, numpy.ndarray], numpy.ndarray]] = {
		ast.Add: numpy.add,
		ast.Sub: numpy.subtract,
		ast.Mult: numpy.multiply,
		ast.Div: numpy.divide,
		}

_functions: Dict[str, Callable[[numpy.ndarray], numpy.ndarray]] = {
		"exp": numpy.exp,
		"abs": numpy.abs,
		}


def _check(node: ast.AST, source: str) -> None:
	if isinstance(node, ast.Expression):
		_check(node.body, source)
	elif isinstance(node, ast.BinOp) and type(node.op) in _binary:
		_check(node.left, source)
		_check(node.right, source)
	elif isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
		_check(node.operand, source)
	elif isinstance(node, ast.Call):
		if not isinstance(node.func, ast.Name) or node.func.id not in _functions:
			raise ExpressionError(f"Unknown function in {source!r}; only exp() and abs() are allowed.")
		if len(node.args) != 1 or node.keywords:
			raise ExpressionError(f"{node.func.id}() takes exactly one argument in {source!r}.")
		_check(node.args[0], source)
	elif isinstance(node, ast.Constant):
		if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
			raise ExpressionError(f"Only numeric constants are allowed in {source!r}.")
	elif isinstance(node, ast.Name):
		if not _input_name.match(node.id):
			raise ExpressionError(f"Unknown name {node.id!r} in {source!r}; inputs are written X1, X2, ...")
	else:
		raise ExpressionError(f"Unsupported construct {type(node).__name__!r} in {source!r}.")


class Expression:
	"""
	A parsed map from an ``n × d`` input matrix to ``n`` reals.

	:param source: The expression text, e.g. ``"1 + 0.5 * exp(X2)"``.

	:raises ExpressionError: If the text is not a valid expression.
	"""

	__slots__ = ("source", "_tree", "_inputs")

	def __init__(self, source: str):
		source = str(source).strip()

		try:
			tree = ast.parse(source, mode="eval")
		except SyntaxError as e:
			raise ExpressionError(f"Could not parse {source!r}: {e.msg}") from None

		_check(tree, source)

		#: The expression text.
		self.source: str = source
		self._tree = tree
		self._inputs = frozenset(
				int(node.id[1:]) for node in ast.walk(tree)
				if isinstance(node, ast.Name) and node.id not in _functions
				)

	@property
	def inputs(self) -> FrozenSet[int]:
		"""
		The (1-based) inputs the expression refers to.
		"""

		return self._inputs

	@property
	def max_input(self) -> int:
		"""
		The largest input referred to, or ``0`` for a constant expression.
		"""

		return max(self._inputs, default=0)

	def _evaluate(self, node: ast.AST, inputs: numpy.ndarray) -> numpy.ndarray:
		if isinstance(node, ast.Expression):
			return self._evaluate(node.body, inputs)
		elif isinstance(node, ast.BinOp):
			return _binary[type(node.op)](self._evaluate(node.left, inputs), self._evaluate(node.right, inputs))
		elif isinstance(node, ast.UnaryOp):
			operand = self._evaluate(node.operand, inputs)
			return -operand if isinstance(node.op, ast.USub) else operand
		elif isinstance(node, ast.Call):
			assert isinstance(node.func, ast.Name)
			return _functions[node.func.id](self._evaluate(node.args[0], inputs))
		elif isinstance(node, ast.Constant):
			return numpy.full(inputs.shape[0], float(node.value))
		else:
			assert isinstance(node, ast.Name)
			return inputs[:, int(node.id[1:]) - 1]

	def evaluate(self, inputs: numpy.ndarray) -> numpy.ndarray:
		"""
		Evaluate the expression on each row of ``inputs``.

		:param inputs: An ``n × d`` matrix.

		:raises ExpressionError: If an input is out of range or a result is not finite.
		"""

		matrix = numpy.atleast_2d(numpy.asarray(inputs, dtype=numpy.float64))

		if self.max_input > matrix.shape[1]:
			raise ExpressionError(f"{self.source!r} refers to X{self.max_input} but there are {matrix.shape[1]} inputs.")

		with numpy.errstate(all="ignore"):
			result = numpy.asarray(self._evaluate(self._tree, matrix), dtype=numpy.float64)

		bad = numpy.flatnonzero(~numpy.isfinite(result))
		if bad.size:
			raise ExpressionError(f"{self.source!r} is not finite for input row {int(bad[0])}.")

		return result

	def __eq__(self, other) -> bool:  # noqa: MAN001
		if isinstance(other, Expression):
			return ast.dump(self._tree) == ast.dump(other._tree)

		return NotImplemented

	def __hash__(self) -> int:
		return hash(ast.dump(self._tree))

	def __repr__(self) -> str:
		return f"Expression({self.source!r})"
