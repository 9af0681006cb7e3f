#!/usr/bin/env python3
#
#  transport_costs.py
"""
Wasserstein distances and generalized ``c``-Wasserstein costs between quantile curves,
plus an exact coupling oracle for small discrete distributions.
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
import math
import warnings
from typing import Any, Dict, NamedTuple, Optional, Sequence, Union

# 3rd party
import numpy
from domdf_python_tools.doctools import prettify_docstrings
from scipy.optimize import linear_sum_assignment, linprog

# this package
from cdfsense import CdfSenseError, DomainError, GridMismatchError, OracleSizeError, PropertyWarning
from cdfsense.contrasts import (
		DEFAULT_PROBE_SIZE,
		ContrastSpec,
		PropertyReport,
		check_property_p,
		default_probe_grid,
		evaluate
		)
from cdfsense.quantile_model import DiscreteDistribution, ProbGrid, QuantileCurve

__all__ = [
		"ORACLE_MAX_ATOMS",
		"ORACLE_MAX_UNITS",
		"CostResult",
		"wasserstein_cost",
		"wasserstein_p",
		"brute_force_cost",
		"costs_to_curve",
		"pairwise_costs",
		]

#: The largest total number of atoms accepted by :func:`~.brute_force_cost`.
ORACLE_MAX_ATOMS: int = 12

#: The largest common weight denominator :func:`~.brute_force_cost` solves as an assignment problem.
ORACLE_MAX_UNITS: int = 720


@prettify_docstrings
class CostResult(NamedTuple):
	"""
	The value of a ``c``-Wasserstein cost between two quantile curves.
	"""

	#: The grid quadrature of ``∫ c(F⁻(u), G⁻(u)) du``.
	value: float

	#: The contrast the cost was computed with.
	contrast: ContrastSpec

	#: The number of grid levels.
	grid_size: int

	#: The rectangle property check on the range of both curves, if one was requested.
	property_report: Optional[PropertyReport] = None

	#: The warning issued when the property check failed.
	warning: Optional[str] = None

	def to_dict(self) -> Dict[str, Any]:
		"""
		Returns a JSON-serialisable dictionary of the result.
		"""

		data: Dict[str, Any] = {
				"value": self.value,
				"contrast": self.contrast.name,
				"grid_size": self.grid_size,
				}

		if self.property_report is not None:
			data["property_passes"] = self.property_report.passes
			data["worst_violation"] = self.property_report.worst_violation
		if self.warning is not None:
			data["warning"] = self.warning

		return data


def costs_to_curve(grid: ProbGrid, curves: numpy.ndarray, target: numpy.ndarray, c: ContrastSpec) -> numpy.ndarray:
	"""
	Return the cost ``W_c(curve_k, target)`` of every row of ``curves``.

	:param grid:
	:param curves: An ``n × m`` array of quantile values.
	:param target: ``m`` quantile values.
	:param c:
	"""

	matrix = numpy.atleast_2d(numpy.asarray(curves, dtype=numpy.float64))
	target = numpy.asarray(target, dtype=numpy.float64)

	if matrix.shape[1] != len(grid) or target.shape != (len(grid), ):
		raise GridMismatchError()

	return grid.integrate(evaluate(c, matrix, target[None, :]), axis=1)


def wasserstein_cost(
		F: QuantileCurve,
		G: QuantileCurve,
		c: ContrastSpec,
		check_property: bool = False,
		probe_size: int = DEFAULT_PROBE_SIZE,
		probe_grid: Optional[Union[Sequence[float], numpy.ndarray]] = None,
		) -> CostResult:
	"""
	Compute the ``c``-Wasserstein cost between two distributions from their quantile curves.

	When ``c`` satisfies the rectangle property the quantile coupling is optimal,
	so the cost is the quadrature of ``∫_0^1 c(F⁻(u), G⁻(u)) du``.

	:param F:
	:param G:
	:param c:
	:param check_property: Probe ``c`` for the rectangle property on the range of both curves.
		A failure emits a :class:`~cdfsense.PropertyWarning` and is recorded on the result;
		the integral is still returned.
	:param probe_size: The number of probe points for the property check.
	:param probe_grid: Explicit probe points, overriding the grid spanning both curves.

	:raises GridMismatchError: If the curves do not share a grid.
	"""

	F.grid.require_same(G.grid)

	report: Optional[PropertyReport] = None
	message: Optional[str] = None

	if check_property:
		low = min(F.values[0], G.values[0])
		high = max(F.values[-1], G.values[-1])
		if probe_grid is None:
			probe_grid = default_probe_grid(low, high, probe_size)
		else:
			low, high = float(numpy.min(probe_grid)), float(numpy.max(probe_grid))

		report = check_property_p(c, probe_grid)

		if not report.passes:
			x, x_prime, y, y_prime = report.witness
			message = (
					f"Contrast {c.name!r} violates the rectangle property on [{low:g}, {high:g}] "
					f"(increment {report.worst_violation:g} at x={x:g}, x'={x_prime:g}, y={y:g}, y'={y_prime:g}); "
					"the quantile coupling may not be optimal."
					)
			warnings.warn(message, PropertyWarning, stacklevel=2)

	value = float(F.grid.integrate(evaluate(c, F.values, G.values)))

	if not math.isfinite(value):
		raise CdfSenseError(f"The cost under {c.name!r} is not finite.")

	return CostResult(value, c, len(F.grid), report, message)


def wasserstein_p(F: QuantileCurve, G: QuantileCurve, p: float) -> float:
	"""
	Compute the Wasserstein distance of order ``p`` between two distributions.

	:param F:
	:param G:
	:param p: The order, at least 1.

	:raises DomainError: If ``p < 1``.
	"""

	if not p >= 1:
		raise DomainError(f"The order p must be at least 1 (got {p!r}).")

	return wasserstein_cost(F, G, ContrastSpec.power(p)).value**(1 / p)


def _expand(dist: DiscreteDistribution, units: int) -> numpy.ndarray:
	assert dist.exact_weights is not None
	counts = [int(weight * units) for weight in dist.exact_weights]
	return numpy.repeat(dist.values, counts)


def _transport_lp(F: DiscreteDistribution, G: DiscreteDistribution, cost: numpy.ndarray) -> float:
	k, l = cost.shape

	# Row sums then column sums of the flattened k × l coupling.
	equalities = numpy.zeros((k + l, k * l))
	for row in range(k):
		equalities[row, row * l:(row + 1) * l] = 1
	for column in range(l):
		equalities[k + column, column::l] = 1

	result = linprog(
			cost.ravel(),
			A_eq=equalities,
			b_eq=numpy.concatenate([F.weights, G.weights]),
			bounds=(0, None),
			method="highs",
			)

	if not result.success:
		raise CdfSenseError(f"The coupling problem could not be solved: {result.message}")

	return float(result.fun)


def brute_force_cost(F: DiscreteDistribution, G: DiscreteDistribution, c: ContrastSpec) -> float:
	"""
	Return the exact minimum of ``Σ π_kl c(x_k, y_l)`` over all couplings ``π`` of ``F`` and ``G``.

	When every weight is rational the two distributions are split into ``N`` atoms of weight ``1/N``,
	``N`` being the common denominator of the weights. The transport polytope then has
	integral vertices, each of which is a permutation matching the split atoms,
	so the minimum is that of an assignment problem and is solved exactly.
	Other weights, and common denominators above :data:`~.ORACLE_MAX_UNITS`, fall back to
	the linear program over the transport polytope.

	:param F:
	:param G:
	:param c:

	:raises OracleSizeError: If ``F`` and ``G`` have more than :data:`~.ORACLE_MAX_ATOMS` atoms between them.
	"""

	if len(F) + len(G) > ORACLE_MAX_ATOMS:
		raise OracleSizeError(
				f"The coupling oracle accepts at most {ORACLE_MAX_ATOMS} atoms in total (got {len(F) + len(G)})."
				)

	units: Optional[int] = None
	if F.denominator is not None and G.denominator is not None:
		units = F.denominator * G.denominator // math.gcd(F.denominator, G.denominator)

	if units is None or units > ORACLE_MAX_UNITS:
		cost = numpy.asarray(evaluate(c, F.values[:, None], G.values[None, :]))
		return _transport_lp(F, G, cost)

	xs = _expand(F, units)
	ys = _expand(G, units)
	cost = numpy.asarray(evaluate(c, xs[:, None], ys[None, :]))

	rows, columns = linear_sum_assignment(cost)
	return float(numpy.sum(cost[rows, columns]) / units)


def pairwise_costs(curves: Sequence[QuantileCurve], c: ContrastSpec) -> numpy.ndarray:
	"""
	Return the matrix of costs ``W_c(curve_k, curve_l)`` between every pair of curves.

	:param curves: Curves sharing one grid.
	:param c:
	"""

	if not curves:
		return numpy.zeros((0, 0))

	grid = curves[0].grid
	for curve in curves[1:]:
		grid.require_same(curve.grid)

	matrix = numpy.stack([curve.values for curve in curves])
	return numpy.stack([costs_to_curve(grid, matrix, row, c) for row in matrix], axis=1)
