#!/usr/bin/env python3
#
#  quantile_model.py
"""
One-dimensional distributions represented by their generalized inverse
(quantile function) on a grid of probability levels.

.. autosummary-widths:: 45/100
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
from bisect import bisect_left
from fractions import Fraction
from itertools import accumulate
from typing import Iterator, List, Optional, Sequence, Tuple, Union

# 3rd party
import numpy
import pandas
from domdf_python_tools.paths import PathPlus
from domdf_python_tools.typing import PathLike
from typing_extensions import Literal

# this package
from cdfsense import DomainError, GridError, GridMismatchError, InvalidCurveError

__all__ = [
		"DEFAULT_GRID_SIZE",
		"GridScheme",
		"ProbGrid",
		"QuantileCurve",
		"DiscreteDistribution",
		"generalized_inverse",
		"curve_from_samples",
		"curve_from_inverse_table",
		"uniform_quantile_index",
		"columnwise_quantile",
		"weighted_quantile",
		"check_quantile_values",
		"check_weights",
		"WEIGHT_TOLERANCE",
		"write_curves_csv",
		"read_curves_csv",
		"write_curves_json",
		"read_curves_json",
		"write_inputs_csv",
		"read_inputs_csv",
		]

#: The default number of probability levels.
DEFAULT_GRID_SIZE: int = 512

#: Weights must sum to one within this tolerance.
WEIGHT_TOLERANCE: float = 1e-12

# Largest denominator accepted when recovering exact rational weights.
_MAX_DENOMINATOR = 10**6

GridScheme = Literal["midpoint", "explicit"]
"""
How the levels of a :class:`~.ProbGrid` were laid out.

* ``'midpoint'`` -- ``u_j = (j - 1/2) / m`` for ``j = 1, ..., m``.
* ``'explicit'`` -- any other strictly increasing levels in ``(0, 1)``.
"""


def _midpoint_levels(m: int) -> numpy.ndarray:
	return (numpy.arange(m, dtype=numpy.float64) + 0.5) / m


class ProbGrid:
	"""
	An ordered grid of probability levels ``u_1 < ... < u_m`` in the open interval ``(0, 1)``.

	Grids whose levels coincide with the midpoint layout are recognised as such,
	whichever constructor built them.

	:param levels: Strictly increasing levels in ``(0, 1)``; at least two of them.

	:raises GridError: If the levels are not strictly increasing, are outside ``(0, 1)``,
		or there are fewer than two of them.
	"""

	__slots__ = ("_levels", "_scheme")

	def __init__(self, levels: Sequence[float]):
		array = numpy.array(levels, dtype=numpy.float64)

		if array.ndim != 1:
			raise GridError("Grid levels must be a flat sequence.")
		if array.size < 2:
			raise GridError("A probability grid needs at least 2 levels.")
		if not numpy.all(numpy.isfinite(array)) or numpy.any((array <= 0) | (array >= 1)):
			raise GridError("Grid levels must lie in the open interval (0, 1).")
		if numpy.any(numpy.diff(array) <= 0):
			raise GridError("Grid levels must be strictly increasing.")

		array.flags.writeable = False
		self._levels = array

		if numpy.array_equal(array, _midpoint_levels(array.size)):
			self._scheme: GridScheme = "midpoint"
		else:
			self._scheme = "explicit"

	@classmethod
	def midpoint(cls, m: int = DEFAULT_GRID_SIZE) -> "ProbGrid":
		"""
		Construct the midpoint grid ``u_j = (j - 1/2) / m``.

		:param m: The number of levels.
		"""

		if m < 2:
			raise GridError("A probability grid needs at least 2 levels.")

		return cls(_midpoint_levels(int(m)))

	@property
	def levels(self) -> numpy.ndarray:
		"""
		The (read-only) probability levels.
		"""

		return self._levels

	@property
	def scheme(self) -> GridScheme:
		"""
		The layout of the levels.
		"""

		return self._scheme

	@property
	def weights(self) -> numpy.ndarray:
		"""
		Quadrature weights of the levels.

		These are the widths of the cells obtained by cutting ``(0, 1)`` halfway between
		consecutive levels, which is ``1/m`` for every level of a midpoint grid.
		"""

		if self._scheme == "midpoint":
			return numpy.full(self._levels.size, 1 / self._levels.size)

		edges = numpy.concatenate([[0.0], (self._levels[1:] + self._levels[:-1]) / 2, [1.0]])
		return numpy.diff(edges)

	def integrate(self, values: Union[Sequence[float], numpy.ndarray], axis: int = -1) -> numpy.ndarray:
		"""
		Approximate ``∫_0^1 g(u) du`` from the values ``g(u_j)`` on this grid.

		Midpoint grids use the plain mean, so the result does not depend on how
		the computation is scheduled.

		:param values: Values at the grid levels, along ``axis``.
		:param axis: The axis holding the levels.
		"""

		array = numpy.asarray(values, dtype=numpy.float64)

		if array.shape[axis] != self._levels.size:
			raise GridMismatchError()

		if self._scheme == "midpoint":
			return numpy.mean(array, axis=axis)

		weights_shape = [1] * array.ndim
		weights_shape[axis] = self._levels.size
		return numpy.sum(array * self.weights.reshape(weights_shape), axis=axis)

	def require_same(self, other: "ProbGrid") -> None:
		"""
		Raise :exc:`~cdfsense.GridMismatchError` unless ``other`` has exactly the same levels.

		:param other:
		"""

		if self != other:
			raise GridMismatchError()

	def __len__(self) -> int:
		return self._levels.size

	def __eq__(self, other) -> bool:  # noqa: MAN001
		if isinstance(other, ProbGrid):
			return numpy.array_equal(self._levels, other._levels)

		return NotImplemented

	def __hash__(self) -> int:
		return hash(self._levels.tobytes())

	def __repr__(self) -> str:
		return f"{self.__class__.__name__}(m={self._levels.size}, scheme={self._scheme!r})"


def check_quantile_values(values: numpy.ndarray) -> None:
	"""
	Check that ``values`` is finite and nondecreasing.

	:param values: A one-dimensional array.

	:raises InvalidCurveError: Carrying the first offending index.
	"""

	not_finite = numpy.flatnonzero(~numpy.isfinite(values))
	if not_finite.size:
		index = int(not_finite[0])
		raise InvalidCurveError(f"Quantile value at index {index} is not finite.", index)

	decreasing = numpy.flatnonzero(numpy.diff(values) < 0)
	if decreasing.size:
		index = int(decreasing[0]) + 1
		raise InvalidCurveError(f"Quantile values decrease at index {index}.", index)


class QuantileCurve:
	"""
	A generalized inverse distribution function ``F⁻`` sampled on a :class:`~.ProbGrid`.

	Any nondecreasing, finite sequence of values is the generalized inverse of
	a valid distribution function, so no further conditions are imposed.

	:param grid:
	:param values: One value per level, in the units of the underlying variable.

	:raises InvalidCurveError: If the values are not finite or not nondecreasing.
	"""

	__slots__ = ("_grid", "_values")

	def __init__(self, grid: ProbGrid, values: Union[Sequence[float], numpy.ndarray]):
		array = numpy.array(values, dtype=numpy.float64)

		if array.shape != (len(grid), ):
			raise DomainError(f"Expected {len(grid)} quantile values, got array of shape {array.shape}.")

		check_quantile_values(array)
		array.flags.writeable = False

		self._grid = grid
		self._values = array

	@property
	def grid(self) -> ProbGrid:
		"""
		The probability grid.
		"""

		return self._grid

	@property
	def values(self) -> numpy.ndarray:
		"""
		The (read-only) quantile values.
		"""

		return self._values

	def shifted(self, delta: float) -> "QuantileCurve":
		"""
		Return the curve of ``X + delta``.

		:param delta:
		"""

		return QuantileCurve(self._grid, self._values + delta)

	def scaled(self, factor: float) -> "QuantileCurve":
		"""
		Return the curve of ``factor * X``.

		:param factor: A strictly positive factor.
		"""

		if not factor > 0:
			raise DomainError("Quantile curves can only be scaled by a positive factor.")

		return QuantileCurve(self._grid, self._values * factor)

	def __len__(self) -> int:
		return self._values.size

	def __eq__(self, other) -> bool:  # noqa: MAN001
		if isinstance(other, QuantileCurve):
			return self._grid == other._grid and numpy.array_equal(self._values, other._values)

		return NotImplemented

	def __hash__(self) -> int:
		return hash((self._grid, self._values.tobytes()))

	def __repr__(self) -> str:
		return f"{self.__class__.__name__}({self._grid!r}, min={self._values[0]!r}, max={self._values[-1]!r})"


def _as_fractions(weights: Sequence[Union[float, Fraction]]) -> Optional[List[Fraction]]:
	"""
	Recover exact rational weights, or return :py:obj:`None` if any weight is not a ratio of small integers.

	:param weights:
	"""

	fractions = []

	for weight in weights:
		if isinstance(weight, (Fraction, int)):
			fractions.append(Fraction(weight))
			continue

		candidate = Fraction(float(weight)).limit_denominator(_MAX_DENOMINATOR)
		if abs(float(candidate) - float(weight)) > WEIGHT_TOLERANCE:
			return None

		fractions.append(candidate)

	return fractions


def _exact_level(u: float) -> Fraction:
	# 0.2 is stored as slightly more than 1/5; recover the intended ratio when there is one.
	candidate = Fraction(float(u)).limit_denominator(_MAX_DENOMINATOR)
	if abs(float(candidate) - float(u)) <= WEIGHT_TOLERANCE:
		return candidate
	return Fraction(float(u))


class DiscreteDistribution:
	"""
	A distribution with finitely many atoms.

	Weights are normalised to sum to one and the atoms are sorted by value.
	When every weight is a ratio of small integers the exact rational weights are kept
	in :attr:`~.exact_weights`, and the generalized inverse compares cumulative weights exactly.

	:param values: The atom locations.
	:param weights: Strictly positive weights. Defaults to equal weights.

	:raises DomainError: If there are no atoms, an atom is not finite, or a weight is not positive.
	"""

	__slots__ = ("values", "weights", "exact_weights")

	#: The atom locations, in increasing order.
	values: numpy.ndarray

	#: The atom weights, summing to one.
	weights: numpy.ndarray

	#: The exact rational weights, if available.
	exact_weights: Optional[Tuple[Fraction, ...]]

	def __init__(
			self,
			values: Sequence[float],
			weights: Optional[Sequence[Union[float, Fraction]]] = None,
			):
		locations = numpy.array(values, dtype=numpy.float64).ravel()

		if locations.size == 0:
			raise DomainError("A discrete distribution needs at least one atom.")
		if not numpy.all(numpy.isfinite(locations)):
			raise DomainError("Atom locations must be finite.")

		if weights is None:
			exact: Optional[List[Fraction]] = [Fraction(1, locations.size)] * locations.size
		else:
			weights = list(weights)
			if len(weights) != locations.size:
				raise DomainError("There must be exactly one weight per atom.")
			if any(not w > 0 for w in weights):
				raise DomainError("Atom weights must be strictly positive.")
			exact = _as_fractions(weights)

		if exact is not None:
			total = sum(exact)
			exact = [w / total for w in exact]
			float_weights = numpy.array([float(w) for w in exact])
		else:
			float_weights = numpy.array(weights, dtype=numpy.float64)
			float_weights = float_weights / float_weights.sum()

		order = numpy.argsort(locations, kind="stable")

		self.values = locations[order]
		self.weights = float_weights[order]
		self.exact_weights = None if exact is None else tuple(exact[i] for i in order)

		self.values.flags.writeable = False
		self.weights.flags.writeable = False

	@property
	def atoms(self) -> List[Tuple[float, float]]:
		"""
		The ``(value, weight)`` pairs, sorted by value.
		"""

		return list(zip(self.values.tolist(), self.weights.tolist()))

	@property
	def denominator(self) -> Optional[int]:
		"""
		The least common denominator of the exact weights, or :py:obj:`None` if the weights are not rational.
		"""

		if self.exact_weights is None:
			return None

		denominator = 1
		for weight in self.exact_weights:
			denominator = denominator * weight.denominator // math.gcd(denominator, weight.denominator)

		return denominator

	def inverse_indices(self, levels: Union[Sequence[float], numpy.ndarray]) -> numpy.ndarray:
		"""
		Return, for each level ``u``, the index of the atom ``inf{x : F(x) >= u}``.

		:param levels: Probability levels in ``(0, 1)``.
		"""

		levels = numpy.asarray(levels, dtype=numpy.float64)
		last = self.values.size - 1

		if self.exact_weights is not None:
			cumulative = list(accumulate(self.exact_weights))
			indices = [min(bisect_left(cumulative, _exact_level(u)), last) for u in levels.ravel()]
			return numpy.array(indices, dtype=numpy.intp).reshape(levels.shape)

		cumulative_float = numpy.cumsum(self.weights)
		indices = numpy.searchsorted(cumulative_float, levels - WEIGHT_TOLERANCE, side="left")
		return numpy.minimum(indices, last)

	def __len__(self) -> int:
		return self.values.size

	def __iter__(self) -> Iterator[Tuple[float, float]]:
		yield from self.atoms

	def __repr__(self) -> str:
		return f"{self.__class__.__name__}({self.atoms!r})"


def _check_level(u: float) -> None:
	if not 0 < u < 1:
		raise DomainError(f"Probability level {u!r} is outside the open interval (0, 1).")


def check_weights(weights: Optional[Union[Sequence[float], numpy.ndarray]], n: int) -> Optional[numpy.ndarray]:
	"""
	Validate a vector of ``n`` observation weights.

	Every weight must be strictly positive and the weights must sum to one
	within :data:`~.WEIGHT_TOLERANCE`.

	:param weights: The weights, or :py:obj:`None` for equal weights.
	:param n: The number of observations.

	:returns: The weights as a float array, or :py:obj:`None` if equal weights were requested.

	:raises DomainError: If the weights are invalid.
	"""

	if weights is None:
		return None

	array = numpy.asarray(weights, dtype=numpy.float64).ravel()

	if array.size != n:
		raise DomainError(f"Expected {n} weights, got {array.size}.")
	if not numpy.all(numpy.isfinite(array)) or numpy.any(array <= 0):
		raise DomainError("Weights must be finite and strictly positive.")
	if abs(array.sum() - 1) > WEIGHT_TOLERANCE * max(n, 1):
		raise DomainError(f"Weights must sum to 1 (got {array.sum()!r}).")

	return array


def generalized_inverse(dist: DiscreteDistribution, u: float) -> float:
	"""
	Evaluate the generalized inverse ``inf{x : F(x) >= u}`` of the step distribution function of ``dist``.

	At a level equal to a cumulative weight the lower atom is returned (left-continuous convention).

	:param dist:
	:param u: A probability level in ``(0, 1)``.

	:raises DomainError: If ``u`` is outside ``(0, 1)``.
	"""

	_check_level(u)
	return float(dist.values[int(dist.inverse_indices([u])[0])])


def uniform_quantile_index(n: int, alpha: float) -> int:
	"""
	Return the (zero-based) index of the ``alpha``-quantile among ``n`` sorted equal-weight values.

	This is the smallest ``k`` with ``(k + 1) / n >= alpha``.

	:param n: The number of values.
	:param alpha: A probability level in ``(0, 1)``.
	"""

	cumulative = numpy.arange(1, n + 1, dtype=numpy.float64) / n
	return min(int(numpy.searchsorted(cumulative, alpha, side="left")), n - 1)


def columnwise_quantile(
		matrix: numpy.ndarray,
		alpha: float,
		weights: Optional[numpy.ndarray] = None,
		) -> numpy.ndarray:
	"""
	Return the generalized-inverse ``alpha``-quantile of every column of ``matrix``.

	Rows are observations. Ties resolve to the lower value.

	:param matrix: An ``n × m`` array.
	:param alpha: A probability level in ``(0, 1)``.
	:param weights: Positive row weights summing to one. Defaults to equal weights.
	"""

	_check_level(alpha)
	matrix = numpy.asarray(matrix, dtype=numpy.float64)
	n = matrix.shape[0]

	if weights is None:
		index = uniform_quantile_index(n, alpha)
		return numpy.partition(matrix, index, axis=0)[index]

	order = numpy.argsort(matrix, axis=0, kind="stable")
	cumulative = numpy.cumsum(numpy.asarray(weights, dtype=numpy.float64)[order], axis=0)
	reached = cumulative >= alpha - WEIGHT_TOLERANCE
	rows = numpy.where(reached.any(axis=0), reached.argmax(axis=0), n - 1)
	columns = numpy.arange(matrix.shape[1])

	return matrix[order[rows, columns], columns]


def weighted_quantile(
		values: Union[Sequence[float], numpy.ndarray],
		alpha: float,
		weights: Optional[Union[Sequence[float], numpy.ndarray]] = None,
		) -> float:
	"""
	Return the generalized-inverse ``alpha``-quantile of a (weighted) sample.

	:param values:
	:param alpha: A probability level in ``(0, 1)``.
	:param weights: Positive weights summing to one. Defaults to equal weights.
	"""

	column = numpy.asarray(values, dtype=numpy.float64).reshape(-1, 1)
	return float(columnwise_quantile(column, alpha, None if weights is None else numpy.asarray(weights))[0])


def curve_from_samples(samples: Sequence[float], grid: Optional[ProbGrid] = None) -> QuantileCurve:
	"""
	Construct the empirical quantile curve of an equal-weight sample.

	The curve is constant below the smallest and above the largest sample; there is no extrapolation.

	:param samples: One or more finite samples.
	:param grid: The probability grid. Defaults to the midpoint grid with :data:`~.DEFAULT_GRID_SIZE` levels.

	:raises DomainError: If there are no samples or any sample is not finite.
	"""

	if grid is None:
		grid = ProbGrid.midpoint()

	ordered = numpy.sort(numpy.array(samples, dtype=numpy.float64).ravel())

	if ordered.size == 0:
		raise DomainError("At least one sample is required.")
	if not numpy.all(numpy.isfinite(ordered)):
		raise DomainError("Samples must be finite.")

	cumulative = numpy.arange(1, ordered.size + 1, dtype=numpy.float64) / ordered.size
	indices = numpy.minimum(numpy.searchsorted(cumulative, grid.levels, side="left"), ordered.size - 1)

	return QuantileCurve(grid, ordered[indices])


def curve_from_inverse_table(levels: Sequence[float], values: Sequence[float]) -> QuantileCurve:
	"""
	Construct a quantile curve from precomputed ``(level, value)`` pairs.

	Non-monotone values are rejected, not repaired.

	:param levels: Strictly increasing levels in ``(0, 1)``.
	:param values: One quantile value per level.

	:raises GridError: If the levels do not form a valid grid.
	:raises InvalidCurveError: If the values are not nondecreasing.
	"""

	if len(levels) != len(values):
		raise DomainError("'levels' and 'values' must have the same length.")

	return QuantileCurve(ProbGrid(levels), values)


def write_curves_csv(filename: PathLike, grid: ProbGrid, curves: numpy.ndarray) -> None:
	"""
	Write quantile curves to a CSV file, one curve per row.

	The header row holds the grid levels. Values are written with their shortest
	round-trip representation, so :func:`~.read_curves_csv` reproduces them exactly.

	:param filename:
	:param grid:
	:param curves: An ``n × m`` array, or a single curve of length ``m``.
	"""

	matrix = numpy.atleast_2d(numpy.asarray(curves, dtype=numpy.float64))

	if matrix.shape[1] != len(grid):
		raise GridMismatchError()

	filename = PathPlus(filename)
	filename.parent.maybe_make(parents=True)

	frame = pandas.DataFrame(matrix, columns=[repr(float(u)) for u in grid.levels])
	frame.to_csv(filename, index=False, lineterminator='\n')


def read_curves_csv(filename: PathLike) -> Tuple[ProbGrid, numpy.ndarray]:
	"""
	Read quantile curves written by :func:`~.write_curves_csv`.

	:param filename:

	:returns: The grid and an ``n × m`` array of curves, each row validated.
	"""

	frame = pandas.read_csv(PathPlus(filename), float_precision="round_trip")

	try:
		grid = ProbGrid([float(column) for column in frame.columns])
	except ValueError as e:
		raise GridError(f"Could not read grid levels from the header of {filename!s}: {e}") from e

	matrix = frame.to_numpy(dtype=numpy.float64)
	if matrix.shape[0] == 0:
		raise DomainError(f"No curves found in {filename!s}.")

	for row in matrix:
		check_quantile_values(row)

	return grid, matrix


def write_curves_json(filename: PathLike, grid: ProbGrid, curves: numpy.ndarray) -> None:
	"""
	Write quantile curves to a JSON file of the form ``{"levels": [...], "curves": [[...], ...]}``.

	:param filename:
	:param grid:
	:param curves: An ``n × m`` array, or a single curve of length ``m``.
	"""

	matrix = numpy.atleast_2d(numpy.asarray(curves, dtype=numpy.float64))

	if matrix.shape[1] != len(grid):
		raise GridMismatchError()

	filename = PathPlus(filename)
	filename.parent.maybe_make(parents=True)
	filename.dump_json({"levels": grid.levels.tolist(), "curves": matrix.tolist()}, indent=2)


def read_curves_json(filename: PathLike) -> Tuple[ProbGrid, numpy.ndarray]:
	"""
	Read quantile curves written by :func:`~.write_curves_json`.

	:param filename:

	:returns: The grid and an ``n × m`` array of curves, each row validated.
	"""

	data = PathPlus(filename).load_json()

	grid = ProbGrid(data["levels"])
	matrix = numpy.atleast_2d(numpy.asarray(data["curves"], dtype=numpy.float64))

	if matrix.size == 0:
		raise DomainError(f"No curves found in {filename!s}.")
	if matrix.shape[1] != len(grid):
		raise GridMismatchError()

	for row in matrix:
		check_quantile_values(row)

	return grid, matrix


def write_inputs_csv(filename: PathLike, inputs: numpy.ndarray) -> None:
	"""
	Write the ``n × d`` input design that produced an ensemble, with columns ``X1 ... Xd``.

	:param filename:
	:param inputs:
	"""

	matrix = numpy.atleast_2d(numpy.asarray(inputs, dtype=numpy.float64))

	filename = PathPlus(filename)
	filename.parent.maybe_make(parents=True)

	frame = pandas.DataFrame(matrix, columns=[f"X{i}" for i in range(1, matrix.shape[1] + 1)])
	frame.to_csv(filename, index=False, lineterminator='\n')


def read_inputs_csv(filename: PathLike) -> numpy.ndarray:
	"""
	Read an input design written by :func:`~.write_inputs_csv`.

	:param filename:
	"""

	frame = pandas.read_csv(PathPlus(filename), float_precision="round_trip")
	return frame.to_numpy(dtype=numpy.float64)
