#!/usr/bin/env python3
#
#  contrasts.py
"""
Contrast functions ``c(x, y)``, the rectangle (measure) property checker,
and the scalar feature ``argmin_θ Σ w_k c(x_k, θ)``.

.. autosummary-widths:: 40/100
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
import enum
from typing import Callable, NamedTuple, Optional, Sequence, Tuple, Union

# 3rd party
import numpy
import pandas
from domdf_python_tools.doctools import prettify_docstrings
from domdf_python_tools.paths import PathPlus
from domdf_python_tools.typing import PathLike
from scipy.optimize import minimize_scalar

# this package
from cdfsense import DomainError, NonCoerciveContrastError
from cdfsense.quantile_model import check_weights, columnwise_quantile

__all__ = [
		"PROPERTY_TOLERANCE",
		"DEFAULT_PROBE_SIZE",
		"ContrastKind",
		"ContrastSpec",
		"PropertyReport",
		"evaluate",
		"check_property_p",
		"scalar_feature",
		"columnwise_feature",
		"feature_objective",
		"parse_contrast",
		"read_tabulated_csv",
		"default_probe_grid",
		]

#: Largest rectangle increment accepted by :func:`~.check_property_p`.
PROPERTY_TOLERANCE: float = 1e-9

#: The default number of points in a probe grid.
DEFAULT_PROBE_SIZE: int = 25

ArrayLike = Union[float, Sequence[float], numpy.ndarray]


class ContrastKind(enum.Enum):
	"""
	The families of contrast function.
	"""

	SQUARED = "squared"
	ABSOLUTE = "absolute"
	POWER = "power"
	PINBALL = "pinball"
	NEG_PRODUCT = "negproduct"
	TABULATED = "tabulated"
	CALLABLE = "callable"


class ContrastSpec:
	"""
	A contrast function ``c(x, y)``.

	Instances should be constructed with the classmethods, which validate their parameters.

	:param kind:
	:param parameter: The exponent ``p`` for :attr:`~.ContrastKind.POWER`,
		or the level ``α`` for :attr:`~.ContrastKind.PINBALL`.
	:param table: The ``(delta, C(delta))`` nodes of a tabulated contrast.
	:param function: The function behind a :attr:`~.ContrastKind.CALLABLE` contrast.
	:param label: A textual label for tabulated and callable contrasts.
	"""

	__slots__ = ("kind", "parameter", "table", "function", "label")

	def __init__(
			self,
			kind: ContrastKind,
			parameter: Optional[float] = None,
			table: Optional[Tuple[numpy.ndarray, numpy.ndarray]] = None,
			function: Optional[Callable[[numpy.ndarray, numpy.ndarray], numpy.ndarray]] = None,
			label: Optional[str] = None,
			):
		self.kind: ContrastKind = kind
		self.parameter: Optional[float] = parameter
		self.table: Optional[Tuple[numpy.ndarray, numpy.ndarray]] = table
		self.function = function
		self.label: Optional[str] = label

	@classmethod
	def squared(cls) -> "ContrastSpec":
		"""
		``c(x, y) = (x - y)²``.
		"""

		return cls(ContrastKind.SQUARED)

	@classmethod
	def absolute(cls) -> "ContrastSpec":
		"""
		``c(x, y) = |x - y|``.
		"""

		return cls(ContrastKind.ABSOLUTE)

	@classmethod
	def power(cls, p: float) -> "ContrastSpec":
		"""
		``c(x, y) = |x - y|^p``.

		:param p: The exponent, at least 1.
		"""

		p = float(p)
		if not numpy.isfinite(p) or p < 1:
			raise DomainError(f"The exponent p must be a finite number >= 1 (got {p!r}).")

		return cls(ContrastKind.POWER, parameter=p)

	@classmethod
	def pinball(cls, alpha: float) -> "ContrastSpec":
		"""
		The pinball (check) contrast ``(1 - α)(y - x)`` for ``x < y``, ``α(x - y)`` otherwise.

		:param alpha: The level, in ``(0, 1)``.
		"""

		alpha = float(alpha)
		if not 0 < alpha < 1:
			raise DomainError(f"The pinball level must lie in (0, 1) (got {alpha!r}).")

		return cls(ContrastKind.PINBALL, parameter=alpha)

	@classmethod
	def neg_product(cls) -> "ContrastSpec":
		"""
		``c(x, y) = -xy``.

		This satisfies the rectangle property but has no minimizing feature.
		"""

		return cls(ContrastKind.NEG_PRODUCT)

	@classmethod
	def tabulated(
			cls,
			deltas: Sequence[float],
			values: Sequence[float],
			label: Optional[str] = None,
			) -> "ContrastSpec":
		"""
		``c(x, y) = C(x - y)`` for a convex ``C`` sampled at the nodes ``deltas``.

		``C`` is interpolated linearly between the nodes and extended linearly
		beyond them with the end slopes.

		:param deltas: Strictly increasing nodes.
		:param values: ``C`` at each node.
		:param label: Where the table came from, used in :attr:`~.ContrastSpec.name`.

		:raises DomainError: If the table is not a discretely convex function.
		"""

		x = numpy.array(deltas, dtype=numpy.float64).ravel()
		y = numpy.array(values, dtype=numpy.float64).ravel()

		if x.size != y.size:
			raise DomainError("A tabulated contrast needs exactly one value per node.")
		if x.size < 2:
			raise DomainError("A tabulated contrast needs at least 2 nodes.")
		if not (numpy.all(numpy.isfinite(x)) and numpy.all(numpy.isfinite(y))):
			raise DomainError("Tabulated contrast nodes and values must be finite.")
		if numpy.any(numpy.diff(x) <= 0):
			raise DomainError("Tabulated contrast nodes must be strictly increasing.")

		slopes = numpy.diff(y) / numpy.diff(x)
		scale = 1 + numpy.max(numpy.abs(slopes))
		bad = numpy.flatnonzero(numpy.diff(slopes) < -1e-12 * scale)
		if bad.size:
			raise DomainError(f"Tabulated contrast is not convex at node {int(bad[0]) + 1}.")

		x.flags.writeable = False
		y.flags.writeable = False

		return cls(ContrastKind.TABULATED, table=(x, y), label=label)

	@classmethod
	def from_callable(
			cls,
			function: Callable[[numpy.ndarray, numpy.ndarray], numpy.ndarray],
			label: str = "callable",
			) -> "ContrastSpec":
		"""
		Wrap an arbitrary bivariate function.

		Such contrasts can be evaluated and probed for the rectangle property.
		Their features are found numerically on the range of the data,
		assuming the function is convex in its second argument.

		:param function: Called with two broadcastable arrays.
		:param label:
		"""

		return cls(ContrastKind.CALLABLE, function=function, label=label)

	@property
	def name(self) -> str:
		"""
		The textual form of the contrast, as accepted by :func:`~.parse_contrast`.
		"""

		if self.kind in {ContrastKind.POWER, ContrastKind.PINBALL}:
			return f"{self.kind.value}:{self.parameter}"
		elif self.kind is ContrastKind.TABULATED:
			return f"tabulated:{self.label}" if self.label else "tabulated"
		elif self.kind is ContrastKind.CALLABLE:
			return self.label or "callable"
		else:
			return self.kind.value

	@property
	def is_coercive(self) -> bool:
		"""
		Whether ``Σ w_k c(x_k, θ)`` attains its minimum in ``θ``.
		"""

		if self.kind is ContrastKind.NEG_PRODUCT:
			return False
		elif self.kind is ContrastKind.TABULATED:
			slopes = _end_slopes(self)
			return slopes[0] <= 0 <= slopes[1]
		else:
			return True

	@property
	def is_nonnegative(self) -> bool:
		"""
		Whether the contrast never takes negative values.

		Unknown for callable contrasts, which report :py:obj:`False`.
		"""

		if self.kind in {ContrastKind.NEG_PRODUCT, ContrastKind.CALLABLE}:
			return False
		elif self.kind is ContrastKind.TABULATED:
			assert self.table is not None
			return self.is_coercive and float(numpy.min(self.table[1])) >= 0
		else:
			return True

	def __eq__(self, other) -> bool:  # noqa: MAN001
		if not isinstance(other, ContrastSpec):
			return NotImplemented

		if self.kind is not other.kind or self.parameter != other.parameter:
			return False
		if self.kind is ContrastKind.TABULATED:
			assert self.table is not None and other.table is not None
			return all(numpy.array_equal(a, b) for a, b in zip(self.table, other.table))
		if self.kind is ContrastKind.CALLABLE:
			return self.function is other.function

		return True

	def __hash__(self) -> int:
		return hash((self.kind, self.parameter, self.name))

	def __repr__(self) -> str:
		return f"<ContrastSpec {self.name!r}>"


def _end_slopes(c: ContrastSpec) -> Tuple[float, float]:
	assert c.table is not None
	x, y = c.table
	return float((y[1] - y[0]) / (x[1] - x[0])), float((y[-1] - y[-2]) / (x[-1] - x[-2]))


def _tabulated(c: ContrastSpec, delta: numpy.ndarray) -> numpy.ndarray:
	assert c.table is not None
	x, y = c.table
	left, right = _end_slopes(c)

	inside = numpy.interp(delta, x, y)
	below = y[0] + left * (delta - x[0])
	above = y[-1] + right * (delta - x[-1])

	return numpy.where(delta < x[0], below, numpy.where(delta > x[-1], above, inside))


def _evaluate_array(c: ContrastSpec, x: numpy.ndarray, y: numpy.ndarray) -> numpy.ndarray:
	kind = c.kind

	if kind is ContrastKind.SQUARED:
		return (x - y)**2
	elif kind is ContrastKind.ABSOLUTE:
		return numpy.abs(x - y)
	elif kind is ContrastKind.POWER:
		return numpy.abs(x - y)**c.parameter
	elif kind is ContrastKind.PINBALL:
		alpha = c.parameter
		delta = x - y
		return numpy.where(delta < 0, (1 - alpha) * -delta, alpha * delta)  # type: ignore[operator]
	elif kind is ContrastKind.NEG_PRODUCT:
		return -(x * y)
	elif kind is ContrastKind.TABULATED:
		return _tabulated(c, x - y)
	else:
		assert c.function is not None
		x, y = numpy.broadcast_arrays(x, y)
		return numpy.broadcast_to(numpy.asarray(c.function(x, y), dtype=numpy.float64), x.shape)


def evaluate(c: ContrastSpec, x: ArrayLike, y: ArrayLike) -> Union[float, numpy.ndarray]:
	"""
	Evaluate the contrast ``c(x, y)``.

	Arrays are broadcast against each other.

	:param c:
	:param x:
	:param y:

	:returns: A float when both ``x`` and ``y`` are scalars, otherwise an array.

	:raises DomainError: If any input is not finite.
	"""

	x_array = numpy.asarray(x, dtype=numpy.float64)
	y_array = numpy.asarray(y, dtype=numpy.float64)

	if not (numpy.all(numpy.isfinite(x_array)) and numpy.all(numpy.isfinite(y_array))):
		raise DomainError("Contrast arguments must be finite.")

	result = _evaluate_array(c, x_array, y_array)

	if x_array.ndim == 0 and y_array.ndim == 0:
		return float(result)

	return numpy.asarray(result, dtype=numpy.float64)


@prettify_docstrings
class PropertyReport(NamedTuple):
	"""
	The outcome of :func:`~.check_property_p`.
	"""

	#: Whether every rectangle increment was at most the tolerance.
	passes: bool

	#: The largest rectangle increment found.
	worst_violation: float

	#: The quadruple ``(x, x', y, y')`` attaining :attr:`~.PropertyReport.worst_violation`.
	witness: Tuple[float, float, float, float]


def check_property_p(
		c: ContrastSpec,
		probe_grid: Union[Sequence[float], numpy.ndarray],
		tolerance: float = PROPERTY_TOLERANCE,
		) -> PropertyReport:
	"""
	Check the rectangle inequality ``c(x', y') - c(x', y) - c(x, y') + c(x, y) <= 0``
	for every ``x < x'`` and ``y < y'`` drawn from ``probe_grid``.

	:param c:
	:param probe_grid: Probe points; duplicates are ignored.
	:param tolerance: The largest increment still counted as a pass.

	:raises DomainError: If there are fewer than two distinct probe points.
	"""  # noqa: D400

	points = numpy.unique(numpy.asarray(probe_grid, dtype=numpy.float64))

	if points.size < 2:
		raise DomainError("At least 2 distinct probe points are required.")
	if not numpy.all(numpy.isfinite(points)):
		raise DomainError("Probe points must be finite.")

	k = points.size
	table = numpy.asarray(_evaluate_array(c, points[:, None], points[None, :]), dtype=numpy.float64)

	# column[a, b, y] = c(x_b, y) - c(x_a, y)
	column = table[None, :, :] - table[:, None, :]
	running_min = numpy.minimum.accumulate(column, axis=2)
	gain = column[:, :, 1:] - running_min[:, :, :-1]

	lower, upper = numpy.triu_indices(k, 1)
	gain = gain[lower, upper]

	flat = int(numpy.argmax(gain))
	pair, y_upper = divmod(flat, k - 1)
	y_upper += 1
	a, b = int(lower[pair]), int(upper[pair])
	y_lower = int(numpy.argmin(column[a, b, :y_upper]))

	worst = float(gain[pair, y_upper - 1])
	witness = (float(points[a]), float(points[b]), float(points[y_lower]), float(points[y_upper]))

	return PropertyReport(worst <= tolerance, worst, witness)


def default_probe_grid(low: float, high: float, size: int = DEFAULT_PROBE_SIZE) -> numpy.ndarray:
	"""
	Return ``size`` evenly spaced probe points covering ``[low, high]``.

	A degenerate range is widened by one unit on each side.

	:param low:
	:param high:
	:param size:
	"""

	if size < 2:
		raise DomainError("A probe grid needs at least 2 points.")

	low, high = float(min(low, high)), float(max(low, high))
	if low == high:
		low, high = low - 1, high + 1

	return numpy.linspace(low, high, size)


def feature_objective(
		c: ContrastSpec,
		values: Union[Sequence[float], numpy.ndarray],
		theta: float,
		weights: Optional[Union[Sequence[float], numpy.ndarray]] = None,
		) -> float:
	"""
	Return ``Σ w_k c(x_k, θ)``.

	:param c:
	:param values: The samples ``x_k``.
	:param theta:
	:param weights: Weights summing to one. Defaults to equal weights.
	"""

	array = numpy.asarray(values, dtype=numpy.float64).ravel()
	w = check_weights(weights, array.size)
	costs = _evaluate_array(c, array, numpy.float64(theta))

	if w is None:
		return float(numpy.mean(costs))

	return float(numpy.sum(w * costs))


def _search_bracket(c: ContrastSpec, low: float, high: float) -> Tuple[float, float]:
	if c.kind is ContrastKind.TABULATED:
		assert c.table is not None
		# The objective is monotone outside the data range shifted by a minimizing node of C.
		node = float(c.table[0][int(numpy.argmin(c.table[1]))])
		return low - node, high - node

	return low, high


def _minimize(c: ContrastSpec, column: numpy.ndarray, weights: Optional[numpy.ndarray]) -> float:
	low, high = _search_bracket(c, float(column.min()), float(column.max()))

	if low == high:
		return low

	def objective(theta: float) -> float:
		return feature_objective(c, column, theta, weights)

	result = minimize_scalar(
			objective,
			bounds=(low, high),
			method="bounded",
			options={"xatol": 1e-10 * (high - low + 1)},
			)

	candidates = [low, float(result.x), high]
	scores = [objective(theta) for theta in candidates]
	return candidates[int(numpy.argmin(scores))]


def columnwise_feature(
		c: ContrastSpec,
		matrix: numpy.ndarray,
		weights: Optional[Union[Sequence[float], numpy.ndarray]] = None,
		) -> numpy.ndarray:
	"""
	Return the scalar feature of every column of ``matrix``.

	:param c: A coercive contrast.
	:param matrix: An ``n × m`` array; rows are weighted observations.
	:param weights: ``n`` weights summing to one. Defaults to equal weights.

	:raises NonCoerciveContrastError: If ``c`` has no minimizing feature.
	"""

	array = numpy.asarray(matrix, dtype=numpy.float64)
	if array.ndim != 2 or array.shape[0] == 0:
		raise DomainError("Expected a nonempty n × m matrix of samples.")
	if not numpy.all(numpy.isfinite(array)):
		raise DomainError("Samples must be finite.")

	w = check_weights(weights, array.shape[0])

	if not c.is_coercive:
		raise NonCoerciveContrastError(c.name)

	kind, p = c.kind, c.parameter

	if kind is ContrastKind.SQUARED or (kind is ContrastKind.POWER and p == 2):
		if w is None:
			return numpy.mean(array, axis=0)
		return numpy.sum(w[:, None] * array, axis=0)
	elif kind is ContrastKind.ABSOLUTE or (kind is ContrastKind.POWER and p == 1):
		return columnwise_quantile(array, 0.5, w)
	elif kind is ContrastKind.PINBALL:
		assert p is not None
		return columnwise_quantile(array, p, w)

	return numpy.array([_minimize(c, array[:, j], w) for j in range(array.shape[1])])


def scalar_feature(
		c: ContrastSpec,
		samples: Union[Sequence[float], numpy.ndarray],
		weights: Optional[Union[Sequence[float], numpy.ndarray]] = None,
		) -> float:
	"""
	Return ``argmin_θ Σ w_k c(x_k, θ)``.

	Closed forms are used where they exist: the weighted mean for the squared contrast,
	the lower weighted median for the absolute contrast and the generalized-inverse
	``α``-quantile for the pinball contrast. Other contrasts are minimized numerically
	with bounded Brent search over the range of the samples.

	:param c: A coercive contrast.
	:param samples:
	:param weights: Weights summing to one. Defaults to equal weights.

	:raises DomainError: If there are no samples.
	:raises NonCoerciveContrastError: If ``c`` has no minimizing feature.
	"""

	column = numpy.asarray(samples, dtype=numpy.float64).reshape(-1, 1)
	return float(columnwise_feature(c, column, weights)[0])


def read_tabulated_csv(filename: PathLike) -> ContrastSpec:
	"""
	Read a tabulated convex contrast from a two-column ``delta,C(delta)`` CSV file.

	A non-numeric first row is treated as a header.

	:param filename:
	"""

	filename = PathPlus(filename)
	frame = pandas.read_csv(filename, header=None, comment='#', dtype=str)

	if frame.shape[1] != 2:
		raise DomainError(f"Expected 2 columns in {filename.as_posix()}, got {frame.shape[1]}.")

	numeric = frame.apply(pandas.to_numeric, errors="coerce")
	if numeric.iloc[0].isna().any():
		numeric = numeric.iloc[1:]
	if numeric.isna().to_numpy().any():
		raise DomainError(f"Non-numeric values in {filename.as_posix()}.")

	return ContrastSpec.tabulated(
			numeric.iloc[:, 0].to_numpy(dtype=numpy.float64),
			numeric.iloc[:, 1].to_numpy(dtype=numpy.float64),
			label=filename.as_posix(),
			)


def parse_contrast(text: str) -> ContrastSpec:
	"""
	Parse the textual form of a contrast.

	Accepted forms are ``squared``, ``absolute``, ``power:<p>``, ``pinball:<α>``,
	``negproduct`` and ``tabulated:<file.csv>``.

	:param text:

	:raises DomainError: If the text is not recognised.
	"""

	kind, _, argument = text.strip().partition(':')
	kind = kind.lower()

	if kind == "squared" and not argument:
		return ContrastSpec.squared()
	elif kind == "absolute" and not argument:
		return ContrastSpec.absolute()
	elif kind == "negproduct" and not argument:
		return ContrastSpec.neg_product()
	elif kind == "tabulated" and argument:
		return read_tabulated_csv(argument)
	elif kind in {"power", "pinball"} and argument:
		try:
			value = float(argument)
		except ValueError:
			raise DomainError(f"Invalid parameter {argument!r} for contrast {kind!r}.") from None

		return ContrastSpec.power(value) if kind == "power" else ContrastSpec.pinball(value)

	raise DomainError(f"Unknown contrast {text!r}.")
