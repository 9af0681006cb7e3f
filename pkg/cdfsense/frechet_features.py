#!/usr/bin/env python3
#
#  frechet_features.py
"""
Fréchet features of an ensemble of random distribution functions.

Every feature reduces to a scalar minimization at each probability level,
applied to the corresponding column of quantile values.
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
from typing import NamedTuple, Optional, Sequence, Union

# 3rd party
import numpy
from domdf_python_tools.doctools import prettify_docstrings
from domdf_python_tools.paths import PathPlus
from domdf_python_tools.typing import PathLike
from scipy.optimize import isotonic_regression

# this package
from cdfsense import DegenerateError, DomainError, InvalidCurveError
from cdfsense.contrasts import ContrastSpec, columnwise_feature
from cdfsense.quantile_model import (
		ProbGrid,
		QuantileCurve,
		check_quantile_values,
		check_weights,
		read_curves_csv,
		read_curves_json,
		read_inputs_csv,
		write_curves_csv,
		write_curves_json,
		write_inputs_csv
		)
from cdfsense.transport_costs import costs_to_curve

__all__ = [
		"CdfEnsemble",
		"FeatureCurve",
		"frechet_feature",
		"frechet_mean",
		"frechet_median",
		"frechet_quantile",
		"ensemble_variance",
		"isotonic_repair",
		"expected_cost",
		"read_ensemble",
		"write_ensemble",
		]


class CdfEnsemble:
	"""
	A finite, weighted sample of random distribution functions, stored as quantile curves on one grid.

	:param grid:
	:param curves: An ``n × m`` array; each row is a nondecreasing quantile curve.
	:param weights: ``n`` nonnegative weights summing to one. Defaults to equal weights.
		Curves with zero weight are dropped, together with their rows of ``inputs``.
	:param inputs: The optional ``n × d`` matrix of code inputs that produced each curve.

	:raises InvalidCurveError: If a row is not a valid quantile curve.
		The error's ``index`` is the offending level; the message names the row.
	"""

	__slots__ = ("_grid", "_curves", "_weights", "_inputs")

	def __init__(
			self,
			grid: ProbGrid,
			curves: numpy.ndarray,
			weights: Optional[Union[Sequence[float], numpy.ndarray]] = None,
			inputs: Optional[numpy.ndarray] = None,
			):
		matrix = numpy.array(curves, dtype=numpy.float64)
		if matrix.ndim == 1:
			matrix = matrix[None, :]

		if matrix.ndim != 2 or matrix.shape[0] == 0:
			raise DomainError("An ensemble needs at least one curve.")
		if matrix.shape[1] != len(grid):
			raise DomainError(f"Expected curves with {len(grid)} values, got {matrix.shape[1]}.")

		for row, values in enumerate(matrix):
			try:
				check_quantile_values(values)
			except InvalidCurveError as e:
				raise InvalidCurveError(f"Curve {row}: {e}", e.index) from None

		if weights is not None:
			weights = numpy.asarray(weights, dtype=numpy.float64).ravel()
			if weights.size == matrix.shape[0] and numpy.all(weights >= 0) and numpy.any(weights > 0):
				keep = weights > 0
				matrix, weights = matrix[keep], weights[keep]
				if inputs is not None and len(inputs) == keep.size:
					inputs = numpy.asarray(inputs)[keep]

		w = check_weights(weights, matrix.shape[0])

		if inputs is not None:
			inputs = numpy.array(inputs, dtype=numpy.float64)
			if inputs.ndim == 1:
				inputs = inputs[:, None]
			if inputs.shape[0] != matrix.shape[0]:
				raise DomainError(
						f"The inputs have {inputs.shape[0]} rows but the ensemble has {matrix.shape[0]} curves."
						)
			inputs.flags.writeable = False

		matrix.flags.writeable = False
		if w is not None:
			w = w.copy()
			w.flags.writeable = False

		self._grid = grid
		self._curves = matrix
		self._weights = w
		self._inputs = inputs

	@classmethod
	def from_curves(
			cls,
			curves: Sequence[QuantileCurve],
			weights: Optional[Union[Sequence[float], numpy.ndarray]] = None,
			inputs: Optional[numpy.ndarray] = None,
			) -> "CdfEnsemble":
		"""
		Construct an ensemble from individual curves sharing one grid.

		:param curves:
		:param weights:
		:param inputs:
		"""

		if not curves:
			raise DomainError("An ensemble needs at least one curve.")

		grid = curves[0].grid
		for curve in curves[1:]:
			grid.require_same(curve.grid)

		return cls(grid, numpy.stack([curve.values for curve in curves]), weights, inputs)

	@classmethod
	def pooled(cls, *ensembles: "CdfEnsemble") -> "CdfEnsemble":
		"""
		Concatenate ensembles on the same grid.

		Each ensemble keeps a share of the total weight proportional to its number of curves.

		:param ensembles:
		"""

		if not ensembles:
			raise DomainError("At least one ensemble is required.")

		grid = ensembles[0].grid
		for ensemble in ensembles[1:]:
			grid.require_same(ensemble.grid)

		total = sum(len(ensemble) for ensemble in ensembles)
		curves = numpy.concatenate([ensemble.curves for ensemble in ensembles])

		weights: Optional[numpy.ndarray] = None
		if not all(ensemble.is_uniform for ensemble in ensembles):
			weights = numpy.concatenate([ensemble.weights * (len(ensemble) / total) for ensemble in ensembles])
			weights = weights / weights.sum()

		inputs: Optional[numpy.ndarray] = None
		if all(ensemble.inputs is not None for ensemble in ensembles):
			inputs = numpy.concatenate([ensemble.inputs for ensemble in ensembles])  # type: ignore[misc]

		return cls(grid, curves, weights, inputs)

	@property
	def grid(self) -> ProbGrid:
		"""
		The shared probability grid.
		"""

		return self._grid

	@property
	def curves(self) -> numpy.ndarray:
		"""
		The (read-only) ``n × m`` matrix of quantile values.
		"""

		return self._curves

	@property
	def weights(self) -> numpy.ndarray:
		"""
		The curve weights.
		"""

		if self._weights is None:
			n = self._curves.shape[0]
			return numpy.full(n, 1 / n)

		return self._weights

	@property
	def inputs(self) -> Optional[numpy.ndarray]:
		"""
		The ``n × d`` matrix of code inputs, if known.
		"""

		return self._inputs

	@property
	def is_uniform(self) -> bool:
		"""
		Whether every curve carries the same weight.
		"""

		return self._weights is None

	@property
	def explicit_weights(self) -> Optional[numpy.ndarray]:
		"""
		The curve weights, or :py:obj:`None` for equal weights.
		"""

		return self._weights

	def curve(self, k: int) -> QuantileCurve:
		"""
		Return the ``k``-th curve.

		:param k:
		"""

		return QuantileCurve(self._grid, self._curves[k])

	def subset(self, indices: Union[Sequence[int], numpy.ndarray]) -> "CdfEnsemble":
		"""
		Return the ensemble of the selected curves, with renormalised weights.

		:param indices:
		"""

		indices = numpy.asarray(indices, dtype=numpy.intp)

		weights: Optional[numpy.ndarray] = None
		if self._weights is not None:
			selected = self._weights[indices]
			if selected.sum() <= 0:
				raise DegenerateError("The selected curves carry no weight.")
			weights = selected / selected.sum()

		inputs = None if self._inputs is None else self._inputs[indices]
		return CdfEnsemble(self._grid, self._curves[indices], weights, inputs)

	def __len__(self) -> int:
		return self._curves.shape[0]

	def __repr__(self) -> str:
		return f"<{self.__class__.__name__} n={len(self)} m={len(self._grid)}>"


@prettify_docstrings
class FeatureCurve(NamedTuple):
	"""
	A Fréchet feature of an ensemble.
	"""

	#: The feature's quantile curve.
	curve: QuantileCurve

	#: The contrast the feature minimizes.
	contrast: ContrastSpec

	#: Whether isotonic repair changed the pointwise minimizers.
	repaired: bool

	@property
	def values(self) -> numpy.ndarray:
		"""
		The feature's quantile values.
		"""

		return self.curve.values


def isotonic_repair(values: Union[Sequence[float], numpy.ndarray]) -> numpy.ndarray:
	"""
	Return the least-squares nearest nondecreasing sequence (pool adjacent violators).

	Already monotone input is returned unchanged.

	:param values: Finite values.
	"""

	array = numpy.array(values, dtype=numpy.float64).ravel()

	if not numpy.all(numpy.isfinite(array)):
		raise DomainError("Values to repair must be finite.")
	if array.size < 2 or not numpy.any(numpy.diff(array) < 0):
		return array

	return numpy.asarray(isotonic_regression(array).x, dtype=numpy.float64)


def frechet_feature(e: CdfEnsemble, c: ContrastSpec) -> FeatureCurve:
	"""
	Return the Fréchet feature of the ensemble contrasted by ``c``.

	The feature's quantile value at each level is the scalar feature of the
	ensemble's values at that level. Numerical non-monotonicity is removed
	by isotonic repair.

	:param e:
	:param c: A coercive contrast.

	:raises NonCoerciveContrastError: If ``c`` has no minimizing feature.
	"""

	values = columnwise_feature(c, e.curves, e.explicit_weights)

	repaired = False
	if numpy.any(numpy.diff(values) < 0):
		values = isotonic_repair(values)
		repaired = True

	return FeatureCurve(QuantileCurve(e.grid, values), c, repaired)


def frechet_mean(e: CdfEnsemble) -> FeatureCurve:
	"""
	Return the Wasserstein-2 Fréchet mean, whose quantile curve is the pointwise weighted mean.

	:param e:
	"""

	return frechet_feature(e, ContrastSpec.squared())


def frechet_quantile(e: CdfEnsemble, alpha: float) -> FeatureCurve:
	"""
	Return the Fréchet ``α``-quantile, the pointwise generalized-inverse ``α``-quantile of the curves.

	:param e:
	:param alpha: A level in ``(0, 1)``.

	:raises DomainError: If ``alpha`` is outside ``(0, 1)``.
	"""

	return frechet_feature(e, ContrastSpec.pinball(alpha))


def frechet_median(e: CdfEnsemble) -> FeatureCurve:
	"""
	Return the Fréchet median (the lower pointwise median).

	:param e:
	"""

	return frechet_quantile(e, 0.5)


def ensemble_variance(e: CdfEnsemble) -> float:
	"""
	Return ``∫_0^1 Var(𝔽⁻(u)) du``, the mean squared Wasserstein-2 distance to the Fréchet mean.

	:param e: An ensemble of at least two curves.

	:raises DegenerateError: If the ensemble has fewer than two curves.
	"""

	if len(e) < 2:
		raise DegenerateError("The variance of an ensemble needs at least 2 curves.")

	weights = e.explicit_weights
	curves = e.curves

	if weights is None:
		deviations = (curves - numpy.mean(curves, axis=0))**2
		pointwise = numpy.mean(deviations, axis=0)
	else:
		centre = numpy.sum(weights[:, None] * curves, axis=0)
		pointwise = numpy.sum(weights[:, None] * (curves - centre)**2, axis=0)

	return float(e.grid.integrate(pointwise))


def expected_cost(e: CdfEnsemble, curve: QuantileCurve, c: ContrastSpec) -> float:
	"""
	Return the weighted mean cost ``Σ w_k W_c(curve_k, curve)``.

	This is the objective the Fréchet feature minimizes.

	:param e:
	:param curve: A candidate curve on the ensemble's grid.
	:param c:
	"""

	e.grid.require_same(curve.grid)
	costs = costs_to_curve(e.grid, e.curves, curve.values, c)

	if e.is_uniform:
		return float(numpy.mean(costs))

	return float(numpy.sum(e.weights * costs))


def write_ensemble(filename: PathLike, ensemble: CdfEnsemble, inputs_filename: Optional[PathLike] = None) -> None:
	"""
	Write the curves of an ensemble to a CSV or (for a ``.json`` suffix) JSON file.

	Weights are not stored; the files describe equal-weight ensembles.

	:param filename:
	:param ensemble:
	:param inputs_filename: Where to write the inputs sidecar, if the ensemble has inputs.
	"""

	filename = PathPlus(filename)

	if filename.suffix.lower() == ".json":
		write_curves_json(filename, ensemble.grid, ensemble.curves)
	else:
		write_curves_csv(filename, ensemble.grid, ensemble.curves)

	if inputs_filename is not None and ensemble.inputs is not None:
		write_inputs_csv(inputs_filename, ensemble.inputs)


def read_ensemble(filename: PathLike, inputs_filename: Optional[PathLike] = None) -> CdfEnsemble:
	"""
	Read an equal-weight ensemble written by :func:`~.write_ensemble`.

	:param filename:
	:param inputs_filename: The optional inputs sidecar.
	"""

	filename = PathPlus(filename)

	if filename.suffix.lower() == ".json":
		grid, curves = read_curves_json(filename)
	else:
		grid, curves = read_curves_csv(filename)

	inputs = None if inputs_filename is None else read_inputs_csv(inputs_filename)
	return CdfEnsemble(grid, curves, inputs=inputs)
