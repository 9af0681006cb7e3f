#!/usr/bin/env python3
#
#  sensitivity.py
"""
Sensitivity indices of scalar outputs and of random distribution functions
with respect to the inputs of a stochastic code.

Variance-based (Sobol) indices are estimated from pick-freeze designs.
Contrast indices, which have no pick-freeze identity, are estimated from nested designs.

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
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Tuple, Union

# 3rd party
import numpy
from domdf_python_tools.doctools import prettify_docstrings
from joblib import Parallel, delayed
from typing_extensions import Literal, Protocol

# this package
from cdfsense import DegenerateError, DesignError, DomainError, GridMismatchError
from cdfsense.contrasts import ContrastSpec, columnwise_feature, evaluate
from cdfsense.frechet_features import CdfEnsemble, ensemble_variance, expected_cost, frechet_feature, isotonic_repair
from cdfsense.quantile_model import ProbGrid
from cdfsense.streams import replicate_seeds, stream

__all__ = [
		"DEFAULT_N_OUTER",
		"DEFAULT_N_INNER",
		"DEFAULT_REPLICATES",
		"CLAMP_STD_ERRORS",
		"Method",
		"SensitivityResult",
		"PairedDesign",
		"NestedDesign",
		"LocationScaleIndices",
		"StochasticCode",
		"sobol_scalar",
		"sobol_cdf",
		"location_scale_sobol",
		"location_scale_sobol_conditional",
		"contrast_index_scalar",
		"contrast_index_cdf",
		"pick_freeze_design",
		"nested_design",
		"estimate_sobol_cdf",
		"estimate_contrast_index_cdf",
		]

#: The default number of outer draws of a nested design.
DEFAULT_N_OUTER: int = 500

#: The default number of inner draws per outer draw of a nested design.
DEFAULT_N_INNER: int = 100

#: The default number of independent replicates of an estimator.
DEFAULT_REPLICATES: int = 20

#: Half-width of the band around ``[0, 1]`` kept by :attr:`SensitivityResult.clamped`, in standard errors.
CLAMP_STD_ERRORS: float = 3.0

Method = Literal["pick-freeze", "nested", "closed-form"]

Outputs = Union[numpy.ndarray, CdfEnsemble]


@prettify_docstrings
class SensitivityResult(NamedTuple):
	"""
	An estimated sensitivity index.

	The raw :attr:`~.index` is never clamped; negative estimates and estimates above one are kept
	as diagnostic information.
	"""

	#: ``numerator / denominator``.
	index: float

	#: The explained part of the output variability.
	numerator: float

	#: The total output variability.
	denominator: float

	#: The input being studied, numbered from 1.
	input_id: int

	#: How the index was obtained.
	method: Method

	#: The number of outer draws (or pick-freeze pairs).
	n_outer: int

	#: The number of inner draws per outer draw (1 for pick-freeze designs).
	n_inner: int

	#: The standard error of :attr:`~.index`.
	std_error: float

	#: The index of each replicate, when the estimator was replicated.
	replicate_indices: Tuple[float, ...] = ()

	#: The master seed of each replicate.
	seeds: Tuple[int, ...] = ()

	@property
	def clamped(self) -> float:
		"""
		The index clamped to ``[-ε, 1 + ε]`` with ``ε = 3 * std_error``.

		Estimates within sampling noise of the unit interval are kept as they are.
		"""

		margin = CLAMP_STD_ERRORS * self.std_error if math.isfinite(self.std_error) else 0.0
		return min(max(self.index, -margin), 1.0 + margin)

	def to_dict(self) -> Dict[str, Any]:
		"""
		Returns a JSON-serialisable dictionary of the result.
		"""

		return {
				"index": self.index,
				"clamped": self.clamped,
				"numerator": self.numerator,
				"denominator": self.denominator,
				"std_error": self.std_error,
				"method": self.method,
				"input_id": self.input_id,
				"n_outer": self.n_outer,
				"n_inner": self.n_inner,
				"replicate_indices": list(self.replicate_indices),
				"seeds": list(self.seeds),
				}


class PairedDesign(NamedTuple):
	"""
	A pick-freeze design for input ``input_id``.

	``X_freeze`` equals ``X`` in column ``input_id`` and is redrawn independently elsewhere.
	The outputs are either arrays of scalars or :class:`~.CdfEnsemble` objects.
	"""

	X: numpy.ndarray
	X_freeze: numpy.ndarray
	outputs: Outputs
	outputs_freeze: Outputs
	input_id: int


class NestedDesign(NamedTuple):
	"""
	A nested (double-loop) design for input ``input_id``.

	Row ``j`` of ``outputs`` holds the ``n_inner`` outputs obtained with input ``input_id``
	fixed at ``outer_values[j]`` and the other inputs redrawn. ``outputs`` is an
	``n_outer × n_inner`` array of scalars, or an ``n_outer × n_inner × m`` array of
	quantile curves on ``grid``.
	"""

	input_id: int
	outer_values: numpy.ndarray
	outputs: numpy.ndarray
	grid: Optional[ProbGrid] = None

	@property
	def n_outer(self) -> int:
		"""
		The number of outer draws.
		"""

		return self.outputs.shape[0]

	@property
	def n_inner(self) -> int:
		"""
		The number of inner draws per outer draw.
		"""

		return self.outputs.shape[1]

	def cell(self, j: int) -> CdfEnsemble:
		"""
		Return the ensemble of curves produced with the ``j``-th outer value.

		:param j:
		"""

		if self.grid is None:
			raise DesignError("This design has scalar outputs.")

		return CdfEnsemble(self.grid, self.outputs[j])

	def pooled(self) -> CdfEnsemble:
		"""
		Return the ensemble of every curve in the design.
		"""

		if self.grid is None:
			raise DesignError("This design has scalar outputs.")

		return CdfEnsemble(self.grid, self.outputs.reshape(-1, len(self.grid)))


@prettify_docstrings
class LocationScaleIndices(NamedTuple):
	"""
	Closed-form Sobol indices of the scale and location of a location-scale random distribution function.
	"""

	#: The index of the scale ``Σ``.
	sigma: float

	#: The index of the location ``M``.
	m: float

	#: ``∫_0^1 Var(Σ F0⁻(u) + M) du``.
	denominator: float


class StochasticCode(Protocol):
	"""
	A simulation code mapping ``d`` independent random inputs to an output.
	"""

	@property
	def input_dim(self) -> int:
		"""
		The number of inputs ``d``.
		"""

	def draw_inputs(self, rng: numpy.random.Generator, n: int) -> numpy.ndarray:
		"""
		Draw an ``n × d`` matrix of inputs.

		:param rng:
		:param n:
		"""

	def evaluate(self, inputs: numpy.ndarray, grid: ProbGrid) -> numpy.ndarray:
		"""
		Return the outputs for each input row: an array of scalars,
		or an ``n × m`` matrix of quantile curves on ``grid``.

		:param inputs:
		:param grid:
		"""  # noqa: D400


def _resolve_input(design_input: int, i: Optional[int]) -> int:
	if i is None:
		return design_input
	if i != design_input:
		raise DesignError(f"The design was built for input {design_input}, not input {i}.")
	return i


def _check_paired(design: PairedDesign, i: int) -> None:
	X = numpy.asarray(design.X)
	X_freeze = numpy.asarray(design.X_freeze)

	if X.shape != X_freeze.shape or X.ndim != 2:
		raise DesignError("The two input matrices of a pick-freeze design must have the same n × d shape.")
	if not 1 <= i <= X.shape[1]:
		raise DesignError(f"Input {i} is outside 1..{X.shape[1]}.")
	if not numpy.array_equal(X[:, i - 1], X_freeze[:, i - 1]):
		raise DesignError(f"Column {i} must be identical in both halves of a pick-freeze design.")


def _std_error(terms: numpy.ndarray, denominator: float) -> float:
	if terms.size < 2:
		return math.nan
	return float(numpy.std(terms, ddof=1) / math.sqrt(terms.size) / denominator)


def sobol_scalar(design: PairedDesign, i: Optional[int] = None) -> SensitivityResult:
	"""
	Estimate the first-order Sobol index ``Var(𝔼[Y | X_i]) / Var(Y)`` of a scalar output.

	The numerator is ``mean(Y Y') - mean(Y ∪ Y')²`` and the denominator the variance of the pooled outputs.

	:param design: A pick-freeze design with scalar outputs.
	:param i: The input, numbered from 1. Defaults to the design's input.

	:raises DegenerateError: If the outputs do not vary.
	"""

	i = _resolve_input(design.input_id, i)
	_check_paired(design, i)

	y = numpy.asarray(design.outputs, dtype=numpy.float64).ravel()
	y_freeze = numpy.asarray(design.outputs_freeze, dtype=numpy.float64).ravel()

	if y.size != y_freeze.size or y.size < 2:
		raise DesignError("A pick-freeze design needs at least 2 pairs of outputs.")

	pooled = numpy.concatenate([y, y_freeze])
	products = y * y_freeze

	denominator = float(numpy.var(pooled))
	if not denominator > 0:
		raise DegenerateError("The output has zero variance.")

	numerator = float(numpy.mean(products) - numpy.mean(pooled)**2)

	return SensitivityResult(
			index=numerator / denominator,
			numerator=numerator,
			denominator=denominator,
			input_id=i,
			method="pick-freeze",
			n_outer=y.size,
			n_inner=1,
			std_error=_std_error(products, denominator),
			)


def sobol_cdf(design: PairedDesign, i: Optional[int] = None) -> SensitivityResult:
	"""
	Estimate the Sobol index of a random distribution function,
	``∫ Var(𝔼[𝔽⁻(u) | X_i]) du / ∫ Var(𝔽⁻(u)) du``.

	The scalar pick-freeze numerator is applied at each level and integrated over the grid.

	:param design: A pick-freeze design whose outputs are ensembles on one grid.
	:param i: The input, numbered from 1. Defaults to the design's input.

	:raises GridMismatchError: If the two ensembles do not share a grid.
	:raises DegenerateError: If the pooled ensemble has zero variance.
	"""  # noqa: D400

	i = _resolve_input(design.input_id, i)
	_check_paired(design, i)

	first, second = design.outputs, design.outputs_freeze
	if not isinstance(first, CdfEnsemble) or not isinstance(second, CdfEnsemble):
		raise DesignError("sobol_cdf needs ensemble outputs.")

	first.grid.require_same(second.grid)
	if len(first) != len(second) or len(first) < 2:
		raise DesignError("A pick-freeze design needs at least 2 pairs of outputs.")

	grid = first.grid
	a, b = first.curves, second.curves
	pooled = CdfEnsemble.pooled(first, second)

	denominator = ensemble_variance(pooled)
	if not denominator > 0:
		raise DegenerateError("The ensemble has zero variance.")

	pointwise = numpy.mean(a * b, axis=0) - numpy.mean(pooled.curves, axis=0)**2
	numerator = float(grid.integrate(pointwise))
	products = grid.integrate(a * b, axis=1)

	return SensitivityResult(
			index=numerator / denominator,
			numerator=numerator,
			denominator=denominator,
			input_id=i,
			method="pick-freeze",
			n_outer=len(first),
			n_inner=1,
			std_error=_std_error(products, denominator),
			)


def _location_scale_denominator(var_sigma: float, var_m: float, cov_sigma_m: float, mean_xi: float, mean_xi_sq: float) -> float:
	if var_sigma < 0 or var_m < 0:
		raise DomainError("Variances must be nonnegative.")
	if mean_xi_sq < 0:
		raise DomainError("The second moment of the base distribution must be nonnegative.")

	denominator = var_sigma * mean_xi_sq + var_m + 2 * cov_sigma_m * mean_xi
	if not denominator > 0:
		raise DomainError(f"The total variance must be positive (got {denominator!r}).")

	return denominator


def location_scale_sobol(
		var_sigma: float,
		var_m: float,
		cov_sigma_m: float,
		mean_xi: float,
		mean_xi_sq: float = 1.0,
		) -> LocationScaleIndices:
	"""
	Closed-form Sobol indices of the scale ``Σ`` and location ``M``
	of the random distribution function ``F0((x - M) / Σ)``.

	With ``ξ ~ F0``, the total variance is ``Var Σ 𝔼ξ² + Var M + 2 cov(Σ, M) 𝔼ξ``.
	The default ``𝔼ξ² = 1`` covers standardised bases.
	The two indices are not normalised and need not sum to one when ``cov(Σ, M) ≠ 0``.

	:param var_sigma: ``Var Σ``.
	:param var_m: ``Var M``.
	:param cov_sigma_m: ``cov(Σ, M)``.
	:param mean_xi: ``𝔼ξ``.
	:param mean_xi_sq: ``𝔼ξ²``.

	:raises DomainError: If the total variance is not positive.
	"""  # noqa: D400

	denominator = _location_scale_denominator(var_sigma, var_m, cov_sigma_m, mean_xi, mean_xi_sq)
	cross = 2 * cov_sigma_m * mean_xi

	return LocationScaleIndices(
			sigma=(var_sigma * mean_xi_sq + cross) / denominator,
			m=(var_m + cross) / denominator,
			denominator=denominator,
			)


def location_scale_sobol_conditional(
		var_sigma: float,
		var_m: float,
		cov_sigma_m: float,
		conditional_var_sigma: float,
		conditional_var_m: float,
		conditional_cov: float,
		mean_xi: float,
		mean_xi_sq: float = 1.0,
		) -> float:
	"""
	Closed-form Sobol index of input ``X_i`` for a location-scale random distribution function
	whose scale and location are functions of the inputs.

	The numerator is ``Var 𝔼[Σ|X_i] 𝔼ξ² + 2 cov(𝔼[Σ|X_i], 𝔼[M|X_i]) 𝔼ξ + Var 𝔼[M|X_i]``.

	:param var_sigma: ``Var Σ``.
	:param var_m: ``Var M``.
	:param cov_sigma_m: ``cov(Σ, M)``.
	:param conditional_var_sigma: ``Var 𝔼[Σ|X_i]``.
	:param conditional_var_m: ``Var 𝔼[M|X_i]``.
	:param conditional_cov: ``cov(𝔼[Σ|X_i], 𝔼[M|X_i])``.
	:param mean_xi: ``𝔼ξ``.
	:param mean_xi_sq: ``𝔼ξ²``.
	"""

	denominator = _location_scale_denominator(var_sigma, var_m, cov_sigma_m, mean_xi, mean_xi_sq)
	numerator = conditional_var_sigma * mean_xi_sq + 2 * conditional_cov * mean_xi + conditional_var_m
	return numerator / denominator


def _check_nested(design: NestedDesign, i: Optional[int], curves: bool) -> int:
	i = _resolve_input(design.input_id, i)
	outputs = design.outputs

	if curves:
		if design.grid is None or outputs.ndim != 3:
			raise DesignError("Expected an n_outer × n_inner × m array of curves.")
		if outputs.shape[2] != len(design.grid):
			raise GridMismatchError()
	elif outputs.ndim != 2:
		raise DesignError("Expected an n_outer × n_inner array of outputs.")

	if outputs.shape[0] < 1:
		raise DesignError("A nested design needs at least one outer draw.")
	if outputs.shape[1] < 2:
		raise DesignError("Each cell of a nested design needs at least 2 inner draws.")

	return i


def _contrast_result(outer: float, cell_minima: numpy.ndarray, design: NestedDesign, i: int) -> SensitivityResult:
	if not outer > 0:
		raise DegenerateError("The minimal expected contrast is zero; the output does not vary.")

	numerator = outer - float(numpy.mean(cell_minima))

	return SensitivityResult(
			index=numerator / outer,
			numerator=numerator,
			denominator=outer,
			input_id=i,
			method="nested",
			n_outer=design.n_outer,
			n_inner=design.n_inner,
			std_error=_std_error(cell_minima, outer),
			)


def contrast_index_scalar(design: NestedDesign, c: ContrastSpec, i: Optional[int] = None) -> SensitivityResult:
	"""
	Estimate the contrast index
	``(min_θ 𝔼 c(Y, θ) - 𝔼 min_θ 𝔼[c(Y, θ) | X_i]) / min_θ 𝔼 c(Y, θ)`` of a scalar output.

	:param design: A nested design with scalar outputs.
	:param c: A coercive contrast.
	:param i: The input, numbered from 1. Defaults to the design's input.

	:raises DegenerateError: If the minimal expected contrast is not positive.
	"""  # noqa: D400

	i = _check_nested(design, i, curves=False)
	outputs = numpy.asarray(design.outputs, dtype=numpy.float64)

	pooled = outputs.reshape(-1, 1)
	theta = columnwise_feature(c, pooled)[0]
	outer = float(numpy.mean(evaluate(c, pooled[:, 0], theta)))

	# One column per cell.
	cell_thetas = columnwise_feature(c, outputs.T)
	cell_minima = numpy.mean(evaluate(c, outputs, cell_thetas[:, None]), axis=1)

	return _contrast_result(outer, cell_minima, design, i)


def _cell_features(c: ContrastSpec, outputs: numpy.ndarray) -> numpy.ndarray:
	n_outer, n_inner, m = outputs.shape
	stacked = outputs.transpose(1, 0, 2).reshape(n_inner, n_outer * m)
	features = columnwise_feature(c, stacked).reshape(n_outer, m)

	for j in numpy.flatnonzero(numpy.any(numpy.diff(features, axis=1) < 0, axis=1)):
		features[j] = isotonic_repair(features[j])

	return features


def contrast_index_cdf(design: NestedDesign, c: ContrastSpec, i: Optional[int] = None) -> SensitivityResult:
	"""
	Estimate the contrast index of a random distribution function.

	The global term is the mean cost from every curve to the Fréchet feature of the pooled curves.
	The conditional term averages, over the outer draws, the mean cost within a cell
	to the Fréchet feature of that cell. With the absolute contrast this is the median index.

	:param design: A nested design with curve outputs.
	:param c: A coercive contrast satisfying the rectangle property.
	:param i: The input, numbered from 1. Defaults to the design's input.

	:raises DegenerateError: If the minimal expected cost is not positive.
	"""

	i = _check_nested(design, i, curves=True)
	assert design.grid is not None
	grid = design.grid

	pooled = design.pooled()
	feature = frechet_feature(pooled, c)
	outer = expected_cost(pooled, feature.curve, c)

	features = _cell_features(c, design.outputs)
	costs = grid.integrate(evaluate(c, design.outputs, features[:, None, :]), axis=2)
	cell_minima = numpy.mean(costs, axis=1)

	return _contrast_result(outer, cell_minima, design, i)


def _as_outputs(values: numpy.ndarray, grid: ProbGrid, inputs: numpy.ndarray) -> Outputs:
	if values.ndim == 2:
		return CdfEnsemble(grid, values, inputs=inputs)
	return values


def _check_input_id(code: StochasticCode, i: int) -> None:
	if not 1 <= i <= code.input_dim:
		raise DesignError(f"Input {i} is outside 1..{code.input_dim}.")


def pick_freeze_design(
		code: StochasticCode,
		i: int,
		n: int,
		grid: ProbGrid,
		seed: int,
		replicate: int = 0,
		) -> PairedDesign:
	"""
	Run ``code`` on a pick-freeze design of ``n`` pairs for input ``i``.

	:param code:
	:param i: The input, numbered from 1.
	:param n: The number of pairs.
	:param grid:
	:param seed: The master seed.
	:param replicate: The replicate number, which selects independent streams.
	"""

	_check_input_id(code, i)
	if n < 2:
		raise DesignError("A pick-freeze design needs at least 2 pairs.")

	X = code.draw_inputs(stream(seed, i, replicate, 0), n)
	X_freeze = code.draw_inputs(stream(seed, i, replicate, 1), n)
	X_freeze[:, i - 1] = X[:, i - 1]

	return PairedDesign(
			X=X,
			X_freeze=X_freeze,
			outputs=_as_outputs(code.evaluate(X, grid), grid, X),
			outputs_freeze=_as_outputs(code.evaluate(X_freeze, grid), grid, X_freeze),
			input_id=i,
			)


def nested_design(
		code: StochasticCode,
		i: int,
		grid: ProbGrid,
		seed: int,
		n_outer: int = DEFAULT_N_OUTER,
		n_inner: int = DEFAULT_N_INNER,
		replicate: int = 0,
		) -> NestedDesign:
	"""
	Run ``code`` on a nested design for input ``i``.

	The outer values of ``X_i`` come from stream ``(seed, i, replicate, 0)``;
	the inner draws of cell ``j`` come from stream ``(seed, i, replicate, j + 1)``.

	:param code:
	:param i: The input, numbered from 1.
	:param grid:
	:param seed: The master seed.
	:param n_outer: The number of outer draws of ``X_i``.
	:param n_inner: The number of draws of the other inputs per outer draw.
	:param replicate: The replicate number, which selects independent streams.
	"""

	_check_input_id(code, i)
	if n_outer < 1 or n_inner < 2:
		raise DesignError("A nested design needs n_outer >= 1 and n_inner >= 2.")

	outer_values = code.draw_inputs(stream(seed, i, replicate, 0), n_outer)[:, i - 1]

	cells = []
	for j, value in enumerate(outer_values):
		X = code.draw_inputs(stream(seed, i, replicate, j + 1), n_inner)
		X[:, i - 1] = value
		cells.append(code.evaluate(X, grid))

	outputs = numpy.stack(cells)
	return NestedDesign(i, outer_values, outputs, grid if outputs.ndim == 3 else None)


def _replicate(
		run: Callable[[int, int], SensitivityResult],
		seed: int,
		replicates: int,
		n_jobs: Optional[int],
		) -> SensitivityResult:
	seeds = replicate_seeds(seed, replicates)
	results: List[SensitivityResult] = Parallel(n_jobs=n_jobs, prefer="threads")(
			delayed(run)(replicate_seed, r) for r, replicate_seed in enumerate(seeds)
			)

	numerator = float(numpy.mean([result.numerator for result in results]))
	denominator = float(numpy.mean([result.denominator for result in results]))
	indices = tuple(result.index for result in results)

	std_error = float(numpy.std(indices, ddof=1)) if replicates > 1 else results[0].std_error

	return results[0]._replace(
			index=numerator / denominator,
			numerator=numerator,
			denominator=denominator,
			std_error=std_error,
			replicate_indices=indices,
			seeds=tuple(seeds),
			)


def estimate_sobol_cdf(
		code: StochasticCode,
		i: int,
		grid: ProbGrid,
		seed: int,
		n: int = 2000,
		replicates: int = DEFAULT_REPLICATES,
		n_jobs: Optional[int] = None,
		) -> SensitivityResult:
	"""
	Estimate the Sobol index of input ``i`` from ``replicates`` independent pick-freeze designs.

	The reported index is the ratio of the mean numerator to the mean denominator,
	and its standard error is the sample standard deviation of the replicate indices.
	Replicate ``r`` uses the ``r``-th seed of :attr:`SensitivityResult.seeds`,
	so the result does not depend on ``n_jobs``.

	:param code: A code producing distribution functions (or scalars).
	:param i: The input, numbered from 1.
	:param grid:
	:param seed: The master seed.
	:param n: The number of pick-freeze pairs per replicate.
	:param replicates:
	:param n_jobs: The number of threads. :py:obj:`None` runs the replicates one after another.
	"""

	def run(replicate_seed: int, replicate: int) -> SensitivityResult:
		design = pick_freeze_design(code, i, n, grid, replicate_seed, replicate)
		if isinstance(design.outputs, CdfEnsemble):
			return sobol_cdf(design)
		return sobol_scalar(design)

	return _replicate(run, seed, replicates, n_jobs)


def estimate_contrast_index_cdf(
		code: StochasticCode,
		i: int,
		c: ContrastSpec,
		grid: ProbGrid,
		seed: int,
		n_outer: int = DEFAULT_N_OUTER,
		n_inner: int = DEFAULT_N_INNER,
		replicates: int = DEFAULT_REPLICATES,
		n_jobs: Optional[int] = None,
		) -> SensitivityResult:
	"""
	Estimate the contrast index of input ``i`` from ``replicates`` independent nested designs.

	The result is aggregated as in :func:`~.estimate_sobol_cdf`.

	:param code: A code producing distribution functions (or scalars).
	:param i: The input, numbered from 1.
	:param c: A coercive contrast.
	:param grid:
	:param seed: The master seed.
	:param n_outer:
	:param n_inner:
	:param replicates:
	:param n_jobs: The number of threads. :py:obj:`None` runs the replicates one after another.
	"""

	def run(replicate_seed: int, replicate: int) -> SensitivityResult:
		design = nested_design(code, i, grid, replicate_seed, n_outer, n_inner, replicate)
		if design.grid is not None:
			return contrast_index_cdf(design, c)
		return contrast_index_scalar(design, c)

	return _replicate(run, seed, replicates, n_jobs)
