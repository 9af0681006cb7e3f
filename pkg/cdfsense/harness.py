#!/usr/bin/env python3
#
#  harness.py
"""
A stochastic code whose output is the location-scale distribution function
``F0((x - M) / Σ)``, with ``M`` and ``Σ`` computed from random inputs, and an end-to-end demonstration.

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
import math
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

# 3rd party
import numpy
import pandas
from domdf_python_tools.doctools import prettify_docstrings
from domdf_python_tools.paths import PathPlus
from domdf_python_tools.typing import PathLike
from scipy import stats
from typing_extensions import Literal

# this package
from cdfsense import DomainError, ModelConstraintError
from cdfsense.contrasts import ContrastSpec
from cdfsense.expressions import Expression
from cdfsense.frechet_features import CdfEnsemble, frechet_mean, frechet_median, frechet_quantile
from cdfsense.quantile_model import (
		DEFAULT_GRID_SIZE,
		DiscreteDistribution,
		ProbGrid,
		uniform_quantile_index,
		weighted_quantile,
		write_curves_csv
		)
from cdfsense.report import Check, format_checks
from cdfsense.sensitivity import (
		DEFAULT_N_INNER,
		DEFAULT_N_OUTER,
		DEFAULT_REPLICATES,
		contrast_index_cdf,
		estimate_sobol_cdf,
		location_scale_sobol,
		nested_design
		)
from cdfsense.streams import stream

__all__ = [
		"BaseKind",
		"BaseDistribution",
		"LawKind",
		"InputLaw",
		"LocationScaleModel",
		"ReferenceMoments",
		"DemoReport",
		"sample_ensemble",
		"mean_xi",
		"second_moment_xi",
		"reference_model",
		"reference_moments",
		"run_demo",
		]

BaseKind = Literal["normal", "uniform", "exponential", "tabulated"]
LawKind = Literal["normal", "uniform", "exponential", "discrete", "constant"]

_scipy_bases = {
		"normal": stats.norm,
		"uniform": stats.uniform,
		"exponential": stats.expon,
		}


class BaseDistribution:
	"""
	The strictly increasing, absolutely continuous base distribution ``F0`` of a location-scale model.

	:param kind:
	:param levels: Probability levels of a tabulated inverse distribution function.
	:param values: ``F0⁻`` at each of ``levels``; strictly increasing.
	"""

	__slots__ = ("kind", "levels", "values")

	def __init__(
			self,
			kind: BaseKind,
			levels: Optional[Sequence[float]] = None,
			values: Optional[Sequence[float]] = None,
			):
		if kind not in {"normal", "uniform", "exponential", "tabulated"}:
			raise DomainError(f"Unknown base distribution {kind!r}.")

		self.kind: BaseKind = kind
		self.levels: Optional[numpy.ndarray] = None
		self.values: Optional[numpy.ndarray] = None

		if kind == "tabulated":
			if levels is None or values is None:
				raise DomainError("A tabulated base needs 'levels' and 'values'.")

			grid = ProbGrid(levels)
			table = numpy.array(values, dtype=numpy.float64)

			if table.shape != (len(grid), ):
				raise DomainError("A tabulated base needs exactly one value per level.")
			if not numpy.all(numpy.isfinite(table)):
				raise DomainError("Tabulated base values must be finite.")
			if numpy.any(numpy.diff(table) <= 0):
				raise DomainError("Tabulated base values must be strictly increasing; step bases are not supported.")

			table.flags.writeable = False
			self.levels = grid.levels
			self.values = table

	@classmethod
	def normal(cls) -> "BaseDistribution":
		"""
		The standard normal distribution.
		"""

		return cls("normal")

	@classmethod
	def uniform(cls) -> "BaseDistribution":
		"""
		The uniform distribution on ``(0, 1)``.
		"""

		return cls("uniform")

	@classmethod
	def exponential(cls) -> "BaseDistribution":
		"""
		The exponential distribution with rate 1.
		"""

		return cls("exponential")

	@classmethod
	def tabulated(cls, levels: Sequence[float], values: Sequence[float]) -> "BaseDistribution":
		"""
		A base given by its inverse distribution function at some levels.

		It is interpolated linearly, and extended linearly with the end slopes.

		:param levels:
		:param values:
		"""

		return cls("tabulated", levels, values)

	def quantiles(self, levels: Union[Sequence[float], numpy.ndarray]) -> numpy.ndarray:
		"""
		Evaluate ``F0⁻`` at each level.

		:param levels: Probability levels in ``(0, 1)``.
		"""

		u = numpy.asarray(levels, dtype=numpy.float64)

		if self.kind != "tabulated":
			return numpy.asarray(_scipy_bases[self.kind].ppf(u), dtype=numpy.float64)

		assert self.levels is not None and self.values is not None
		x, y = self.levels, self.values
		left = (y[1] - y[0]) / (x[1] - x[0])
		right = (y[-1] - y[-2]) / (x[-1] - x[-2])

		inside = numpy.interp(u, x, y)
		below = y[0] + left * (u - x[0])
		above = y[-1] + right * (u - x[-1])
		return numpy.where(u < x[0], below, numpy.where(u > x[-1], above, inside))

	def __eq__(self, other) -> bool:  # noqa: MAN001
		if not isinstance(other, BaseDistribution):
			return NotImplemented
		if self.kind != other.kind:
			return False
		if self.kind == "tabulated":
			return numpy.array_equal(self.levels, other.levels) and numpy.array_equal(self.values, other.values)
		return True

	def __hash__(self) -> int:
		return hash(self.kind)

	def __repr__(self) -> str:
		return f"BaseDistribution({self.kind!r})"


class InputLaw:
	"""
	The sampling law of one input of a stochastic code.

	Instances should be constructed with the classmethods.

	:param kind:
	:param parameters: The parameters of the law, in the order of the classmethod's arguments.
	:param atoms: The distribution of a ``discrete`` law.
	"""

	__slots__ = ("kind", "parameters", "atoms")

	def __init__(self, kind: LawKind, parameters: Tuple[float, ...] = (), atoms: Optional[DiscreteDistribution] = None):
		self.kind: LawKind = kind
		self.parameters: Tuple[float, ...] = tuple(float(p) for p in parameters)
		self.atoms: Optional[DiscreteDistribution] = atoms

	@classmethod
	def normal(cls, mean: float = 0.0, variance: float = 1.0) -> "InputLaw":
		"""
		The normal law with the given mean and variance.

		:param mean:
		:param variance: Nonnegative.
		"""

		if not variance >= 0:
			raise DomainError(f"The variance of a normal law must be nonnegative (got {variance!r}).")

		return cls("normal", (mean, variance))

	@classmethod
	def uniform(cls, low: float = 0.0, high: float = 1.0) -> "InputLaw":
		"""
		The uniform law on ``[low, high)``.

		:param low:
		:param high:
		"""

		if not high > low:
			raise DomainError(f"A uniform law needs low < high (got {low!r}, {high!r}).")

		return cls("uniform", (low, high))

	@classmethod
	def exponential(cls, rate: float = 1.0) -> "InputLaw":
		"""
		The exponential law with the given rate.

		:param rate: Positive.
		"""

		if not rate > 0:
			raise DomainError(f"The rate of an exponential law must be positive (got {rate!r}).")

		return cls("exponential", (rate, ))

	@classmethod
	def discrete(cls, values: Sequence[float], weights: Optional[Sequence[float]] = None) -> "InputLaw":
		"""
		A law with finitely many values.

		:param values:
		:param weights: Positive weights. Defaults to equal weights.
		"""

		return cls("discrete", atoms=DiscreteDistribution(values, weights))

	@classmethod
	def constant(cls, value: float) -> "InputLaw":
		"""
		A law concentrated on ``value``.

		:param value:
		"""

		return cls("constant", (value, ))

	def sample(self, rng: numpy.random.Generator, n: int) -> numpy.ndarray:
		"""
		Draw ``n`` independent values.

		:param rng:
		:param n:
		"""

		if self.kind == "normal":
			mean, variance = self.parameters
			return rng.normal(mean, math.sqrt(variance), size=n)
		elif self.kind == "uniform":
			low, high = self.parameters
			return rng.uniform(low, high, size=n)
		elif self.kind == "exponential":
			return rng.exponential(1 / self.parameters[0], size=n)
		elif self.kind == "discrete":
			assert self.atoms is not None
			return rng.choice(self.atoms.values, size=n, p=self.atoms.weights)
		else:
			return numpy.full(n, self.parameters[0])

	@property
	def mean(self) -> float:
		"""
		The expectation of the law.
		"""

		if self.kind == "normal":
			return self.parameters[0]
		elif self.kind == "uniform":
			return (self.parameters[0] + self.parameters[1]) / 2
		elif self.kind == "exponential":
			return 1 / self.parameters[0]
		elif self.kind == "discrete":
			assert self.atoms is not None
			return float(numpy.sum(self.atoms.weights * self.atoms.values))
		else:
			return self.parameters[0]

	@property
	def variance(self) -> float:
		"""
		The variance of the law.
		"""

		if self.kind == "normal":
			return self.parameters[1]
		elif self.kind == "uniform":
			return (self.parameters[1] - self.parameters[0])**2 / 12
		elif self.kind == "exponential":
			return 1 / self.parameters[0]**2
		elif self.kind == "discrete":
			assert self.atoms is not None
			return float(numpy.sum(self.atoms.weights * (self.atoms.values - self.mean)**2))
		else:
			return 0.0

	def __repr__(self) -> str:
		if self.kind == "discrete":
			return f"InputLaw.discrete({self.atoms!r})"
		return f"InputLaw.{self.kind}{self.parameters!r}"


class LocationScaleModel:
	"""
	A stochastic code returning the distribution function ``F0((x - M) / Σ)``,
	whose quantile curve is ``Σ F0⁻(u) + M``.

	:param base: The base distribution ``F0``.
	:param m_map: The location ``M`` as a function of the inputs.
	:param sigma_map: The scale ``Σ`` as a function of the inputs; it must stay positive.
	:param input_laws: One independent law per input.

	:raises DomainError: If a map refers to an input that has no law.
	"""

	def __init__(
			self,
			base: BaseDistribution,
			m_map: Union[str, Expression],
			sigma_map: Union[str, Expression],
			input_laws: Sequence[InputLaw],
			):
		self.base: BaseDistribution = base
		self.m_map: Expression = m_map if isinstance(m_map, Expression) else Expression(m_map)
		self.sigma_map: Expression = sigma_map if isinstance(sigma_map, Expression) else Expression(sigma_map)
		self.input_laws: List[InputLaw] = list(input_laws)

		for expression in (self.m_map, self.sigma_map):
			if expression.max_input > len(self.input_laws):
				raise DomainError(
						f"{expression.source!r} refers to X{expression.max_input} "
						f"but only {len(self.input_laws)} input laws are given."
						)

	@property
	def input_dim(self) -> int:
		"""
		The number of inputs.
		"""

		return len(self.input_laws)

	def draw_inputs(self, rng: numpy.random.Generator, n: int) -> numpy.ndarray:
		"""
		Draw an ``n × d`` matrix of inputs, one column per law, in order.

		:param rng:
		:param n:
		"""

		if not self.input_laws:
			return numpy.zeros((n, 0))

		return numpy.column_stack([law.sample(rng, n) for law in self.input_laws])

	def location_scale(self, inputs: numpy.ndarray) -> Tuple[numpy.ndarray, numpy.ndarray]:
		"""
		Return ``(M, Σ)`` for each input row.

		:param inputs: An ``n × d`` matrix.

		:raises ModelConstraintError: If some ``Σ`` is not positive.
		"""

		matrix = numpy.atleast_2d(numpy.asarray(inputs, dtype=numpy.float64))
		location = self.m_map.evaluate(matrix)
		scale = self.sigma_map.evaluate(matrix)

		bad = numpy.flatnonzero(scale <= 0)
		if bad.size:
			row = int(bad[0])
			raise ModelConstraintError(
					f"The scale {self.sigma_map.source!r} is {scale[row]!r} <= 0 for input row {row}.",
					row,
					)

		return location, scale

	def evaluate(self, inputs: numpy.ndarray, grid: ProbGrid) -> numpy.ndarray:
		"""
		Return the ``n × m`` matrix of quantile curves ``Σ_k F0⁻(u_j) + M_k``.

		:param inputs: An ``n × d`` matrix.
		:param grid:
		"""

		location, scale = self.location_scale(inputs)
		return scale[:, None] * self.base.quantiles(grid.levels)[None, :] + location[:, None]


def sample_ensemble(
		model: LocationScaleModel,
		n: int,
		grid: Optional[ProbGrid] = None,
		seed: int = 0,
		) -> CdfEnsemble:
	"""
	Draw ``n`` input rows and return the ensemble of the curves they produce, with the inputs attached.

	Row ``k`` is drawn from stream ``(seed, 0, 0, k)``, so the first rows do not depend on ``n``.

	:param model:
	:param n: The number of curves.
	:param grid: Defaults to the midpoint grid with :data:`~.DEFAULT_GRID_SIZE` levels.
	:param seed: The master seed.

	:raises ModelConstraintError: If the scale is not positive for some input row.
	"""

	if n < 1:
		raise DomainError("At least one curve is required.")
	if grid is None:
		grid = ProbGrid.midpoint(DEFAULT_GRID_SIZE)

	inputs = numpy.vstack([model.draw_inputs(stream(seed, 0, 0, k), 1) for k in range(n)])
	return CdfEnsemble(grid, model.evaluate(inputs, grid), inputs=inputs)


def _base_of(model: Union[LocationScaleModel, BaseDistribution]) -> BaseDistribution:
	return model.base if isinstance(model, LocationScaleModel) else model


def mean_xi(model: Union[LocationScaleModel, BaseDistribution], grid: Optional[ProbGrid] = None) -> float:
	"""
	Return ``𝔼ξ = ∫_0^1 F0⁻(u) du`` for ``ξ ~ F0``, by quadrature on ``grid``.

	:param model: A model or its base distribution.
	:param grid: Defaults to the midpoint grid with :data:`~.DEFAULT_GRID_SIZE` levels.
	"""

	if grid is None:
		grid = ProbGrid.midpoint(DEFAULT_GRID_SIZE)

	return float(grid.integrate(_base_of(model).quantiles(grid.levels)))


def second_moment_xi(model: Union[LocationScaleModel, BaseDistribution], grid: Optional[ProbGrid] = None) -> float:
	"""
	Return ``𝔼ξ² = ∫_0^1 F0⁻(u)² du`` for ``ξ ~ F0``, by quadrature on ``grid``.

	:param model: A model or its base distribution.
	:param grid: Defaults to the midpoint grid with :data:`~.DEFAULT_GRID_SIZE` levels.
	"""

	if grid is None:
		grid = ProbGrid.midpoint(DEFAULT_GRID_SIZE)

	return float(grid.integrate(_base_of(model).quantiles(grid.levels)**2))


def reference_model(
		variance_m: float = 3.0,
		variance_log_sigma: float = 0.1,
		shift_only: bool = False,
		) -> LocationScaleModel:
	"""
	The reference model: normal ``F0``, ``M = X1 ~ N(0, variance_m)``
	and ``Σ = exp(X2)`` with ``X2 ~ N(0, variance_log_sigma)``.

	:param variance_m:
	:param variance_log_sigma:
	:param shift_only: Use ``Σ ≡ 1`` instead, keeping both inputs.
	"""  # noqa: D400

	return LocationScaleModel(
			BaseDistribution.normal(),
			m_map="X1",
			sigma_map="1" if shift_only else "exp(X2)",
			input_laws=[InputLaw.normal(0, variance_m), InputLaw.normal(0, variance_log_sigma)],
			)


@prettify_docstrings
class ReferenceMoments(NamedTuple):
	"""
	Moments of the location and scale of the reference model.
	"""

	mean_sigma: float
	var_sigma: float
	mean_m: float
	var_m: float
	cov_sigma_m: float


def reference_moments(variance_m: float = 3.0, variance_log_sigma: float = 0.1) -> ReferenceMoments:
	"""
	Return the exact moments of ``M`` and ``Σ`` in :func:`~.reference_model`.

	``Σ`` is log-normal, so ``𝔼Σ = exp(s²/2)`` and ``Var Σ = (exp(s²) - 1) exp(s²)``.

	:param variance_m:
	:param variance_log_sigma: ``s²``.
	"""

	s2 = variance_log_sigma
	return ReferenceMoments(
			mean_sigma=math.exp(s2 / 2),
			var_sigma=math.expm1(s2) * math.exp(s2),
			mean_m=0.0,
			var_m=variance_m,
			cov_sigma_m=0.0,
			)


@prettify_docstrings
class DemoReport(NamedTuple):
	"""
	The outcome of :func:`~.run_demo`.
	"""

	#: The pass/fail checks.
	checks: List[Check]

	#: The JSON-serialisable results.
	results: Dict[str, Any]

	#: The files written.
	files: List[PathPlus]

	@property
	def passed(self) -> bool:
		"""
		Whether every check passed.
		"""

		return all(check.passed for check in self.checks)


def run_demo(
		output_dir: PathLike,
		seed: int = 42,
		n: int = 5000,
		grid_m: int = DEFAULT_GRID_SIZE,
		n_pairs: int = 2000,
		replicates: int = DEFAULT_REPLICATES,
		n_outer: int = DEFAULT_N_OUTER,
		n_inner: int = DEFAULT_N_INNER,
		n_jobs: Optional[int] = None,
		) -> DemoReport:
	"""
	Run the full pipeline on :func:`~.reference_model` and write the results to ``output_dir``.

	The files written are ``features.csv`` (the mean, median, 0.1- and 0.9-quantile curves),
	``plot_data.csv``, ``results.json`` and ``report.txt``.
	Failed checks are recorded in the report; they do not raise.

	:param output_dir:
	:param seed: The master seed. Equal seeds give byte-identical files.
	:param n: The number of curves in the sampled ensembles.
	:param grid_m: The number of grid levels.
	:param n_pairs: The number of pick-freeze pairs per replicate.
	:param replicates: The number of replicates of the Sobol estimators.
	:param n_outer: The number of outer draws of the nested designs.
	:param n_inner: The number of inner draws of the nested designs.
	:param n_jobs: The number of threads used for replicates.
	"""

	output_dir = PathPlus(output_dir)
	output_dir.maybe_make(parents=True)

	grid = ProbGrid.midpoint(grid_m)
	model = reference_model()
	shift_model = reference_model(shift_only=True)
	moments = reference_moments()
	base_values = model.base.quantiles(grid.levels)
	checks: List[Check] = []

	# Features of the reference model
	ensemble = sample_ensemble(model, n, grid, seed)
	mean = frechet_mean(ensemble)
	median = frechet_median(ensemble)
	q10 = frechet_quantile(ensemble, 0.1)
	q90 = frechet_quantile(ensemble, 0.9)

	features_file = output_dir / "features.csv"
	write_curves_csv(features_file, grid, numpy.stack([mean.values, median.values, q10.values, q90.values]))

	plot_file = output_dir / "plot_data.csv"
	plot_data = pandas.DataFrame({
			'u': grid.levels,
			"mean": mean.values,
			"median": median.values,
			"q10": q10.values,
			"q90": q90.values,
			})
	plot_data.to_csv(plot_file, index=False, lineterminator='\n')

	expected_mean = moments.mean_sigma * base_values + moments.mean_m
	tolerance = 3 * numpy.std(ensemble.curves, axis=0, ddof=1) / math.sqrt(n)
	covered = float(numpy.mean(numpy.abs(mean.values - expected_mean) <= tolerance))
	checks.append(Check("mean curve matches E[Σ] F0⁻ + E[M]", covered >= 0.99, covered, ">= 0.99 of levels"))

	lower_median = numpy.sort(ensemble.curves, axis=0)[uniform_quantile_index(n, 0.5)]
	checks.append(
			Check(
					"median curve is the pointwise median",
					bool(numpy.array_equal(median.values, lower_median)),
					float(numpy.max(numpy.abs(median.values - lower_median))),
					"exact",
					)
			)

	# With Σ ≡ 1 the median curve is F0⁻ shifted by the median of M.
	shifted = sample_ensemble(shift_model, n, grid, seed)
	assert shifted.inputs is not None
	shift_median = frechet_median(shifted)
	sample_median = weighted_quantile(shifted.inputs[:, 0], 0.5)
	offset_error = float(numpy.max(numpy.abs(shift_median.values - base_values - sample_median)))
	median_tolerance = 3 * math.sqrt(math.pi / 2) * math.sqrt(moments.var_m) / math.sqrt(n)
	checks.append(
			Check(
					"shift-only median is F0⁻ + Med(M)",
					offset_error <= 1e-9 and abs(sample_median - 0.0) <= median_tolerance,
					abs(sample_median),
					f"<= {median_tolerance:.4g}",
					)
			)

	# Sobol indices against the closed form
	closed = location_scale_sobol(
			moments.var_sigma,
			moments.var_m,
			moments.cov_sigma_m,
			mean_xi(model, grid),
			second_moment_xi(model, grid),
			)

	sobol = {
			i: estimate_sobol_cdf(model, i, grid, seed, n=n_pairs, replicates=replicates, n_jobs=n_jobs)
			for i in (1, 2)
			}

	for i, label, expected in ((1, "S_M (X1)", closed.m), (2, "S_Σ (X2)", closed.sigma)):
		error = abs(sobol[i].index - expected)
		checks.append(Check(f"Sobol index {label} matches closed form", error <= 0.05, error, "<= 0.05"))

		spread = abs(float(numpy.mean(sobol[i].replicate_indices)) - expected)
		band = 2 * sobol[i].std_error
		checks.append(
				Check(f"Sobol index {label} replicate mean within 2 std", spread <= band, spread, f"<= {band:.4g}")
				)

	# Median contrast indices of the shift-only model
	absolute = ContrastSpec.absolute()
	median_index = {
			i: contrast_index_cdf(nested_design(shift_model, i, grid, seed, n_outer, n_inner), absolute)
			for i in (1, 2)
			}
	checks.append(Check("median index of X1 (shift-only)", median_index[1].index >= 0.9, median_index[1].index, ">= 0.9"))
	checks.append(Check("median index of X2 (shift-only)", median_index[2].index <= 0.1, median_index[2].index, "<= 0.1"))

	results: Dict[str, Any] = {
			"seed": seed,
			'n': n,
			"grid_m": grid_m,
			"closed_form": {
					"S_sigma": closed.sigma,
					"S_m": closed.m,
					"denominator": closed.denominator,
					"mean_xi": mean_xi(model, grid),
					"mean_xi_sq": second_moment_xi(model, grid),
					"moments": moments._asdict(),
					},
			"sobol": {f"X{i}": result.to_dict() for i, result in sobol.items()},
			"median_index_shift_only": {f"X{i}": result.to_dict() for i, result in median_index.items()},
			"checks": [check.to_dict() for check in checks],
			}

	results_file = output_dir / "results.json"
	results_file.dump_json(results, indent=2)

	report_file = output_dir / "report.txt"
	report_file.write_clean(format_checks(checks, colour=False))

	return DemoReport(checks, results, [features_file, plot_file, results_file, report_file])
