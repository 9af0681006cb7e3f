# stdlib
import json
import math
from typing import Optional

# 3rd party
import numpy
import pytest
from domdf_python_tools.paths import PathPlus

# this package
from cdfsense import DomainError, ModelConstraintError
from cdfsense.frechet_features import frechet_mean, frechet_quantile
from cdfsense.harness import (
		BaseDistribution,
		InputLaw,
		LocationScaleModel,
		mean_xi,
		reference_model,
		reference_moments,
		run_demo,
		sample_ensemble,
		second_moment_xi
		)
from cdfsense.quantile_model import ProbGrid
from cdfsense.sensitivity import estimate_sobol_cdf, location_scale_sobol


@pytest.mark.parametrize(
		"base, expected, tolerance",
		[
				pytest.param(BaseDistribution.uniform(), 0.5, 1e-12, id="uniform"),
				pytest.param(BaseDistribution.normal(), 0.0, 1e-3, id="normal"),
				pytest.param(BaseDistribution.exponential(), 1.0, 2e-2, id="exponential"),
				]
		)
def test_mean_xi(base: BaseDistribution, expected: float, tolerance: float):
	assert mean_xi(base, ProbGrid.midpoint(512)) == pytest.approx(expected, abs=tolerance)


def test_second_moment_xi():
	grid = ProbGrid.midpoint(512)

	assert second_moment_xi(BaseDistribution.uniform(), grid) == pytest.approx(1 / 3, abs=1e-5)
	assert second_moment_xi(BaseDistribution.normal(), grid) == pytest.approx(1, abs=2e-2)
	assert second_moment_xi(reference_model(), grid) == second_moment_xi(BaseDistribution.normal(), grid)


def test_base_quantiles():
	levels = numpy.array([0.1, 0.5, 0.9])

	assert BaseDistribution.uniform().quantiles(levels).tolist() == pytest.approx([0.1, 0.5, 0.9])
	assert BaseDistribution.normal().quantiles([0.5]).tolist() == [0]
	assert BaseDistribution.exponential().quantiles([0.5])[0] == pytest.approx(math.log(2))


def test_tabulated_base():
	base = BaseDistribution.tabulated([0.25, 0.5, 0.75], [-1, 0, 1])

	assert base.quantiles([0.25, 0.375, 0.75]).tolist() == [-1, -0.5, 1]
	assert base.quantiles([0.1, 0.9]).tolist() == pytest.approx([-1.6, 1.6])
	assert base == BaseDistribution.tabulated([0.25, 0.5, 0.75], [-1, 0, 1])
	assert base != BaseDistribution.tabulated([0.25, 0.5, 0.75], [-1, 0, 2])
	assert base != BaseDistribution.normal()


@pytest.mark.parametrize(
		"levels, values, match",
		[
				pytest.param([0.25, 0.75], [0, 0], "strictly increasing", id="flat"),
				pytest.param([0.25, 0.75], [0], "one value per level", id="length"),
				pytest.param([0.25, 0.75], [0, float("inf")], "finite", id="infinite"),
				pytest.param(None, None, "needs 'levels' and 'values'", id="missing"),
				]
		)
def test_tabulated_base_errors(levels, values, match: str):
	with pytest.raises(DomainError, match=match):
		BaseDistribution("tabulated", levels, values)


def test_unknown_base():
	with pytest.raises(DomainError, match="Unknown base distribution 'cauchy'"):
		BaseDistribution("cauchy")  # type: ignore[arg-type]


@pytest.mark.parametrize(
		"law, mean, variance",
		[
				pytest.param(InputLaw.normal(1, 4), 1, 4, id="normal"),
				pytest.param(InputLaw.uniform(1, 3), 2, 1 / 3, id="uniform"),
				pytest.param(InputLaw.exponential(2), 0.5, 0.25, id="exponential"),
				pytest.param(InputLaw.discrete([1, 2], [1, 3]), 1.75, 0.1875, id="discrete"),
				pytest.param(InputLaw.constant(5), 5, 0, id="constant"),
				]
		)
def test_input_law_moments(law: InputLaw, mean: float, variance: float):
	assert law.mean == pytest.approx(mean)
	assert law.variance == pytest.approx(variance)

	draws = law.sample(numpy.random.default_rng(1), 20000)
	assert draws.shape == (20000, )
	assert numpy.mean(draws) == pytest.approx(mean, abs=0.05)


@pytest.mark.parametrize(
		"factory, arguments, match",
		[
				pytest.param(InputLaw.normal, (0, -1), "variance", id="normal"),
				pytest.param(InputLaw.uniform, (1, 1), "low < high", id="uniform"),
				pytest.param(InputLaw.exponential, (0, ), "rate", id="exponential"),
				]
		)
def test_input_law_errors(factory, arguments, match: str):
	with pytest.raises(DomainError, match=match):
		factory(*arguments)


def test_constant_model_gives_copies_of_base(grid: ProbGrid):
	model = LocationScaleModel(BaseDistribution.normal(), "0", "1", [InputLaw.uniform()])
	e = sample_ensemble(model, 5, grid, seed=1)

	base = BaseDistribution.normal().quantiles(grid.levels)
	assert all(numpy.array_equal(curve, base) for curve in e.curves)
	assert e.inputs.shape == (5, 1)


def test_location_scale_evaluate(grid: ProbGrid):
	model = LocationScaleModel(BaseDistribution.uniform(), "X1", "X2", [InputLaw.normal(), InputLaw.uniform(1, 2)])
	curves = model.evaluate(numpy.array([[1.0, 2.0], [-1.0, 1.5]]), ProbGrid.midpoint(2))

	assert curves.tolist() == [[1.5, 2.5], [-0.625, 0.125]]


def test_nonpositive_scale():
	model = LocationScaleModel(BaseDistribution.normal(), "0", "X1", [InputLaw.normal()])

	with pytest.raises(ModelConstraintError, match="for input row 1") as e:
		model.location_scale(numpy.array([[1.0], [-0.5], [2.0]]))

	assert e.value.row == 1


def test_map_refers_to_missing_input():
	with pytest.raises(DomainError, match="refers to X3 but only 2 input laws"):
		LocationScaleModel(BaseDistribution.normal(), "X3", "1", [InputLaw.normal(), InputLaw.normal()])


def test_sample_ensemble_deterministic(scale_model: LocationScaleModel, grid: ProbGrid):
	first = sample_ensemble(scale_model, 50, grid, seed=3)
	second = sample_ensemble(scale_model, 50, grid, seed=3)
	other = sample_ensemble(scale_model, 50, grid, seed=4)

	assert numpy.array_equal(first.curves, second.curves)
	assert numpy.array_equal(first.inputs, second.inputs)
	assert not numpy.array_equal(first.curves, other.curves)


def test_sample_ensemble_rows_independent_of_size(scale_model: LocationScaleModel, grid: ProbGrid):
	small = sample_ensemble(scale_model, 5, grid, seed=3)
	large = sample_ensemble(scale_model, 20, grid, seed=3)

	assert numpy.array_equal(small.inputs, large.inputs[:5])
	assert numpy.array_equal(small.curves, large.curves[:5])


def test_sample_ensemble_errors(scale_model: LocationScaleModel):
	with pytest.raises(DomainError, match="At least one curve"):
		sample_ensemble(scale_model, 0)


def test_sample_ensemble_default_grid(scale_model: LocationScaleModel):
	assert len(sample_ensemble(scale_model, 2).grid) == 512


def test_mean_of_symmetric_shift(grid: ProbGrid):
	model = LocationScaleModel(BaseDistribution.normal(), "X1", "1", [InputLaw.discrete([-1, 1])])
	n = 4000
	e = sample_ensemble(model, n, grid, seed=5)

	base = BaseDistribution.normal().quantiles(grid.levels)
	assert numpy.max(numpy.abs(frechet_mean(e).values - base)) < 4 / math.sqrt(n)


def test_quantile_of_scale_mixture(grid: ProbGrid):
	model = LocationScaleModel(BaseDistribution.normal(), "0", "X1", [InputLaw.discrete([1, 2])])
	e = sample_ensemble(model, 2000, grid, seed=6)

	base = BaseDistribution.normal().quantiles(grid.levels)
	positive = base > 0
	assert numpy.array_equal(frechet_quantile(e, 0.25).values[positive], base[positive])


def test_reference_model():
	model = reference_model()
	assert model.input_dim == 2
	assert model.m_map.source == "X1"
	assert model.sigma_map.source == "exp(X2)"
	assert reference_model(shift_only=True).sigma_map.source == '1'

	moments = reference_moments()
	assert moments.mean_sigma == pytest.approx(math.exp(0.05))
	assert moments.var_sigma == pytest.approx((math.exp(0.1) - 1) * math.exp(0.1))
	assert moments.var_m == 3
	assert moments.cov_sigma_m == 0


def test_reference_moments_match_samples():
	e = sample_ensemble(reference_model(), 20000, ProbGrid.midpoint(8), seed=7)
	sigma = numpy.exp(e.inputs[:, 1])
	moments = reference_moments()

	assert numpy.mean(sigma) == pytest.approx(moments.mean_sigma, abs=0.01)
	assert numpy.var(sigma) == pytest.approx(moments.var_sigma, rel=0.05)


def run_small_demo(output_dir: PathPlus, seed: int = 42, n_jobs: Optional[int] = None):
	return run_demo(
			output_dir,
			seed=seed,
			n=400,
			grid_m=32,
			n_pairs=200,
			replicates=3,
			n_outer=20,
			n_inner=10,
			n_jobs=n_jobs,
			)


def test_run_demo_writes_files(tmp_pathplus: PathPlus):
	report = run_small_demo(tmp_pathplus / "demo")

	assert sorted(file.name for file in report.files) == ["features.csv", "plot_data.csv", "report.txt", "results.json"]
	assert all(file.is_file() for file in report.files)

	results = json.loads((tmp_pathplus / "demo" / "results.json").read_text())
	assert results["seed"] == 42
	assert results["grid_m"] == 32
	assert set(results["sobol"]) == {"X1", "X2"}
	assert set(results["median_index_shift_only"]) == {"X1", "X2"}
	assert len(results["checks"]) == len(report.checks)
	assert results["closed_form"]["S_sigma"] + results["closed_form"]["S_m"] == pytest.approx(1)

	plot_header = (tmp_pathplus / "demo" / "plot_data.csv").read_lines()[0]
	assert plot_header == "u,mean,median,q10,q90"

	report_text = (tmp_pathplus / "demo" / "report.txt").read_text()
	assert "checks" in report_text
	assert "\x1b[" not in report_text


def test_run_demo_median_checks(tmp_pathplus: PathPlus):
	report = run_small_demo(tmp_pathplus)
	checks = {check.name: check for check in report.checks}

	assert checks["median curve is the pointwise median"].passed
	assert checks["median index of X1 (shift-only)"].passed
	assert checks["median index of X2 (shift-only)"].value < 0.3


def test_run_demo_deterministic(tmp_pathplus: PathPlus):
	first = run_small_demo(tmp_pathplus / "first")
	second = run_small_demo(tmp_pathplus / "second")

	for a, b in zip(first.files, second.files):
		assert a.read_bytes() == b.read_bytes()

	third = run_small_demo(tmp_pathplus / "third", seed=43)
	assert third.files[0].read_bytes() != first.files[0].read_bytes()


def test_run_demo_independent_of_thread_count(tmp_pathplus: PathPlus):
	serial = run_small_demo(tmp_pathplus / "serial", n_jobs=1)
	threaded = run_small_demo(tmp_pathplus / "threaded", n_jobs=4)

	for name in ("features.csv", "results.json", "plot_data.csv", "report.txt"):
		assert (tmp_pathplus / "serial" / name).read_bytes() == (tmp_pathplus / "threaded" / name).read_bytes()

	assert serial.results == threaded.results


def test_run_demo_mean_curve(tmp_pathplus: PathPlus):
	report = run_demo(tmp_pathplus, seed=42, n=5000, grid_m=512, n_pairs=200, replicates=2, n_outer=20, n_inner=10)
	checks = {check.name: check for check in report.checks}

	mean_check = checks["mean curve matches E[Σ] F0⁻ + E[M]"]
	assert mean_check.passed
	assert mean_check.value >= 0.99

	assert checks["median curve is the pointwise median"].passed
	assert checks["shift-only median is F0⁻ + Med(M)"].passed


def test_location_scale_sobol_closed_form():
	# Var Σ = 1, Var M = 3, independent
	model = LocationScaleModel(
			BaseDistribution.normal(),
			m_map="X1",
			sigma_map="X2",
			input_laws=[InputLaw.normal(0, 3), InputLaw.uniform(1, 1 + math.sqrt(12))],
			)
	grid = ProbGrid.midpoint(128)

	closed = location_scale_sobol(1, 3, 0, mean_xi(model, grid), second_moment_xi(model, grid))
	assert closed.sigma == pytest.approx(0.25, abs=0.01)
	assert closed.m == pytest.approx(0.75, abs=0.01)

	for i, expected, target in ((1, closed.m, 0.75), (2, closed.sigma, 0.25)):
		result = estimate_sobol_cdf(model, i, grid, seed=42, n=2000, replicates=20, n_jobs=2)

		assert result.index == pytest.approx(target, abs=0.05)
		assert len(result.replicate_indices) == 20
		assert abs(numpy.mean(result.replicate_indices) - expected) <= 2 * result.std_error
