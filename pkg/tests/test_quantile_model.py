# stdlib
from fractions import Fraction

# 3rd party
import numpy
import pytest
from domdf_python_tools.paths import PathPlus

# this package
from cdfsense import DomainError, GridError, GridMismatchError, InvalidCurveError
from cdfsense.quantile_model import (
		DiscreteDistribution,
		ProbGrid,
		QuantileCurve,
		check_weights,
		columnwise_quantile,
		curve_from_inverse_table,
		curve_from_samples,
		generalized_inverse,
		read_curves_csv,
		read_curves_json,
		read_inputs_csv,
		uniform_quantile_index,
		weighted_quantile,
		write_curves_csv,
		write_curves_json,
		write_inputs_csv
		)


def test_midpoint_grid():
	grid = ProbGrid.midpoint(4)
	assert grid.levels.tolist() == [0.125, 0.375, 0.625, 0.875]
	assert grid.scheme == "midpoint"
	assert len(grid) == 4
	assert grid.weights.tolist() == [0.25] * 4

	assert ProbGrid([0.125, 0.375, 0.625, 0.875]) == grid
	assert ProbGrid([0.125, 0.375, 0.625, 0.875]).scheme == "midpoint"
	assert ProbGrid([0.1, 0.5, 0.9]).scheme == "explicit"


@pytest.mark.parametrize(
		"levels, match",
		[
				pytest.param([0.5], "at least 2 levels", id="too_short"),
				pytest.param([0.5, 0.25], "strictly increasing", id="decreasing"),
				pytest.param([0.5, 0.5], "strictly increasing", id="repeated"),
				pytest.param([0.0, 0.5], "open interval", id="zero"),
				pytest.param([0.5, 1.0], "open interval", id="one"),
				]
		)
def test_grid_errors(levels, match: str):
	with pytest.raises(GridError, match=match):
		ProbGrid(levels)


def test_midpoint_too_small():
	with pytest.raises(GridError, match="at least 2 levels"):
		ProbGrid.midpoint(1)


def test_grid_mismatch():
	with pytest.raises(GridMismatchError):
		ProbGrid.midpoint(4).require_same(ProbGrid.midpoint(5))

	ProbGrid.midpoint(4).require_same(ProbGrid.midpoint(4))


def test_integrate_midpoint_is_mean():
	grid = ProbGrid.midpoint(8)
	values = numpy.arange(8, dtype=float)
	assert grid.integrate(values) == numpy.mean(values)


@pytest.mark.parametrize(
		"atoms, u, expected",
		[
				pytest.param([(1, Fraction(1, 3)), (2, Fraction(1, 3)), (3, Fraction(1, 3))], 0.5, 2, id="thirds"),
				pytest.param([(7, 1)], 0.01, 7, id="point_mass_low"),
				pytest.param([(7, 1)], 0.99, 7, id="point_mass_high"),
				pytest.param([(0, 0.25), (10, 0.75)], 0.25, 0, id="step_boundary"),
				pytest.param([(0, 0.25), (10, 0.75)], 0.26, 10, id="past_boundary"),
				]
		)
def test_generalized_inverse(atoms, u: float, expected: float):
	values, weights = zip(*atoms)
	assert generalized_inverse(DiscreteDistribution(values, weights), u) == expected


@pytest.mark.parametrize("u", [0.0, 1.0, -0.5, 1.5])
def test_generalized_inverse_outside_unit_interval(u: float):
	with pytest.raises(DomainError, match="open interval"):
		generalized_inverse(DiscreteDistribution([1, 2]), u)


def test_generalized_inverse_nondecreasing():
	dist = DiscreteDistribution([3, -1, 2, 8], [0.1, 0.2, 0.3, 0.4])
	levels = numpy.linspace(0.01, 0.99, 99)
	values = [generalized_inverse(dist, u) for u in levels]
	assert all(a <= b for a, b in zip(values, values[1:]))


@pytest.mark.parametrize(
		"n_atoms, u, expected",
		[
				pytest.param(5, 0.2, 1, id="fifth_1"),
				pytest.param(5, 0.4, 2, id="fifth_2"),
				pytest.param(5, 0.6, 3, id="fifth_3"),
				pytest.param(5, 0.8, 4, id="fifth_4"),
				pytest.param(10, 0.1, 1, id="tenth"),
				pytest.param(10, 0.7, 7, id="seven_tenths"),
				]
		)
def test_generalized_inverse_at_cumulative_weight(n_atoms: int, u: float, expected: float):
	dist = DiscreteDistribution(range(1, n_atoms + 1))
	assert generalized_inverse(dist, u) == expected
	assert generalized_inverse(dist, u + 1e-9) == expected + 1


def test_generalized_inverse_agrees_with_curve_from_samples():
	samples = [1, 2, 3, 4, 5]
	grid = ProbGrid([0.2, 0.4, 0.6, 0.8])

	expected = [generalized_inverse(DiscreteDistribution(samples), u) for u in grid.levels]
	assert expected == [1, 2, 3, 4]
	assert curve_from_samples(samples, grid).values.tolist() == expected


def test_discrete_distribution():
	dist = DiscreteDistribution([3, 1, 2], [2, 1, 1])
	assert dist.values.tolist() == [1, 2, 3]
	assert dist.weights.tolist() == [0.25, 0.25, 0.5]
	assert dist.exact_weights == (Fraction(1, 4), Fraction(1, 4), Fraction(1, 2))
	assert dist.denominator == 4
	assert len(dist) == 3


@pytest.mark.parametrize(
		"values, weights, match",
		[
				pytest.param([], None, "at least one atom", id="empty"),
				pytest.param([1, float("nan")], None, "finite", id="nan"),
				pytest.param([1, 2], [1, 0], "strictly positive", id="zero_weight"),
				pytest.param([1, 2], [1], "one weight per atom", id="length"),
				]
		)
def test_discrete_distribution_errors(values, weights, match: str):
	with pytest.raises(DomainError, match=match):
		DiscreteDistribution(values, weights)


@pytest.mark.parametrize(
		"samples, m, expected",
		[
				pytest.param([3, 1, 2], 3, [1, 2, 3], id="order_statistics"),
				pytest.param([5], 7, [5] * 7, id="single"),
				pytest.param([0, 1], 4, [0, 0, 1, 1], id="two_steps"),
				]
		)
def test_curve_from_samples(samples, m: int, expected):
	assert curve_from_samples(samples, ProbGrid.midpoint(m)).values.tolist() == expected


def test_curve_from_samples_permutation_invariant():
	rng = numpy.random.default_rng(1)
	samples = rng.normal(size=50)
	grid = ProbGrid.midpoint(32)

	assert curve_from_samples(samples, grid) == curve_from_samples(rng.permutation(samples), grid)


def test_curve_from_samples_round_trip():
	atoms = [4.0, -2.0, 0.5, 9.0, 1.25]
	assert curve_from_samples(atoms, ProbGrid.midpoint(5)).values.tolist() == sorted(atoms)


def test_curve_from_samples_default_grid():
	assert len(curve_from_samples([1, 2, 3])) == 512


@pytest.mark.parametrize("samples", [[], [1.0, float("inf")]])
def test_curve_from_samples_errors(samples):
	with pytest.raises(DomainError):
		curve_from_samples(samples, ProbGrid.midpoint(4))


def test_curve_from_inverse_table():
	curve = curve_from_inverse_table([0.25, 0.5, 0.75], [0, 1, 2])
	assert curve.values.tolist() == [0, 1, 2]
	assert curve.grid.scheme == "explicit"

	with pytest.raises(InvalidCurveError, match="index 2") as e:
		curve_from_inverse_table([0.25, 0.5, 0.75], [0, 2, 1])

	assert e.value.index == 2

	with pytest.raises(GridError, match="strictly increasing"):
		curve_from_inverse_table([0.5, 0.25], [0, 1])


def test_quantile_curve_is_immutable():
	curve = QuantileCurve(ProbGrid.midpoint(3), [1, 2, 3])

	with pytest.raises(ValueError):
		curve.values[0] = 10


def test_quantile_curve_not_finite():
	with pytest.raises(InvalidCurveError, match="index 1") as e:
		QuantileCurve(ProbGrid.midpoint(3), [1, float("nan"), 3])

	assert e.value.index == 1


def test_quantile_curve_shift_and_scale():
	curve = QuantileCurve(ProbGrid.midpoint(3), [1, 2, 3])
	assert curve.shifted(1.5).values.tolist() == [2.5, 3.5, 4.5]
	assert curve.scaled(2).values.tolist() == [2, 4, 6]

	with pytest.raises(DomainError, match="positive factor"):
		curve.scaled(-1)


def test_uniform_quantile_index():
	assert uniform_quantile_index(4, 0.5) == 1
	assert uniform_quantile_index(3, 0.5) == 1
	assert uniform_quantile_index(4, 0.25) == 0
	assert uniform_quantile_index(4, 0.99) == 3


def test_weighted_quantile():
	assert weighted_quantile([10, 20, 30, 40], 0.25) == 10
	assert weighted_quantile([1, 2, 3, 4], 0.5) == 2
	assert weighted_quantile([1, 2, 3], 0.5, [0.1, 0.1, 0.8]) == 3
	assert weighted_quantile([3, 1, 2], 0.5, [0.8, 0.1, 0.1]) == 3


def test_columnwise_quantile_matches_weighted_quantile():
	rng = numpy.random.default_rng(3)
	matrix = rng.normal(size=(11, 6))
	weights = rng.uniform(size=11)
	weights /= weights.sum()

	for alpha in (0.1, 0.5, 0.9):
		uniform = columnwise_quantile(matrix, alpha)
		weighted = columnwise_quantile(matrix, alpha, weights)

		for j in range(6):
			assert uniform[j] == weighted_quantile(matrix[:, j], alpha)
			assert weighted[j] == weighted_quantile(matrix[:, j], alpha, weights)


def test_check_weights():
	assert check_weights(None, 3) is None
	assert check_weights([0.25, 0.25, 0.5], 3).tolist() == [0.25, 0.25, 0.5]

	with pytest.raises(DomainError, match="Expected 3 weights"):
		check_weights([0.5, 0.5], 3)
	with pytest.raises(DomainError, match="strictly positive"):
		check_weights([1.5, -0.5], 2)
	with pytest.raises(DomainError, match="strictly positive"):
		check_weights([0.5, 0, 0.5], 3)
	with pytest.raises(DomainError, match="sum to 1"):
		check_weights([0.5, 0.4], 2)


def test_csv_round_trip(tmp_pathplus: PathPlus):
	rng = numpy.random.default_rng(7)
	grid = ProbGrid.midpoint(16)
	curves = numpy.sort(rng.normal(size=(5, 16)), axis=1)

	write_curves_csv(tmp_pathplus / "curves.csv", grid, curves)
	read_grid, read = read_curves_csv(tmp_pathplus / "curves.csv")

	assert read_grid == grid
	assert numpy.array_equal(read, curves)


def test_json_round_trip(tmp_pathplus: PathPlus):
	rng = numpy.random.default_rng(8)
	grid = ProbGrid([0.1, 0.2, 0.7])
	curves = numpy.sort(rng.exponential(size=(4, 3)), axis=1)

	write_curves_json(tmp_pathplus / "curves.json", grid, curves)
	read_grid, read = read_curves_json(tmp_pathplus / "curves.json")

	assert read_grid == grid
	assert numpy.array_equal(read, curves)


def test_csv_header(tmp_pathplus: PathPlus):
	write_curves_csv(tmp_pathplus / "curve.csv", ProbGrid.midpoint(2), [1.0, 2.0])
	assert (tmp_pathplus / "curve.csv").read_text().splitlines() == ["0.25,0.75", "1.0,2.0"]


def test_read_invalid_curve(tmp_pathplus: PathPlus):
	(tmp_pathplus / "bad.csv").write_text("0.25,0.75\n2.0,1.0\n")

	with pytest.raises(InvalidCurveError):
		read_curves_csv(tmp_pathplus / "bad.csv")


def test_write_wrong_grid(tmp_pathplus: PathPlus):
	with pytest.raises(GridMismatchError):
		write_curves_csv(tmp_pathplus / "curves.csv", ProbGrid.midpoint(3), [[1.0, 2.0]])


def test_inputs_round_trip(tmp_pathplus: PathPlus):
	inputs = numpy.array([[0.5, -1.25], [3.0, 2.0]])
	write_inputs_csv(tmp_pathplus / "inputs.csv", inputs)

	assert (tmp_pathplus / "inputs.csv").read_text().splitlines()[0] == "X1,X2"
	assert numpy.array_equal(read_inputs_csv(tmp_pathplus / "inputs.csv"), inputs)
