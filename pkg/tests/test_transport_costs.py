# stdlib
import itertools
import math
import warnings
from fractions import Fraction

# 3rd party
import numpy
import pytest

# this package
from cdfsense import DomainError, GridMismatchError, OracleSizeError, PropertyWarning
from cdfsense.contrasts import ContrastSpec
from cdfsense.quantile_model import DiscreteDistribution, ProbGrid, QuantileCurve
from cdfsense.transport_costs import (
		brute_force_cost,
		costs_to_curve,
		pairwise_costs,
		wasserstein_cost,
		wasserstein_p
		)

passing_contrasts = [
		pytest.param(ContrastSpec.squared(), id="squared"),
		pytest.param(ContrastSpec.absolute(), id="absolute"),
		pytest.param(ContrastSpec.power(3), id="power_3"),
		pytest.param(ContrastSpec.pinball(0.3), id="pinball_0.3"),
		pytest.param(ContrastSpec.neg_product(), id="neg_product"),
		pytest.param(ContrastSpec.tabulated([-2, 0, 1], [4, 0, 3]), id="tabulated"),
		]


def discrete_curve(dist: DiscreteDistribution, m: int) -> QuantileCurve:
	grid = ProbGrid.midpoint(m)
	return QuantileCurve(grid, dist.values[dist.inverse_indices(grid.levels)])


def random_curve(rng: numpy.random.Generator, grid: ProbGrid) -> QuantileCurve:
	return QuantileCurve(grid, numpy.sort(rng.normal(scale=2, size=len(grid))))


def test_identical_curves():
	curve = QuantileCurve(ProbGrid.midpoint(8), numpy.linspace(-1, 3, 8))
	result = wasserstein_cost(curve, curve, ContrastSpec.squared())

	assert result.value == 0
	assert result.grid_size == 8
	assert result.contrast == ContrastSpec.squared()
	assert result.warning is None


@pytest.mark.parametrize("p", [1, 1.5, 2, 3, 7])
def test_shift(p: float):
	curve = QuantileCurve(ProbGrid.midpoint(16), numpy.linspace(0, 1, 16))
	shifted = curve.shifted(3)

	assert wasserstein_cost(curve, shifted, ContrastSpec.power(p)).value == pytest.approx(3**p, rel=1e-12)
	assert wasserstein_p(curve, shifted, p) == pytest.approx(3, rel=1e-12)


def test_two_atom_example():
	F = discrete_curve(DiscreteDistribution([0, 1]), 4)
	G = discrete_curve(DiscreteDistribution([0, 2]), 4)

	assert wasserstein_cost(F, G, ContrastSpec.squared()).value == 0.5
	assert wasserstein_p(F, G, 2) == pytest.approx(math.sqrt(0.5))


def test_grid_mismatch():
	F = QuantileCurve(ProbGrid.midpoint(4), [0, 1, 2, 3])
	G = QuantileCurve(ProbGrid.midpoint(3), [0, 1, 2])

	with pytest.raises(GridMismatchError):
		wasserstein_cost(F, G, ContrastSpec.squared())


def test_wasserstein_p_below_one():
	curve = QuantileCurve(ProbGrid.midpoint(2), [0, 1])

	with pytest.raises(DomainError, match="at least 1"):
		wasserstein_p(curve, curve, 0.5)


def test_property_warning():
	F = QuantileCurve(ProbGrid.midpoint(4), [0, 1, 2, 3])
	G = F.shifted(1)
	concave = ContrastSpec.from_callable(lambda x, y: -(x - y)**2, label="concave")

	with pytest.warns(PropertyWarning, match="rectangle property"):
		result = wasserstein_cost(F, G, concave, check_property=True)

	assert result.value == -1
	assert result.property_report is not None
	assert not result.property_report.passes
	assert "rectangle property" in result.warning
	assert result.to_dict()["property_passes"] is False


def test_property_check_passes_silently():
	F = QuantileCurve(ProbGrid.midpoint(4), [0, 1, 2, 3])

	with warnings.catch_warnings():
		warnings.simplefilter("error")
		result = wasserstein_cost(F, F.shifted(2), ContrastSpec.pinball(0.4), check_property=True)

	assert result.property_report.passes
	assert result.to_dict() == {
			"value": pytest.approx(1.2),
			"contrast": "pinball:0.4",
			"grid_size": 4,
			"property_passes": True,
			"worst_violation": result.property_report.worst_violation,
			}


def test_explicit_probe_grid():
	F = QuantileCurve(ProbGrid.midpoint(2), [0, 1])
	product = ContrastSpec.from_callable(lambda x, y: x * y, label="product")

	with pytest.warns(PropertyWarning, match=r"\[5, 6\]"):
		result = wasserstein_cost(F, F, product, check_property=True, probe_grid=[5, 6])

	assert result.property_report.witness == (5, 6, 5, 6)


def test_nonnegative_contrasts_give_nonnegative_costs():
	rng = numpy.random.default_rng(2)
	grid = ProbGrid.midpoint(32)

	for _ in range(10):
		F, G = random_curve(rng, grid), random_curve(rng, grid)
		for c in (ContrastSpec.squared(), ContrastSpec.absolute(), ContrastSpec.pinball(0.8)):
			assert wasserstein_cost(F, G, c).value >= 0


@pytest.mark.parametrize(
		"c, expected",
		[
				pytest.param(ContrastSpec.squared(), 0.5, id="squared"),
				pytest.param(ContrastSpec.neg_product(), -1.0, id="neg_product"),
				]
		)
def test_brute_force_examples(c: ContrastSpec, expected: float):
	F = DiscreteDistribution([0, 1])
	G = DiscreteDistribution([0, 2])
	assert brute_force_cost(F, G, c) == pytest.approx(expected, abs=1e-12)


def test_brute_force_identical():
	F = DiscreteDistribution([3, -1, 4, 1], [1, 2, 3, 4])
	assert brute_force_cost(F, F, ContrastSpec.squared()) == pytest.approx(0, abs=1e-12)


def test_brute_force_irrational_weights():
	F = DiscreteDistribution([0, 1], [1 / math.pi, 1 - 1 / math.pi])
	G = DiscreteDistribution([0, 2])
	# monotone coupling: mass 1/π at 0 → 0, then 0.5 - 1/π of 1 → 0, then 0.5 of 1 → 2
	expected = (0.5 - 1 / math.pi) * 1 + 0.5 * 1
	assert brute_force_cost(F, G, ContrastSpec.squared()) == pytest.approx(expected, abs=1e-9)


def test_brute_force_too_large():
	with pytest.raises(OracleSizeError, match="at most 12 atoms"):
		brute_force_cost(DiscreteDistribution(range(7)), DiscreteDistribution(range(6)), ContrastSpec.squared())


def test_brute_force_large_denominator():
	# 997 × 991 units is solved as a linear program
	F = DiscreteDistribution([0, 1], [Fraction(1, 997), Fraction(996, 997)])
	G = DiscreteDistribution([0, 1], [Fraction(1, 991), Fraction(990, 991)])

	expected = (Fraction(1, 991) - Fraction(1, 997)) * 1
	assert brute_force_cost(F, G, ContrastSpec.squared()) == pytest.approx(float(expected), abs=1e-9)


def random_discrete(rng: numpy.random.Generator) -> DiscreteDistribution:
	# up to 5 atoms whose weights share a denominator of at most 6
	k = int(rng.integers(1, 6))
	denominator = int(rng.integers(k, 7))
	cuts = numpy.sort(rng.choice(numpy.arange(1, denominator), size=k - 1, replace=False))
	parts = numpy.diff(numpy.concatenate([[0], cuts, [denominator]]))
	return DiscreteDistribution(rng.integers(-5, 6, size=k), [Fraction(int(part), denominator) for part in parts])


@pytest.mark.parametrize("c", passing_contrasts)
def test_oracle_equivalence(c: ContrastSpec):
	rng = numpy.random.default_rng(4)

	for _ in range(200):
		F, G = random_discrete(rng), random_discrete(rng)
		assert F.denominator <= 6 and G.denominator <= 6

		m = F.denominator * G.denominator // math.gcd(F.denominator, G.denominator)
		value = wasserstein_cost(discrete_curve(F, m), discrete_curve(G, m), c).value

		assert value == pytest.approx(brute_force_cost(F, G, c), abs=1e-9)


def test_metric_axioms():
	rng = numpy.random.default_rng(10)
	grid = ProbGrid.midpoint(24)

	for _ in range(20):
		F, G, H = (random_curve(rng, grid) for _ in range(3))

		for p in (1, 2, 3):
			assert wasserstein_p(F, G, p) == wasserstein_p(G, F, p)
			assert wasserstein_p(F, H, p) <= wasserstein_p(F, G, p) + wasserstein_p(G, H, p) + 1e-9

		assert wasserstein_p(F, F, 2) == 0


def test_monotone_coupling_is_optimal():
	rng = numpy.random.default_rng(12)
	xs = numpy.sort(rng.normal(size=6))
	ys = numpy.sort(rng.normal(size=6))
	monotone = float(numpy.mean((xs - ys)**2))

	for permutation in itertools.permutations(range(6)):
		assert float(numpy.mean((xs - ys[list(permutation)])**2)) >= monotone - 1e-12


def test_costs_to_curve():
	grid = ProbGrid.midpoint(2)
	curves = numpy.array([[0.0, 1.0], [1.0, 3.0]])

	assert costs_to_curve(grid, curves, numpy.array([0.0, 1.0]), ContrastSpec.squared()).tolist() == [0, 2.5]

	with pytest.raises(GridMismatchError):
		costs_to_curve(grid, curves, numpy.array([0.0, 1.0, 2.0]), ContrastSpec.squared())


def test_pairwise_costs():
	grid = ProbGrid.midpoint(3)
	curves = [QuantileCurve(grid, [0, 1, 2]), QuantileCurve(grid, [1, 2, 3]), QuantileCurve(grid, [0, 0, 5])]
	matrix = pairwise_costs(curves, ContrastSpec.absolute())

	assert matrix.shape == (3, 3)
	assert numpy.allclose(matrix, matrix.T)
	assert numpy.all(numpy.diag(matrix) == 0)
	assert matrix[0, 1] == pytest.approx(1)
	assert matrix[0, 2] == pytest.approx(4 / 3)

	assert pairwise_costs([], ContrastSpec.squared()).shape == (0, 0)
