# 3rd party
import numpy
import pytest
from domdf_python_tools.paths import PathPlus

# this package
from cdfsense.harness import BaseDistribution, InputLaw, LocationScaleModel, reference_model
from cdfsense.quantile_model import ProbGrid, QuantileCurve, write_curves_csv

pytest_plugins = ("coincidence", )


@pytest.fixture()
def grid() -> ProbGrid:
	return ProbGrid.midpoint(64)


@pytest.fixture()
def shift_model() -> LocationScaleModel:
	return reference_model(shift_only=True)


@pytest.fixture()
def scale_model() -> LocationScaleModel:
	# Σ = X1, M = X2 with independent uniform inputs
	return LocationScaleModel(
			BaseDistribution.normal(),
			m_map="X2",
			sigma_map="X1",
			input_laws=[InputLaw.uniform(1, 2), InputLaw.uniform(0, 1)],
			)


@pytest.fixture()
def curve_files(tmp_pathplus: PathPlus):
	grid = ProbGrid.midpoint(4)
	base = numpy.array([-1.5, -0.5, 0.5, 1.5])

	write_curves_csv(tmp_pathplus / "a.csv", grid, base)
	write_curves_csv(tmp_pathplus / "b.csv", grid, base + 2)

	return QuantileCurve(grid, base), QuantileCurve(grid, base + 2), tmp_pathplus
