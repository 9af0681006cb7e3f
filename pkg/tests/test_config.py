# 3rd party
import numpy
import pytest
from domdf_python_tools.paths import PathPlus

# this package
from cdfsense import ConfigError
from cdfsense.config import load_model, parse_base, parse_input_law, parse_model
from cdfsense.harness import BaseDistribution, InputLaw

model_toml = """\
base = "normal"
m_map = "X1"
sigma_map = "1 + 0.5 * abs(X2)"
n = 200
grid_m = 64
seed = 7

[[input_laws]]
kind = "normal"
mean = 0.0
variance = 3.0

[[input_laws]]
kind = "uniform"
low = -1.0
high = 1.0
"""


def minimal(**extra):
	data = {
			"base": "uniform",
			"m_map": "X1",
			"sigma_map": '1',
			"input_laws": [{"kind": "constant", "value": 2.0}],
			}
	data.update(extra)
	return data


def test_load_model(tmp_pathplus: PathPlus):
	(tmp_pathplus / "model.toml").write_clean(model_toml)
	config = load_model(tmp_pathplus / "model.toml")

	assert config.n == 200
	assert config.grid_m == 64
	assert config.seed == 7
	assert config.model.base == BaseDistribution.normal()
	assert config.model.m_map.source == "X1"
	assert config.model.sigma_map.source == "1 + 0.5 * abs(X2)"
	assert config.model.input_dim == 2
	assert config.model.input_laws[0].parameters == (0.0, 3.0)
	assert config.model.input_laws[1].kind == "uniform"


def test_defaults():
	config = parse_model(minimal())

	assert config.n is None
	assert config.seed is None
	assert config.grid_m == 512
	assert config.model.base == BaseDistribution.uniform()


def test_aliases():
	data = minimal()
	data["M_map"] = data.pop("m_map")
	data["Σ_map"] = data.pop("sigma_map")

	config = parse_model(data)
	assert config.model.m_map.source == "X1"
	assert config.model.sigma_map.source == '1'

	with pytest.raises(ConfigError, match="Both 'M_map' and 'm_map'"):
		parse_model(minimal(M_map="X1"))


@pytest.mark.parametrize(
		"data, match",
		[
				pytest.param(minimal(colour="red"), "Unknown key\\(s\\) in the model file: colour", id="unknown_key"),
				pytest.param({"base": "normal"}, "Missing required key 'm_map'", id="missing"),
				pytest.param(minimal(input_laws={"kind": "normal"}), "must be an array", id="laws_not_array"),
				pytest.param(minimal(n=1.5), "'n' must be an integer", id="n_float"),
				pytest.param(minimal(seed=True), "'seed' must be an integer", id="seed_bool"),
				pytest.param(minimal(grid_m="64"), "'grid_m' must be an integer", id="grid_m_string"),
				pytest.param(minimal(base="cauchy"), "Unknown base distribution", id="unknown_base"),
				pytest.param(minimal(m_map="X2"), "refers to X2", id="missing_input"),
				pytest.param(minimal(m_map="log(X1)"), "Unknown function", id="bad_expression"),
				]
		)
def test_invalid_model(data, match: str):
	with pytest.raises(ConfigError, match=match):
		parse_model(data)


def test_parse_base():
	assert parse_base("exponential") == BaseDistribution.exponential()

	tabulated = parse_base({"kind": "tabulated", "levels": [0.25, 0.75], "values": [-1.0, 1.0]})
	assert tabulated == BaseDistribution.tabulated([0.25, 0.75], [-1, 1])

	with pytest.raises(ConfigError, match="given as a table"):
		parse_base("tabulated")
	with pytest.raises(ConfigError, match="'kind' key"):
		parse_base({"levels": [0.5]})
	with pytest.raises(ConfigError, match="Unknown key\\(s\\) in 'base': scale"):
		parse_base({"kind": "normal", "scale": 2})


@pytest.mark.parametrize(
		"table, mean",
		[
				pytest.param({"kind": "normal", "mean": 2.0}, 2.0, id="normal"),
				pytest.param({"kind": "uniform", "low": 0, "high": 4}, 2.0, id="uniform"),
				pytest.param({"kind": "exponential", "rate": 4.0}, 0.25, id="exponential"),
				pytest.param({"kind": "discrete", "values": [0, 1], "weights": [1, 3]}, 0.75, id="discrete"),
				pytest.param({"kind": "constant", "value": -1}, -1, id="constant"),
				]
		)
def test_parse_input_law(table, mean: float):
	law = parse_input_law(table)
	assert isinstance(law, InputLaw)
	assert law.kind == table["kind"]
	assert law.mean == pytest.approx(mean)


@pytest.mark.parametrize(
		"table, match",
		[
				pytest.param("normal", "'kind' key", id="not_table"),
				pytest.param({"kind": "gamma"}, "Unknown input law 'gamma'", id="unknown"),
				pytest.param({"kind": "normal", "sd": 1}, "Unknown key\\(s\\) in input law 'normal': sd", id="bad_key"),
				pytest.param({"kind": "constant"}, "Invalid parameters for input law 'constant'", id="missing_value"),
				]
		)
def test_parse_input_law_errors(table, match: str):
	with pytest.raises(ConfigError, match=match):
		parse_input_law(table)


def test_invalid_law_parameters_are_config_errors():
	with pytest.raises(ConfigError, match="low < high"):
		parse_model(minimal(input_laws=[{"kind": "uniform", "low": 1, "high": 0}]))


def test_load_model_errors(tmp_pathplus: PathPlus):
	(tmp_pathplus / "broken.toml").write_clean("base = ")
	(tmp_pathplus / "incomplete.toml").write_clean('base = "normal"')

	with pytest.raises(ConfigError, match="Could not parse .*broken.toml"):
		load_model(tmp_pathplus / "broken.toml")

	with pytest.raises(ConfigError, match="incomplete.toml: Missing required key 'm_map'"):
		load_model(tmp_pathplus / "incomplete.toml")


def test_loaded_model_samples(tmp_pathplus: PathPlus):
	(tmp_pathplus / "model.toml").write_clean(model_toml)
	config = load_model(tmp_pathplus / "model.toml")

	inputs = config.model.draw_inputs(numpy.random.default_rng(0), 10)
	assert inputs.shape == (10, 2)
	assert numpy.all(numpy.abs(inputs[:, 1]) <= 1)
