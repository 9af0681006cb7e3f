#!/usr/bin/env python3
#
#  config.py
"""
Loading location-scale models from TOML files.

A model file looks like this:

.. code-block:: TOML

	base = "normal"
	m_map = "X1"
	sigma_map = "exp(X2)"
	n = 1000
	grid_m = 512
	seed = 42

	[[input_laws]]
	kind = "normal"
	mean = 0
	variance = 3

	[[input_laws]]
	kind = "normal"
	mean = 0
	variance = 0.1

``base`` may also be a table ``{kind = "tabulated", levels = [...], values = [...]}``.
Input laws take the parameters of the :class:`~cdfsense.harness.InputLaw` constructor of the same name.
``M_map`` and ``Σ_map`` are accepted in place of ``m_map`` and ``sigma_map``.
Unknown keys are errors.
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
from typing import Any, Dict, Mapping, NamedTuple, Optional, Set

# 3rd party
import dom_toml
from domdf_python_tools.paths import PathPlus
from domdf_python_tools.typing import PathLike

# this package
from cdfsense import CdfSenseError, ConfigError
from cdfsense.harness import BaseDistribution, InputLaw, LocationScaleModel
from cdfsense.quantile_model import DEFAULT_GRID_SIZE

__all__ = ["ModelConfig", "parse_base", "parse_input_law", "parse_model", "load_model"]

_top_level_keys = {"base", "m_map", "sigma_map", "input_laws", 'n', "grid_m", "seed"}

# Alternative spellings of the map keys.
_aliases = {"M_map": "m_map", "Σ_map": "sigma_map"}

_law_parameters: Dict[str, Set[str]] = {
		"normal": {"mean", "variance"},
		"uniform": {"low", "high"},
		"exponential": {"rate"},
		"discrete": {"values", "weights"},
		"constant": {"value"},
		}


class ModelConfig(NamedTuple):
	"""
	The contents of a model file.
	"""

	#: The stochastic code.
	model: LocationScaleModel

	#: The number of curves to sample, if given.
	n: Optional[int]

	#: The number of levels of the midpoint grid.
	grid_m: int

	#: The master seed, if given.
	seed: Optional[int]


def _check_keys(table: Mapping[str, Any], allowed: Set[str], where: str) -> None:
	unknown = sorted(set(table) - allowed)
	if unknown:
		raise ConfigError(f"Unknown key(s) in {where}: {', '.join(unknown)}")


def parse_base(value: Any) -> BaseDistribution:
	"""
	Parse the ``base`` key of a model file.

	:param value: A string naming a base, or a table.
	"""

	if isinstance(value, str):
		if value == "tabulated":
			raise ConfigError("A tabulated base must be given as a table with 'levels' and 'values'.")
		return BaseDistribution(value)  # type: ignore[arg-type]

	if not isinstance(value, Mapping) or "kind" not in value:
		raise ConfigError("'base' must be a string or a table with a 'kind' key.")

	_check_keys(value, {"kind", "levels", "values"}, "'base'")
	return BaseDistribution(value["kind"], value.get("levels"), value.get("values"))


def parse_input_law(table: Any) -> InputLaw:
	"""
	Parse one entry of the ``input_laws`` array of a model file.

	:param table:
	"""

	if not isinstance(table, Mapping) or "kind" not in table:
		raise ConfigError("Each input law must be a table with a 'kind' key.")

	kind = table["kind"]
	if kind not in _law_parameters:
		raise ConfigError(f"Unknown input law {kind!r}.")

	_check_keys(table, _law_parameters[kind] | {"kind"}, f"input law {kind!r}")
	parameters = {key: value for key, value in table.items() if key != "kind"}

	try:
		return getattr(InputLaw, kind)(**parameters)
	except TypeError as e:
		raise ConfigError(f"Invalid parameters for input law {kind!r}: {e}") from None


def parse_model(data: Mapping[str, Any]) -> ModelConfig:
	"""
	Build a model from the parsed contents of a model file.

	:param data:

	:raises ConfigError: If the contents are malformed.
	"""

	data = dict(data)
	for alias, key in _aliases.items():
		if alias in data:
			if key in data:
				raise ConfigError(f"Both {alias!r} and {key!r} are given.")
			data[key] = data.pop(alias)

	_check_keys(data, _top_level_keys, "the model file")

	for key in ("base", "m_map", "sigma_map", "input_laws"):
		if key not in data:
			raise ConfigError(f"Missing required key {key!r}.")

	if not isinstance(data["input_laws"], list):
		raise ConfigError("'input_laws' must be an array of tables.")

	for key in ('n', "grid_m", "seed"):
		if key in data and (isinstance(data[key], bool) or not isinstance(data[key], int)):
			raise ConfigError(f"{key!r} must be an integer.")

	try:
		model = LocationScaleModel(
				parse_base(data["base"]),
				m_map=str(data["m_map"]),
				sigma_map=str(data["sigma_map"]),
				input_laws=[parse_input_law(law) for law in data["input_laws"]],
				)
	except ConfigError:
		raise
	except CdfSenseError as e:
		raise ConfigError(str(e)) from e

	return ModelConfig(
			model=model,
			n=data.get('n'),
			grid_m=data.get("grid_m", DEFAULT_GRID_SIZE),
			seed=data.get("seed"),
			)


def load_model(filename: PathLike) -> ModelConfig:
	"""
	Load a model file.

	:param filename:

	:raises ConfigError: If the file cannot be parsed or its contents are malformed.
	"""

	filename = PathPlus(filename)

	try:
		data = dom_toml.load(filename)
	except ValueError as e:
		raise ConfigError(f"Could not parse {filename.as_posix()}: {e}") from e

	try:
		return parse_model(data)
	except ConfigError as e:
		raise ConfigError(f"{filename.as_posix()}: {e}") from e
