#!/usr/bin/env python3
#
#  __main__.py
"""
The ``cdfsense`` command line interface.
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
import contextlib
import json
import sys
import warnings
from typing import Any, Iterator, Optional

# 3rd party
import click
import numpy
from consolekit import click_group
from consolekit.options import colour_option, verbose_option
from consolekit.terminal_colours import Fore
from consolekit.utils import abort

# this package
from cdfsense import CdfSenseError, ConfigError, PropertyWarning
from cdfsense.click import (
		contrast_option,
		jobs_option,
		probe_grid_option,
		replicates_option,
		seed_option
		)
from cdfsense.config import ModelConfig, load_model
from cdfsense.contrasts import ContrastSpec, check_property_p, default_probe_grid
from cdfsense.frechet_features import frechet_feature, read_ensemble, write_ensemble
from cdfsense.harness import run_demo, sample_ensemble
from cdfsense.quantile_model import DEFAULT_GRID_SIZE, ProbGrid, QuantileCurve, write_curves_csv
from cdfsense.report import format_checks, format_property_report
from cdfsense.sensitivity import (
		DEFAULT_N_INNER,
		DEFAULT_N_OUTER,
		estimate_contrast_index_cdf,
		estimate_sobol_cdf
		)
from cdfsense.transport_costs import wasserstein_cost, wasserstein_p

__all__ = ["main"]

#: The seed used when neither the command line nor the model file gives one.
DEFAULT_SEED = 42

#: The probe grid of ``check-contrast`` when none is given.
DEFAULT_CHECK_RANGE = (-10.0, 10.0)


@contextlib.contextmanager
def _handle_errors() -> Iterator[None]:
	try:
		yield
	except (CdfSenseError, ValueError, KeyError) as e:
		raise abort(f"Error: {e}")


def _json_default(obj: Any) -> Any:
	if isinstance(obj, numpy.ndarray):
		return obj.tolist()
	if isinstance(obj, numpy.generic):
		return obj.item()
	raise TypeError(f"Object of type {type(obj).__name__} is not JSON serializable")


def _echo_json(data: Any) -> None:
	click.echo(json.dumps(data, indent=2, default=_json_default))


def _progress(verbose: int, message: str) -> None:
	if verbose:
		click.echo(message, err=True)


def _read_curve(filename: str) -> QuantileCurve:
	ensemble = read_ensemble(filename)

	if len(ensemble) != 1:
		raise CdfSenseError(f"Expected a single curve in {filename}, found {len(ensemble)}.")

	return ensemble.curve(0)


def _load_model(filename: str, grid_m: Optional[int], seed: Optional[int]) -> ModelConfig:
	config = load_model(filename)

	if grid_m is not None:
		config = config._replace(grid_m=grid_m)
	if seed is not None:
		config = config._replace(seed=seed)
	elif config.seed is None:
		config = config._replace(seed=DEFAULT_SEED)

	return config


model_argument = click.argument("model_file", metavar="MODEL", type=click.Path(exists=True, dir_okay=False))

grid_option = click.option(
		"-m",
		"--grid-m",
		type=click.IntRange(min=2),
		default=None,
		help=f"The number of midpoint grid levels. Overrides the model file (default {DEFAULT_GRID_SIZE}).",
		)

index_option = click.option(
		"-i",
		"--index",
		type=click.IntRange(min=1),
		required=True,
		help="The input whose index is estimated, numbered from 1.",
		)


@click_group()
def main() -> None:
	"""
	Generalized Wasserstein costs, Fréchet features and sensitivity indices for random distribution functions.
	"""


@click.option("-p", "--p", "p", type=click.FloatRange(min=1), default=2.0, show_default=True, help="The order.")
@click.argument("curve_b", type=click.Path(exists=True, dir_okay=False))
@click.argument("curve_a", type=click.Path(exists=True, dir_okay=False))
@main.command()
def distance(curve_a: str, curve_b: str, p: float) -> None:
	"""
	Compute the Wasserstein distance of order p between two quantile curves.
	"""

	with _handle_errors():
		F, G = _read_curve(curve_a), _read_curve(curve_b)
		value = wasserstein_p(F, G, p)

	_echo_json({"value": value, "contrast": ContrastSpec.power(p).name, "grid_size": len(F.grid)})


@colour_option()
@probe_grid_option()
@click.option(
		"--check-property",
		is_flag=True,
		default=False,
		help="Probe the contrast for the rectangle property on the range of both curves.",
		)
@contrast_option(required=True)
@click.argument("curve_b", type=click.Path(exists=True, dir_okay=False))
@click.argument("curve_a", type=click.Path(exists=True, dir_okay=False))
@main.command()
def cost(
		curve_a: str,
		curve_b: str,
		contrast: ContrastSpec,
		check_property: bool,
		probe_grid: Optional[numpy.ndarray],
		colour: Optional[bool] = None,
		) -> None:
	"""
	Compute the cost of the quantile coupling of two curves under a contrast.
	"""

	with _handle_errors():
		F, G = _read_curve(curve_a), _read_curve(curve_b)

		with warnings.catch_warnings():
			warnings.simplefilter("ignore", PropertyWarning)
			result = wasserstein_cost(
					F,
					G,
					contrast,
					check_property=check_property or probe_grid is not None,
					probe_grid=probe_grid,
					)

	if result.warning is not None:
		click.echo(Fore.YELLOW(f"Warning: {result.warning}"), err=True, color=colour)

	_echo_json(result.to_dict())


@colour_option()
@verbose_option()
@probe_grid_option()
@contrast_option(required=True)
@main.command(name="check-contrast")
def check_contrast(
		contrast: ContrastSpec,
		probe_grid: Optional[numpy.ndarray],
		verbose: int = 0,
		colour: Optional[bool] = None,
		) -> None:
	"""
	Check a contrast for the rectangle property on a probe grid.

	Exits with code 1 if the check fails.
	"""

	with _handle_errors():
		if probe_grid is None:
			probe_grid = default_probe_grid(*DEFAULT_CHECK_RANGE)
		report = check_property_p(contrast, probe_grid)

	if verbose:
		click.echo(
				format_property_report(contrast.name, report.passes, report.worst_violation, report.witness),
				err=True,
				color=colour,
				)

	_echo_json({
			"contrast": contrast.name,
			"passes": report.passes,
			"worst_violation": report.worst_violation,
			"witness": list(report.witness),
			})

	if not report.passes:
		sys.exit(1)


@verbose_option()
@click.option(
		"-o",
		"--output",
		type=click.Path(dir_okay=False, writable=True),
		required=True,
		help="Where to write the feature curve.",
		)
@click.option(
		"--inputs",
		type=click.Path(exists=True, dir_okay=False),
		default=None,
		help="The inputs sidecar of the ensemble.",
		)
@contrast_option(default="squared")
@click.argument("ensemble_file", metavar="ENSEMBLE", type=click.Path(exists=True, dir_okay=False))
@main.command()
def feature(
		ensemble_file: str,
		contrast: ContrastSpec,
		inputs: Optional[str],
		output: str,
		verbose: int = 0,
		) -> None:
	"""
	Compute the Fréchet feature of an ensemble of quantile curves.
	"""

	with _handle_errors():
		ensemble = read_ensemble(ensemble_file, inputs)
		_progress(verbose, f"Read {len(ensemble)} curves on {len(ensemble.grid)} levels from {ensemble_file}")

		result = frechet_feature(ensemble, contrast)
		write_curves_csv(output, ensemble.grid, result.values)

	_echo_json({
			"contrast": contrast.name,
			"grid_size": len(ensemble.grid),
			"n_curves": len(ensemble),
			"repaired": result.repaired,
			"output": output,
			})


@verbose_option()
@click.option(
		"--inputs",
		type=click.Path(dir_okay=False, writable=True),
		default=None,
		help="Where to write the inputs that produced the curves.",
		)
@click.option(
		"-o",
		"--output",
		type=click.Path(dir_okay=False, writable=True),
		required=True,
		help="Where to write the ensemble.",
		)
@seed_option(default=None)
@grid_option
@click.option(
		"-n",
		"--n",
		"n",
		type=click.IntRange(min=1),
		default=None,
		help="The number of curves. Overrides the model file.",
		)
@model_argument
@main.command()
def sample(
		model_file: str,
		n: Optional[int],
		grid_m: Optional[int],
		seed: Optional[int],
		output: str,
		inputs: Optional[str],
		verbose: int = 0,
		) -> None:
	"""
	Sample an ensemble of quantile curves from a model file.
	"""

	with _handle_errors():
		config = _load_model(model_file, grid_m, seed)
		n = config.n if n is None else n

		if n is None:
			raise ConfigError("The number of curves must be given with --n or the 'n' key of the model file.")

		_progress(verbose, f"Sampling {n} curves on {config.grid_m} levels with seed {config.seed}")
		assert config.seed is not None

		ensemble = sample_ensemble(config.model, n, ProbGrid.midpoint(config.grid_m), config.seed)
		write_ensemble(output, ensemble, inputs)

	_echo_json({"n": n, "grid_size": config.grid_m, "seed": config.seed, "output": output})


@verbose_option()
@jobs_option()
@replicates_option()
@seed_option(default=None)
@grid_option
@click.option(
		"-n",
		"--n",
		"n",
		type=click.IntRange(min=2),
		default=2000,
		show_default=True,
		help="The number of pick-freeze pairs per replicate.",
		)
@click.option(
		"-d",
		"--input-dim",
		type=click.IntRange(min=1),
		default=None,
		help="The expected number of inputs of the model.",
		)
@index_option
@model_argument
@main.command()
def sobol(
		model_file: str,
		index: int,
		input_dim: Optional[int],
		n: int,
		grid_m: Optional[int],
		seed: Optional[int],
		replicates: int,
		jobs: Optional[int],
		verbose: int = 0,
		) -> None:
	"""
	Estimate the Sobol index of one input of a model with pick-freeze designs.
	"""

	with _handle_errors():
		config = _load_model(model_file, grid_m, seed)

		if input_dim is not None and input_dim != config.model.input_dim:
			raise ConfigError(f"--input-dim is {input_dim} but the model has {config.model.input_dim} inputs.")

		_progress(verbose, f"Estimating the Sobol index of X{index} from {replicates} replicates of {n} pairs")
		assert config.seed is not None

		result = estimate_sobol_cdf(
				config.model,
				index,
				ProbGrid.midpoint(config.grid_m),
				config.seed,
				n=n,
				replicates=replicates,
				n_jobs=jobs,
				)

	_echo_json(result.to_dict())


@verbose_option()
@jobs_option()
@replicates_option()
@seed_option(default=None)
@grid_option
@click.option(
		"--n-inner",
		type=click.IntRange(min=2),
		default=DEFAULT_N_INNER,
		show_default=True,
		help="The number of inner draws per outer draw.",
		)
@click.option(
		"--n-outer",
		type=click.IntRange(min=1),
		default=DEFAULT_N_OUTER,
		show_default=True,
		help="The number of outer draws of the input.",
		)
@contrast_option(default="absolute")
@index_option
@model_argument
@main.command(name="contrast-index")
def contrast_index(
		model_file: str,
		index: int,
		contrast: ContrastSpec,
		n_outer: int,
		n_inner: int,
		grid_m: Optional[int],
		seed: Optional[int],
		replicates: int,
		jobs: Optional[int],
		verbose: int = 0,
		) -> None:
	"""
	Estimate the contrast index of one input of a model with nested designs.
	"""

	with _handle_errors():
		config = _load_model(model_file, grid_m, seed)

		_progress(
				verbose,
				f"Estimating the {contrast.name} index of X{index} from {replicates} replicates "
				f"of {n_outer} × {n_inner} draws",
				)
		assert config.seed is not None

		result = estimate_contrast_index_cdf(
				config.model,
				index,
				contrast,
				ProbGrid.midpoint(config.grid_m),
				config.seed,
				n_outer=n_outer,
				n_inner=n_inner,
				replicates=replicates,
				n_jobs=jobs,
				)

	_echo_json(result.to_dict())


@colour_option()
@verbose_option()
@jobs_option()
@replicates_option()
@click.option(
		"-n",
		"--n",
		"n",
		type=click.IntRange(min=2),
		default=5000,
		show_default=True,
		help="The number of curves in the sampled ensembles.",
		)
@click.option(
		"-o",
		"--output-dir",
		type=click.Path(file_okay=False, writable=True),
		default="cdfsense_demo",
		show_default=True,
		help="The directory to write the results to.",
		)
@seed_option(default=DEFAULT_SEED)
@main.command()
def demo(
		seed: int,
		output_dir: str,
		n: int,
		replicates: int,
		jobs: Optional[int],
		verbose: int = 0,
		colour: Optional[bool] = None,
		) -> None:
	"""
	Run the full pipeline on the reference model and check it against closed forms.
	"""

	with _handle_errors():
		_progress(verbose, f"Running the demo with seed {seed} into {output_dir}")
		report = run_demo(output_dir, seed=seed, n=n, replicates=replicates, n_jobs=jobs)

	click.echo(format_checks(report.checks), color=colour)

	for filename in report.files:
		_progress(verbose, f"Wrote {filename.as_posix()}")


if __name__ == "__main__":
	sys.exit(main())
