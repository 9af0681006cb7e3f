#!/usr/bin/env python3
#
#  click.py
"""
Extensions to `click <https://click.palletsprojects.com>`_.
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
from typing import Any, Callable, Optional

# 3rd party
import click
import numpy

# this package
from cdfsense import CdfSenseError
from cdfsense.contrasts import DEFAULT_PROBE_SIZE, ContrastSpec, parse_contrast
from cdfsense.sensitivity import DEFAULT_REPLICATES

__all__ = [
		"ContrastType",
		"ProbeGridType",
		"contrast_option",
		"probe_grid_option",
		"seed_option",
		"replicates_option",
		"jobs_option",
		]


class ContrastType(click.ParamType):
	"""
	A click parameter type for contrasts written as ``squared``, ``absolute``,
	``power:<p>``, ``pinball:<α>``, ``negproduct`` or ``tabulated:<file.csv>``.
	"""  # noqa: D400

	name = "contrast"

	def convert(self, value: Any, param: Optional[click.Parameter], ctx: Optional[click.Context]) -> ContrastSpec:
		if isinstance(value, ContrastSpec):
			return value

		try:
			return parse_contrast(str(value))
		except CdfSenseError as e:
			self.fail(str(e), param, ctx)


class ProbeGridType(click.ParamType):
	"""
	A click parameter type for probe grids.

	Accepts either ``low:high:size`` (an evenly spaced grid) or a comma-separated list of points.
	"""

	name = "probe-grid"

	def convert(self, value: Any, param: Optional[click.Parameter], ctx: Optional[click.Context]) -> numpy.ndarray:
		if isinstance(value, numpy.ndarray):
			return value

		text = str(value).strip()

		try:
			if ':' in text:
				low, high, size = text.split(':')
				if int(size) < 2:
					self.fail("A probe grid needs at least 2 points.", param, ctx)
				points = numpy.linspace(float(low), float(high), int(size))
			else:
				points = numpy.array([float(point) for point in text.split(',')])
		except ValueError:
			self.fail(f"{text!r} is neither 'low:high:size' nor a comma-separated list of numbers.", param, ctx)

		if not numpy.all(numpy.isfinite(points)):
			self.fail("Probe points must be finite.", param, ctx)

		return points


def contrast_option(default: Optional[str] = "squared", required: bool = False) -> Callable:
	"""
	Decorator to add the ``-c / --contrast`` option to a click command.

	:param default: The textual form of the default contrast.
	:param required: Whether the option must be given.
	"""

	return click.option(
			"-c",
			"--contrast",
			type=ContrastType(),
			default=None if required else default,
			required=required,
			show_default=not required,
			help="The contrast, e.g. 'squared', 'absolute', 'power:3', 'pinball:0.3' or 'tabulated:c.csv'.",
			)


def probe_grid_option() -> Callable:
	"""
	Decorator to add the ``--probe-grid`` option to a click command.

	Without the option, a grid of :data:`~cdfsense.contrasts.DEFAULT_PROBE_SIZE` points
	spanning the data is used.
	"""

	return click.option(
			"--probe-grid",
			type=ProbeGridType(),
			default=None,
			help=f"Probe points for the rectangle property check, as 'low:high:size' or 'x1,x2,...'. "
			f"Defaults to {DEFAULT_PROBE_SIZE} points spanning the data.",
			)


def seed_option(default: Optional[int] = 42) -> Callable:
	"""
	Decorator to add the ``-s / --seed`` option to a click command.

	:param default: The default master seed. :py:obj:`None` defers to the model file.
	"""

	return click.option(
			"-s",
			"--seed",
			type=click.IntRange(min=0),
			default=default,
			show_default=default is not None,
			help="The master seed.",
			)


def replicates_option(default: int = DEFAULT_REPLICATES) -> Callable:
	"""
	Decorator to add the ``-r / --replicates`` option to a click command.

	:param default:
	"""

	return click.option(
			"-r",
			"--replicates",
			type=click.IntRange(min=1),
			default=default,
			show_default=True,
			help="The number of independent replicates of the estimator.",
			)


def jobs_option() -> Callable:
	"""
	Decorator to add the ``-j / --jobs`` option to a click command.
	"""

	return click.option(
			"-j",
			"--jobs",
			type=click.INT,
			default=None,
			help="The number of threads used for replicates. Results do not depend on it.",
			)
