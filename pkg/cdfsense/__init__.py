#!/usr/bin/env python3
#
#  __init__.py
"""
Fréchet features, Wasserstein costs and sensitivity indices for random distribution functions.
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
from typing import Optional

__author__: str = "The cdfsense developers"
__copyright__: str = "2024 The cdfsense developers"
__license__: str = "MIT License"
__version__: str = "0.1.0"
__email__: str = "cdfsense@users.noreply.github.com"

__all__ = [
		"CdfSenseError",
		"DomainError",
		"GridError",
		"GridMismatchError",
		"InvalidCurveError",
		"NonCoerciveContrastError",
		"DegenerateError",
		"DesignError",
		"OracleSizeError",
		"ModelConstraintError",
		"ExpressionError",
		"ConfigError",
		"PropertyWarning",
		]


class CdfSenseError(Exception):
	"""
	Base class for errors raised by ``cdfsense``.
	"""


class DomainError(CdfSenseError, ValueError):
	"""
	Raised when an argument lies outside the domain of an operation,
	such as a probability level outside ``(0, 1)`` or a non-finite sample.
	"""  # noqa: D400


class GridError(CdfSenseError, ValueError):
	"""
	Raised when a probability grid is invalid.
	"""


class GridMismatchError(GridError):
	"""
	Raised when curves taking part in one computation live on different probability grids.
	"""

	def __init__(self):
		super().__init__("Curves must share the same probability grid.")


class InvalidCurveError(CdfSenseError, ValueError):
	"""
	Raised when quantile values are not nondecreasing, or are not finite.

	:param message:
	:param index: The first offending position.
	"""

	def __init__(self, message: str, index: int):
		super().__init__(message)

		#: The first offending position.
		self.index: int = index


class NonCoerciveContrastError(CdfSenseError, ValueError):
	"""
	Raised when a feature is requested for a contrast whose objective is unbounded below.

	:param name: The textual name of the contrast.
	"""

	def __init__(self, name: str):
		super().__init__(f"The contrast {name!r} is non-coercive; it has no minimizing feature.")


class DegenerateError(CdfSenseError, ValueError):
	"""
	Raised when an ensemble or an output sample carries no variability.
	"""


class DesignError(CdfSenseError, ValueError):
	"""
	Raised when an experimental design does not have the required shape.
	"""


class OracleSizeError(CdfSenseError, ValueError):
	"""
	Raised when a discrete instance is too large for the exact coupling oracle.
	"""


class ModelConstraintError(CdfSenseError, ValueError):
	"""
	Raised when a location-scale model produces a nonpositive scale.

	:param message:
	:param row: The offending input row, if known.
	"""

	def __init__(self, message: str, row: Optional[int] = None):
		super().__init__(message)

		#: The offending input row.
		self.row: Optional[int] = row


class ExpressionError(CdfSenseError, ValueError):
	"""
	Raised when a model expression cannot be parsed or uses a forbidden construct.
	"""


class ConfigError(CdfSenseError, ValueError):
	"""
	Raised when a model file is malformed.
	"""


class PropertyWarning(UserWarning):
	"""
	Warning emitted when a contrast fails the rectangle (measure) property on the probed range.

	The quantile-coupling integral is still computed, but it is no longer guaranteed
	to be the minimal cost over all couplings.
	"""
