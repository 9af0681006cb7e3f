#!/usr/bin/env python3
#
#  report.py
"""
Human-readable formatting of checks and results.
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
from typing import Any, Dict, Iterable, NamedTuple

# 3rd party
from consolekit.terminal_colours import Fore, strip_ansi
from domdf_python_tools.doctools import prettify_docstrings
from domdf_python_tools.stringlist import StringList

__all__ = ["Check", "format_checks", "format_property_report"]

passed_text = Fore.GREEN("PASS")
failed_text = Fore.RED("FAIL")


@prettify_docstrings
class Check(NamedTuple):
	"""
	One line of a pass/fail table.
	"""

	#: What was checked.
	name: str

	#: Whether the check passed.
	passed: bool

	#: The measured value.
	value: float

	#: The acceptance criterion, as text.
	criterion: str

	def to_dict(self) -> Dict[str, Any]:
		"""
		Returns a JSON-serialisable dictionary of the check.
		"""

		return {
				"name": self.name,
				"passed": self.passed,
				"value": self.value,
				"criterion": self.criterion,
				}


def format_checks(checks: Iterable[Check], colour: bool = True) -> str:
	"""
	Return a pass/fail table, one check per line, followed by a summary line.

	:param checks:
	:param colour: Show coloured output.
	"""

	checks = list(checks)
	width = max((len(check.name) for check in checks), default=0)

	buf = StringList()

	for check in checks:
		status = passed_text if check.passed else failed_text
		buf.append(f"{status}  {check.name.ljust(width)}  {check.value:.6g}  ({check.criterion})")

	failures = sum(not check.passed for check in checks)
	buf.blankline(ensure_single=True)

	if failures:
		buf.append(Fore.RED(f"{failures} of {len(checks)} checks failed."))
	else:
		buf.append(Fore.GREEN(f"All {len(checks)} checks passed."))

	if colour:
		return str(buf)
	else:
		return strip_ansi(str(buf))


def format_property_report(name: str, passes: bool, worst_violation: float, witness: Iterable[float], colour: bool = True) -> str:
	"""
	Return a one-line summary of a rectangle property check.

	:param name: The textual name of the contrast.
	:param passes:
	:param worst_violation:
	:param witness: The quadruple ``(x, x', y, y')``.
	:param colour: Show coloured output.
	"""

	x, x_prime, y, y_prime = witness
	status = passed_text if passes else failed_text
	line = (
			f"{status}  {name}: worst increment {worst_violation:.6g} "
			f"at x={x:g}, x'={x_prime:g}, y={y:g}, y'={y_prime:g}"
			)

	return line if colour else strip_ansi(line)
