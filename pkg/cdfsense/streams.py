#!/usr/bin/env python3
#
#  streams.py
"""
Keyed random number streams.

Every stream is derived from the master seed and a key ``(input_id, replicate, outer_index)``,
so a computation draws the same numbers however its work is scheduled.
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
from typing import List

# 3rd party
import numpy

# this package
from cdfsense import DomainError

__all__ = ["check_seed", "stream", "replicate_seeds"]


def check_seed(seed: int) -> int:
	"""
	Validate a master seed.

	:param seed: A nonnegative integer.

	:raises DomainError: If the seed is negative or not an integer.
	"""

	if isinstance(seed, bool) or not isinstance(seed, (int, numpy.integer)) or seed < 0:
		raise DomainError(f"Seeds must be nonnegative integers (got {seed!r}).")

	return int(seed)


def stream(seed: int, input_id: int = 0, replicate: int = 0, outer_index: int = 0) -> numpy.random.Generator:
	"""
	Return the random number generator for one key.

	Distinct keys give statistically independent streams.

	:param seed: The master seed.
	:param input_id: The input being studied, or ``0``.
	:param replicate: The replicate number.
	:param outer_index: The outer draw within the replicate.
	"""

	key = (int(input_id), int(replicate), int(outer_index))
	if min(key) < 0:
		raise DomainError(f"Stream keys must be nonnegative (got {key!r}).")

	return numpy.random.default_rng(numpy.random.SeedSequence(entropy=check_seed(seed), spawn_key=key))


def replicate_seeds(seed: int, replicates: int) -> List[int]:
	"""
	Derive one master seed per replicate.

	:param seed:
	:param replicates:
	"""

	if replicates < 1:
		raise DomainError("At least one replicate is required.")

	state = numpy.random.SeedSequence(check_seed(seed)).generate_state(replicates, dtype=numpy.uint32)
	return [int(s) for s in state]
