"""Lazily materialized digit sequences declared against a basic sequence."""

from __future__ import annotations

import logging
from typing import Callable

import numpy as np

from .errors import ArgumentError, InsufficientDigitsError
from .generator import generate_digits
from .ladder import PartitionIndex
from .sequences import BasicSequence, check_position

log = logging.getLogger("cantornormal")


class DigitSequence:
    """A digit stream w.r.t. a basic sequence, materialized on demand.

    The source callable maps a requested length to the array of that many
    leading digits; results are cached and only ever grow. `description`
    is a JSON-serializable record of how the stream was built, so transform
    graphs can be persisted and replayed.
    """

    def __init__(
        self,
        seq: BasicSequence,
        source: Callable[[int], np.ndarray],
        description: dict,
        *,
        validate: bool = True,
    ):
        self.seq = seq
        self._source = source
        self.description = description
        self._validate = validate
        self._buf = np.empty(0, dtype=np.int64)

    def prefix(self, n: int) -> np.ndarray:
        """Digits at positions 1..n (a read-only view)."""
        if n < 0:
            raise ArgumentError(f"prefix length must be >= 0, got {n}")
        if n > self._buf.size:
            grow = max(n, 2 * self._buf.size, 64)
            try:
                fresh = np.asarray(self._source(grow), dtype=np.int64)
            except InsufficientDigitsError:
                fresh = np.asarray(self._source(n), dtype=np.int64)
            if fresh.size < n:
                raise InsufficientDigitsError(
                    f"digit source provided {fresh.size} digits, need {n}"
                )
            if self._validate and fresh.size:
                bases = self.seq.bases(1, fresh.size)
                bad = np.flatnonzero((fresh < 0) | (fresh >= bases))
                if bad.size:
                    p = int(bad[0]) + 1
                    raise ArgumentError(
                        f"digit {int(fresh[bad[0]])} at position {p} outside "
                        f"0..{int(bases[bad[0]]) - 1}"
                    )
            self._buf = fresh
        view = self._buf[:n]
        view.flags.writeable = False
        return view

    def digit(self, n: int) -> int:
        check_position(n)
        return int(self.prefix(n)[n - 1])

    def describe(self) -> dict:
        return self.description


def constructed_digits(seq: BasicSequence, *, index: PartitionIndex | None = None) -> DigitSequence:
    """The cycling construction's digit stream over `seq`."""
    pi = index or PartitionIndex(seq)
    return DigitSequence(
        seq,
        lambda n: generate_digits(seq, n, index=pi),
        {"op": "construct", "seq": seq.to_json()},
        validate=False,  # the construction cannot emit an out-of-range digit
    )


def finite_digits(seq: BasicSequence, digits) -> DigitSequence:
    """A finite, explicit digit list; reading past the end is an error."""
    arr = np.asarray(list(digits), dtype=np.int64)

    def source(n: int) -> np.ndarray:
        if n > arr.size:
            raise InsufficientDigitsError(
                f"finite digit list has {arr.size} digits, need {n}"
            )
        return arr

    return DigitSequence(seq, source, {"op": "literal", "seq": seq.to_json(),
                                       "digits": [int(d) for d in arr]})
