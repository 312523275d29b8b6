"""Block statistics: admissibility, expected and observed counts, reports.

Expected counts are exact rationals throughout; floats only appear in the
final ratio columns of reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .digitseq import DigitSequence
from .errors import ArgumentError
from .kernels import match_mask
from .ladder import PartitionIndex
from .sequences import BasicSequence, check_position


def _as_block(block) -> tuple:
    b = tuple(int(d) for d in block)
    if not b:
        raise ArgumentError("blocks must have at least one digit")
    if any(d < 0 for d in b):
        raise ArgumentError(f"block digits must be non-negative, got {b}")
    return b


def _digit_buffer(E, upto: int) -> np.ndarray:
    if isinstance(E, DigitSequence):
        return E.prefix(upto)
    arr = np.asarray(E, dtype=np.int64)
    if arr.size < upto:
        raise ArgumentError(f"need digits through position {upto}, have {arr.size}")
    return arr


def admissible(seq: BasicSequence, block, i: int) -> int:
    """1 if `block` can occur starting at position i, else 0."""
    b = _as_block(block)
    check_position(i)
    for j, d in enumerate(b):
        if d >= seq.base_at(i + j):
            return 0
    return 1


def _admissible_mask_and_products(seq: BasicSequence, block: tuple, n: int):
    """Vectorized admissibility mask over start positions 1..n plus the
    window products q_i * ... * q_{i+k-1}."""
    k = len(block)
    bases = seq.bases(1, n + k - 1)
    mask = np.ones(n, dtype=bool)
    prods = np.ones(n, dtype=np.int64)
    for j, d in enumerate(block):
        span = bases[j : j + n]
        mask &= span > d
        prods *= span
    return mask, prods


def expected_count(seq: BasicSequence, block, n: int) -> Fraction:
    """Expected occurrences of `block` among start positions 1..n under
    independent uniform digits: sum of 1/(q_i...q_{i+k-1}) over admissible i."""
    b = _as_block(block)
    check_position(n)
    mask, prods = _admissible_mask_and_products(seq, b, n)
    values, counts = np.unique(prods[mask], return_counts=True)
    total = Fraction(0)
    for v, c in zip(values, counts):
        total += Fraction(int(c), int(v))
    return total


def count_block(E, block, n: int) -> int:
    """Occurrences of `block` with start position <= n in the digit stream.

    An occurrence is counted at its start even if it extends past n, so the
    buffer must reach position n + len(block) - 1.
    """
    b = _as_block(block)
    check_position(n)
    digits = _digit_buffer(E, n + len(b) - 1)
    return int(match_mask(digits, b, n).sum())


def count_block_checkpoints(E, block, checkpoints) -> list[int]:
    """count_block at each checkpoint, sharing one scan."""
    b = _as_block(block)
    cps = [int(n) for n in checkpoints]
    if any(n < 1 for n in cps):
        raise ArgumentError(f"checkpoints must be >= 1, got {cps}")
    top = max(cps)
    digits = _digit_buffer(E, top + len(b) - 1)
    positions = np.flatnonzero(match_mask(digits, b, top)) + 1
    return [int(np.searchsorted(positions, n, side="right")) for n in cps]


def window_end_positions(index: PartitionIndex, n: int) -> np.ndarray:
    """For each start position 1..n, the last position of its window."""
    ends = np.empty(n, dtype=np.int64)
    r = 1
    while True:
        lo, hi = index.region(r)
        if lo >= n:
            break
        if hi > lo:
            span_top = min(hi, n)
            pos = np.arange(lo + 1, span_top + 1, dtype=np.int64)
            ends[lo:span_top] = lo + ((pos - lo - 1) // r + 1) * r
        r += 1
    return ends


def starred_variants(
    seq: BasicSequence, E, block, n: int, *, index: PartitionIndex | None = None
) -> tuple[Fraction, int]:
    """Expected and observed counts restricted to occurrences that fit
    entirely inside a single base window."""
    b = _as_block(block)
    check_position(n)
    k = len(b)
    pi = index or PartitionIndex(seq)
    mask, prods = _admissible_mask_and_products(seq, b, n)
    inside = np.arange(1, n + 1, dtype=np.int64) + (k - 1) <= window_end_positions(pi, n)
    starred_mask = mask & inside
    values, counts = np.unique(prods[starred_mask], return_counts=True)
    q_star = Fraction(0)
    for v, c in zip(values, counts):
        q_star += Fraction(int(c), int(v))
    digits = _digit_buffer(E, n + k - 1)
    n_star = int((match_mask(digits, b, n) & inside).sum())
    return q_star, n_star


@dataclass
class BlockCountRow:
    block: tuple
    n: int
    observed: int
    expected: Fraction
    ratio: float | None

    def as_csv(self) -> list:
        return [
            format_block(self.block),
            self.n,
            self.observed,
            self.expected.numerator,
            self.expected.denominator,
            "" if self.ratio is None else repr(self.ratio),
        ]


@dataclass
class RatioRow:
    block_a: tuple
    block_b: tuple
    n: int
    value: float | None


@dataclass
class ConvergenceReport:
    """Observed/expected block counts plus equal-length count ratios."""

    rows: list[BlockCountRow] = field(default_factory=list)
    pair_rows: list[RatioRow] = field(default_factory=list)
    expected_growth: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "rows": [
                {
                    "block": list(r.block),
                    "n": r.n,
                    "observed": r.observed,
                    "expected": f"{r.expected.numerator}/{r.expected.denominator}",
                    "ratio": r.ratio,
                }
                for r in self.rows
            ],
            "pairs": [
                {
                    "block_a": list(p.block_a),
                    "block_b": list(p.block_b),
                    "n": p.n,
                    "ratio": p.value,
                }
                for p in self.pair_rows
            ],
            "expected_growth": {
                format_block(b): [f"{v.numerator}/{v.denominator}" for v in vals]
                for b, vals in self.expected_growth.items()
            },
        }


def format_block(block) -> str:
    return "-".join(str(d) for d in block)


def parse_block(text: str) -> tuple:
    try:
        return tuple(int(d) for d in text.replace("-", ",").split(",") if d != "")
    except ValueError as exc:
        raise ArgumentError(f"bad block {text!r}") from exc


def normality_report(
    seq: BasicSequence, E, blocks, checkpoints
) -> ConvergenceReport:
    """Observed/expected ratios per block and checkpoint, plus the matrix of
    observed-count ratios for same-length block pairs.

    A zero expected count yields a None ratio rather than an error. Each
    block also gets its expected-count values recorded so readers can judge
    whether the count is still growing at the final checkpoint.
    """
    blocks = [_as_block(b) for b in blocks]
    cps = sorted({int(n) for n in checkpoints})
    if not cps or cps[0] < 1:
        raise ArgumentError(f"checkpoints must be >= 1, got {checkpoints}")
    report = ConvergenceReport()
    observed: dict[tuple, list[int]] = {}
    for b in blocks:
        counts = count_block_checkpoints(E, b, cps)
        observed[b] = counts
        expected = [expected_count(seq, b, n) for n in cps]
        report.expected_growth[b] = expected
        for n, obs, exp in zip(cps, counts, expected):
            ratio = None if exp == 0 else obs / float(exp)
            report.rows.append(BlockCountRow(b, n, obs, exp, ratio))
    for i, a in enumerate(blocks):
        for b in blocks[i + 1 :]:
            if len(a) != len(b):
                continue
            for ci, n in enumerate(cps):
                den = observed[b][ci]
                value = None if den == 0 else observed[a][ci] / den
                report.pair_rows.append(RatioRow(a, b, n, value))
    return report


@dataclass
class GrowthRow:
    n: int
    value: float
    nondecreasing_so_far: bool


@dataclass
class GrowthDiagnostic:
    """Desk-scale trend check of expected-count growth against n*log q(n)/log n.

    The comparison is heuristic: an increasing trend over finitely many
    checkpoints is evidence, not proof, that the growth hypothesis holds.
    """

    block: tuple
    rows: list[GrowthRow]
    label: str = "heuristic"

    @property
    def increasing(self) -> bool:
        values = [r.value for r in self.rows]
        return all(b > a for a, b in zip(values, values[1:]))


def growth_diagnostic(seq: BasicSequence, block, checkpoints) -> GrowthDiagnostic:
    """Evaluate expected_count(n) / (n * log q(n) / log n) along a checkpoint
    ladder. n = 1 is skipped (log 1 = 0)."""
    b = _as_block(block)
    cps = sorted({int(n) for n in checkpoints})
    if any(n < 1 for n in cps):
        raise ArgumentError(f"checkpoints must be >= 1, got {checkpoints}")
    rows: list[GrowthRow] = []
    best = -math.inf
    for n in cps:
        if n == 1:
            continue
        qn = seq.running_max(n)
        scale = n * math.log(qn) / math.log(n)
        value = float(expected_count(seq, b, n)) / scale
        rows.append(GrowthRow(n, value, value > best))
        best = max(best, value)
    return GrowthDiagnostic(b, rows)
