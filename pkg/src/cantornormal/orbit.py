"""Expansion orbits and exact discrepancy of finite samples.

The orbit of x under repeated base scaling is never evaluated exactly from
an infinite digit stream; every orbit point is a truncated tail sum carrying
a certified error bound 1/(q_{m+1}...q_{m+depth}) <= 2**-depth. The default
truncation depth at index m is floor(sqrt(r(m))) where r(m) is the window
length at position m, which is the depth whose error bound still vanishes
along the whole orbit; a fixed deeper depth can be requested instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

from .digitseq import DigitSequence
from .errors import ArgumentError
from .kernels import orbit_numbers
from .ladder import PartitionIndex
from .sequences import BasicSequence

__all__ = [
    "OrbitPoint",
    "truncation_depth",
    "orbit_truncated",
    "orbit_values",
    "orbit_exact_finite",
    "star_discrepancy",
    "extreme_discrepancy",
    "orbit_discrepancy_report",
    "DiscrepancyReport",
]


@dataclass(frozen=True)
class OrbitPoint:
    """A truncated orbit value with its certified truncation error."""

    index: int
    value: Fraction
    eps: Fraction


def truncation_depth(index: PartitionIndex, m: int) -> int:
    """Default depth floor(sqrt(r(m))); index 0 borrows the depth at 1."""
    if m < 0:
        raise ArgumentError(f"orbit index must be >= 0, got {m}")
    return math.isqrt(index.region_of(max(m, 1)))


def orbit_truncated(
    seq: BasicSequence,
    E,
    m: int,
    *,
    depth: int | None = None,
    index: PartitionIndex | None = None,
) -> OrbitPoint:
    """Exact truncated orbit value at index m with its error bound."""
    if m < 0:
        raise ArgumentError(f"orbit index must be >= 0, got {m}")
    pi = index or PartitionIndex(seq)
    d = truncation_depth(pi, m) if depth is None else int(depth)
    if d < 1:
        raise ArgumentError(f"truncation depth must be >= 1, got {d}")
    digits = E.prefix(m + d) if isinstance(E, DigitSequence) else np.asarray(E)
    if len(digits) < m + d:
        raise ArgumentError(f"need digits through position {m + d}, have {len(digits)}")
    num, den = 0, 1
    for i in range(1, d + 1):
        q = seq.base_at(m + i)
        num = num * q + int(digits[m + i - 1])
        den *= q
    return OrbitPoint(m, Fraction(num, den), Fraction(1, den))


def orbit_values(
    seq: BasicSequence,
    E,
    count: int,
    *,
    depth: int | None = None,
    index: PartitionIndex | None = None,
    use_numba: bool | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Float orbit values and error bounds for indices 0..count-1 (bulk)."""
    if count < 0:
        raise ArgumentError(f"orbit count must be >= 0, got {count}")
    if count == 0:
        return np.empty(0), np.empty(0)
    pi = index or PartitionIndex(seq)
    if depth is None:
        boundaries = np.asarray(pi.boundaries_through(count), dtype=np.int64)
        # region lookup for every m at once; m = 0 shares region 1's depth
        r_per_m = np.searchsorted(boundaries[1:], np.arange(count), side="left") + 1
        depths = np.sqrt(r_per_m.astype(np.float64)).astype(np.int64)
    else:
        if depth < 1:
            raise ArgumentError(f"truncation depth must be >= 1, got {depth}")
        depths = np.full(count, int(depth), dtype=np.int64)
    need = int((np.arange(count) + depths).max())
    digits = E.prefix(need) if isinstance(E, DigitSequence) else np.asarray(E, dtype=np.int64)
    bases = seq.bases(1, need)
    num, den = orbit_numbers(digits, bases, depths, use_numba=use_numba)
    return num / den, 1.0 / den


def orbit_exact_finite(seq: BasicSequence, x, m: int) -> Fraction:
    """Exact orbit value at index m for a number with finitely many digits.

    `x` is either a rational in [0, 1) or a finite digit prefix (all later
    digits zero)."""
    if m < 0:
        raise ArgumentError(f"orbit index must be >= 0, got {m}")
    if isinstance(x, Rational):
        value = Fraction(x)
    else:
        value = Fraction(0)
        den = 1
        for i, d in enumerate(x, start=1):
            q = seq.base_at(i)
            den *= q
            if not 0 <= int(d) < q:
                raise ArgumentError(f"digit {d} at position {i} outside 0..{q - 1}")
            value += Fraction(int(d), den)
    for i in range(1, m + 1):
        value *= seq.base_at(i)
    return value % 1


def _exact_values(values) -> list[Fraction] | None:
    if isinstance(values, np.ndarray):
        return None
    vals = list(values)
    if vals and all(isinstance(v, Rational) and not isinstance(v, float) for v in vals):
        return [Fraction(v) for v in vals]
    return None


def star_discrepancy(values):
    """Exact star discrepancy via the sorted-points formula.

    Rational inputs give an exact Fraction; float inputs use numpy.
    """
    exact = _exact_values(values)
    if exact is not None:
        n = len(exact)
        _check_unit(exact)
        xs = sorted(exact)
        return max(
            max(Fraction(i, n) - x, x - Fraction(i - 1, n))
            for i, x in enumerate(xs, start=1)
        )
    xs = np.sort(np.asarray(values, dtype=np.float64))
    n = xs.size
    if n < 1:
        raise ArgumentError("discrepancy needs at least one sample")
    _check_unit(xs)
    grid = np.arange(1, n + 1, dtype=np.float64) / n
    return float(max((grid - xs).max(), (xs - grid + 1.0 / n).max()))


def extreme_discrepancy(values):
    """Exact two-sided discrepancy: 1/N + max_i(i/N - x_i) - min_i(i/N - x_i)
    over the sorted sample. Equals the supremum over all half-open intervals."""
    exact = _exact_values(values)
    if exact is not None:
        n = len(exact)
        _check_unit(exact)
        xs = sorted(exact)
        diffs = [Fraction(i, n) - x for i, x in enumerate(xs, start=1)]
        return Fraction(1, n) + max(diffs) - min(diffs)
    xs = np.sort(np.asarray(values, dtype=np.float64))
    n = xs.size
    if n < 1:
        raise ArgumentError("discrepancy needs at least one sample")
    _check_unit(xs)
    diffs = np.arange(1, n + 1, dtype=np.float64) / n - xs
    return float(1.0 / n + diffs.max() - diffs.min())


def _check_unit(values) -> None:
    if isinstance(values, np.ndarray):
        if values.size and (values.min() < 0 or values.max() >= 1):
            raise ArgumentError("samples must lie in [0, 1)")
        return
    if not values:
        raise ArgumentError("discrepancy needs at least one sample")
    if any(v < 0 or v >= 1 for v in values):
        raise ArgumentError("samples must lie in [0, 1)")


@dataclass
class DiscrepancyRow:
    n: int
    d_star: float
    d_extreme: float
    max_eps: float

    def as_csv(self) -> list:
        return [self.n, repr(self.d_star), repr(self.d_extreme), repr(self.max_eps)]


@dataclass
class DiscrepancyReport:
    depth: str
    rows: list[DiscrepancyRow]

    def to_json(self) -> dict:
        return {
            "depth": self.depth,
            "rows": [
                {"n": r.n, "d_star": r.d_star, "d_extreme": r.d_extreme, "max_eps": r.max_eps}
                for r in self.rows
            ],
        }


def orbit_discrepancy_report(
    seq: BasicSequence,
    E,
    checkpoints,
    *,
    depth: int | None = None,
    index: PartitionIndex | None = None,
) -> DiscrepancyReport:
    """Star/extreme discrepancy of the truncated orbit sample (x_m) for
    m < N at each checkpoint N, plus the largest certified truncation error."""
    cps = sorted({int(n) for n in checkpoints})
    if not cps or cps[0] < 1:
        raise ArgumentError(f"checkpoints must be >= 1, got {checkpoints}")
    pi = index or PartitionIndex(seq)
    values, eps = orbit_values(seq, E, max(cps), depth=depth, index=pi)
    rows = [
        DiscrepancyRow(
            n,
            star_discrepancy(values[:n]),
            extreme_discrepancy(values[:n]),
            float(eps[:n].max()),
        )
        for n in cps
    ]
    return DiscrepancyReport("default" if depth is None else f"fixed:{depth}", rows)
