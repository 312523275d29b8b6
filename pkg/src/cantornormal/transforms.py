"""Digit transforms with atypical normality behaviour.

The clip map rewrites a digit stream declared against one basic sequence as
a formal stream against another by clamping each digit below the target
base. Outputs are treated as formal digit sequences: a clipped stream may
end in a run of maximal digits without being re-expanded, since every
downstream statistic works on digits rather than on re-derived values.

On top of the clip map sit three constructions:

* a stream that keeps its block statistics but whose orbit collapses to 0,
* a stream with balanced block ratios but skewed absolute frequencies,
* a patched uniform stream whose rare donor segments carry the block
  statistics while the bulk follows a uniformly distributed driver.

The third needs the threshold schedule (log-mass, count, level) computed
here with exact integer/rational arithmetic so minimality certificates are
checkable.
"""

from __future__ import annotations

import logging
import math
from fractions import Fraction
from itertools import product as iter_product

import numpy as np

from .digitseq import DigitSequence, constructed_digits
from .errors import ArgumentError, ScanBoundError
from .sequences import (
    BasicSequence,
    ConstantSequence,
    IndexLogSequence,
    PeriodicSequence,
    PointwiseSequence,
    PresetSequence,
    TableSequence,
    ceil_log,
    check_position,
)
from .stats import admissible, expected_count

log = logging.getLogger("cantornormal")

DEFAULT_SCAN_LIMIT = 10**6


class ClampCounter:
    """Counts digits that had to be clamped into range; zero in a clean run."""

    def __init__(self):
        self.events = 0

    def add(self, where: str) -> None:
        self.events += 1
        log.warning("clamped digit at %s", where)


# ---------------------------------------------------------------------------
# clip map and composition
# ---------------------------------------------------------------------------

def clip_digits(x: DigitSequence, target: BasicSequence) -> DigitSequence:
    """Clip each digit of x below the target base: digit' = min(digit, q-1)."""

    def source(n: int) -> np.ndarray:
        return np.minimum(x.prefix(n), target.bases(1, n) - 1)

    return DigitSequence(
        target,
        source,
        {"op": "clip", "seq": target.to_json(), "of": x.describe()},
        validate=False,
    )


def clip_chain(seqs, x: DigitSequence) -> DigitSequence:
    """Left-to-right composition of clip maps along a list of sequences."""
    seqs = list(seqs)
    if len(seqs) < 2:
        raise ArgumentError("a clip chain needs at least two sequences")
    if x.seq != seqs[0]:
        raise ArgumentError("digit stream is not declared against the first sequence")
    out = x
    for target in seqs[1:]:
        out = clip_digits(out, target)
    return out


# ---------------------------------------------------------------------------
# uniformly distributed drivers
# ---------------------------------------------------------------------------

class UDSource:
    """Deterministic uniformly-distributed sequences in [0, 1), exact values.

    vdc    bit-reversed radical inverse in base 2
    farey  reduced fractions ordered by denominator, then numerator
    """

    KINDS = ("vdc", "farey")

    def __init__(self, kind: str = "vdc"):
        if kind not in self.KINDS:
            raise ArgumentError(f"unknown uniform driver {kind!r}; expected {self.KINDS}")
        self.kind = kind
        self._farey: list[Fraction] = [Fraction(0)]

    def value(self, n: int) -> Fraction:
        check_position(n)
        if self.kind == "vdc":
            bits = n.bit_length()
            rev = int(bin(n)[2:][::-1], 2)
            return Fraction(rev, 1 << bits)
        while len(self._farey) < n:
            # the tail entry (d-1)/d is always reduced, so its denominator
            # tracks the last fully emitted batch
            d = self._farey[-1].denominator + 1
            self._farey.extend(
                Fraction(a, d) for a in range(1, d) if math.gcd(a, d) == 1
            )
        return self._farey[n - 1]

    def to_json(self) -> dict:
        return {"kind": self.kind}


def ud_source(kind: str, n: int) -> Fraction:
    """The n-th term of the requested uniformly distributed driver."""
    return UDSource(kind).value(n)


# ---------------------------------------------------------------------------
# witnesses built from the clip map
# ---------------------------------------------------------------------------

def _require_infinite(seq: BasicSequence, what: str) -> None:
    if not seq.infinite_in_limit:
        raise ArgumentError(
            f"{what} needs a sequence with unbounded bases; "
            f"{seq.spec_string()} is bounded"
        )


def build_orbit_sink(
    Q: BasicSequence, *, log_base: str = "e", variant: str = "composed"
) -> DigitSequence:
    """A stream whose block counts match the construction but whose orbit
    sinks to 0: the construction's digits clipped through the slow log-of
    companion sequence and back.

    variant "composed" applies the two clip maps literally, which lands on
    min(digit, p_n - 1). variant "digit-max" exposes the alternative rule
    max(digit, p_n) for side-by-side comparison; it can exceed the base at
    small positions and is clamped (with a logged diagnostic) there.
    """
    _require_infinite(Q, "the orbit-sink construction")
    P = PointwiseSequence(Q, "log-of", log_base)
    x = constructed_digits(Q)
    if variant == "composed":
        return clip_digits(clip_digits(x, P), Q)
    if variant == "digit-max":
        clamps = ClampCounter()

        def source(n: int) -> np.ndarray:
            raw = np.maximum(x.prefix(n), P.bases(1, n))
            limit = Q.bases(1, n) - 1
            over = raw > limit
            for pos in np.flatnonzero(over):
                clamps.add(f"position {int(pos) + 1}")
            return np.minimum(raw, limit)

        ds = DigitSequence(
            Q,
            source,
            {"op": "digit-max", "seq": Q.to_json(), "log_base": log_base},
            validate=False,
        )
        ds.clamps = clamps
        return ds
    raise ArgumentError(f"unknown variant {variant!r}")


def build_half_range(Q: BasicSequence, *, log_base: str = "e") -> DigitSequence:
    """A stream with balanced equal-length block ratios but digits confined
    to the lower half of each base range: the construction run over the
    half-of companion sequence, clipped back against Q."""
    _require_infinite(Q, "the half-range construction")
    P = PointwiseSequence(Q, "half-of", log_base)
    return clip_digits(constructed_digits(P), Q)


# ---------------------------------------------------------------------------
# divergence modulus
# ---------------------------------------------------------------------------

class ModulusOfDivergence:
    """For a threshold n, the least position t with log(q_j) > n for all
    j >= t. Derivable in closed form for the nondecreasing presets; other
    sequences must supply their own table."""

    def __init__(self, seq: BasicSequence):
        if not (seq.infinite_in_limit and seq.nondecreasing):
            raise ArgumentError(
                "a divergence modulus can only be derived for nondecreasing "
                "unbounded sequences; supply one explicitly"
            )
        self.seq = seq

    def __call__(self, n: int) -> int:
        if n < 0:
            raise ArgumentError(f"divergence threshold must be >= 0, got {n}")
        if n > 700:
            raise ScanBoundError("divergence modulus capped at threshold 700")
        c = math.floor(math.exp(n)) + 1  # least integer base with log(base) > n
        t = _first_position_with_base_at_least(self.seq, c)
        _verify_modulus(self.seq, n, t)
        return t


class ModulusTable:
    """Explicit (threshold, position) pairs for user-supplied sequences."""

    def __init__(self, seq: BasicSequence, entries: dict[int, int]):
        self.seq = seq
        self.entries = {int(k): int(v) for k, v in entries.items()}

    def __call__(self, n: int) -> int:
        if n not in self.entries:
            raise ArgumentError(f"divergence modulus table has no entry for threshold {n}")
        t = self.entries[n]
        _verify_modulus(self.seq, n, t)
        return t


def _verify_modulus(seq: BasicSequence, n: int, t: int) -> None:
    # spot check: the claim must hold at t and (for minimality) fail before it
    if math.log(seq.base_at(t)) <= n:
        raise ArgumentError(
            f"divergence modulus {t} inconsistent: log base at {t} is not above {n}"
        )
    if t > 1 and seq.nondecreasing and math.log(seq.base_at(t - 1)) > n:
        raise ArgumentError(f"divergence modulus {t} is not minimal for threshold {n}")


_POSITION_BIT_CAP = 10**7  # refuse positions that need more bits than this


def _first_position_with_base_at_least(seq: BasicSequence, c: int) -> int:
    """Least position t with base_at(t) >= c, for nondecreasing sequences."""
    if seq.base_at(1) >= c:
        return 1
    if isinstance(seq, PresetSequence):
        # floor(log2(t+4)) >= c at t = 2**c - 4; iterate once more for the
        # doubly-logarithmic preset
        shift = c if seq.name == "log" else (1 << c) if c < 64 else None
        if shift is None or shift > _POSITION_BIT_CAP:
            raise ScanBoundError(
                f"position where {seq.spec_string()} reaches base {c} is not "
                "representable at desk scale"
            )
        return _nudge_to_minimal(seq, c, (1 << shift) - 4)
    if isinstance(seq, IndexLogSequence):
        if seq.log_base == "2":
            if c - 2 > _POSITION_BIT_CAP:
                raise ScanBoundError("position search exceeds the bit cap")
            t = 1 << (c - 2)
        else:
            if c - 2 > 700:
                raise ScanBoundError("position search exceeds the float range")
            base = math.e if seq.log_base == "e" else 10.0
            t = max(1, math.ceil(base ** (c - 2)))
        return _nudge_to_minimal(seq, c, t)
    if isinstance(seq, PointwiseSequence):
        if seq.op == "half-of":
            return _first_position_with_base_at_least(seq.of, 2 * c)
        if seq.log_base == "2":
            if c > _POSITION_BIT_CAP:
                raise ScanBoundError("position search exceeds the bit cap")
            inner = 1 << c
        else:
            if c > 700:
                raise ScanBoundError("position search exceeds the float range")
            base = math.e if seq.log_base == "e" else 10.0
            inner = math.ceil(base**c)
        return _first_position_with_base_at_least(seq.of, inner)
    raise ArgumentError(f"no closed-form position search for {seq.spec_string()}")


def _nudge_to_minimal(seq: BasicSequence, c: int, t: int) -> int:
    t = max(t, 1)
    while t > 1 and seq.base_at(t - 1) >= c:
        t -= 1
    while seq.base_at(t) < c:
        t += 1
    return t


# ---------------------------------------------------------------------------
# the threshold schedule and the patched uniform stream
# ---------------------------------------------------------------------------

def _eventual_period(seq: BasicSequence) -> tuple[int, int] | None:
    """(offset, period) from which admissibility repeats, for bounded kinds."""
    if isinstance(seq, ConstantSequence):
        return 0, 1
    if isinstance(seq, PeriodicSequence):
        return 0, len(seq.pattern)
    if isinstance(seq, TableSequence):
        return len(seq.table), 1
    if isinstance(seq, PointwiseSequence):
        return _eventual_period(seq.of)
    return None


def donor_divergent(donor: BasicSequence, block) -> bool:
    """Whether the donor's expected count of `block` grows without bound."""
    if donor.infinite_in_limit:
        return True  # every fixed block is eventually admissible everywhere
    ev = _eventual_period(donor)
    if ev is None:
        raise ArgumentError(
            f"cannot decide expected-count divergence for {donor.spec_string()}"
        )
    offset, period = ev
    return any(admissible(donor, block, offset + i) for i in range(1, period + 1))


class Schedule:
    """Threshold schedule driving the patched uniform stream.

    All predicates are evaluated exactly: the log-mass comparison reduces to
    an integer product inequality, and the expected-count comparison stays
    in rationals. That makes the minimality
    certificates (predicate false at t-1, true at t) bit-for-bit checkable.
    """

    def __init__(
        self,
        target: BasicSequence,
        *,
        donor: BasicSequence | None = None,
        ud: UDSource | None = None,
        mod_div=None,
        log_base: str = "e",
        scan_limit: int = DEFAULT_SCAN_LIMIT,
    ):
        self.target = target
        self.donor = donor or IndexLogSequence(log_base)
        self.donor_digits = constructed_digits(self.donor)
        self.ud = ud or UDSource("vdc")
        # the threshold scans work for any target; only the ladder itself
        # needs a divergence modulus, so derive it lazily
        self._mod_div = mod_div
        self.log_base = log_base
        self.scan_limit = scan_limit
        self.clamps = ClampCounter()
        self._levels = [0]
        self._level_terms: dict[int, dict] = {}
        self._mass_cache: dict[int, int] = {}
        self._count_cache: dict[tuple[int, int], int] = {}

    # -- log-mass threshold ------------------------------------------------

    def _leading_mass_products(self, n: int) -> int:
        start = self.level(n - 1)
        inner = 1
        for i in range(1, n + 1):
            inner *= self.target.base_at(start + i)
        return inner**n

    def log_mass_predicate(self, n: int, j: int) -> bool:
        """Exact check that the leading log mass is below 1/n of the mass
        accumulated through position j."""
        if n < 1:
            raise ArgumentError(f"schedule step must be >= 1, got {n}")
        start = self.level(n - 1)
        if j <= start:
            return False
        den = 1
        for pos in range(start + 1, j + 1):
            den *= self.target.base_at(pos)
        return self._leading_mass_products(n) < den

    def log_mass_threshold(self, n: int) -> int:
        """Least position past which the predicate holds for good (the mass
        ratio is monotone, so the first hit is final)."""
        if n < 1:
            raise ArgumentError(f"schedule step must be >= 1, got {n}")
        if n in self._mass_cache:
            return self._mass_cache[n]
        start = self.level(n - 1)
        numerator = self._leading_mass_products(n)
        den = 1
        j = start
        while True:
            j += 1
            if j - start > self.scan_limit:
                raise ScanBoundError(
                    f"log-mass threshold for step {n} not found within "
                    f"{self.scan_limit} positions"
                )
            den *= self.target.base_at(j)
            if numerator < den:
                self._mass_cache[n] = j
                return j

    # -- expected-count threshold -------------------------------------------

    def _candidate_blocks(self, n: int, k: int) -> list[tuple]:
        limits = []
        for offset in range(k):
            limits.append(max(self.target.base_at(i + offset) for i in range(1, n + 1)))
        total = math.prod(limits)
        if total > 10**5:
            raise ArgumentError(
                f"{total} candidate blocks of length {k}; schedule steps this "
                "deep are out of desk range"
            )
        blocks = []
        for b in iter_product(*(range(c) for c in limits)):
            if expected_count(self.target, b, n) == 0:
                continue
            if donor_divergent(self.donor, b):
                blocks.append(b)
        return blocks

    def _donor_count(self, block: tuple, m: int) -> Fraction:
        return expected_count(self.donor, block, m) if m >= 1 else Fraction(0)

    def count_threshold_predicate(self, n: int, k: int, j: int) -> bool:
        """Exact check that every relevant length-k block's target expected
        count is below 1/n of the accumulated donor expected counts at j."""
        if not 1 <= k <= n:
            raise ArgumentError(f"block length {k} must lie in 1..{n}")
        for block in self._candidate_blocks(n, k):
            goal = n * expected_count(self.target, block, n)
            acc = Fraction(0)
            for i in range(1, j + 1):
                acc += self._donor_count(block, i - k + 1)
            if not goal < acc:
                return False
        return True

    def count_threshold(self, n: int, k: int) -> int:
        if not 1 <= k <= n:
            raise ArgumentError(f"block length {k} must lie in 1..{n}")
        if (n, k) in self._count_cache:
            return self._count_cache[(n, k)]
        blocks = self._candidate_blocks(n, k)
        if not blocks:
            raise ArgumentError(
                f"no admissible length-{k} block with unbounded donor counts"
            )
        goals = {b: n * expected_count(self.target, b, n) for b in blocks}
        running = {b: Fraction(0) for b in blocks}  # donor count at i-k+1
        acc = {b: Fraction(0) for b in blocks}
        pending = set(blocks)
        j = 0
        while pending:
            j += 1
            if j > self.scan_limit:
                raise ScanBoundError(
                    f"expected-count threshold for step {n}, length {k} not "
                    f"found within {self.scan_limit} positions"
                )
            m = j - k + 1
            if m >= 1:
                for b in blocks:
                    if admissible(self.donor, b, m):
                        den = math.prod(self.donor.base_at(m + t) for t in range(k))
                        running[b] += Fraction(1, den)
                    acc[b] += running[b]
            pending = {b for b in pending if not goals[b] < acc[b]}
        self._count_cache[(n, k)] = j
        return j

    # -- the schedule ladder ----------------------------------------------

    @property
    def mod_div(self):
        if self._mod_div is None:
            self._mod_div = ModulusOfDivergence(self.target)
        return self._mod_div

    def level(self, n: int) -> int:
        if n < 0:
            raise ArgumentError(f"schedule index must be >= 0, got {n}")
        while len(self._levels) <= n:
            step = len(self._levels)
            prev = self._levels[step - 1]
            terms = {
                "modulus": self.mod_div(step),
                "square": prev + step * step,
                "log-mass": prev + self.log_mass_threshold(step),
                "blocks": max(self.count_threshold(step, k) for k in range(1, step + 1)),
            }
            self._levels.append(max(terms.values()))
            self._level_terms[step] = terms
        return self._levels[n]

    def level_terms(self, n: int) -> dict:
        self.level(n)
        return dict(self._level_terms[n])

    def segment_index(self, n: int) -> int:
        """Largest j with L(j) <= n."""
        check_position(n)
        j = 0
        while self.level(j + 1) <= n:
            j += 1
        return j

    def in_donor_segment(self, n: int) -> bool:
        i = self.segment_index(n)
        return i >= 1 and n <= self.level(i) + i - 1

    def segment_positions(self, upto: int) -> list[int]:
        """All donor-patched positions <= upto."""
        out = []
        i = 1
        while self.level(i) <= upto:
            out.extend(range(self.level(i), min(self.level(i) + i - 1, upto) + 1))
            i += 1
        return out

    # -- digits -------------------------------------------------------------

    def digit(self, n: int) -> int:
        check_position(n)
        q = self.target.base_at(n)
        i = self.segment_index(n)
        if i >= 1 and n <= self.level(i) + i - 1:
            d = self.donor_digits.digit(n - self.level(i) + 1)
        else:
            x = self.ud.value(n)
            lead = (x.numerator * q) // x.denominator
            floor_term = ceil_log(i, self.log_base) if i >= 1 else 0
            d = max(lead, floor_term)
        if d > q - 1:
            self.clamps.add(f"position {n}")
            d = q - 1
        return d

    def prefix(self, count: int) -> np.ndarray:
        return np.array([self.digit(n) for n in range(1, count + 1)], dtype=np.int64)


def build_patched_uniform(
    Q: BasicSequence,
    *,
    mod_div=None,
    ud: UDSource | None = None,
    log_base: str = "e",
) -> DigitSequence:
    """The patched uniform stream: donor segments at the schedule positions,
    a uniformly distributed driver with a slowly rising digit floor elsewhere."""
    _require_infinite(Q, "the patched uniform construction")
    sched = Schedule(Q, ud=ud, mod_div=mod_div, log_base=log_base)
    ds = DigitSequence(
        Q,
        sched.prefix,
        {
            "op": "schedule-patch",
            "seq": Q.to_json(),
            "donor": sched.donor.to_json(),
            "ud": sched.ud.to_json(),
            "log_base": log_base,
        },
        validate=False,
    )
    ds.schedule = sched
    return ds
