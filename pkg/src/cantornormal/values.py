"""Exact value extraction: certified intervals and proven base-b digits.

Every quantity here is an exact rational. A digit prefix of length m pins
the represented number inside an interval of width exactly
1/(q_1*...*q_m); base-b digits are emitted only once both interval
endpoints agree on them, so each emitted digit is proven.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .digitseq import DigitSequence
from .errors import ArgumentError, RefinementError
from .sequences import BasicSequence

DEFAULT_REFINE_CAP = 64


@dataclass(frozen=True)
class CertifiedInterval:
    """lower <= x <= upper with width equal to the remaining digit mass."""

    lower: Fraction
    upper: Fraction

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    def __contains__(self, x) -> bool:
        return self.lower <= x <= self.upper


def prefix_value(seq: BasicSequence, digits) -> CertifiedInterval:
    """The interval pinned down by an explicit digit prefix."""
    num = 0
    den = 1
    for i, d in enumerate(digits, start=1):
        q = seq.base_at(i)
        d = int(d)
        if not 0 <= d < q:
            raise ArgumentError(f"digit {d} at position {i} outside 0..{q - 1}")
        num = num * q + d
        den *= q
    return CertifiedInterval(Fraction(num, den), Fraction(num + 1, den))


def mod1_scale(x: Fraction, factors) -> Fraction:
    """x times the product of the factors, reduced mod 1."""
    y = Fraction(x)
    for q in factors:
        y *= int(q)
    return y % 1


def to_base_b(
    E: DigitSequence,
    base: int,
    count: int,
    *,
    refine_cap: int = DEFAULT_REFINE_CAP,
    min_prefix: int = 0,
) -> list[int]:
    """The first `count` base-b digits of the number behind the stream.

    Consumes stream digits until both interval endpoints agree on the next
    output digit; at most `refine_cap` fresh stream digits are spent per
    output digit before giving up (the number may sit exactly on a base-b
    boundary, which no finite refinement can decide). `min_prefix` forces
    at least that many stream digits to be consumed up front, which is
    useful for reproducibility checks.
    """
    if base < 2:
        raise ArgumentError(f"output base must be >= 2, got {base}")
    if count < 1:
        raise ArgumentError(f"digit count must be >= 1, got {count}")
    seq = E.seq
    num = 0  # prefix numerator: value is in [num/den, (num+1)/den]
    den = 1
    consumed = 0

    def consume_one() -> None:
        nonlocal num, den, consumed
        consumed += 1
        q = seq.base_at(consumed)
        num = num * q + E.digit(consumed)
        den *= q

    while consumed < min_prefix:
        consume_one()

    out: list[int] = []
    scale = 1
    for t in range(1, count + 1):
        scale *= base
        spent = 0
        while True:
            lo = (num * scale) // den
            hi = ((num + 1) * scale) // den
            if lo == hi:
                out.append(lo % base)
                break
            if spent >= refine_cap:
                raise RefinementError(
                    f"digit {t} in base {base} still ambiguous after "
                    f"{consumed} stream digits; the value may lie on a "
                    "base boundary"
                )
            consume_one()
            spent += 1
    return out


def format_digits(digits, base: int) -> str:
    """Render extracted digits; contiguous for small bases, dotted otherwise."""
    if base <= 10:
        return "".join(str(d) for d in digits)
    return ".".join(str(d) for d in digits)
