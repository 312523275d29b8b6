"""Basic sequences of integer bases.

A basic sequence assigns an integer base >= 2 to every 1-based position.
Everything else in the package (digit construction, block statistics,
orbits) is parameterised by one of these.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import ArgumentError

# Bulk base evaluation goes through float64 exponent tricks; positions past
# 2**53 would silently lose exactness.
_FLOAT_EXACT_LIMIT = 2**53

_LOG_BASE_VALUES = {"e": math.e, "2": 2.0, "10": 10.0}


def check_position(n: int) -> None:
    if n < 1:
        raise ArgumentError(f"positions are 1-based, got {n}")


def floor_log2(v: int) -> int:
    """Exact floor(log2(v)) for a positive integer."""
    return v.bit_length() - 1


def _floor_log2_array(v: np.ndarray) -> np.ndarray:
    if v.size and int(v.max()) >= _FLOAT_EXACT_LIMIT:
        raise ArgumentError("bulk base evaluation past 2**53 is not supported")
    _, e = np.frexp(v.astype(np.float64))
    return (e - 1).astype(np.int64)


def floor_log(v: int, log_base: str) -> int:
    """floor(log(v)) in the requested log base, exact for base 2."""
    if v < 1:
        raise ArgumentError(f"floor_log needs a positive integer, got {v}")
    if log_base == "2":
        return floor_log2(v)
    # v is a small integer in practice; log(v) is never exactly an integer
    # for v >= 2 except at powers of the base, which the correction loop fixes.
    b = _LOG_BASE_VALUES[log_base]
    c = int(math.log(v, b))
    while b ** (c + 1) <= v:
        c += 1
    while c > 0 and b**c > v:
        c -= 1
    return c


def ceil_log(v: int, log_base: str) -> int:
    """ceil(log(v)) in the requested log base; 0 for v = 1."""
    if v < 1:
        raise ArgumentError(f"ceil_log needs a positive integer, got {v}")
    if v == 1:
        return 0
    f = floor_log(v, log_base)
    b = _LOG_BASE_VALUES[log_base]
    if log_base == "2":
        return f if (1 << f) == v else f + 1
    return f if b**f == v else f + 1


class BasicSequence:
    """A deterministic sequence of integer bases, each at least 2."""

    kind = "abstract"
    #: bases never decrease with position (lets running_max collapse to base_at)
    nondecreasing = False
    #: bases tend to infinity
    infinite_in_limit = False
    #: running max grows like n**o(1); heuristic metadata, not a proof
    slowly_growing = True

    def base_at(self, n: int) -> int:
        raise NotImplementedError

    def bases(self, lo: int, hi: int) -> np.ndarray:
        """Bases at positions lo..hi inclusive, as int64."""
        check_position(lo)
        if hi < lo:
            return np.empty(0, dtype=np.int64)
        return np.array([self.base_at(n) for n in range(lo, hi + 1)], dtype=np.int64)

    def running_max(self, n: int) -> int:
        """Largest base among the first n positions."""
        check_position(n)
        if self.nondecreasing:
            return self.base_at(n)
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    def spec_string(self) -> str:
        return "json:" + json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.spec_string()}>"

    def __eq__(self, other) -> bool:
        return isinstance(other, BasicSequence) and self.to_json() == other.to_json()

    def __hash__(self) -> int:
        return hash(self.spec_string())


class ConstantSequence(BasicSequence):
    kind = "constant"
    nondecreasing = True

    def __init__(self, b: int):
        if b < 2:
            raise ArgumentError(f"bases must be >= 2, got {b}")
        self.b = int(b)

    def base_at(self, n: int) -> int:
        check_position(n)
        return self.b

    def bases(self, lo: int, hi: int) -> np.ndarray:
        check_position(lo)
        return np.full(max(hi - lo + 1, 0), self.b, dtype=np.int64)

    def to_json(self) -> dict:
        return {"kind": "constant", "b": self.b}

    def spec_string(self) -> str:
        return f"constant:{self.b}"


class PeriodicSequence(BasicSequence):
    kind = "periodic"

    def __init__(self, pattern):
        pattern = [int(b) for b in pattern]
        if not pattern:
            raise ArgumentError("periodic sequence needs at least one base")
        if any(b < 2 for b in pattern):
            raise ArgumentError(f"bases must be >= 2, got {pattern}")
        self.pattern = pattern
        self._prefix_max = list(np.maximum.accumulate(pattern))

    def base_at(self, n: int) -> int:
        check_position(n)
        return self.pattern[(n - 1) % len(self.pattern)]

    def bases(self, lo: int, hi: int) -> np.ndarray:
        check_position(lo)
        if hi < lo:
            return np.empty(0, dtype=np.int64)
        idx = np.arange(lo - 1, hi, dtype=np.int64) % len(self.pattern)
        return np.asarray(self.pattern, dtype=np.int64)[idx]

    def running_max(self, n: int) -> int:
        check_position(n)
        return self._prefix_max[min(n, len(self.pattern)) - 1]

    def to_json(self) -> dict:
        return {"kind": "periodic", "bases": self.pattern}

    def spec_string(self) -> str:
        return "periodic:" + ",".join(str(b) for b in self.pattern)


class TableSequence(BasicSequence):
    """A finite table of bases plus an extension rule (repeat-last only)."""

    kind = "table"

    def __init__(self, table, extend: str = "repeat-last"):
        table = [int(b) for b in table]
        if not table:
            raise ArgumentError("table sequence needs at least one base")
        if any(b < 2 for b in table):
            raise ArgumentError(f"bases must be >= 2, got {table}")
        if extend != "repeat-last":
            raise ArgumentError(f"unknown table extension rule {extend!r}")
        self.table = table
        self.extend = extend
        self._prefix_max = list(np.maximum.accumulate(table))

    def base_at(self, n: int) -> int:
        check_position(n)
        if n <= len(self.table):
            return self.table[n - 1]
        return self.table[-1]

    def bases(self, lo: int, hi: int) -> np.ndarray:
        check_position(lo)
        if hi < lo:
            return np.empty(0, dtype=np.int64)
        out = np.full(hi - lo + 1, self.table[-1], dtype=np.int64)
        in_table = min(hi, len(self.table))
        if lo <= in_table:
            out[: in_table - lo + 1] = self.table[lo - 1 : in_table]
        return out

    def running_max(self, n: int) -> int:
        check_position(n)
        return self._prefix_max[min(n, len(self.table)) - 1]

    def to_json(self) -> dict:
        return {"kind": "table", "bases": self.table, "extend": self.extend}


class PresetSequence(BasicSequence):
    """Named growth formulas.

    log          q_n = max(2, floor(log2(n + 4)))
    iterated-log q_n = max(2, floor(log2(log2(n + 4))))

    Both are nondecreasing and unbounded; iterated-log grows slowly enough
    that the expected-count growth hypothesis holds well past desk scale.
    """

    kind = "preset"
    nondecreasing = True
    infinite_in_limit = True

    _NAMES = ("log", "iterated-log")

    def __init__(self, name: str):
        if name not in self._NAMES:
            raise ArgumentError(f"unknown preset {name!r}; expected one of {self._NAMES}")
        self.name = name

    def base_at(self, n: int) -> int:
        check_position(n)
        v = floor_log2(n + 4)
        if self.name == "iterated-log":
            v = floor_log2(max(v, 1))
        return max(2, v)

    def bases(self, lo: int, hi: int) -> np.ndarray:
        check_position(lo)
        if hi < lo:
            return np.empty(0, dtype=np.int64)
        v = _floor_log2_array(np.arange(lo + 4, hi + 5, dtype=np.int64))
        if self.name == "iterated-log":
            v = _floor_log2_array(np.maximum(v, 1))
        return np.maximum(v, 2)

    def to_json(self) -> dict:
        return {"kind": "preset", "name": self.name}

    def spec_string(self) -> str:
        return f"preset:{self.name}"


class IndexLogSequence(BasicSequence):
    """p_n = floor(log(n)) + 2, the canonical slowly-growing donor sequence."""

    kind = "preset"
    nondecreasing = True
    infinite_in_limit = True

    def __init__(self, log_base: str = "e"):
        if log_base not in _LOG_BASE_VALUES:
            raise ArgumentError(f"log base must be one of {sorted(_LOG_BASE_VALUES)}")
        self.log_base = log_base

    def base_at(self, n: int) -> int:
        check_position(n)
        return floor_log(n, self.log_base) + 2

    def bases(self, lo: int, hi: int) -> np.ndarray:
        check_position(lo)
        if hi < lo:
            return np.empty(0, dtype=np.int64)
        if self.log_base == "2":
            return _floor_log2_array(np.arange(lo, hi + 1, dtype=np.int64)) + 2
        # boundary-safe scalar fallback near powers of the log base
        return np.array([self.base_at(n) for n in range(lo, hi + 1)], dtype=np.int64)

    def to_json(self) -> dict:
        return {"kind": "preset", "name": "index-log", "log_base": self.log_base}

    def spec_string(self) -> str:
        if self.log_base == "e":
            return "preset:index-log"
        return "json:" + json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))


class PointwiseSequence(BasicSequence):
    """A base-wise transform of another sequence.

    op "log-of":  max(floor(log(q_n)), 2)
    op "half-of": max(floor(q_n / 2), 2)

    Both ops are monotone in q_n, so running-max commutes through them.
    """

    kind = "pointwise"

    _OPS = ("log-of", "half-of")

    def __init__(self, of: BasicSequence, op: str, log_base: str = "e"):
        if op not in self._OPS:
            raise ArgumentError(f"unknown pointwise op {op!r}")
        if log_base not in _LOG_BASE_VALUES:
            raise ArgumentError(f"log base must be one of {sorted(_LOG_BASE_VALUES)}")
        self.of = of
        self.op = op
        self.log_base = log_base
        self.nondecreasing = of.nondecreasing
        self.infinite_in_limit = of.infinite_in_limit

    def _apply(self, q: int) -> int:
        if self.op == "half-of":
            return max(q // 2, 2)
        return max(floor_log(q, self.log_base), 2)

    def base_at(self, n: int) -> int:
        return self._apply(self.of.base_at(n))

    def bases(self, lo: int, hi: int) -> np.ndarray:
        inner = self.of.bases(lo, hi)
        if self.op == "half-of":
            return np.maximum(inner // 2, 2)
        return np.array([self._apply(int(q)) for q in inner], dtype=np.int64)

    def running_max(self, n: int) -> int:
        return self._apply(self.of.running_max(n))

    def to_json(self) -> dict:
        return {
            "kind": "pointwise",
            "op": self.op,
            "log_base": self.log_base,
            "of": self.of.to_json(),
        }


def sequence_from_json(obj: dict) -> BasicSequence:
    """Rebuild a sequence from its JSON description."""
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ArgumentError(f"not a sequence description: {obj!r}")
    kind = obj["kind"]
    if kind == "constant":
        return ConstantSequence(obj["b"])
    if kind == "periodic":
        return PeriodicSequence(obj["bases"])
    if kind == "table":
        return TableSequence(obj["bases"], obj.get("extend", "repeat-last"))
    if kind == "preset":
        if obj["name"] == "index-log":
            return IndexLogSequence(obj.get("log_base", "e"))
        return PresetSequence(obj["name"])
    if kind == "pointwise":
        return PointwiseSequence(
            sequence_from_json(obj["of"]), obj["op"], obj.get("log_base", "e")
        )
    raise ArgumentError(f"unknown sequence kind {kind!r}")


def parse_sequence_spec(spec: str) -> BasicSequence:
    """Parse the mini-language: constant:b | periodic:a,b,c | preset:name | file:path."""
    if ":" not in spec:
        raise ArgumentError(
            f"bad sequence spec {spec!r}; expected constant:b, periodic:a,b,..., "
            "preset:name or file:path"
        )
    head, _, rest = spec.partition(":")
    if head == "constant":
        try:
            return ConstantSequence(int(rest))
        except ValueError as exc:
            raise ArgumentError(f"bad constant base {rest!r}") from exc
    if head == "periodic":
        try:
            return PeriodicSequence([int(p) for p in rest.split(",") if p])
        except ValueError as exc:
            raise ArgumentError(f"bad periodic pattern {rest!r}") from exc
    if head == "preset":
        if rest == "index-log":
            return IndexLogSequence()
        return PresetSequence(rest)
    if head == "file":
        path = Path(rest)
        if not path.exists():
            raise ArgumentError(f"sequence file not found: {path}")
        return sequence_from_json(json.loads(path.read_text()))
    if head == "json":
        return sequence_from_json(json.loads(rest))
    raise ArgumentError(f"unknown sequence spec kind {head!r}")
