"""Command-line entry point.

Subcommands: digits, construct, stats, discrepancy, value, diagnose.
Exit codes: 0 success, 2 argument errors, 3 scan-bound/refinement errors.
Every run can persist a manifest (--manifest) recording the subcommand,
inputs, tool version and a digest of the emitted bytes; re-running with
the same inputs reproduces the bytes and therefore the digest.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .digitseq import DigitSequence, constructed_digits, finite_digits
from .errors import ArgumentError, CantorSeriesError
from .generator import digit_at
from .ladder import PartitionIndex
from .orbit import orbit_discrepancy_report
from .sequences import BasicSequence, parse_sequence_spec
from .stats import (
    expected_count,
    format_block,
    growth_diagnostic,
    normality_report,
    parse_block,
)
from .transforms import (
    ModulusTable,
    UDSource,
    build_orbit_sink,
    build_patched_uniform,
    build_half_range,
)
from .values import format_digits, prefix_value, to_base_b

TARGETS = ("xq", "nq-not-dnq", "rnq-not-nq", "rnq-dnq-not-nq")


def _build_target(name: str, seq: BasicSequence, args) -> DigitSequence:
    if name == "xq":
        return constructed_digits(seq)
    if name == "nq-not-dnq":
        return build_orbit_sink(seq, log_base=args.log_base)
    if name == "rnq-not-nq":
        return build_half_range(seq, log_base=args.log_base)
    if name == "rnq-dnq-not-nq":
        mod_div = None
        if getattr(args, "mod_div", None) and args.mod_div != "auto":
            head, _, rest = args.mod_div.partition(":")
            if head != "file":
                raise ArgumentError(
                    f"bad divergence modulus spec {args.mod_div!r}; expected auto or file:path"
                )
            entries = json.loads(Path(rest).read_text())["entries"]
            mod_div = ModulusTable(seq, entries)
        ud = UDSource(getattr(args, "ud", "vdc"))
        return build_patched_uniform(seq, mod_div=mod_div, ud=ud, log_base=args.log_base)
    raise ArgumentError(f"unknown target {name!r}; expected one of {TARGETS}")


def _load_digit_file(seq: BasicSequence, path: Path) -> DigitSequence:
    if not path.exists():
        raise ArgumentError(f"digit file not found: {path}")
    text = path.read_text()
    if path.suffix == ".json":
        digits = json.loads(text)["digits"]
    else:
        digits = []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            digits.append(int(parts[-1]))
    return finite_digits(seq, digits)


def _resolve_source(args, seq: BasicSequence) -> DigitSequence:
    source = getattr(args, "source", "construct")
    if source == "construct":
        return _build_target(getattr(args, "target", "xq"), seq, args)
    head, _, rest = source.partition(":")
    if head == "file":
        return _load_digit_file(seq, Path(rest))
    raise ArgumentError(f"bad source {source!r}; expected construct or file:path")


def _parse_checkpoints(text: str) -> list[int]:
    try:
        cps = [int(p) for p in text.split(",") if p]
    except ValueError as exc:
        raise ArgumentError(f"bad checkpoint list {text!r}") from exc
    if not cps:
        raise ArgumentError("at least one checkpoint is required")
    return cps


def _parse_blocks(text: str, seq: BasicSequence, horizon: int) -> list[tuple]:
    if text.startswith("all:"):
        k = int(text.split(":", 1)[1])
        if k < 1:
            raise ArgumentError(f"block length must be >= 1, got {k}")
        top = max(int(seq.bases(1, horizon + k - 1).max()), 2)
        from itertools import product

        blocks = [
            b for b in product(range(top), repeat=k)
            if expected_count(seq, b, horizon) > 0
        ]
        if not blocks:
            raise ArgumentError(f"no admissible blocks of length {k} below {horizon}")
        return blocks
    return [parse_block(part) for part in text.split(";") if part]


def _parse_depth(text: str) -> int | None:
    if text in ("default", "paper"):
        return None
    head, _, rest = text.partition(":")
    if head == "fixed":
        try:
            return int(rest)
        except ValueError as exc:
            raise ArgumentError(f"bad depth {text!r}") from exc
    raise ArgumentError(f"bad depth {text!r}; expected fixed:<d> or default")


def _emit(args, body: str, manifest_params: dict) -> None:
    data = body.encode()
    sys.stdout.write(body)
    if getattr(args, "manifest", None):
        manifest = {
            "subcommand": args.command,
            "seq": getattr(args, "seq", None),
            "target": getattr(args, "target", None),
            "parameters": manifest_params,
            "version": __version__,
            "output_sha256": hashlib.sha256(data).hexdigest(),
        }
        Path(args.manifest).write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")


def _csv(rows) -> str:
    return "".join(",".join(str(c) for c in row) + "\n" for row in rows)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_digits(args) -> None:
    seq = parse_sequence_spec(args.seq)
    E = constructed_digits(seq)
    digits = E.prefix(args.count)
    if args.oracle_check:
        pi = PartitionIndex(seq)
        for n in range(1, args.count + 1, args.oracle_check):
            expect = digit_at(seq, n, index=pi)
            if expect != int(digits[n - 1]):
                raise CantorSeriesError(
                    f"stream digit {int(digits[n - 1])} at position {n} "
                    f"disagrees with the direct oracle {expect}"
                )
    body = _format_digit_output(args, seq, digits)
    _emit(args, body, {"count": args.count, "format": args.format,
                       "oracle_check": args.oracle_check})


def _format_digit_output(args, seq: BasicSequence, digits: np.ndarray) -> str:
    if args.format == "csv":
        return _csv((n, int(d)) for n, d in enumerate(digits, start=1))
    if args.format == "json":
        return json.dumps(
            {"seq": seq.to_json(), "digits": [int(d) for d in digits]},
            sort_keys=True,
        ) + "\n"
    return "".join(f"{int(d)}\n" for d in digits)


def _cmd_construct(args) -> None:
    seq = parse_sequence_spec(args.seq)
    E = _build_target(args.target, seq, args)
    digits = E.prefix(args.count)
    clamp_events = getattr(getattr(E, "schedule", None), "clamps", None)
    params = {
        "count": args.count,
        "format": args.format,
        "ud": getattr(args, "ud", None),
        "log_base": args.log_base,
        "graph": E.describe(),
    }
    if clamp_events is not None:
        params["clamp_events"] = clamp_events.events
    body = _format_digit_output(args, seq, digits)
    _emit(args, body, params)


def _cmd_stats(args) -> None:
    seq = parse_sequence_spec(args.seq)
    E = _resolve_source(args, seq)
    cps = _parse_checkpoints(args.checkpoints)
    blocks = _parse_blocks(args.blocks, seq, max(cps))
    report = normality_report(seq, E, blocks, cps)
    if args.format == "json":
        body = json.dumps(report.to_json(), sort_keys=True) + "\n"
    else:
        rows = [["block", "n", "observed", "expected_num", "expected_den", "ratio"]]
        rows += [r.as_csv() for r in report.rows]
        body = _csv(rows)
    _emit(args, body, {"blocks": args.blocks, "checkpoints": cps})


def _cmd_discrepancy(args) -> None:
    seq = parse_sequence_spec(args.seq)
    E = _resolve_source(args, seq)
    cps = _parse_checkpoints(args.checkpoints)
    report = orbit_discrepancy_report(seq, E, cps, depth=_parse_depth(args.depth))
    if args.format == "json":
        body = json.dumps(report.to_json(), sort_keys=True) + "\n"
    else:
        rows = [["n", "d_star", "d_extreme", "max_eps"]]
        rows += [r.as_csv() for r in report.rows]
        body = _csv(rows)
    _emit(args, body, {"checkpoints": cps, "depth": args.depth})


def _cmd_value(args) -> None:
    seq = parse_sequence_spec(args.seq)
    E = _build_target(args.target, seq, args)
    params = {"base": args.base, "digits": args.digits, "exact": args.exact}
    if args.exact:
        interval = prefix_value(seq, E.prefix(args.exact))
        body = (
            f"{interval.lower.numerator}/{interval.lower.denominator}"
            f" +/- 1/{interval.width.denominator}\n"
        )
    else:
        digits = to_base_b(E, args.base, args.digits)
        body = "0." + format_digits(digits, args.base) + f" (base {args.base})\n"
    _emit(args, body, params)


def _cmd_diagnose(args) -> None:
    seq = parse_sequence_spec(args.seq)
    cps = _parse_checkpoints(args.checkpoints)
    block = parse_block(args.block)
    diag = growth_diagnostic(seq, block, cps)
    if args.format == "json":
        body = json.dumps(
            {
                "block": list(diag.block),
                "rows": [
                    {"n": r.n, "value": r.value, "nondecreasing": r.nondecreasing_so_far}
                    for r in diag.rows
                ],
                "increasing_trend": diag.increasing,
                "label": diag.label,
            },
            sort_keys=True,
        ) + "\n"
    else:
        rows = [["block", "n", "value", "nondecreasing_so_far"]]
        rows += [
            [format_block(diag.block), r.n, repr(r.value), r.nondecreasing_so_far]
            for r in diag.rows
        ]
        rows.append(["trend", "", "increasing" if diag.increasing else "flat", diag.label])
        body = _csv(rows)
    _emit(args, body, {"block": args.block, "checkpoints": cps})


# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="cantornormal",
        description="Construct and verify normal numbers for Cantor series expansions.",
    )
    top.add_argument("--version", action="version", version=__version__)
    sub = top.add_subparsers(dest="command", required=True)

    def common(p, target=False):
        p.add_argument("--seq", required=True, help="constant:b | periodic:a,b | preset:name | file:path")
        p.add_argument("--manifest", help="write a reproducibility manifest to this path")
        p.add_argument("--log-base", default="e", choices=("e", "2", "10"),
                       help="log base used by derived companion sequences")
        if target:
            p.add_argument("--target", default="xq", choices=TARGETS)
            p.add_argument("--ud", default="vdc", choices=UDSource.KINDS)
            p.add_argument("--mod-div", default="auto",
                           help="divergence modulus: auto | file:path")

    p = sub.add_parser("digits", help="emit construction digits")
    common(p)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--format", default="csv", choices=("raw", "csv", "json"))
    p.add_argument("--oracle-check", type=int, default=0, metavar="K",
                   help="cross-check every K-th digit against the direct oracle")
    p.set_defaults(func=_cmd_digits)

    p = sub.add_parser("construct", help="emit digits of a transform target")
    common(p, target=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--format", default="csv", choices=("raw", "csv", "json"))
    p.set_defaults(func=_cmd_construct)

    p = sub.add_parser("stats", help="observed vs expected block counts")
    common(p, target=True)
    p.add_argument("--source", default="construct", help="construct | file:path")
    p.add_argument("--blocks", required=True, help='e.g. "0;1;0,1" or all:k')
    p.add_argument("--checkpoints", required=True)
    p.add_argument("--format", default="csv", choices=("csv", "json"))
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("discrepancy", help="orbit discrepancy report")
    common(p, target=True)
    p.add_argument("--source", default="construct", help="construct | file:path")
    p.add_argument("--checkpoints", required=True)
    p.add_argument("--depth", default="default",
                   help="truncation depth: default | fixed:d")
    p.add_argument("--format", default="csv", choices=("csv", "json"))
    p.set_defaults(func=_cmd_discrepancy)

    p = sub.add_parser("value", help="proven base-b digits of a target")
    common(p, target=True)
    p.add_argument("--base", type=int, default=10)
    p.add_argument("--digits", type=int, default=10)
    p.add_argument("--exact", type=int, default=0, metavar="M",
                   help="print the exact prefix rational after M digits instead")
    p.set_defaults(func=_cmd_value)

    p = sub.add_parser("diagnose", help="expected-count growth trend for a block")
    common(p)
    p.add_argument("--block", required=True)
    p.add_argument("--checkpoints", required=True)
    p.add_argument("--format", default="csv", choices=("csv", "json"))
    p.set_defaults(func=_cmd_diagnose)
    return top


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except ArgumentError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return 2
    except CantorSeriesError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
