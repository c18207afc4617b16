"""Command-line driver: parse, analyze, transform, classify, emit.

Exit codes: 0 on success (and oracle agreement), 1 when the oracle found a
soundness or precision-consistency violation, 2 on usage, parse or analysis
errors.
"""

from __future__ import annotations

import argparse
import os
import shutil
import subprocess
import sys
import tempfile

from .emit import EmitConfig, EmitError, ND_STYLES, emit_report, emit_verifiable
from .oracle import OracleConfig, OracleError, differential_check
from .parser import ParseError, parse
from .precision import classify_all
from .transform import TransformError, transform_with_info

MAX_ORACLE_SIZE = 8


def _atomic_write(path: str, content: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w") as f:
            f.write(content)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _parse_domain(text: str) -> tuple[int, int]:
    lo_text, sep, hi_text = text.partition(":")
    if not sep:
        raise ValueError("expected lo:hi")
    lo, hi = int(lo_text), int(hi_text)
    if lo > hi:
        raise ValueError("empty domain")
    return lo, hi


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arraywitness",
        description="Rewrite array loop programs into loop-free, array-free "
        "harnesses for bounded model checking.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    t = sub.add_parser("transform", help="transform a source program")
    t.add_argument("input", help="source program file")
    t.add_argument("-o", "--output", help="write emitted C here")
    t.add_argument("--nd-style", choices=ND_STYLES, default="cbmc")
    t.add_argument("--report", help="write the JSON analysis report here")
    t.add_argument(
        "--check-precision",
        action="store_true",
        help="print per-assertion precision verdicts",
    )
    t.add_argument(
        "--oracle",
        action="store_true",
        help="differentially check original vs. transformed by exhaustive "
        "enumeration (requires --array-size)",
    )
    t.add_argument("--array-size", type=int, help="override every array size")
    t.add_argument(
        "--value-domain",
        type=_parse_domain,
        default=(0, 3),
        metavar="LO:HI",
        help="oracle domain for nd() and input() (default 0:3)",
    )
    t.add_argument(
        "--bmc",
        action="store_true",
        help="run the checker named by BMC_BIN on the emitted file",
    )
    return parser


def run(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0

    if args.oracle and args.array_size is None:
        print("error: --oracle requires --array-size", file=sys.stderr)
        return 2
    if args.array_size is not None and args.array_size < 1:
        print("error: --array-size must be positive", file=sys.stderr)
        return 2
    if args.oracle and args.array_size > MAX_ORACLE_SIZE:
        print(
            f"error: --oracle requires --array-size <= {MAX_ORACLE_SIZE}",
            file=sys.stderr,
        )
        return 2
    if args.bmc and not args.output:
        print("error: --bmc requires -o/--output", file=sys.stderr)
        return 2

    try:
        with open(args.input) as f:
            source = f.read()
    except OSError as e:
        print(f"error: cannot read {args.input}: {e.strerror}", file=sys.stderr)
        return 2

    try:
        program = parse(source)
        result = transform_with_info(program)
    except (ParseError, TransformError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2

    if args.output:
        try:
            text = emit_verifiable(result.program, EmitConfig(args.nd_style))
        except EmitError as e:
            print(f"error: {e}", file=sys.stderr)
            return 2
        _atomic_write(args.output, text)

    verdicts = classify_all(program)
    if args.report:
        _atomic_write(
            args.report, emit_report(result.arrays, result.summaries, verdicts)
        )
    if args.check_precision:
        for v in verdicts:
            if v.precise:
                print(f"assertion at location {v.assertion_loc}: precise")
            else:
                rules = ", ".join(sorted({r.rule for r in v.violated_rules}))
                print(
                    f"assertion at location {v.assertion_loc}: imprecise "
                    f"({rules})"
                )

    status = 0
    if args.oracle:
        cfg = OracleConfig(
            value_domain=args.value_domain,
            array_size_override=args.array_size,
        )
        try:
            diff = differential_check(program, result.program, cfg)
        except OracleError as e:
            print(f"error: {e}", file=sys.stderr)
            return 2
        print(f"original:    {diff.orig_verdict.outcome}")
        print(f"transformed: {diff.trans_verdict.outcome}")
        print(f"sound: {'yes' if diff.sound else 'NO'}")
        if diff.precise_consistent is not None:
            print(
                "precise-consistent: "
                f"{'yes' if diff.precise_consistent else 'NO'}"
            )
        if not diff.sound or diff.precise_consistent is False:
            status = 1

    if args.bmc and status == 0:
        bmc = os.environ.get("BMC_BIN")
        if not bmc or shutil.which(bmc) is None:
            print("warning: BMC_BIN not set or not executable; skipping "
                  "pass-through", file=sys.stderr)
        else:
            proc = subprocess.run([bmc, args.output])
            print(f"bmc exit status: {proc.returncode}")
            status = proc.returncode
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
