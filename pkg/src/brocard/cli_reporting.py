"""Command line front end and JSONL report stream.

Report lines are one JSON object per line with a fixed key order and no
whitespace, so two runs over the same range are byte-identical and a
long scan can be tailed. Solution lines are re-verified from scratch at
emit time (factorial recomputed, square compared) as a last defense
against engine bugs.

Exit codes: 0 success, 1 usage error, 2 internal or resource error,
3 checkpoint mismatch.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import traceback
from dataclasses import dataclass
from typing import IO, Iterable

from . import conditions
from .epsilon_lab import (
    DEFAULT_NINE_RUN_CAP,
    epsilon_digits,
    k_ratio_digits,
    nine_run,
)
from .exact_arith import BitBudgetError, decimal_str
from .factorial_engine import EXACT_FACTORIAL_CEILING, CeilingError, is_factorial
from .poly_system import solve_window
from .search_engine import (
    DEFAULT_POOL_SIZE,
    CheckpointError,
    SearchConfig,
    run,
)

__version__ = "0.1.0"

# k values misquoted in circulated tabulations of these rows; the table
# command prints the computed k and flags the discrepancy.
MISQUOTED_K = {8: 26, 11: 6371}


class ReportIntegrityError(Exception):
    """A report line failed its independent re-verification."""


@dataclass(frozen=True)
class ReportLine:
    kind: str
    n: int | None = None
    m: int | None = None
    rejecting_prime: int | None = None
    counters: dict | None = None


def render_line(line: ReportLine) -> str:
    """Canonical serialization: fixed key order, absent fields omitted."""
    obj: dict = {"kind": line.kind}
    if line.n is not None:
        obj["n"] = line.n
    if line.m is not None:
        obj["m"] = line.m
    if line.rejecting_prime is not None:
        obj["rejecting_prime"] = line.rejecting_prime
    if line.counters is not None:
        obj["counters"] = line.counters
    return json.dumps(obj, separators=(",", ":"))


def _check_solution_line(line: ReportLine) -> None:
    # independent of the engine: recompute n! and compare squares
    if line.n is None or line.m is None:
        raise ReportIntegrityError(f"solution line missing n or m: {line}")
    if line.n > EXACT_FACTORIAL_CEILING:
        raise ReportIntegrityError(f"solution claim at n={line.n} beyond exact reach")
    if math.factorial(line.n) + 1 != line.m * line.m:
        raise ReportIntegrityError(f"solution line fails m^2 == n! + 1: {line}")


class ReportWriter:
    """Incremental JSONL writer with running counters.

    Opening an existing file in append mode (the resume path) seeds the
    counters from the lines already present, so the final summary covers
    the whole file, not just the resumed segment.
    """

    def __init__(self, stream: IO[str], *, owns_stream: bool) -> None:
        self._stream = stream
        self._owns = owns_stream
        self.solutions = 0
        self.survivors = 0
        self.unresolved = 0

    @classmethod
    def open(cls, path: str | None, append: bool = False) -> "ReportWriter":
        if path is None:
            return cls(sys.stdout, owns_stream=False)
        seen: list[str] = []
        if append and os.path.exists(path):
            with open(path, "r", encoding="ascii") as fh:
                seen = [raw for raw in (r.strip() for r in fh) if raw]
        stream = open(path, "a" if append else "w", encoding="ascii", newline="")
        writer = cls(stream, owns_stream=True)
        for raw in seen:
            writer._count(json.loads(raw)["kind"])
        return writer

    def _count(self, kind: str) -> None:
        if kind == "solution":
            self.solutions += 1
            self.survivors += 1
        elif kind == "survivor":
            self.survivors += 1
        elif kind == "unresolved":
            self.unresolved += 1
            self.survivors += 1

    def emit(self, line: ReportLine) -> None:
        if line.kind == "solution":
            _check_solution_line(line)
        self._count(line.kind)
        self._stream.write(render_line(line) + "\n")
        self._stream.flush()

    def emit_event(self, kind: str, n: int, m: int | None = None) -> None:
        self.emit(ReportLine(kind=kind, n=n, m=m))

    def write_summary(self, scanned: int) -> None:
        counters = {
            "scanned": scanned,
            "rejected": scanned - self.survivors,
            "survivors": self.survivors,
            "solutions": self.solutions,
            "unresolved": self.unresolved,
        }
        self.emit(ReportLine(kind="summary", counters=counters))

    def close(self) -> None:
        if self._owns and self._stream is not None:
            self._stream.close()


def emit_report(lines: Iterable[ReportLine], dest: str | IO[str] | None = None) -> None:
    """Write a batch of report lines to a path, a stream, or stdout."""
    if dest is None or isinstance(dest, str):
        writer = ReportWriter.open(dest)
    else:
        writer = ReportWriter(dest, owns_stream=False)
    try:
        for line in lines:
            writer.emit(line)
    finally:
        writer.close()


# ---------------------------------------------------------------------------
# argument parsing


class _UsageError(Exception):
    def __init__(self, message: str, usage: str) -> None:
        super().__init__(message)
        self.usage = usage


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise _UsageError(message, self.format_usage())


def _nonneg_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return value


def _positive_int(text: str) -> int:
    value = _nonneg_int(text)
    if value == 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="brocard",
                     description="Exact search and verification for n! + 1 = m^2.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("search", help="scan a range of n with the residue filter")
    p.add_argument("--max-n", type=_positive_int, required=True,
                   help="scan n = 2 .. MAX_N")
    p.add_argument("--primes", type=_positive_int, default=DEFAULT_POOL_SIZE,
                   help="filter pool size (default %(default)s)")
    p.add_argument("--checkpoint", metavar="PATH", help="checkpoint file to write")
    p.add_argument("--resume", action="store_true",
                   help="resume from the checkpoint (report is appended)")
    p.add_argument("--threads", type=_positive_int, default=1,
                   help="worker slices over the pool (default %(default)s)")
    p.add_argument("--report", metavar="PATH",
                   help="JSONL report path (default stdout)")
    p.set_defaults(handler=_cmd_search)

    p = sub.add_parser("verify", help="exact verdict for a single n")
    p.add_argument("n", type=_nonneg_int)
    p.add_argument("--factor-structure", action="store_true",
                   help="show the 2a * 2^(e-1) b split (solutions only)")
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("epsilon", help="digits of sqrt(n!) - isqrt(n!)")
    p.add_argument("n", type=_nonneg_int)
    p.add_argument("--digits", type=_positive_int, default=40,
                   help="fractional digits to print (default %(default)s)")
    p.add_argument("--nine-run", action="store_true",
                   help="measure the leading run of 9s")
    p.add_argument("--cap", type=_positive_int, default=DEFAULT_NINE_RUN_CAP,
                   help="nine-run precision cap in digits (default %(default)s)")
    p.set_defaults(handler=_cmd_epsilon)

    p = sub.add_parser("table", help="per-n table of k, defect, epsilon, ratio")
    p.add_argument("--from", dest="n_from", type=_nonneg_int, required=True)
    p.add_argument("--to", dest="n_to", type=_nonneg_int, required=True)
    p.add_argument("--digits", type=_positive_int, default=9,
                   help="digits for epsilon and ratio columns (default %(default)s)")
    p.set_defaults(handler=_cmd_table)

    p = sub.add_parser("polysys", help="integer points of the polynomial system")
    p.add_argument("--ymin", type=int, required=True)
    p.add_argument("--ymax", type=int, required=True)
    p.add_argument("--factorials", action="store_true",
                   help="keep only points with factorial x")
    p.set_defaults(handler=_cmd_polysys)

    return parser


# ---------------------------------------------------------------------------
# subcommands


def _cmd_search(args: argparse.Namespace) -> int:
    if args.resume and not args.checkpoint:
        print("error: --resume requires --checkpoint", file=sys.stderr)
        return 1
    config = SearchConfig(
        max_n=args.max_n,
        pool_size=args.primes,
        checkpoint_path=args.checkpoint,
        worker_count=args.threads,
        resume=args.resume,
    )
    writer = ReportWriter.open(args.report, append=args.resume)
    try:
        summary = run(config, on_event=writer.emit_event)
        if summary.completed:
            writer.write_summary(max(0, args.max_n - 1))
    finally:
        writer.close()
    print(
        f"scan 2..{args.max_n} done: {len(summary.solutions)} solution(s), "
        f"{len(summary.unresolved)} unresolved, {summary.wall_time_s:.2f}s",
        file=sys.stderr,
    )
    return 0


def _bool_str(flag: bool) -> str:
    return "true" if flag else "false"


def _cmd_verify(args: argparse.Namespace) -> int:
    report = conditions.verify(args.n)
    print(f"n: {report.n}")
    print(f"k: {decimal_str(report.k)}")
    print(f"m_candidate: {decimal_str(report.m_candidate)}")
    print(f"k_even: {_bool_str(report.k_even)}")
    print(f"defect: {decimal_str(report.defect)}")
    print(f"product_matches: {_bool_str(report.product_matches)}")
    print(f"is_solution: {_bool_str(report.is_solution)}")
    print(f"m: {decimal_str(report.m) if report.m is not None else 'none'}")
    if args.factor_structure:
        if report.is_solution:
            fs = conditions.factor_structure(args.n)
            print(f"half_even: {fs.half_even} = 2 * {fs.a}")
            print(f"half_pow: {fs.half_pow} = 2^{fs.e - 1} * {fs.b}")
            print(f"a: {fs.a}")
            print(f"b: {fs.b}")
            print(f"e: {fs.e}")
        else:
            print("factor_structure: undefined (not a solution)")
    return 0


def _cmd_epsilon(args: argparse.Namespace) -> int:
    value = epsilon_digits(args.n, args.digits)
    print(f"n: {args.n}")
    print(f"epsilon: {value}")
    if args.nine_run:
        profile = nine_run(args.n, args.cap)
        print(f"nine_run: {profile.nine_run}")
        print(f"nine_run_exact: {_bool_str(not profile.nine_run_is_lower_bound)}")
        print(f"digits_computed: {profile.digits_computed}")
    return 0


def _cmd_table(args: argparse.Namespace) -> int:
    if args.n_from > args.n_to:
        print("error: --from must not exceed --to", file=sys.stderr)
        return 1
    d = args.digits
    header = ["n", "k", "parity", "defect", "epsilon", "ratio", "solution", "note"]
    rows = [header]
    for n in range(args.n_from, args.n_to + 1):
        rep = conditions.verify(n)
        eps = str(epsilon_digits(n, d))
        try:
            ratio = str(k_ratio_digits(n, d))
        except ValueError:
            ratio = "-"
        note = ""
        if n in MISQUOTED_K and MISQUOTED_K[n] != rep.k:
            note = f"k corrected (misquoted as {MISQUOTED_K[n]} in circulated tables)"
        rows.append([
            str(n), decimal_str(rep.k), "even" if rep.k_even else "odd",
            decimal_str(rep.defect), eps, ratio,
            "yes" if rep.is_solution else "no", note,
        ])
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    for row in rows:
        cells = [c.rjust(w) if i < 6 else c.ljust(w)
                 for i, (c, w) in enumerate(zip(row, widths))]
        print("  ".join(cells).rstrip())
    return 0


def _cmd_polysys(args: argparse.Namespace) -> int:
    if args.ymin > args.ymax:
        print("error: --ymin must not exceed --ymax", file=sys.stderr)
        return 1
    for point in solve_window(args.ymin, args.ymax, factorials_only=args.factorials):
        if args.factorials:
            n = is_factorial(point.x)
            print(f"x={point.x} y={point.y} n={n} m={point.y + 1}")
        else:
            print(f"x={point.x} y={point.y}")
    return 0


# ---------------------------------------------------------------------------
# dispatch


def dispatch(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        sys.stderr.write(exc.usage)
        return 1
    except SystemExit as exc:  # --help, --version
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except ReportIntegrityError as exc:
        print(f"report integrity: {exc}", file=sys.stderr)
        return 2
    except CheckpointError as exc:
        print(f"checkpoint: {exc}", file=sys.stderr)
        return 3
    except (BitBudgetError, CeilingError) as exc:
        print(f"limit: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io: {exc}", file=sys.stderr)
        return 2
    except Exception:
        traceback.print_exc()
        return 2


def main() -> None:
    sys.exit(dispatch())
