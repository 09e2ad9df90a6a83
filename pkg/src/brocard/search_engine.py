"""Resumable filtered scan for solutions of n! + 1 = m**2.

The scan advances a factorial residue stream over a fixed prime pool and
applies the quadratic-residue filter at every n. Survivors, which are
vanishingly rare for a healthy pool, get an exact verdict; survivors
beyond the exact-verification ceiling are reported UNRESOLVED rather
than silently dropped. Progress is checkpointed to a small text file so
a scan can be killed and resumed without rework.

Determinism is a hard requirement: for a fixed pool, the reported
stream and all counters are identical no matter how the pool is sliced
across workers. Slices are merged in pool order and the first rejecting
prime in pool order is the one recorded.
"""

from __future__ import annotations

import os
import re
import time
import zlib
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

from . import conditions
from .factorial_engine import (
    EXACT_FACTORIAL_CEILING,
    FactorialState,
    PrimePool,
    build_prime_pool,
    initial_state,
)

DEFAULT_POOL_SIZE = 48
DEFAULT_CHECKPOINT_INTERVAL = 100_000

_CHECKPOINT_MAGIC = b"BROCARD-CHECKPOINT v1"
_CRC_RE = re.compile(rb"crc32=([0-9a-f]{8})\n")

# Worker slicing granularity; blocks never cross a checkpoint boundary.
_BLOCK = 2048

EventCallback = Callable[[str, int, "int | None"], None]


class CheckpointError(Exception):
    """Base for checkpoint load failures. All are fatal."""


class CheckpointVersionError(CheckpointError):
    """First line is not the expected format marker."""


class CheckpointChecksumError(CheckpointError):
    """Stored CRC32 does not match the file body."""


class CheckpointPoolMismatchError(CheckpointError):
    """Checkpoint was written for a different scan or prime pool."""


class CheckpointFormatError(CheckpointError):
    """Checksum holds but a field is structurally invalid."""


@dataclass
class SearchConfig:
    max_n: int
    pool_size: int = DEFAULT_POOL_SIZE
    checkpoint_path: str | None = None
    checkpoint_interval: int = DEFAULT_CHECKPOINT_INTERVAL
    exact_verify_ceiling: int = EXACT_FACTORIAL_CEILING
    worker_count: int = 1
    resume: bool = False
    # Halt after this n (checkpoint saved), leaving the scan resumable.
    # Used to exercise resume paths without killing the process.
    stop_n: int | None = None


@dataclass
class SearchSummary:
    """What one run segment did. Counters cover this segment only."""

    scanned_range: tuple[int, int]
    resumed_from: int | None
    completed: bool
    solutions: list[tuple[int, int]] = field(default_factory=list)
    survivors: int = 0
    unresolved: list[int] = field(default_factory=list)
    rejections_by_prime: dict[int, int] = field(default_factory=dict)
    wall_time_s: float = 0.0


# ---------------------------------------------------------------------------
# checkpoints


def save_checkpoint(state: FactorialState, pool: PrimePool, path: str) -> None:
    """Write the stream position atomically (temp file, then rename).

    Layout is line-oriented ASCII: a version marker, max_n, n, the prime
    count, one prime,residue pair per pool prime in pool order, and a
    CRC32 over every preceding byte.
    """
    assert len(state.residues) == len(pool.primes)
    lines = [
        _CHECKPOINT_MAGIC.decode("ascii"),
        f"max_n={pool.max_n}",
        f"n={state.n}",
        f"primes={len(pool.primes)}",
    ]
    lines.extend(f"{p},{r}" for p, r in zip(pool.primes, state.residues))
    body = ("\n".join(lines) + "\n").encode("ascii")
    data = body + b"crc32=%08x\n" % zlib.crc32(body)
    tmp = f"{path}.tmp"
    with open(tmp, "wb") as fh:
        fh.write(data)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def load_checkpoint(path: str, pool: PrimePool) -> FactorialState:
    """Parse and validate a checkpoint against the pool it must match.

    Validation order: version marker first, then checksum over the whole
    body, then field structure, then pool identity. Each failure mode
    raises its own CheckpointError subclass.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    first_line, _, _ = data.partition(b"\n")
    if first_line != _CHECKPOINT_MAGIC:
        raise CheckpointVersionError(
            f"{path}: unrecognized header {first_line[:40]!r}"
        )
    idx = data.rfind(b"\ncrc32=")
    if idx < 0:
        raise CheckpointChecksumError(f"{path}: checksum line missing")
    body, tail = data[: idx + 1], data[idx + 1 :]
    m = _CRC_RE.fullmatch(tail)
    if m is None:
        raise CheckpointChecksumError(f"{path}: malformed checksum line")
    if zlib.crc32(body) != int(m.group(1), 16):
        raise CheckpointChecksumError(f"{path}: checksum mismatch")

    lines = body.decode("ascii").splitlines()
    fields = {}
    for key, line in zip(("max_n", "n", "primes"), lines[1:4]):
        name, eq, value = line.partition("=")
        if name != key or eq != "=" or not value.isdigit():
            raise CheckpointFormatError(f"{path}: bad field line {line!r}")
        fields[key] = int(value)
    pair_lines = lines[4:]
    if fields.get("primes") != len(pair_lines):
        raise CheckpointFormatError(f"{path}: prime count disagrees with pair lines")
    if fields["n"] > fields["max_n"]:
        raise CheckpointFormatError(f"{path}: position n={fields['n']} beyond max_n")

    if fields["max_n"] != pool.max_n:
        raise CheckpointPoolMismatchError(
            f"{path}: checkpoint scans to {fields['max_n']}, this scan to {pool.max_n}"
        )
    if len(pair_lines) != len(pool.primes):
        raise CheckpointPoolMismatchError(
            f"{path}: pool has {len(pair_lines)} primes, expected {len(pool.primes)}"
        )
    residues = []
    for line, p in zip(pair_lines, pool.primes):
        left, comma, right = line.partition(",")
        if comma != "," or not left.isdigit() or not right.isdigit():
            raise CheckpointFormatError(f"{path}: bad pair line {line!r}")
        if int(left) != p:
            raise CheckpointPoolMismatchError(
                f"{path}: pool prime {left} does not match expected {p}"
            )
        r = int(right)
        if not 1 <= r < p:
            raise CheckpointFormatError(f"{path}: residue {r} out of range for prime {p}")
        residues.append(r)
    return FactorialState(n=fields["n"], residues=residues)


# ---------------------------------------------------------------------------
# scanning


def _scan_chunk(residues, primes, halves, n_lo, n_hi):
    """Advance one pool slice over [n_lo, n_hi], recording slice verdicts.

    Mutates residues in place. Verdict per n: the slice-local index of
    the first rejecting prime, or -1 when the whole slice passes.
    """
    verdicts = []
    width = len(primes)
    for n in range(n_lo, n_hi + 1):
        for i in range(width):
            residues[i] = residues[i] * n % primes[i]
        rej = -1
        if n >= 2:
            for i in range(width):
                p = primes[i]
                a = residues[i] + 1
                if a == p:
                    continue
                if pow(a, halves[i], p) == p - 1:
                    rej = i
                    break
        verdicts.append(rej)
    return verdicts


def run(config: SearchConfig, on_event: EventCallback | None = None) -> SearchSummary:
    """Execute (or resume) a scan and return what this segment found.

    Events are delivered in ascending n: ("solution", n, m),
    ("survivor", n, None), ("unresolved", n, None).
    """
    if config.max_n < 0:
        raise ValueError("max_n must be non-negative")
    if config.worker_count < 1:
        raise ValueError("worker_count must be positive")
    if config.checkpoint_interval < 1:
        raise ValueError("checkpoint_interval must be positive")
    if config.resume and not config.checkpoint_path:
        raise ValueError("resume requires a checkpoint path")

    started = time.perf_counter()
    pool = build_prime_pool(config.max_n, config.pool_size)
    resumed_from: int | None = None
    if config.resume:
        state = load_checkpoint(config.checkpoint_path, pool)
        resumed_from = state.n
    else:
        state = initial_state(pool)

    start = state.n
    stop = config.max_n if config.stop_n is None else min(config.stop_n, config.max_n)
    primes = list(pool.primes)
    halves = [(p - 1) >> 1 for p in primes]
    width = len(primes)

    solutions: list[tuple[int, int]] = []
    unresolved: list[int] = []
    survivors = 0
    rejections: Counter[int] = Counter()

    def settle_survivor(n: int) -> None:
        nonlocal survivors
        survivors += 1
        if n > config.exact_verify_ceiling:
            unresolved.append(n)
            if on_event:
                on_event("unresolved", n, None)
            return
        report = conditions.verify(n, ceiling=config.exact_verify_ceiling)
        if report.is_solution:
            solutions.append((n, report.m))
            if on_event:
                on_event("solution", n, report.m)
        elif on_event:
            on_event("survivor", n, None)

    def maybe_checkpoint(residues: list[int], n: int) -> None:
        if config.checkpoint_path and n > start:
            if n % config.checkpoint_interval == 0 or (n == stop and n < config.max_n):
                save_checkpoint(FactorialState(n=n, residues=list(residues)), pool,
                                config.checkpoint_path)

    if config.worker_count == 1:
        residues = list(state.residues)
        checkpointing = config.checkpoint_path is not None
        for n in range(start + 1, stop + 1):
            for i in range(width):
                residues[i] = residues[i] * n % primes[i]
            if n < 2:
                continue
            rejecting = None
            for i in range(width):
                p = primes[i]
                a = residues[i] + 1
                if a == p:
                    continue
                if pow(a, halves[i], p) == p - 1:
                    rejecting = p
                    break
            if rejecting is None:
                settle_survivor(n)
            else:
                rejections[rejecting] += 1
            if checkpointing:
                maybe_checkpoint(residues, n)
    else:
        workers = min(config.worker_count, width)
        bounds = [width * j // workers for j in range(workers + 1)]
        chunks = [list(state.residues[a:b]) for a, b in zip(bounds, bounds[1:])]
        pchunks = [primes[a:b] for a, b in zip(bounds, bounds[1:])]
        hchunks = [halves[a:b] for a, b in zip(bounds, bounds[1:])]
        interval = config.checkpoint_interval
        with ThreadPoolExecutor(max_workers=workers) as pool_ex:
            cur = start
            while cur < stop:
                boundary = (cur // interval + 1) * interval
                hi = min(cur + _BLOCK, stop, boundary)
                futures = [
                    pool_ex.submit(_scan_chunk, chunks[j], pchunks[j], hchunks[j],
                                   cur + 1, hi)
                    for j in range(workers)
                ]
                verdicts = [f.result() for f in futures]
                for off, n in enumerate(range(cur + 1, hi + 1)):
                    if n < 2:
                        continue
                    rejecting = None
                    for j in range(workers):
                        v = verdicts[j][off]
                        if v >= 0:
                            rejecting = primes[bounds[j] + v]
                            break
                    if rejecting is None:
                        settle_survivor(n)
                    else:
                        rejections[rejecting] += 1
                cur = hi
                flat = [r for chunk in chunks for r in chunk]
                maybe_checkpoint(flat, cur)

    return SearchSummary(
        scanned_range=(max(2, start + 1), stop),
        resumed_from=resumed_from,
        completed=stop == config.max_n,
        solutions=solutions,
        survivors=survivors,
        unresolved=unresolved,
        rejections_by_prime=dict(sorted(rejections.items())),
        wall_time_s=time.perf_counter() - started,
    )
