"""Signal files and monitor event records.

Signals travel as CSV: a header row naming the variables, one row of finite
numbers per sample.  An optional leading column named ``t`` carries
timestamps; it must be uniformly spaced (relative tolerance 1e-9) and is
used to infer the step, then dropped.  Monitor runs emit one JSON object
per line; infinities appear as the JSON-style Infinity tokens.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import IO, Iterator, Sequence

import numpy as np

from .errors import SignalFormatError
from .logic import _fmt_num
from .signals import Signal

_REL_TOL = 1e-9


def _parse_row(cells: Sequence[str], arity: int, line: int) -> list[float]:
    if len(cells) != arity:
        raise SignalFormatError(
            f"expected {arity} columns, got {len(cells)}", line)
    out = []
    for cell in cells:
        try:
            out.append(float(cell))
        except ValueError:
            raise SignalFormatError(f"bad number {cell!r}", line) from None
    return out


def _close_enough(a: float, b: float) -> bool:
    return abs(a - b) <= _REL_TOL * max(1.0, abs(a), abs(b))


def read_signal_csv(source: str | IO[str],
                    delta: float | None = None) -> Signal:
    """Load a whole CSV signal; infers the step from a ``t`` column.

    An explicit delta must agree with an inferred one.  Without a time
    column the default step is 1.
    """
    if isinstance(source, str):
        with open(source, newline="") as fh:
            return read_signal_csv(fh, delta)
    rd = csv.reader(source)
    try:
        header = next(rd)
    except StopIteration:
        raise SignalFormatError("empty signal file, header expected", 1) \
            from None
    names = tuple(h.strip() for h in header)
    if not names or any(not n for n in names):
        raise SignalFormatError("blank column name in header", 1)
    has_time = names[0] == "t"
    rows: list[list[float]] = []
    times: list[float] = []
    for line, cells in enumerate(rd, start=2):
        if not cells:
            continue
        vals = _parse_row(cells, len(names), line)
        if has_time:
            times.append(vals[0])
            rows.append(vals[1:])
        else:
            rows.append(vals)
    if has_time:
        names = names[1:]
        if not names:
            raise SignalFormatError("no variable columns besides t", 1)
        if len(times) >= 2:
            step = times[1] - times[0]
            if step <= 0:
                raise SignalFormatError("time column not increasing", 3)
            for j in range(1, len(times)):
                if not _close_enough(times[j] - times[j - 1], step):
                    raise SignalFormatError(
                        "time column not uniformly spaced", j + 2)
            if delta is None:
                delta = step
            elif not _close_enough(delta, step):
                raise SignalFormatError(
                    f"step {delta} disagrees with time column spacing {step}")
    if delta is None:
        delta = 1.0
    arr = np.array(rows, dtype=np.float64) if rows else \
        np.empty((0, len(names)), dtype=np.float64)
    return Signal(names, arr, delta)


def write_signal_csv(dest: str | IO[str], signal: Signal,
                     time_column: bool = False) -> None:
    if isinstance(dest, str):
        with open(dest, "w", newline="") as fh:
            write_signal_csv(fh, signal, time_column)
            return
    wr = csv.writer(dest)
    if time_column:
        wr.writerow(("t",) + signal.names)
        for j in range(len(signal)):
            wr.writerow([_fmt_num(j * signal.delta)]
                        + [_fmt_num(v) for v in signal.values[j]])
    else:
        wr.writerow(signal.names)
        for j in range(len(signal)):
            wr.writerow([_fmt_num(v) for v in signal.values[j]])


def open_signal_stream(fh: IO[str]) -> tuple[tuple[str, ...], bool,
                                             Iterator[tuple[int, list[float]]]]:
    """Header plus a lazy row iterator, for monitoring as data arrives.

    Returns (variable names, had-time-column, iterator of (line, values)).
    Timestamp values are kept in the rows when present; the caller decides
    how to check their spacing against its step.
    """
    rd = csv.reader(fh)
    try:
        header = next(rd)
    except StopIteration:
        raise SignalFormatError("empty signal stream, header expected", 1) \
            from None
    names = tuple(h.strip() for h in header)
    if not names or any(not n for n in names):
        raise SignalFormatError("blank column name in header", 1)
    has_time = names[0] == "t"

    def gen() -> Iterator[tuple[int, list[float]]]:
        for line, cells in enumerate(rd, start=2):
            if not cells:
                continue
            yield line, _parse_row(cells, len(names), line)

    return (names[1:] if has_time else names), has_time, gen()


@dataclass(frozen=True)
class MonitorEvent:
    """One line of monitor output: sample index, root interval, verdict."""

    i: int
    lb: float
    ub: float
    verdict: bool | None
    decided: bool

    def to_json(self) -> str:
        return json.dumps({
            "i": self.i,
            "lb": self.lb,
            "ub": self.ub,
            "verdict": self.verdict,
            "decided": self.decided,
        })

    @classmethod
    def from_json(cls, line: str) -> "MonitorEvent":
        obj = json.loads(line)
        verdict = obj["verdict"]
        if verdict is not None:
            verdict = bool(verdict)
        return cls(int(obj["i"]), float(obj["lb"]), float(obj["ub"]),
                   verdict, bool(obj["decided"]))
