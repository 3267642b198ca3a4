"""Sliding-window aggregation engines.

Two streaming classes (:class:`SlidingKth`, :class:`SlidingExtremum`) for
incremental use, and batch drivers over whole traces that run on the
selected backend.  The naive_* functions recompute every window from
scratch; they are the re-evaluation baseline the incremental engines are
benchmarked and tested against.
"""

from __future__ import annotations

import heapq
from collections import deque

import numpy as np

from . import _kernels
from ._accel import kernel
from .errors import RankOutOfRange, WindowExceedsTrace
from .logic import TimeInterval, _snap_int

# Physical heap size allowed before dead entries are swept out.
_COMPACT_SLACK = 64


class SlidingKth:
    """k-th largest over a sliding window, one push at a time.

    Entries are keyed (value, arrival index) for a deterministic total
    order.  The top heap (min-ordered) holds the k largest live entries,
    the rest heap (max-ordered, stored negated) holds the others.  Expiry
    is lazy: the arrival index leaving the window goes into ``tombstones``
    and the entry is dropped when it surfaces at a heap root, so each push
    is O(log w) amortized.
    """

    def __init__(self, k: int, window: int):
        k = int(k)
        window = int(window)
        if window < 1:
            raise ValueError(f"window must be >= 1, got {window}")
        if not 1 <= k <= window:
            raise RankOutOfRange(k, window)
        self.k = k
        self.window = window
        self._top: list[tuple[float, int]] = []
        self._rest: list[tuple[float, int]] = []
        self._loc: dict[int, int] = {}
        self.tombstones: set[int] = set()
        self._live_top = 0
        self._live_rest = 0
        self._count = 0

    @property
    def live_top(self) -> int:
        return self._live_top

    @property
    def live_rest(self) -> int:
        return self._live_rest

    def _purge_top(self) -> None:
        while self._top and self._top[0][1] in self.tombstones:
            self.tombstones.discard(heapq.heappop(self._top)[1])

    def _purge_rest(self) -> None:
        while self._rest and -self._rest[0][1] in self.tombstones:
            self.tombstones.discard(-heapq.heappop(self._rest)[1])

    def _compact(self) -> None:
        if len(self._top) > 2 * self._live_top + _COMPACT_SLACK:
            keep = []
            for v, idx in self._top:
                if idx in self.tombstones:
                    self.tombstones.discard(idx)
                else:
                    keep.append((v, idx))
            self._top = keep
            heapq.heapify(self._top)
        if len(self._rest) > 2 * self._live_rest + _COMPACT_SLACK:
            keep = []
            for nv, nidx in self._rest:
                if -nidx in self.tombstones:
                    self.tombstones.discard(-nidx)
                else:
                    keep.append((nv, nidx))
            self._rest = keep
            heapq.heapify(self._rest)

    def push(self, value: float) -> tuple[int, float] | None:
        """Insert a value; once the window is full, return (start, k-th).

        Nothing is returned during warm-up.  The rest heap takes the entry
        when it orders below the top heap's root, the top heap otherwise;
        rebalancing then restores exactly k live entries on top.
        """
        i = self._count
        self._count += 1
        self._purge_top()
        entry = (float(value), i)
        if self._live_top and entry >= self._top[0]:
            heapq.heappush(self._top, entry)
            self._loc[i] = 0
            self._live_top += 1
        else:
            heapq.heappush(self._rest, (-entry[0], -i))
            self._loc[i] = 1
            self._live_rest += 1
        gone = i - self.window
        if gone >= 0:
            self.tombstones.add(gone)
            if self._loc.pop(gone) == 0:
                self._live_top -= 1
            else:
                self._live_rest -= 1
        while self._live_top > self.k:
            self._purge_top()
            v, idx = heapq.heappop(self._top)
            heapq.heappush(self._rest, (-v, -idx))
            self._loc[idx] = 1
            self._live_top -= 1
            self._live_rest += 1
        while self._live_top < self.k and self._live_rest > 0:
            self._purge_rest()
            nv, nidx = heapq.heappop(self._rest)
            heapq.heappush(self._top, (-nv, -nidx))
            self._loc[-nidx] = 0
            self._live_rest -= 1
            self._live_top += 1
        self._compact()
        if i >= self.window - 1:
            self._purge_top()
            return i - self.window + 1, self._top[0][0]
        return None


class SlidingExtremum:
    """Sliding min or max via a monotonic deque of (arrival, value)."""

    def __init__(self, window: int, mode: str = "min"):
        window = int(window)
        if window < 1:
            raise ValueError(f"window must be >= 1, got {window}")
        if mode not in ("min", "max"):
            raise ValueError(f"mode must be 'min' or 'max', got {mode!r}")
        self.window = window
        self.mode = mode
        self._q: deque[tuple[int, float]] = deque()
        self._count = 0

    def push(self, value: float) -> tuple[int, float] | None:
        i = self._count
        self._count += 1
        v = float(value)
        if self.mode == "max":
            while self._q and self._q[-1][1] <= v:
                self._q.pop()
        else:
            while self._q and self._q[-1][1] >= v:
                self._q.pop()
        self._q.append((i, v))
        if self._q[0][0] <= i - self.window:
            self._q.popleft()
        if i >= self.window - 1:
            return i - self.window + 1, self._q[0][1]
        return None


def _as_span(interval) -> tuple[int, int]:
    if isinstance(interval, TimeInterval):
        lo, hi = interval.lo, interval.hi
    else:
        lo, hi = interval
    ilo, ihi = _snap_int(float(lo)), _snap_int(float(hi))
    if ilo is None or ihi is None:
        raise ValueError(
            f"window [{lo},{hi}] must have integer sample offsets")
    if ilo < 0 or ilo > ihi:
        raise ValueError(f"bad window [{lo},{hi}]")
    return ilo, ihi


def _prep(trace, interval) -> tuple[np.ndarray, int, int]:
    arr = np.asarray(trace, dtype=np.float64).ravel()
    lo, hi = _as_span(interval)
    w = hi - lo + 1
    if hi > arr.size - 1:
        raise WindowExceedsTrace(w, arr.size)
    return arr, lo, w


def sliding_kth_batch(trace, interval, k: int,
                      backend: str | None = None) -> np.ndarray:
    """k-th largest of trace[t+lo .. t+hi] for every admissible t.

    Output index t runs from 0; entry t covers the window anchored at t.
    """
    arr, lo, w = _prep(trace, interval)
    k = int(k)
    if not 1 <= k <= w:
        raise RankOutOfRange(k, w)
    out = np.empty(arr.size - lo - w + 1, dtype=np.float64)
    kernel(_kernels.kth_batch_kernel, backend)(arr[lo:], w, k, out)
    return out


def sliding_extremum_batch(trace, interval, mode: str,
                           backend: str | None = None) -> np.ndarray:
    """Per-window min or max, same indexing as sliding_kth_batch."""
    if mode not in ("min", "max"):
        raise ValueError(f"mode must be 'min' or 'max', got {mode!r}")
    arr, lo, w = _prep(trace, interval)
    out = np.empty(arr.size - lo - w + 1, dtype=np.float64)
    kernel(_kernels.extremum_batch_kernel, backend)(
        arr[lo:], w, mode == "min", out)
    return out


def until_batch(lvals, rvals, a: int, b: int,
                backend: str | None = None) -> np.ndarray:
    """Bounded-until combine of two robustness traces.

    out[t] = max_{d in [a,b]} min(rvals[t+d], min of lvals[t .. t+d-1]).
    Output covers every t for which both argument traces reach far enough.
    """
    larr = np.asarray(lvals, dtype=np.float64).ravel()
    rarr = np.asarray(rvals, dtype=np.float64).ravel()
    if not 0 <= a <= b:
        raise ValueError(f"bad window [{a},{b}]")
    m = rarr.size - b
    if b >= 1:
        m = min(m, larr.size - b + 1)
    if m <= 0:
        raise WindowExceedsTrace(b + 1, min(larr.size, rarr.size))
    out = np.empty(m, dtype=np.float64)
    kernel(_kernels.until_batch_kernel, backend)(larr, rarr, a, b, out)
    return out


def _chunk_rows(w: int) -> int:
    # keep each partitioned block near 64 MB
    return max(1, int(8_000_000 // max(w, 1)))


def naive_kth_batch(trace, interval, k: int) -> np.ndarray:
    """Per-window rank by re-partitioning every window from scratch.

    O(n * w) total work; the baseline the incremental engine is measured
    against.  Chunked so the materialized window matrix stays bounded.
    """
    arr, lo, w = _prep(trace, interval)
    k = int(k)
    if not 1 <= k <= w:
        raise RankOutOfRange(k, w)
    shifted = arr[lo:]
    view = np.lib.stride_tricks.sliding_window_view(shifted, w)
    out = np.empty(view.shape[0], dtype=np.float64)
    step = _chunk_rows(w)
    for s in range(0, out.size, step):
        e = min(s + step, out.size)
        out[s:e] = np.partition(view[s:e], w - k, axis=1)[:, w - k]
    return out


def naive_extremum_batch(trace, interval, mode: str) -> np.ndarray:
    """Per-window scan min/max; oracle for sliding_extremum_batch."""
    if mode not in ("min", "max"):
        raise ValueError(f"mode must be 'min' or 'max', got {mode!r}")
    arr, lo, w = _prep(trace, interval)
    view = np.lib.stride_tricks.sliding_window_view(arr[lo:], w)
    out = np.empty(view.shape[0], dtype=np.float64)
    step = _chunk_rows(w)
    agg = np.min if mode == "min" else np.max
    for s in range(0, out.size, step):
        e = min(s + step, out.size)
        out[s:e] = agg(view[s:e], axis=1)
    return out
