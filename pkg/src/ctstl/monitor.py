"""Online monitoring of a growing signal prefix.

The monitor maintains, for every formula node and every anchor instant the
node can influence, an interval [lb, ub] guaranteed to contain the
robustness of every completion of the prefix seen so far.  Unknown samples
contribute the per-atom range derived from optional variable bounds
(default unbounded).  As soon as the root interval excludes zero the
verdict is final and further samples are ignored.

Update strategy per node kind, chosen at construction:

* atoms materialize one point entry per arriving sample;
* boolean nodes recompute the entries covered by their children's changes
  with vectorized interval min/max;
* windowed min/max and cumulative-rank nodes whose child has horizon zero
  (entries are points that never refine) use O(log w) per-anchor
  incremental state driven through the kernel backend;
* the same nodes over refining children, and Until, rescan the affected
  windows directly; this is exact for any child because node arrays always
  hold the current interval, pads included.

``rosi_naive`` recomputes the same intervals by direct recursion and is
both the correctness oracle and the performance baseline, wrapped as
:class:`NaiveMonitor` for engine-against-engine runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import _kernels
from ._accel import kernel, resolve_backend
from .errors import ArityMismatch, RankOutOfRange
from .logic import (
    Always,
    And,
    Atom,
    Cumulative,
    Eventually,
    Formula,
    Not,
    Or,
    Until,
    horizon,
    iter_nodes,
    node_horizons,
    validate,
)
from .semantics import satisfies
from .signals import Bounds, Signal, atom_bounds

INF = math.inf

# Largest total heap-cell count the incremental cumulative states may
# allocate before those nodes fall back to direct window rescans.
DEFAULT_MAX_CELLS = 32_000_000


@dataclass(frozen=True)
class RoSI:
    """Interval bracketing the robustness of every completion."""

    lb: float
    ub: float

    def __post_init__(self) -> None:
        if not self.lb <= self.ub:
            raise ValueError(f"RoSI bounds out of order: [{self.lb}, {self.ub}]")

    @property
    def is_point(self) -> bool:
        return self.lb == self.ub

    def __str__(self) -> str:
        return f"[{self.lb}, {self.ub}]"


def rosi_neg(a: RoSI) -> RoSI:
    return RoSI(-a.ub, -a.lb)


def rosi_min(a: RoSI, b: RoSI) -> RoSI:
    return RoSI(min(a.lb, b.lb), min(a.ub, b.ub))


def rosi_max(a: RoSI, b: RoSI) -> RoSI:
    return RoSI(max(a.lb, b.lb), max(a.ub, b.ub))


def rosi_max_tau(windows: Sequence[RoSI], k: int) -> RoSI:
    """Componentwise k-th largest (1-based from the top) of the intervals."""
    if not 1 <= k <= len(windows):
        raise RankOutOfRange(k, len(windows))
    lbs = sorted((iv.lb for iv in windows), reverse=True)
    ubs = sorted((iv.ub for iv in windows), reverse=True)
    return RoSI(lbs[k - 1], ubs[k - 1])


@dataclass(frozen=True)
class Verdict:
    """Monitoring outcome: True / False / None (unknown) plus evidence."""

    outcome: bool | None
    rosi: RoSI
    decided_at: int | None = None

    @property
    def decided(self) -> bool:
        return self.outcome is not None

    def __str__(self) -> str:
        return "Unknown" if self.outcome is None else str(self.outcome)


def _init_rosi(node: Formula, bounds) -> tuple[float, float]:
    """Entry value before any sample: atom ranges propagated upward."""
    if isinstance(node, Atom):
        return atom_bounds(node, bounds)
    if isinstance(node, Not):
        lo, hi = _init_rosi(node.child, bounds)
        return -hi, -lo
    if isinstance(node, (And, Or)):
        llo, lhi = _init_rosi(node.left, bounds)
        rlo, rhi = _init_rosi(node.right, bounds)
        if isinstance(node, And):
            return min(llo, rlo), min(lhi, rhi)
        return max(llo, rlo), max(lhi, rhi)
    if isinstance(node, Until):
        rlo, rhi = _init_rosi(node.right, bounds)
        a, _ = node.span
        if a == 0:
            # d = 0 contributes the bare right entry, which dominates the
            # min-with-left candidates at larger d.
            return rlo, rhi
        llo, lhi = _init_rosi(node.left, bounds)
        return min(rlo, llo), min(rhi, lhi)
    if isinstance(node, (Eventually, Always, Cumulative)):
        # any rank statistic of identical entries is that entry
        return _init_rosi(node.child, bounds)
    raise TypeError(f"not a formula node: {node!r}")


class _Node:
    """Mutable per-node monitoring state."""

    __slots__ = (
        "form", "nid", "lo", "hi", "a", "b", "k", "mode", "children",
        "lb", "ub", "init", "cols", "coefs", "sign", "rhs",
        "top_v", "bot_v", "top_n", "bot_n", "m_cnt", "g_lb", "g_ub", "run",
    )

    def __init__(self, form: Formula, nid: int, lo: int, hi: int):
        self.form = form
        self.nid = nid
        self.lo = lo
        self.hi = hi
        self.a = 0
        self.b = 0
        self.k = 0
        self.mode = ""
        self.children: list[_Node] = []
        self.cols = None
        self.coefs = None
        self.sign = 1
        self.rhs = 0.0
        self.top_v = None
        self.bot_v = None
        self.top_n = None
        self.bot_n = None
        self.m_cnt = None
        self.g_lb = None
        self.g_ub = None
        self.run = None

    @property
    def size(self) -> int:
        return self.hi - self.lo + 1


def _until_anchor(left: _Node, right: _Node, t: int,
                  a: int, b: int) -> tuple[float, float]:
    rs = t + a - right.lo
    re = t + b - right.lo + 1
    r_lb = right.lb[rs:re]
    r_ub = right.ub[rs:re]
    if b == 0:
        return float(r_lb[0]), float(r_ub[0])
    ls = t - left.lo
    cm_lb = np.minimum.accumulate(left.lb[ls:ls + b])
    cm_ub = np.minimum.accumulate(left.ub[ls:ls + b])
    if a >= 1:
        pm_lb = cm_lb[a - 1:b]
        pm_ub = cm_ub[a - 1:b]
    else:
        pm_lb = np.concatenate(([INF], cm_lb))
        pm_ub = np.concatenate(([INF], cm_ub))
    lb = float(np.minimum(r_lb, pm_lb).max())
    ub = float(np.minimum(r_ub, pm_ub).max())
    return lb, ub


class MonitorState:
    """Single-owner incremental monitor; feed samples with push_sample."""

    def __init__(self, formula: Formula, schema: Sequence[str],
                 delta: float = 1.0,
                 bounds: Mapping[str, Bounds] | None = None,
                 backend: str | None = None,
                 max_cells: int = DEFAULT_MAX_CELLS):
        self.names = tuple(schema)
        self.delta = float(delta)
        self.formula = validate(formula, self.names, self.delta)
        self.bounds = dict(bounds) if bounds else {}
        self.backend = resolve_backend(backend)
        self.horizon = horizon(self.formula)
        self.i = 0
        self._rows: list[tuple[float, ...]] = []
        self._c_push = kernel(_kernels.c_anchor_push_kernel, self.backend)
        self._e_push = kernel(_kernels.ext_anchor_push_kernel, self.backend)
        self._build(max_cells)
        root = self._post[-1]
        self.verdict = self._judge(RoSI(float(root.lb[0]), float(root.ub[0])),
                                   decided_at=-1)

    # -- construction -------------------------------------------------

    def _build(self, max_cells: int) -> None:
        ranges = node_horizons(self.formula)
        by_obj: dict[int, _Node] = {}
        pre: list[_Node] = []
        for nid, form in iter_nodes(self.formula):
            lo, hi = ranges[nid]
            node = _Node(form, nid, lo, hi)
            by_obj[id(form)] = node
            pre.append(node)
        self._pre = pre
        post: list[_Node] = []

        def wire(form: Formula) -> _Node:
            node = by_obj[id(form)]
            if isinstance(form, Not):
                node.children = [wire(form.child)]
            elif isinstance(form, (And, Or, Until)):
                node.children = [wire(form.left), wire(form.right)]
            elif isinstance(form, (Eventually, Always, Cumulative)):
                node.children = [wire(form.child)]
            post.append(node)
            return node

        wire(self.formula)
        self._post = post

        budget = max_cells
        for node in post:
            form = node.form
            ilo, ihi = _init_rosi(form, self.bounds)
            node.init = (ilo, ihi)
            node.lb = np.full(max(node.size, 0), ilo, dtype=np.float64)
            node.ub = np.full(max(node.size, 0), ihi, dtype=np.float64)
            if isinstance(form, Atom):
                node.mode = "atom"
                node.cols = [self.names.index(n) for n, _ in form.coeffs]
                node.coefs = [c for _, c in form.coeffs]
                node.sign = form.sign
                node.rhs = form.rhs
            elif isinstance(form, Not):
                node.mode = "neg"
            elif isinstance(form, And):
                node.mode = "and"
            elif isinstance(form, Or):
                node.mode = "or"
            elif isinstance(form, Until):
                node.a, node.b = form.span
                node.mode = "until"
            elif isinstance(form, (Eventually, Always)):
                node.a, node.b = form.span
                pointlike = horizon(form.child) == 0
                node.mode = "ext_kernel" if pointlike else "ext_direct"
                if node.mode == "ext_kernel" and node.size > 0:
                    node.run = np.zeros(node.size, dtype=np.float64)
                    node.m_cnt = np.zeros(node.size, dtype=np.int64)
            elif isinstance(form, Cumulative):
                node.a, node.b = form.span
                node.k = form.order
                w = node.b - node.a + 1
                cells = node.size * (w + 1)
                if horizon(form.child) == 0 and cells <= budget:
                    budget -= cells
                    node.mode = "c_kernel"
                    if node.size > 0:
                        node.top_v = np.empty((node.size, node.k),
                                              dtype=np.float64)
                        node.bot_v = np.empty((node.size, w - node.k + 1),
                                              dtype=np.float64)
                        node.top_n = np.zeros(node.size, dtype=np.int64)
                        node.bot_n = np.zeros(node.size, dtype=np.int64)
                        node.m_cnt = np.zeros(node.size, dtype=np.int64)
                        node.g_lb = np.zeros(node.size, dtype=np.int64)
                        node.g_ub = np.zeros(node.size, dtype=np.int64)
                else:
                    node.mode = "c_direct"
            else:  # pragma: no cover
                raise TypeError(f"not a formula node: {form!r}")

    # -- update pass --------------------------------------------------

    def _margin(self, node: _Node, row: tuple[float, ...]) -> float:
        acc = 0.0
        for col, coeff in zip(node.cols, node.coefs):
            acc += coeff * row[col]
        return node.sign * (acc - node.rhs)

    def _clip(self, node: _Node, lo: int, hi: int) -> tuple[int, int] | None:
        lo = max(lo, node.lo)
        hi = min(hi, node.hi)
        if lo > hi:
            return None
        return lo, hi

    def _update(self, node: _Node, i: int, row,
                spans: list) -> tuple[int, int] | None:
        if node.size <= 0:
            return None
        mode = node.mode
        if mode == "atom":
            if node.lo <= i <= node.hi:
                y = self._margin(node, row)
                node.lb[i - node.lo] = y
                node.ub[i - node.lo] = y
                return i, i
            return None
        if mode == "neg":
            span = spans[0]
            if span is None:
                return None
            got = self._clip(node, *span)
            if got is None:
                return None
            lo, hi = got
            child = node.children[0]
            s, e = lo - child.lo, hi - child.lo + 1
            node.lb[lo - node.lo:hi - node.lo + 1] = -child.ub[s:e]
            node.ub[lo - node.lo:hi - node.lo + 1] = -child.lb[s:e]
            return lo, hi
        if mode in ("and", "or"):
            where = [s for s in spans if s is not None]
            if not where:
                return None
            got = self._clip(node, min(s[0] for s in where),
                             max(s[1] for s in where))
            if got is None:
                return None
            lo, hi = got
            left, right = node.children
            ls, le = lo - left.lo, hi - left.lo + 1
            rs, re = lo - right.lo, hi - right.lo + 1
            op = np.minimum if mode == "and" else np.maximum
            node.lb[lo - node.lo:hi - node.lo + 1] = op(
                left.lb[ls:le], right.lb[rs:re])
            node.ub[lo - node.lo:hi - node.lo + 1] = op(
                left.ub[ls:le], right.ub[rs:re])
            return lo, hi
        if mode in ("ext_kernel", "c_kernel"):
            span = spans[0]
            if span is None:
                return None
            c = span[0]
            got = self._clip(node, c - node.b, c - node.a)
            if got is None:
                return None
            lo, hi = got
            child = node.children[0]
            v = float(child.lb[c - child.lo])
            w = node.b - node.a + 1
            plo, phi = child.init
            if mode == "c_kernel":
                self._c_push(v, lo - node.lo, hi - node.lo, node.k, w,
                             plo, phi, node.top_v, node.top_n, node.bot_v,
                             node.bot_n, node.m_cnt, node.g_lb, node.g_ub,
                             node.lb, node.ub)
            else:
                want_min = isinstance(node.form, Always)
                self._e_push(v, lo - node.lo, hi - node.lo, w, want_min,
                             plo, phi, node.run, node.m_cnt,
                             node.lb, node.ub)
            return lo, hi
        if mode in ("ext_direct", "c_direct"):
            span = spans[0]
            if span is None:
                return None
            got = self._clip(node, span[0] - node.b, span[1] - node.a)
            if got is None:
                return None
            lo, hi = got
            child = node.children[0]
            w = node.b - node.a + 1
            for t in range(lo, hi + 1):
                r = t - node.lo
                if node.lb[r] == node.ub[r]:
                    continue
                s = t + node.a - child.lo
                sl = child.lb[s:s + w]
                su = child.ub[s:s + w]
                if mode == "ext_direct":
                    if isinstance(node.form, Always):
                        node.lb[r] = sl.min()
                        node.ub[r] = su.min()
                    else:
                        node.lb[r] = sl.max()
                        node.ub[r] = su.max()
                else:
                    node.lb[r] = np.partition(sl, w - node.k)[w - node.k]
                    node.ub[r] = np.partition(su, w - node.k)[w - node.k]
            return lo, hi
        if mode == "until":
            left, right = node.children
            lo = hi = None
            if spans[0] is not None and node.b >= 1:
                lo, hi = spans[0][0] - (node.b - 1), spans[0][1]
            if spans[1] is not None:
                rlo, rhi = spans[1][0] - node.b, spans[1][1] - node.a
                lo = rlo if lo is None else min(lo, rlo)
                hi = rhi if hi is None else max(hi, rhi)
            if lo is None:
                return None
            got = self._clip(node, lo, hi)
            if got is None:
                return None
            lo, hi = got
            for t in range(lo, hi + 1):
                r = t - node.lo
                if node.lb[r] == node.ub[r]:
                    continue
                node.lb[r], node.ub[r] = _until_anchor(
                    left, right, t, node.a, node.b)
            return lo, hi
        raise AssertionError(f"unknown mode {mode}")  # pragma: no cover

    def _judge(self, root: RoSI, decided_at: int) -> Verdict:
        if root.lb > 0:
            return Verdict(True, root, decided_at)
        if root.ub < 0:
            return Verdict(False, root, decided_at)
        return Verdict(None, root, None)

    def push_sample(self, x: Sequence[float]) -> Verdict:
        """Consume one sample vector; returns the (possibly new) verdict."""
        if len(x) != len(self.names):
            raise ArityMismatch(len(self.names), len(x))
        row = tuple(float(v) for v in x)
        i = self.i
        self.i += 1
        self._rows.append(row)
        if self.verdict.decided:
            return self.verdict
        spans: dict[int, tuple[int, int] | None] = {}
        for node in self._post:
            child_spans = [spans[c.nid] for c in node.children]
            spans[node.nid] = self._update(node, i, row, child_spans)
        root = self._post[-1]
        self.verdict = self._judge(
            RoSI(float(root.lb[0]), float(root.ub[0])), decided_at=i)
        return self.verdict

    def finalize(self) -> Verdict:
        """Resolve the verdict at end of stream.

        A point root decides by sign; an exactly-zero point on a complete
        trace falls back to the qualitative semantics.  Anything else stays
        Unknown, with the residual interval attached.
        """
        if self.verdict.decided:
            return self.verdict
        root = self.verdict.rosi
        last = self.i - 1
        if root.is_point:
            r = root.lb
            if r != 0:
                self.verdict = Verdict(r > 0, root, last)
            elif self.i >= self.horizon + 1:
                sig = Signal(self.names, np.array(self._rows), self.delta)
                self.verdict = Verdict(satisfies(self.formula, sig, 0),
                                       root, last)
        return self.verdict

    # -- inspection ---------------------------------------------------

    def root_rosi(self) -> RoSI:
        root = self._post[-1]
        return RoSI(float(root.lb[0]), float(root.ub[0]))

    def node_ids(self) -> list[tuple[int, Formula]]:
        return [(node.nid, node.form) for node in self._pre]

    def node_entries(self, nid: int) -> dict[int, RoSI]:
        """Current worklist of one node: anchor instant -> interval."""
        for node in self._pre:
            if node.nid == nid:
                return {
                    node.lo + r: RoSI(float(node.lb[r]), float(node.ub[r]))
                    for r in range(node.size)
                }
        raise KeyError(nid)


def new_monitor(f: Formula, schema: Sequence[str], delta: float = 1.0,
                bounds: Mapping[str, Bounds] | None = None,
                backend: str | None = None,
                max_cells: int = DEFAULT_MAX_CELLS) -> MonitorState:
    """Construct a monitor with empty prefix and Unknown (or immediate)
    verdict."""
    return MonitorState(f, schema, delta, bounds, backend, max_cells)


def push_sample(m: MonitorState, x: Sequence[float]) -> Verdict:
    return m.push_sample(x)


def finalize(m: MonitorState) -> Verdict:
    return m.finalize()


def rosi_naive(f: Formula, prefix: Signal, t: int = 0,
               bounds: Mapping[str, Bounds] | None = None) -> RoSI:
    """Interval semantics by direct recursion over the partial trace.

    Instants beyond the prefix contribute the atom-level ranges.  Exact for
    the same componentwise interval recursion the monitor maintains, and
    therefore its oracle.
    """
    f = validate(f, prefix.names, prefix.delta)
    n = len(prefix)
    rows = [tuple(float(v) for v in prefix.values[j]) for j in range(n)]
    name_to_col = {name: j for j, name in enumerate(prefix.names)}
    memo: dict[tuple[int, int], tuple[float, float]] = {}

    def atom_point(node: Atom, t: int) -> float:
        acc = 0.0
        for name, coeff in node.coeffs:
            acc += coeff * rows[t][name_to_col[name]]
        return node.sign * (acc - node.rhs)

    def ev(node: Formula, t: int) -> tuple[float, float]:
        key = (id(node), t)
        if key in memo:
            return memo[key]
        if isinstance(node, Atom):
            if t < n:
                y = atom_point(node, t)
                out = (y, y)
            else:
                out = atom_bounds(node, bounds)
        elif isinstance(node, Not):
            clo, chi = ev(node.child, t)
            out = (-chi, -clo)
        elif isinstance(node, (And, Or)):
            llo, lhi = ev(node.left, t)
            rlo, rhi = ev(node.right, t)
            if isinstance(node, And):
                out = (min(llo, rlo), min(lhi, rhi))
            else:
                out = (max(llo, rlo), max(lhi, rhi))
        elif isinstance(node, Until):
            a, b = node.span
            best_lo, best_hi = -INF, -INF
            pm_lo, pm_hi = INF, INF
            for d in range(b + 1):
                if d >= 1:
                    llo, lhi = ev(node.left, t + d - 1)
                    pm_lo = min(pm_lo, llo)
                    pm_hi = min(pm_hi, lhi)
                if d >= a:
                    rlo, rhi = ev(node.right, t + d)
                    best_lo = max(best_lo, min(rlo, pm_lo))
                    best_hi = max(best_hi, min(rhi, pm_hi))
            out = (best_lo, best_hi)
        elif isinstance(node, (Eventually, Always)):
            a, b = node.span
            vals = [ev(node.child, t + d) for d in range(a, b + 1)]
            agg = max if isinstance(node, Eventually) else min
            out = (agg(v[0] for v in vals), agg(v[1] for v in vals))
        elif isinstance(node, Cumulative):
            a, b = node.span
            vals = [ev(node.child, t + d) for d in range(a, b + 1)]
            los = sorted((v[0] for v in vals), reverse=True)
            his = sorted((v[1] for v in vals), reverse=True)
            out = (los[node.order - 1], his[node.order - 1])
        else:
            raise TypeError(f"not a formula node: {node!r}")
        memo[key] = out
        return out

    return RoSI(*ev(f, t))


class NaiveMonitor:
    """Same interface and verdict contract, by full prefix recomputation.

    Every push rebuilds the root interval with rosi_naive, so a push costs
    O(prefix * window) instead of the incremental engine's near-constant
    work; exists to cross-check verdicts and to be benchmarked against.
    """

    def __init__(self, f: Formula, schema: Sequence[str], delta: float = 1.0,
                 bounds: Mapping[str, Bounds] | None = None):
        self.names = tuple(schema)
        self.delta = float(delta)
        self.formula = validate(f, self.names, self.delta)
        self.bounds = dict(bounds) if bounds else {}
        self.horizon = horizon(self.formula)
        self.i = 0
        self._rows: list[tuple[float, ...]] = []
        empty = Signal(self.names, np.empty((0, len(self.names))), self.delta)
        root = rosi_naive(self.formula, empty, 0, self.bounds)
        self.verdict = self._judge(root, -1)

    def _judge(self, root: RoSI, decided_at: int) -> Verdict:
        if root.lb > 0:
            return Verdict(True, root, decided_at)
        if root.ub < 0:
            return Verdict(False, root, decided_at)
        return Verdict(None, root, None)

    def push_sample(self, x: Sequence[float]) -> Verdict:
        if len(x) != len(self.names):
            raise ArityMismatch(len(self.names), len(x))
        row = tuple(float(v) for v in x)
        i = self.i
        self.i += 1
        self._rows.append(row)
        if self.verdict.decided:
            return self.verdict
        sig = Signal(self.names, np.array(self._rows), self.delta)
        root = rosi_naive(self.formula, sig, 0, self.bounds)
        self.verdict = self._judge(root, i)
        return self.verdict

    def finalize(self) -> Verdict:
        if self.verdict.decided:
            return self.verdict
        root = self.verdict.rosi
        last = self.i - 1
        if root.is_point:
            r = root.lb
            if r != 0:
                self.verdict = Verdict(r > 0, root, last)
            elif self.i >= self.horizon + 1:
                sig = Signal(self.names, np.array(self._rows), self.delta)
                self.verdict = Verdict(satisfies(self.formula, sig, 0),
                                       root, last)
        return self.verdict
