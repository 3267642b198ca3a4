"""Hot loops shared by both backends.

Plain Python over preallocated numpy arrays, written so numba can compile
every function unchanged; ``_accel.kernel`` picks the compiled or interpreted
version.  Helpers are registered jitable so the compiled kernels can call
them; under the interpreted backend they are ordinary functions.

Heap convention: arrays are binary min-heaps ordered by value only.  A
max-heap is a min-heap of negated values, which keeps one set of helpers.
Expired entries are tombstoned lazily: an entry with arrival index <= i - w
is dead and is dropped when it surfaces at a root or during compaction.
"""

from __future__ import annotations

import numpy as np

try:
    from numba.extending import register_jitable
except ImportError:  # pragma: no cover - numba is a declared dependency
    def register_jitable(fn=None, **kwargs):
        if fn is None:
            return lambda f: f
        return fn


@register_jitable
def _kv_push(hv, hx, n, v, idx):
    hv[n] = v
    hx[n] = idx
    j = n
    while j > 0:
        p = (j - 1) >> 1
        if hv[p] <= hv[j]:
            break
        hv[p], hv[j] = hv[j], hv[p]
        hx[p], hx[j] = hx[j], hx[p]
        j = p


@register_jitable
def _kv_pop(hv, hx, n):
    n -= 1
    hv[0] = hv[n]
    hx[0] = hx[n]
    j = 0
    while True:
        left = 2 * j + 1
        if left >= n:
            break
        s = left
        right = left + 1
        if right < n and hv[right] < hv[left]:
            s = right
        if hv[j] <= hv[s]:
            break
        hv[j], hv[s] = hv[s], hv[j]
        hx[j], hx[s] = hx[s], hx[j]
        j = s
    return n


@register_jitable
def _kv_heapify(hv, hx, n):
    for j0 in range(n // 2 - 1, -1, -1):
        j = j0
        while True:
            left = 2 * j + 1
            if left >= n:
                break
            s = left
            right = left + 1
            if right < n and hv[right] < hv[left]:
                s = right
            if hv[j] <= hv[s]:
                break
            hv[j], hv[s] = hv[s], hv[j]
            hx[j], hx[s] = hx[s], hx[j]
            j = s


@register_jitable
def _kv_compact(hv, hx, n, thr):
    """Drop every entry with arrival index <= thr, restore heap order."""
    m = 0
    for j in range(n):
        if hx[j] > thr:
            hv[m] = hv[j]
            hx[m] = hx[j]
            m += 1
    _kv_heapify(hv, hx, m)
    return m


def kth_batch_kernel(values, w, k, out):
    """k-th largest of every complete width-w window, one pass.

    Two heaps: top holds the k largest live values (min-heap, root is the
    answer), bottom holds the rest (negated).  Physical heap sizes stay
    within fixed caps via periodic compaction, so memory is O(w) and each
    push costs O(log w) amortized.
    """
    n = values.shape[0]
    cap_t = 2 * k + 64
    cap_b = 2 * (w - k + 1) + 64
    tv = np.empty(cap_t, np.float64)
    tx = np.empty(cap_t, np.int64)
    bv = np.empty(cap_b, np.float64)
    bx = np.empty(cap_b, np.int64)
    nt = 0
    nb = 0
    live_t = 0
    live_b = 0
    ring = w + 1
    loc = np.zeros(ring, np.uint8)
    for i in range(n):
        v = values[i]
        thr = i - w
        while nt > 0 and tx[0] <= thr:
            nt = _kv_pop(tv, tx, nt)
        if live_t > 0 and v >= tv[0]:
            if nt == cap_t:
                nt = _kv_compact(tv, tx, nt, thr)
            _kv_push(tv, tx, nt, v, i)
            nt += 1
            loc[i % ring] = 0
            live_t += 1
        else:
            if nb == cap_b:
                nb = _kv_compact(bv, bx, nb, thr)
            _kv_push(bv, bx, nb, -v, i)
            nb += 1
            loc[i % ring] = 1
            live_b += 1
        if thr >= 0:
            if loc[thr % ring] == 0:
                live_t -= 1
            else:
                live_b -= 1
        while live_t > k:
            while tx[0] <= thr:
                nt = _kv_pop(tv, tx, nt)
            mv = tv[0]
            mi = tx[0]
            nt = _kv_pop(tv, tx, nt)
            if nb == cap_b:
                nb = _kv_compact(bv, bx, nb, thr)
            _kv_push(bv, bx, nb, -mv, mi)
            nb += 1
            loc[mi % ring] = 1
            live_t -= 1
            live_b += 1
        while live_t < k and live_b > 0:
            while bx[0] <= thr:
                nb = _kv_pop(bv, bx, nb)
            mv = -bv[0]
            mi = bx[0]
            nb = _kv_pop(bv, bx, nb)
            if nt == cap_t:
                nt = _kv_compact(tv, tx, nt, thr)
            _kv_push(tv, tx, nt, mv, mi)
            nt += 1
            loc[mi % ring] = 0
            live_b -= 1
            live_t += 1
        if i >= w - 1:
            while tx[0] <= thr:
                nt = _kv_pop(tv, tx, nt)
            out[i - w + 1] = tv[0]


def extremum_batch_kernel(values, w, want_min, out):
    """Sliding min or max over every complete width-w window.

    Monotonic deque of candidate indices in a ring buffer; each index enters
    and leaves once, so the sweep is O(n).
    """
    n = values.shape[0]
    s = -1.0 if want_min else 1.0
    cap = w + 1
    q = np.empty(cap, np.int64)
    head = 0
    tail = 0
    for i in range(n):
        sv = s * values[i]
        while tail > head and s * values[q[(tail - 1) % cap]] <= sv:
            tail -= 1
        q[tail % cap] = i
        tail += 1
        if q[head % cap] <= i - w:
            head += 1
        if i >= w - 1:
            out[i - w + 1] = values[q[head % cap]]


def until_batch_kernel(lvals, rvals, a, b, out):
    """Bounded-until robustness for every admissible anchor.

    out[t] = max over d in [a, b] of min(rvals[t+d], min lvals[t .. t+d-1]),
    the prefix over the left argument being half-open (empty at d = 0).
    """
    m = out.shape[0]
    for t in range(m):
        best = -np.inf
        lmin = np.inf
        for d in range(b + 1):
            if d >= 1:
                x = lvals[t + d - 1]
                if x < lmin:
                    lmin = x
            if d >= a:
                cand = rvals[t + d]
                if lmin < cand:
                    cand = lmin
                if cand > best:
                    best = cand
        out[t] = best


@register_jitable
def _row_push(h, r, n, v):
    h[r, n] = v
    j = n
    while j > 0:
        p = (j - 1) >> 1
        if h[r, p] <= h[r, j]:
            break
        h[r, p], h[r, j] = h[r, j], h[r, p]
        j = p


@register_jitable
def _row_replace(h, r, n, v):
    h[r, 0] = v
    j = 0
    while True:
        left = 2 * j + 1
        if left >= n:
            break
        s = left
        right = left + 1
        if right < n and h[r, right] < h[r, left]:
            s = right
        if h[r, j] <= h[r, s]:
            break
        h[r, j], h[r, s] = h[r, s], h[r, j]
        j = s


def c_anchor_push_kernel(v, r_lo, r_hi, k, w, pad_lb, pad_ub,
                         top_v, top_n, bot_v, bot_n,
                         m_cnt, g_lb, g_ub, lb_arr, ub_arr):
    """Insert one known child value into every affected cumulative anchor.

    Per anchor row r the window holds m known point values and u = w - m
    unknowns, each unknown contributing the constant pad interval.  The
    k-th largest of that multiset, per bound, is:

      * the k-th largest known (root of the full top heap) when at least k
        knowns exceed the pad,
      * the pad when the knowns above it plus the unknowns reach rank k,
      * otherwise the (k - u)-th largest known, which is the max of the
        w - k + 1 smallest knowns (root of the full bottom heap; that heap
        is full exactly when this branch is reached).

    The knowns are shared between bounds; only the pad and the count of
    knowns above it (g) differ.  Bottom heap stores negated values.
    """
    wb = w - k + 1
    for r in range(r_lo, r_hi + 1):
        nt = top_n[r]
        if nt < k:
            _row_push(top_v, r, nt, v)
            top_n[r] = nt + 1
        elif v > top_v[r, 0]:
            _row_replace(top_v, r, k, v)
        nb = bot_n[r]
        if nb < wb:
            _row_push(bot_v, r, nb, -v)
            bot_n[r] = nb + 1
        elif -v > bot_v[r, 0]:
            _row_replace(bot_v, r, wb, -v)
        m = m_cnt[r] + 1
        m_cnt[r] = m
        if v > pad_lb:
            g_lb[r] += 1
        if v > pad_ub:
            g_ub[r] += 1
        u = w - m
        if g_lb[r] >= k:
            lb = top_v[r, 0]
        elif g_lb[r] + u >= k:
            lb = pad_lb
        else:
            lb = -bot_v[r, 0]
        if g_ub[r] >= k:
            ub = top_v[r, 0]
        elif g_ub[r] + u >= k:
            ub = pad_ub
        else:
            ub = -bot_v[r, 0]
        lb_arr[r] = lb
        ub_arr[r] = ub


def ext_anchor_push_kernel(v, r_lo, r_hi, w, want_min, pad_lb, pad_ub,
                           run, m_cnt, lb_arr, ub_arr):
    """Windowed-min/max analog of c_anchor_push_kernel (rank 1 or rank w).

    Only a running extremum of the knowns is needed; unknowns contribute the
    pads until the window fills.
    """
    for r in range(r_lo, r_hi + 1):
        m = m_cnt[r]
        if m == 0:
            run[r] = v
        elif want_min:
            if v < run[r]:
                run[r] = v
        else:
            if v > run[r]:
                run[r] = v
        m += 1
        m_cnt[r] = m
        e = run[r]
        if m >= w:
            lb_arr[r] = e
            ub_arr[r] = e
        elif want_min:
            lb_arr[r] = e if e < pad_lb else pad_lb
            ub_arr[r] = e if e < pad_ub else pad_ub
        else:
            lb_arr[r] = e if e > pad_lb else pad_lb
            ub_arr[r] = e if e > pad_ub else pad_ub
