"""Random formula and signal instances for self-tests and benchmarks.

Signals default to small integer values so min/max/rank arithmetic stays
exact in floating point and robustness comparisons can use equality.
"""

from __future__ import annotations

import numpy as np

from .logic import (Always, And, Atom, Cumulative, Eventually, Formula, Not,
                    Or, TimeInterval, Until)
from .signals import Signal

_OPS = ("<", "<=", ">", ">=")


def random_signal(rng: np.random.Generator, names, length: int,
                  delta: float = 1.0, lo: int = -8, hi: int = 8,
                  integers: bool = True) -> Signal:
    if integers:
        vals = rng.integers(lo, hi + 1, size=(length, len(names)))
        vals = vals.astype(np.float64)
    else:
        vals = rng.uniform(lo, hi, size=(length, len(names)))
    return Signal(tuple(names), vals, delta)


def _atom(rng, names) -> Atom:
    nvar = int(rng.integers(1, min(2, len(names)) + 1))
    picked = rng.choice(len(names), size=nvar, replace=False)
    coeffs = []
    for j in sorted(picked):
        c = 0
        while c == 0:
            c = int(rng.integers(-2, 3))
        coeffs.append((names[j], float(c)))
    op = _OPS[rng.integers(0, len(_OPS))]
    rhs = float(rng.integers(-5, 6))
    return Atom(tuple(coeffs), op, rhs)


def _interval(rng, max_window: int, delta: float) -> TimeInterval:
    a = int(rng.integers(0, 3))
    b = a + int(rng.integers(0, max_window + 1))
    return TimeInterval(a * delta, b * delta)


def random_formula(rng: np.random.Generator, names, depth: int,
                   max_window: int = 4, delta: float = 1.0) -> Formula:
    """Unvalidated random formula; every operator kind can appear."""
    names = tuple(names)
    if depth <= 0:
        return _atom(rng, names)
    kind = rng.integers(0, 8)
    if kind == 0:
        return _atom(rng, names)
    if kind == 1:
        return Not(random_formula(rng, names, depth - 1, max_window, delta))
    if kind == 2:
        return And(random_formula(rng, names, depth - 1, max_window, delta),
                   random_formula(rng, names, depth - 1, max_window, delta))
    if kind == 3:
        return Or(random_formula(rng, names, depth - 1, max_window, delta),
                  random_formula(rng, names, depth - 1, max_window, delta))
    if kind == 4:
        return Until(_interval(rng, max_window, delta),
                     random_formula(rng, names, depth - 1, max_window, delta),
                     random_formula(rng, names, depth - 1, max_window, delta))
    if kind == 5:
        return Eventually(_interval(rng, max_window, delta),
                          random_formula(rng, names, depth - 1, max_window,
                                         delta))
    if kind == 6:
        return Always(_interval(rng, max_window, delta),
                      random_formula(rng, names, depth - 1, max_window,
                                     delta))
    iv = _interval(rng, max_window, delta)
    width = int(round((iv.hi - iv.lo) / delta)) + 1
    k = int(rng.integers(1, width + 1))
    # half the time land tau strictly inside a ceiling step
    tau = k * delta if rng.integers(0, 2) else (k - 0.5) * delta
    return Cumulative(iv, tau,
                      random_formula(rng, names, depth - 1, max_window,
                                     delta))
