"""Univariate minimization: grid seeding followed by golden-section refinement."""
from __future__ import annotations

import math
from typing import Callable

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    rtol: float = 1e-9,
    maxiter: int = 200,
) -> tuple[float, float]:
    """Minimize a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x))``."""
    a, b = lo, hi
    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(maxiter):
        if b - a <= rtol * max(abs(a), abs(b), 1e-300):
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_PHI * (b - a)
            f2 = f(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


def grid_golden(
    f: Callable[[float], float],
    grid: np.ndarray,
    rtol: float = 1e-9,
) -> tuple[float, float]:
    """Evaluate ``f`` on an ascending ``grid``, then refine around the best point.

    The result is never worse than the best grid value.
    """
    values = np.array([f(float(x)) for x in grid])
    i = int(np.argmin(values))
    best_x, best_f = float(grid[i]), float(values[i])
    if not math.isfinite(best_f) and best_f > 0:
        return best_x, best_f
    lo = float(grid[max(i - 1, 0)])
    hi = float(grid[min(i + 1, len(grid) - 1)])
    if hi > lo:
        x, fx = golden_section(f, lo, hi, rtol=rtol)
        if fx < best_f:
            return x, fx
    return best_x, best_f
