"""One-dimensional minimization: dense grid scan, then bounded Brent refinement.

Brent's bounded method is golden-section search with parabolic steps, so it
keeps the golden-section guarantee on the bracket while converging faster.
"""

from __future__ import annotations

from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

GRID_STEP = 1e-4
REFINE_TOL = 1e-8


def grid_golden_min(f: Callable[[np.ndarray], np.ndarray], lo: float, hi: float,
                    step: float = GRID_STEP, tol: float = REFINE_TOL) -> tuple[float, float]:
    """Minimize ``f`` on [lo, hi]; ``f`` must accept arrays.

    The grid always contains both endpoints. The refinement runs
    on the bracket around the best grid point and is only accepted when it
    improves on that point.
    """
    if hi <= lo:
        return lo, float(f(np.array([lo]))[0])
    n = max(int(np.ceil((hi - lo) / step)), 1)
    grid = np.linspace(lo, hi, n + 1)
    vals = f(grid)
    k = int(np.argmin(vals))
    best_x, best_v = float(grid[k]), float(vals[k])
    a, b = grid[max(k - 1, 0)], grid[min(k + 1, n)]
    if b > a:
        res = minimize_scalar(lambda t: float(f(np.array([t]))[0]), bounds=(a, b),
                              method="bounded", options={"xatol": tol})
        if res.fun < best_v:
            best_x, best_v = float(res.x), float(res.fun)
    return best_x, best_v
