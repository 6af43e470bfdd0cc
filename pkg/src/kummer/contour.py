"""Zero-level curves of scalar fields on a domain grid.

Marching squares comes from scikit-image; each vertex, which lies on a grid
edge, is then refined by a bracketing root solve along that edge.
"""

from __future__ import annotations

from typing import Callable

import numpy as np
from scipy.optimize import brentq
from skimage.measure import find_contours

from .scene import DomainRect

ScalarField = Callable[[np.ndarray], np.ndarray]


def _interp(axis: np.ndarray, s: float) -> float:
    i = int(np.clip(np.floor(s), 0, len(axis) - 2))
    return float(axis[i] + (s - i) * (axis[i + 1] - axis[i]))


def _refine(f: ScalarField, a: np.ndarray, b: np.ndarray, fa: float, fb: float, guess: np.ndarray):
    if not (np.isfinite(fa) and np.isfinite(fb)) or fa * fb > 0:
        return guess
    if fa == 0:
        return a
    if fb == 0:
        return b

    def g(s):
        return float(f(a + s * (b - a)))

    try:
        s = brentq(g, 0.0, 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    except (ValueError, ArithmeticError):
        return guess
    return a + s * (b - a)


def zero_curves(f: ScalarField, domain: DomainRect, grid_n: int, values: np.ndarray | None = None,
                refine: bool = True) -> list[np.ndarray]:
    """Polylines (each of shape (m, 2) in (u1, u2)) where ``f`` changes sign.

    ``f`` takes a single point (2,) and returns a float.  ``values`` may
    supply the field already sampled on ``domain.grid(grid_n)``.
    """
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    a1, a2 = domain.axes(grid_n)
    if values is None:
        pts = domain.grid(grid_n)
        values = np.array([[f(p) for p in row] for row in pts], dtype=float)
    mask = np.isfinite(values)
    if not mask.any():
        return []
    field = np.where(mask, values, 0.0)
    if field.max() < 0 or field.min() > 0:
        return []
    contours = find_contours(field, 0.0, mask=mask if not mask.all() else None)

    curves = []
    for c in contours:
        poly = np.empty((len(c), 2))
        for k, (r, col) in enumerate(c):
            guess = np.array([_interp(a1, col), _interp(a2, r)])
            if not refine:
                poly[k] = guess
                continue
            if abs(r - round(r)) < 1e-9:
                i2 = int(round(r))
                j = int(np.clip(np.floor(col), 0, grid_n - 2))
                pa, pb = np.array([a1[j], a2[i2]]), np.array([a1[j + 1], a2[i2]])
                fa, fb = values[i2, j], values[i2, j + 1]
            else:
                i1 = int(round(col))
                j = int(np.clip(np.floor(r), 0, grid_n - 2))
                pa, pb = np.array([a1[i1], a2[j]]), np.array([a1[i1], a2[j + 1]])
                fa, fb = values[j, i1], values[j + 1, i1]
            poly[k] = _refine(f, pa, pb, fa, fb, guess)
        curves.append(poly)
    return curves
