"""Stacked 2x2 / 3x2 matrix helpers (leading axes are batch axes)."""

from __future__ import annotations

import numpy as np

# rotation by -90 degrees; u^T P v = det[u v]
P = np.array([[0.0, 1.0], [-1.0, 0.0]])


def T(a: np.ndarray) -> np.ndarray:
    return np.swapaxes(a, -1, -2)


def det2(a: np.ndarray) -> np.ndarray:
    return a[..., 0, 0] * a[..., 1, 1] - a[..., 0, 1] * a[..., 1, 0]


def adj2(a: np.ndarray) -> np.ndarray:
    out = np.empty_like(a)
    out[..., 0, 0] = a[..., 1, 1]
    out[..., 1, 1] = a[..., 0, 0]
    out[..., 0, 1] = -a[..., 0, 1]
    out[..., 1, 0] = -a[..., 1, 0]
    return out


def inv2(a: np.ndarray) -> np.ndarray:
    return adj2(a) / det2(a)[..., None, None]


def frob(a: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(a * a, axis=(-2, -1)))


def quad_coeffs(m: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(A, B, C) of the quadratic form v^T m v = A v1^2 + B v1 v2 + C v2^2."""
    return m[..., 0, 0], m[..., 0, 1] + m[..., 1, 0], m[..., 1, 1]


def quad_matrix(a, b, c) -> np.ndarray:
    """Symmetric matrix of A v1^2 + B v1 v2 + C v2^2."""
    a, b, c = np.broadcast_arrays(np.asarray(a, float), np.asarray(b, float), np.asarray(c, float))
    m = np.empty(a.shape + (2, 2))
    m[..., 0, 0] = a
    m[..., 0, 1] = m[..., 1, 0] = 0.5 * b
    m[..., 1, 1] = c
    return m


def cross_norm(omega: np.ndarray) -> np.ndarray:
    """|w1 x w2| for a stacked 3x2 basis."""
    return np.linalg.norm(np.cross(omega[..., :, 0], omega[..., :, 1]), axis=-1)
