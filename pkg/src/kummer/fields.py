"""Numeric sampling of scene expressions at single points or batches."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .expr import VectorExpr, eval_vector
from .jet import EvalError

RANK_TOL = 1e-10
TANGENCY_TOL = 1e-8


class RankDeficientBasis(ArithmeticError):
    """The moving basis has (numerically) dependent columns."""


class NotTangentError(ArithmeticError):
    """A map has partials outside the span of the moving basis."""


class SingularPointError(ArithmeticError):
    """A classical quantity was requested on the singular set."""


def basis_matrix(omega: tuple[VectorExpr, VectorExpr], q) -> np.ndarray:
    """Stacked 3x2 matrix with columns w1, w2."""
    w1, _ = eval_vector(omega[0], q)
    w2, _ = eval_vector(omega[1], q)
    w1, w2 = np.broadcast_arrays(w1, w2)
    return np.stack([w1, w2], axis=-1)


def check_rank(om: np.ndarray) -> np.ndarray:
    """Relative |w1 x w2| (sine of the column angle); raise when too small."""
    a, b = om[..., :, 0], om[..., :, 1]
    aa = np.sum(a * a, axis=-1)
    bb = np.sum(b * b, axis=-1)
    ab = np.sum(a * b, axis=-1)
    # |a x b|^2 = |a|^2 |b|^2 - (a.b)^2
    scale = aa * bb
    rel = np.sqrt(np.maximum(scale - ab * ab, 0.0) / np.where(scale > 0, scale, 1.0))
    if np.any(rel <= RANK_TOL):
        raise RankDeficientBasis("moving basis columns are linearly dependent "
                                 f"(|w1 x w2| relative {float(np.min(rel)):.3g})")
    return rel


@dataclass(frozen=True)
class FieldSample:
    """Values and first partials of x, xi, the basis and its normal."""

    q: np.ndarray
    x: np.ndarray
    Dx: np.ndarray
    xi: np.ndarray
    Dxi: np.ndarray
    Omega: np.ndarray
    n: np.ndarray
    Dn: np.ndarray


def sample_scene(scene, q) -> FieldSample:
    """Evaluate x, xi, the basis and the induced normal in one pass.

    The basis columns are evaluated once and reused for the normal, and for
    xi = normal(omega) the normal jets are reused for xi as well.
    """
    from . import jet as J
    from .expr import _env, eval_vec_with

    q = np.asarray(q, dtype=float)
    env = _env(q)
    w1j, w2j = (eval_vec_with(w, env) for w in scene.basis)
    nj = J.normalize(J.cross(w1j, w2j))
    xj = eval_vec_with(scene.x, env)
    xij = nj if scene.xi == scene.normal else eval_vec_with(scene.xi, env)
    shape = q.shape[:-1]

    om = np.empty(shape + (3, 2))
    for i in range(3):
        om[..., i, 0] = w1j[i].value
        om[..., i, 1] = w2j[i].value
    return FieldSample(q, J.stack_value(xj, shape), J.stack_jacobian(xj, shape),
                       J.stack_value(xij, shape), J.stack_jacobian(xij, shape), om,
                       J.stack_value(nj, shape), J.stack_jacobian(nj, shape))


def pointwise(fn: Callable[[np.ndarray], np.ndarray], pts: np.ndarray) -> np.ndarray:
    """Evaluate a batch function, falling back to per-point NaN on domain errors."""
    pts = np.asarray(pts, dtype=float)
    try:
        return np.asarray(fn(pts), dtype=float)
    except (EvalError, ArithmeticError):
        pass
    flat = pts.reshape(-1, 2)
    out = []
    for p in flat:
        try:
            out.append(np.asarray(fn(p), dtype=float))
        except (EvalError, ArithmeticError):
            out.append(None)
    proto = next((o for o in out if o is not None), np.array(np.nan))
    out = [o if o is not None else np.full(proto.shape, np.nan) for o in out]
    return np.stack(out).reshape(pts.shape[:-1] + proto.shape)
