"""Frontals with a tangent moving basis.

For a map F with partials in the span of Omega we write DF = Omega Lambda^T
and read off Lambda = DF^T Omega (Omega^T Omega)^-1.  Its determinant cuts
out the singular set.  With the unit normal n induced by Omega the relative
curvatures follow from II = -Omega^T Dn.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bde import BDECoeffs
from .contour import zero_curves
from .expr import VectorExpr, eval_vector, normal_of
from .fields import (
    RANK_TOL,
    TANGENCY_TOL,
    NotTangentError,
    RankDeficientBasis,
    basis_matrix,
    check_rank,
    pointwise,
)
from .linalg import P, T, adj2, det2, frob, inv2, quad_coeffs
from .scene import DomainRect

__all__ = [
    "RANK_TOL",
    "TANGENCY_TOL",
    "RankDeficientBasis",
    "NotTangentError",
    "DecompositionSample",
    "RelativeCurvatureSample",
    "decompose",
    "decompose_matrices",
    "relative_curvatures",
    "relative_curvatures_matrices",
    "singular_set",
    "curvature_line_bde",
    "curvature_line_matrix",
]

Basis = tuple[VectorExpr, VectorExpr]


@dataclass(frozen=True)
class DecompositionSample:
    Lambda: np.ndarray
    det: np.ndarray | float
    tangency_residual: np.ndarray | float
    scale: np.ndarray | float = 1.0

    @property
    def is_tangent(self) -> bool:
        return bool(np.all(self.tangency_residual <= TANGENCY_TOL * (1.0 + self.scale)))


def decompose_matrices(DF: np.ndarray, om: np.ndarray) -> DecompositionSample:
    check_rank(om)
    gram = T(om) @ om
    lam = T(DF) @ om @ inv2(gram)
    res = frob(DF - om @ T(lam))
    return DecompositionSample(lam, det2(lam), res, frob(DF))


def decompose(map_expr: VectorExpr, omega: Basis, q) -> DecompositionSample:
    """Lambda with D(map) = Omega Lambda^T at q, plus the tangency residual."""
    _, DF = eval_vector(map_expr, q)
    om = basis_matrix(omega, q)
    return decompose_matrices(DF, np.broadcast_to(om, DF.shape[:-2] + (3, 2)))


@dataclass(frozen=True)
class RelativeCurvatureSample:
    """Relative curvature data at a point or a batch of points.

    ``k1``/``k2`` are NaN where H^2 - lambda K < 0; the complex pair is then
    in ``k_complex``.  :meth:`principal` gives ``None`` in that case.
    """

    mu: np.ndarray
    alpha: np.ndarray
    K: np.ndarray | float
    H: np.ndarray | float
    k1: np.ndarray | float
    k2: np.ndarray | float
    k_complex: tuple[np.ndarray, np.ndarray]
    I_omega: np.ndarray
    II_omega: np.ndarray
    Lambda: np.ndarray
    lam: np.ndarray | float

    @property
    def real(self):
        return np.isfinite(self.k1)

    def principal(self) -> tuple[float, float] | None:
        if np.ndim(self.k1) != 0:
            raise ValueError("principal() is for single points")
        if not math.isfinite(float(self.k1)):
            return None
        return float(self.k1), float(self.k2)


def relative_curvatures_matrices(Dx: np.ndarray, om: np.ndarray, Dn: np.ndarray) -> RelativeCurvatureSample:
    dec = decompose_matrices(Dx, om)
    I_o = T(om) @ om
    II_o = -T(om) @ Dn
    mu = -T(II_o) @ inv2(I_o)
    alpha = mu @ adj2(dec.Lambda)
    K = det2(mu)
    H = -0.5 * (alpha[..., 0, 0] + alpha[..., 1, 1])
    lam = dec.det
    disc = H * H - lam * K
    # round-off can push a double root slightly negative
    tol = 1e-14 * (H * H + np.abs(lam * K))
    real = disc >= -tol
    root = np.sqrt(np.where(real, np.maximum(disc, 0.0), 0.0))
    k1 = np.where(real, H - root, np.nan)
    k2 = np.where(real, H + root, np.nan)
    iroot = np.sqrt(np.where(real, 0.0, -disc))
    kc = (H - 1j * iroot, H + 1j * iroot)
    if np.ndim(K) == 0:
        K, H, k1, k2, lam = float(K), float(H), float(k1), float(k2), float(lam)
        kc = (complex(kc[0]), complex(kc[1]))
    return RelativeCurvatureSample(mu, alpha, K, H, k1, k2, kc, I_o, II_o, dec.Lambda, lam)


def relative_curvatures(x: VectorExpr, omega: Basis, q) -> RelativeCurvatureSample:
    """Relative curvatures of x with respect to the normal induced by Omega."""
    _, Dx = eval_vector(x, q)
    om = basis_matrix(omega, q)
    _, Dn = eval_vector(normal_of(*omega), q)
    shape = Dx.shape[:-2] + (3, 2)
    return relative_curvatures_matrices(Dx, np.broadcast_to(om, shape), np.broadcast_to(Dn, shape))


def curvature_line_matrix(rc: RelativeCurvatureSample) -> np.ndarray:
    """lambda P alpha^T; its quadratic form is the lines-of-curvature equation."""
    lam = np.asarray(rc.lam)[..., None, None]
    return lam * (P @ T(rc.alpha))


def curvature_line_bde(x: VectorExpr, omega: Basis, q) -> BDECoeffs:
    m = curvature_line_matrix(relative_curvatures(x, omega, q))
    a, b, c = quad_coeffs(m)
    if np.ndim(a) == 0:
        a, b, c = float(a), float(b), float(c)
    return BDECoeffs(a, b, c, kind="curvature_line", coords="u")


def lambda_field(x: VectorExpr, omega: Basis):
    """Scalar function q -> lambda_Omega(q) (batch aware)."""

    def f(q):
        d = decompose(x, omega, q).det
        return float(d) if np.ndim(d) == 0 else d

    return f


def singular_set(x: VectorExpr, omega: Basis, domain: DomainRect, grid_n: int = 64) -> list[np.ndarray]:
    """Zero curves of lambda_Omega on a grid_n x grid_n grid of the domain."""
    if grid_n < 8:
        raise ValueError("grid_n must be at least 8")
    f = lambda_field(x, omega)
    values = pointwise(f, domain.grid(grid_n))
    return zero_curves(f, domain, grid_n, values=values)
