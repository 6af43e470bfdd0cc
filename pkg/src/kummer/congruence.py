"""Kummer forms, curvature functions and direction equations of a congruence.

Conventions: I = Dxi^T Dxi and II = -Dxi^T Dx are the classical forms;
with a tangent moving basis Omega of xi, I_O = Omega^T Omega,
II_O = -Omega^T Dx and Dxi = Omega Delta^T.  Points may be a single (2,)
array or a batch (..., 2); every matrix then carries the batch axes first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .bde import BDECoeffs
from .expr import VectorExpr, eval_vec_with, eval_with
from .fields import (
    TANGENCY_TOL,
    FieldSample,
    NotTangentError,
    SingularPointError,
    check_rank,
    sample_scene,
)
from .frontal import RelativeCurvatureSample, relative_curvatures_matrices
from .jet import Jet, stack_jacobian, stack_value
from .linalg import P, T, adj2, det2, frob, inv2, quad_coeffs, quad_matrix
from .scene import CongruenceScene

SYMMETRY_TOL = 1e-8
SINGULAR_TOL = 1e-10


def _scalar(a):
    return float(a) if np.ndim(a) == 0 else a


def _sym(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + T(m))


# -- point data -----------------------------------------------------------------

@dataclass(frozen=True)
class FormBundle:
    """Classical and Omega-relative form matrices at one point or a batch."""

    fields: FieldSample
    I: np.ndarray
    II: np.ndarray
    I_O: np.ndarray
    II_O: np.ndarray
    Delta: np.ndarray
    tangency_residual: np.ndarray

    @property
    def delta(self):
        return det2(self.Delta)

    @cached_property
    def S(self) -> np.ndarray:
        """II_O adj(Delta^T): the numerator matrix of the Omega curvature."""
        return self.II_O @ adj2(T(self.Delta))

    @property
    def detI(self):
        return det2(self.I)

    @property
    def is_tangent(self) -> np.ndarray:
        scale = 1.0 + frob(self.fields.Dxi)
        return self.tangency_residual <= TANGENCY_TOL * scale


def form_bundle(scene: CongruenceScene, q, require_tangent: bool = True) -> FormBundle:
    fs = sample_scene(scene, q)
    om = fs.Omega
    check_rank(om)
    I = T(fs.Dxi) @ fs.Dxi
    II = -T(fs.Dxi) @ fs.Dx
    I_O = T(om) @ om
    II_O = -T(om) @ fs.Dx
    Delta = T(fs.Dxi) @ om @ inv2(I_O)
    res = frob(fs.Dxi - om @ T(Delta))
    fb = FormBundle(fs, I, II, I_O, II_O, Delta, res)
    if require_tangent and not np.all(fb.is_tangent):
        raise NotTangentError(
            f"moving basis is not tangent to xi (residual {float(np.max(res)):.3g})")
    return fb


# -- fundamental forms ------------------------------------------------------------

@dataclass(frozen=True)
class KummerFormsClassical:
    E: float
    F: float
    G: float
    L: float
    M1: float
    M2: float
    N: float
    I: np.ndarray
    II: np.ndarray

    @property
    def det_I(self):
        return self.E * self.G - self.F * self.F


def _classical_from(I: np.ndarray, II: np.ndarray) -> KummerFormsClassical:
    return KummerFormsClassical(
        _scalar(I[..., 0, 0]), _scalar(I[..., 0, 1]), _scalar(I[..., 1, 1]),
        _scalar(II[..., 0, 0]), _scalar(II[..., 0, 1]), _scalar(II[..., 1, 0]), _scalar(II[..., 1, 1]),
        I, II,
    )


def classical_forms(scene: CongruenceScene, q) -> KummerFormsClassical:
    from .expr import eval_vector

    xi_expr = scene.xi if scene.unitize_xi else scene.xi_raw
    _, Dx = eval_vector(scene.x, q)
    _, Dxi = eval_vector(xi_expr, q)
    Dx, Dxi = np.broadcast_arrays(Dx, Dxi)
    return _classical_from(T(Dxi) @ Dxi, -T(Dxi) @ Dx)


@dataclass(frozen=True)
class KummerFormsOmega:
    E_O: float
    F_O: float
    G_O: float
    L_O: float
    M1_O: float
    M2_O: float
    N_O: float
    I_O: np.ndarray
    II_O: np.ndarray
    Delta: np.ndarray
    delta: float
    tangency_residual: float


def omega_forms(scene: CongruenceScene, q) -> KummerFormsOmega:
    fb = form_bundle(scene, q)
    I, II = fb.I_O, fb.II_O
    return KummerFormsOmega(
        _scalar(I[..., 0, 0]), _scalar(I[..., 0, 1]), _scalar(I[..., 1, 1]),
        _scalar(II[..., 0, 0]), _scalar(II[..., 0, 1]), _scalar(II[..., 1, 0]), _scalar(II[..., 1, 1]),
        I, II, fb.Delta, _scalar(fb.delta), _scalar(fb.tangency_residual),
    )


def decomposition_residuals(fb: FormBundle) -> tuple[np.ndarray, np.ndarray]:
    """||I - Delta I_O Delta^T|| and ||II - Delta II_O||."""
    r1 = frob(fb.I - fb.Delta @ fb.I_O @ T(fb.Delta))
    r2 = frob(fb.II - fb.Delta @ fb.II_O)
    return r1, r2


# -- curvature functions ------------------------------------------------------------

def _quad(m: np.ndarray, v: np.ndarray):
    return np.einsum("...i,...ij,...j->...", v, m, v)


def curvature_omega_from(fb: FormBundle, b) -> np.ndarray:
    b = np.asarray(b, dtype=float)
    return _quad(fb.S, b) / _quad(fb.I_O, b)


def curvature_classical_from(fb: FormBundle, a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    scale = np.maximum(frob(fb.I), 1e-300)
    if np.any(np.abs(fb.detI) <= SINGULAR_TOL * scale ** 2):
        raise SingularPointError("Kummer first form is singular here (point of the singular set of xi)")
    return _quad(fb.II, a) / _quad(fb.I, a)


def kummer_curvature_omega(scene: CongruenceScene, q, b) -> float:
    """b^T II_O adj(Delta^T) b / b^T I_O b for b in basis coordinates."""
    if not np.any(np.asarray(b, dtype=float)):
        raise ValueError("direction must be nonzero")
    return _scalar(curvature_omega_from(form_bundle(scene, q), b))


def kummer_curvature_classical(scene: CongruenceScene, q, a) -> float:
    """Central-point coordinate II(a)/I(a) of the generator in direction a."""
    if not np.any(np.asarray(a, dtype=float)):
        raise ValueError("direction must be nonzero")
    return _scalar(curvature_classical_from(form_bundle(scene, q, require_tangent=False), a))


# -- direction equations -------------------------------------------------------------

def principal_coefficients(fb: FormBundle):
    """(C1, C2, C3) of the principal equation in basis coordinates b."""
    D = fb.Delta
    d11, d12, d21, d22 = D[..., 0, 0], D[..., 0, 1], D[..., 1, 0], D[..., 1, 1]
    II = fb.II_O
    L, M1, M2, N = II[..., 0, 0], II[..., 0, 1], II[..., 1, 0], II[..., 1, 1]
    E, F, G = fb.I_O[..., 0, 0], fb.I_O[..., 0, 1], fb.I_O[..., 1, 1]
    cL = 2.0 * (d22 * L - d12 * M1)
    cN = 2.0 * (d11 * N - d21 * M2)
    cM = d11 * M1 - d21 * L + d22 * M2 - d12 * N
    return F * cL - E * cM, G * cL - E * cN, G * cM - F * cN


def principal_from(fb: FormBundle) -> BDECoeffs:
    c1, c2, c3 = principal_coefficients(fb)
    # b = Delta^T u' turns b^T Q b into u'^T Delta Q Delta^T u'
    pulled = fb.Delta @ quad_matrix(c1, c2, c3) @ T(fb.Delta)
    a, b, c = quad_coeffs(pulled)
    pb = BDECoeffs(_scalar(a), _scalar(b), _scalar(c), "principal", "u")
    return BDECoeffs(_scalar(c1), _scalar(c2), _scalar(c3), "principal", "b", pb)


def principal_bde(scene: CongruenceScene, q) -> BDECoeffs:
    """Principal-surface equation in b-coordinates; ``.pulled_back`` is in (u1', u2')."""
    return principal_from(form_bundle(scene, q))


def principal_matrix(fb: FormBundle) -> np.ndarray:
    """Delta P adj(II_O)^T Delta I_O Delta^T (left side of the factorization)."""
    D = fb.Delta
    return D @ P @ T(adj2(fb.II_O)) @ D @ fb.I_O @ T(D)


def developable_matrix(fb: FormBundle) -> np.ndarray:
    """P adj(II_O) I_O Delta^T."""
    return P @ adj2(fb.II_O) @ fb.I_O @ T(fb.Delta)


def developable_from(fb: FormBundle) -> BDECoeffs:
    a, b, c = quad_coeffs(developable_matrix(fb))
    return BDECoeffs(_scalar(a), _scalar(b), _scalar(c), "developable", "u")


def _check_unit_xi(fs: FieldSample):
    norms = np.linalg.norm(fs.xi, axis=-1)
    if np.any(np.abs(norms - 1.0) > 1e-10):
        raise ValueError("developable equations need a unit direction field (set unitize_xi)")


def developable_bde(scene: CongruenceScene, q) -> BDECoeffs:
    fb = form_bundle(scene, q)
    _check_unit_xi(fb.fields)
    return developable_from(fb)


def triple_coefficients(Dx: np.ndarray, Dxi: np.ndarray, xi: np.ndarray):
    """Coefficients from the scalar triple products [x_ui, xi_uj, xi]."""

    def tp(a, b):
        return np.sum(np.cross(a, b) * xi, axis=-1)

    x1, x2 = Dx[..., :, 0], Dx[..., :, 1]
    n1, n2 = Dxi[..., :, 0], Dxi[..., :, 1]
    return tp(x1, n1), tp(x1, n2) + tp(x2, n1), tp(x2, n2)


def developable_bde_triple(scene: CongruenceScene, q) -> BDECoeffs:
    from .expr import eval_vector

    xi, Dxi = eval_vector(scene.xi, q)
    _, Dx = eval_vector(scene.x, q)
    Dx, Dxi = np.broadcast_arrays(Dx, Dxi)
    xi = np.broadcast_to(xi, Dx.shape[:-1])
    a, b, c = triple_coefficients(Dx, Dxi, xi)
    return BDECoeffs(_scalar(a), _scalar(b), _scalar(c), "developable", "u")


# -- normality and the factorization -------------------------------------------------

@dataclass(frozen=True)
class NormalityReport:
    normal: bool
    asymmetry: float  # ||S - S^T|| / ||S||
    m1_m2: float  # classical |M1 - M2|

    def __bool__(self) -> bool:
        return self.normal


def asymmetry(m: np.ndarray) -> np.ndarray:
    n = frob(m)
    return np.where(n > 0, frob(m - T(m)) / np.where(n > 0, n, 1.0), 0.0)


def is_normal(scene: CongruenceScene, q, tol: float = SYMMETRY_TOL) -> NormalityReport:
    fb = form_bundle(scene, q)
    asym = float(asymmetry(fb.S))
    m = float(abs(fb.II[..., 0, 1] - fb.II[..., 1, 0]))
    return NormalityReport(asym <= tol, asym, m)


@dataclass(frozen=True)
class TheoremResidual:
    residual: float
    lhs_norm: float
    applicable: bool  # the congruence is normal at q

    def ok(self, tol: float = 1e-9) -> bool:
        return self.residual <= tol * (1.0 + self.lhs_norm)

    def __float__(self) -> float:
        return self.residual


def theorem_matrices(fb: FormBundle) -> tuple[np.ndarray, np.ndarray]:
    lhs = principal_matrix(fb)
    rhs = np.asarray(fb.delta)[..., None, None] * developable_matrix(fb)
    return lhs, rhs


def theorem_residual(scene: CongruenceScene, q) -> TheoremResidual:
    fb = form_bundle(scene, q)
    lhs, rhs = theorem_matrices(fb)
    return TheoremResidual(float(frob(lhs - rhs)), float(frob(lhs)),
                           bool(asymmetry(fb.S) <= SYMMETRY_TOL))


# -- exact normal congruences ------------------------------------------------------------

def relative_from(fb: FormBundle) -> RelativeCurvatureSample:
    fs = fb.fields
    return relative_curvatures_matrices(fs.Dx, fs.Omega, fs.Dn)


def alpha_matrix(fb: FormBundle) -> np.ndarray:
    """-K det(I_O) P alpha^T from the relative curvatures of x."""
    rc = relative_from(fb)
    s = -np.asarray(rc.K) * det2(fb.I_O)
    return s[..., None, None] * (P @ T(rc.alpha))


def _require_exact_normal(scene: CongruenceScene, fb: FormBundle):
    fs = fb.fields
    lam = T(fs.Dx) @ fs.Omega @ inv2(fb.I_O)
    res = frob(fs.Dx - fs.Omega @ T(lam))
    if not scene.xi_is_normal or np.any(res > TANGENCY_TOL * (1.0 + frob(fs.Dx))):
        raise ValueError("this operation needs xi = normal(omega) with omega tangent to x")


def principal_bde_via_alpha(scene: CongruenceScene, q) -> BDECoeffs:
    fb = form_bundle(scene, q)
    _require_exact_normal(scene, fb)
    a, b, c = quad_coeffs(alpha_matrix(fb))
    return BDECoeffs(_scalar(a), _scalar(b), _scalar(c), "principal", "u")


@dataclass(frozen=True)
class EigenDirections:
    """Extremal directions of the Omega curvature at a normal point.

    ``directions`` are in basis coordinates b, unit Euclidean length.
    ``values`` are the Omega curvature at those directions.  ``swap_residual``
    measures how far the frontal matrix II_O adj(Lambda^T) is from having
    the same eigenvectors with the eigenvalues exchanged.
    """

    directions: tuple[np.ndarray, ...]
    values: tuple[float, ...]
    umbilic: bool
    eigenvalues: tuple[float, float]
    frontal_eigenvalues: tuple[float, float]
    swap_residual: float


def gram_schmidt(om: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Omega = Q R with orthonormal Q and upper triangular R, diag(R) > 0."""
    w1, w2 = om[:, 0], om[:, 1]
    r11 = np.linalg.norm(w1)
    e1 = w1 / r11
    r12 = e1 @ w2
    v = w2 - r12 * e1
    r22 = np.linalg.norm(v)
    Q = np.stack([e1, v / r22], axis=-1)
    return Q, np.array([[r11, r12], [0.0, r22]])


def principal_directions_eigen(scene: CongruenceScene, q, tol: float = SYMMETRY_TOL) -> EigenDirections:
    q = np.asarray(q, dtype=float)
    if q.shape != (2,):
        raise ValueError("principal_directions_eigen works on one point")
    fb = form_bundle(scene, q)
    fs = fb.fields
    Q, R = gram_schmidt(fs.Omega)
    II_Q = -Q.T @ fs.Dx
    Delta_Q = fs.Dxi.T @ Q
    S_Q = II_Q @ adj2(Delta_Q.T)
    if asymmetry(S_Q) > tol:
        raise ValueError("congruence is not normal at this point")
    S_Q = _sym(S_Q)
    vals, vecs = np.linalg.eigh(S_Q)

    # frontal side: II adj(Lambda^T) in the same frame, with the induced normal
    II_f = -Q.T @ fs.Dn
    Lam_Q = fs.Dx.T @ Q
    Fm = II_f @ adj2(Lam_Q.T)
    fvals = np.sort(np.linalg.eigvals(Fm).real)
    swap = 0.0
    for k in range(2):
        e = vecs[:, k]
        swap = max(swap, float(np.linalg.norm(Fm @ e - vals[1 - k] * e)))

    spread = abs(vals[1] - vals[0])
    umbilic = spread <= 1e-10 * (1.0 + np.abs(vals).max())
    dirs, kvals = [], []
    if not umbilic:
        Rinv = inv2(R)
        for k in range(2):
            b = Rinv @ vecs[:, k]
            b = b / np.linalg.norm(b)
            if b[0] < 0 or (b[0] == 0 and b[1] < 0):
                b = -b
            dirs.append(b)
            kvals.append(float(curvature_omega_from(fb, b)))
    return EigenDirections(tuple(dirs), tuple(kvals), bool(umbilic),
                           (float(vals[0]), float(vals[1])), (float(fvals[0]), float(fvals[1])), swap)


def extremum_system_residual(scene: CongruenceScene, q, b, k0: float | None = None) -> tuple[float, float]:
    """Residuals of (S_sym - k0 I_O) b = 0 with b scaled to unit length."""
    fb = form_bundle(scene, q)
    b = np.asarray(b, dtype=float)
    b = b / np.linalg.norm(b)
    if k0 is None:
        k0 = float(curvature_omega_from(fb, b))
    r = (_sym(fb.S) - k0 * fb.I_O) @ b
    return float(abs(r[0])), float(abs(r[1]))


# -- focal and limit points -----------------------------------------------------------------

@dataclass(frozen=True)
class FocalLimitData:
    """Focal coordinates rho and Kummer principal curvatures kappa.

    Roots come in ascending order when real; complex focal roots are
    returned as a conjugate pair.  ``midpoint_residuals`` holds the
    residuals of the sum relation and the difference relation.
    """

    rho: tuple[complex | float, complex | float]
    kappa: tuple[float, float]
    is_normal_point: bool
    midpoint_residuals: tuple[float, float]
    focal_coeffs: tuple[float, float, float]
    limit_coeffs: tuple[float, float, float]


def quadratic_roots(a: float, b: float, c: float):
    """Roots of a t^2 + b t + c (a != 0), real ascending or a conjugate pair."""
    disc = b * b - 4 * a * c
    if abs(disc) <= 1e-14 * (b * b + abs(4 * a * c)):
        # treat round-off around a double root as exact
        disc = 0.0
    if disc >= 0:
        s = math.sqrt(disc)
        q = -0.5 * (b + math.copysign(s, b))
        r1 = q / a
        # q == 0 forces b == c == 0, a double root at zero
        r2 = c / q if q != 0 else 0.0
        return tuple(sorted((r1, r2)))
    s = math.sqrt(-disc)
    return complex(-b / (2 * a), -s / (2 * a)), complex(-b / (2 * a), s / (2 * a))


def focal_coefficients(cf: KummerFormsClassical):
    a = cf.E * cf.G - cf.F ** 2
    b = cf.F * cf.M2 - cf.N * cf.E + cf.F * cf.M1 - cf.G * cf.L
    c = cf.N * cf.L - cf.M2 * cf.M1
    return a, b, c


def limit_coefficients(cf: KummerFormsClassical):
    """det(II_sym - k I) = 0 written as a k^2 + b k + c."""
    m = 0.5 * (cf.M1 + cf.M2)
    a = cf.E * cf.G - cf.F ** 2
    b = 2.0 * m * cf.F - cf.E * cf.N - cf.G * cf.L
    c = cf.L * cf.N - m * m
    return a, b, c


def focal_and_limit(scene: CongruenceScene, q) -> FocalLimitData:
    cf = classical_forms(scene, q)
    scale = cf.E * cf.E + cf.G * cf.G + 2 * cf.F * cf.F
    if not (cf.det_I > SINGULAR_TOL * max(scale, 1e-300)):
        raise SingularPointError("Kummer first form is singular here (point of the singular set of xi)")
    fa = focal_coefficients(cf)
    la = limit_coefficients(cf)
    rho = quadratic_roots(*fa)
    kappa = quadratic_roots(*la)
    r1 = abs((rho[0] + rho[1]) - (kappa[0] + kappa[1]))
    lhs = (kappa[0] - kappa[1]) ** 2 - (rho[0] - rho[1]) ** 2
    r2 = abs(complex(lhs).real - (cf.M1 - cf.M2) ** 2 / cf.det_I) + abs(complex(lhs).imag)
    asym = abs(cf.M1 - cf.M2) / max(float(frob(cf.II)), 1e-300)
    # II_sym is symmetric and I positive definite, so kappa is always real
    kappa = (complex(kappa[0]).real, complex(kappa[1]).real)
    return FocalLimitData(rho, kappa, bool(asym <= SYMMETRY_TOL), (float(r1), float(r2)), fa, la)


# -- curves in the parameter domain ----------------------------------------------------------

@dataclass(frozen=True)
class ParamCurve:
    """A curve t -> (u1(t), u2(t)) given by expressions in ``t``."""

    u1: object
    u2: object

    @staticmethod
    def parse(u1_text: str, u2_text: str) -> "ParamCurve":
        from .parser import parse_expr

        return ParamCurve(parse_expr(u1_text, ("t",)), parse_expr(u2_text, ("t",)))

    def jets(self, t):
        """Points (..., 2) and velocities (..., 2) at parameter values t."""
        t = np.asarray(t, dtype=float)
        tj = Jet(t, np.ones_like(t), np.zeros_like(t)) if t.ndim else Jet(float(t), 1.0, 0.0)
        a = eval_with(self.u1, {"t": tj})
        b = eval_with(self.u2, {"t": tj})
        pts = np.stack(np.broadcast_arrays(a.value, b.value), axis=-1).astype(float)
        vel = np.stack(np.broadcast_arrays(a.d1, b.d1), axis=-1).astype(float)
        return pts, vel


def _along(v: VectorExpr, pts: np.ndarray, vel: np.ndarray):
    """Value (..., 3) and t-derivative (..., 3) of v composed with the curve."""
    env = {
        "u1": Jet(pts[..., 0], vel[..., 0], np.zeros_like(vel[..., 0])),
        "u2": Jet(pts[..., 1], vel[..., 1], np.zeros_like(vel[..., 1])),
    }
    jets = eval_vec_with(v, env)
    return stack_value(jets), stack_jacobian(jets)[..., 0]


@dataclass(frozen=True)
class StrictionResult:
    t: np.ndarray
    points: np.ndarray  # (n, 2) in the parameter domain
    x: np.ndarray
    xi: np.ndarray
    k: np.ndarray  # central-point coordinate along each generator
    beta: np.ndarray  # striction line (n, 3)
    residual: np.ndarray  # finite-difference <beta', xi'>


def striction_curve(scene: CongruenceScene, curve: ParamCurve, t_samples, h: float = 1e-5,
                    min_speed: float = 1e-10) -> StrictionResult:
    t = np.asarray(t_samples, dtype=float)

    def beta_at(tt):
        pts, vel = curve.jets(tt)
        x, dx = _along(scene.x, pts, vel)
        xi, dxi = _along(scene.xi, pts, vel)
        nn = np.sum(dxi * dxi, axis=-1)
        if np.any(nn <= min_speed ** 2):
            raise SingularPointError("xi' vanishes along the curve; the striction point is undefined")
        k = -np.sum(dx * dxi, axis=-1) / nn
        return pts, x, xi, dxi, k, x + k[..., None] * xi

    pts, x, xi, dxi, k, beta = beta_at(t)
    _, _, _, _, _, bp = beta_at(t + h)
    _, _, _, _, _, bm = beta_at(t - h)
    dbeta = (bp - bm) / (2 * h)
    res = np.abs(np.sum(dbeta * dxi, axis=-1)) / np.sum(dxi * dxi, axis=-1)
    return StrictionResult(t, pts, x, xi, k, beta, res)


@dataclass(frozen=True)
class CongruenceMesh:
    """Samples Y(t, w) = x(t) + w xi(t), row-major over (t, w)."""

    t: np.ndarray
    w: np.ndarray
    vertices: np.ndarray  # (nt * nw, 3)
    faces: np.ndarray  # (m, 4) zero-based quads
    developability: np.ndarray  # |[x', xi', xi]| per t sample
    directrix: np.ndarray  # (nt, 3)

    @property
    def grid(self) -> np.ndarray:
        return self.vertices.reshape(len(self.t), len(self.w), 3)


def developability_residual(scene: CongruenceScene, q, dq) -> np.ndarray:
    """[x', xi', xi] along direction dq at q, scaled by |dq|^2."""
    from .expr import eval_vector

    q = np.asarray(q, dtype=float)
    dq = np.asarray(dq, dtype=float)
    _, Dx = eval_vector(scene.x, q)
    xi, Dxi = eval_vector(scene.xi, q)
    xp = np.einsum("...ij,...j->...i", np.broadcast_to(Dx, q.shape[:-1] + (3, 2)), dq)
    np_ = np.einsum("...ij,...j->...i", np.broadcast_to(Dxi, q.shape[:-1] + (3, 2)), dq)
    xi = np.broadcast_to(xi, q.shape[:-1] + (3,))
    return np.sum(np.cross(xp, np_) * xi, axis=-1) / np.sum(dq * dq, axis=-1)


def surface_of_congruence(scene: CongruenceScene, curve: ParamCurve, t_samples, w_range=(-1.0, 1.0),
                          w_samples: int = 11) -> CongruenceMesh:
    t = np.asarray(t_samples, dtype=float)
    pts, vel = curve.jets(t)
    if not np.all(scene.domain.contains(pts, closed=True)):
        raise ValueError("the directrix leaves the domain")
    x, dx = _along(scene.x, pts, vel)
    xi, dxi = _along(scene.xi, pts, vel)
    w = np.zeros(1) if w_samples == 1 else np.linspace(w_range[0], w_range[1], w_samples)
    verts = x[:, None, :] + w[None, :, None] * xi[:, None, :]
    nt, nw = len(t), len(w)
    faces = [
        (i * nw + j, (i + 1) * nw + j, (i + 1) * nw + j + 1, i * nw + j + 1)
        for i in range(nt - 1)
        for j in range(nw - 1)
    ]
    dev = np.abs(np.sum(np.cross(dx, dxi) * xi, axis=-1))
    return CongruenceMesh(t, w, verts.reshape(-1, 3), np.array(faces, dtype=int).reshape(-1, 4), dev, x)
