"""Seeded identity suite run by ``kummer verify``.

Points are drawn with ``numpy.random.default_rng(seed)`` (PCG64): the
first draw is u1 for all points, the second u2, each uniform on the domain
shrunk by 2% per side.  Points on the singular set of xi are added from the
refined zero curves of delta.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from . import congruence as C
from .bde import proportionality_gap
from .contour import zero_curves
from .fields import pointwise, sample_scene
from .frontal import relative_curvatures_matrices
from .jet import EvalError
from .linalg import T, frob, inv2
from .scene import CongruenceScene

DEFAULT_POINTS = 200
DEFAULT_TOL = 1e-9
REGULAR_DELTA = 1e-6


@dataclass
class IdentityResult:
    name: str
    status: str  # pass, fail, na
    max_residual: float | None
    tolerance: float
    evaluated: int
    note: str = ""


@dataclass
class VerifyReport:
    scene: str
    seed: int
    points: int
    singular_points: int
    skipped_points: int
    identities: list[IdentityResult] = field(default_factory=list)

    @property
    def all_pass(self) -> bool:
        return all(r.status != "fail" for r in self.identities)

    def to_dict(self) -> dict:
        return {
            "schema": 1,
            "scene": self.scene,
            "seed": self.seed,
            "points": self.points,
            "singular_points": self.singular_points,
            "skipped_points": self.skipped_points,
            "all_pass": self.all_pass,
            "identities": [asdict(r) for r in self.identities],
        }


def singular_points(scene: CongruenceScene, n: int, rng: np.random.Generator, grid_n: int = 64) -> np.ndarray:
    """Up to n points on the zero set of delta (refined curve vertices)."""
    try:
        f = lambda p: float(C.form_bundle(scene, p).delta)  # noqa: E731
        vals = pointwise(lambda p: C.form_bundle(scene, p).delta, scene.domain.grid(grid_n))
        curves = zero_curves(f, scene.domain, grid_n, values=vals)
    except (ArithmeticError, ValueError):
        return np.zeros((0, 2))
    if not curves:
        return np.zeros((0, 2))
    verts = np.vstack(curves)
    verts = verts[scene.domain.contains(verts)]
    if len(verts) == 0:
        return np.zeros((0, 2))
    pick = rng.choice(len(verts), size=min(n, len(verts)), replace=False)
    return verts[np.sort(pick)]


def _usable(scene: CongruenceScene, pts: np.ndarray):
    """Drop points where the scene cannot be evaluated."""
    try:
        sample_scene(scene, pts)
        return pts, 0
    except (EvalError, ArithmeticError):
        pass
    keep = []
    for p in pts:
        try:
            sample_scene(scene, p)
            keep.append(p)
        except (EvalError, ArithmeticError):
            pass
    return np.array(keep).reshape(-1, 2), len(pts) - len(keep)


def _result(name, resid, tol, note="", mask=None) -> IdentityResult:
    resid = np.asarray(resid, dtype=float).reshape(-1)
    if mask is not None:
        resid = resid[np.asarray(mask).reshape(-1)]
    if resid.size == 0:
        return IdentityResult(name, "na", None, tol, 0, note or "no applicable points")
    m = float(np.max(resid))
    return IdentityResult(name, "pass" if m <= tol else "fail", m, tol, int(resid.size), note)


def _na(name, tol, note) -> IdentityResult:
    return IdentityResult(name, "na", None, tol, 0, note)


def run_suite(scene: CongruenceScene, n_points: int = DEFAULT_POINTS, seed: int = 0,
              tol: float = DEFAULT_TOL, n_singular: int = 20) -> VerifyReport:
    rng = np.random.default_rng(seed)
    pts = scene.domain.random_points(rng, n_points)
    sing = singular_points(scene, n_singular, rng) if scene.has_omega else np.zeros((0, 2))
    allpts = np.vstack([pts, sing])
    allpts, skipped = _usable(scene, allpts)
    rep = VerifyReport(scene.name, seed, len(allpts), len(sing), skipped)
    out = rep.identities
    if len(allpts) == 0:
        out.append(_na("evaluation", tol, "scene could not be evaluated at any sample point"))
        return rep

    fs = sample_scene(scene, allpts)
    out.append(_result("unit_xi", np.abs(np.linalg.norm(fs.xi, axis=-1) - 1.0), 1e-10)
               if scene.unitize_xi else _na("unit_xi", 1e-10, "unitize_xi is off"))

    try:
        fb = C.form_bundle(scene, allpts, require_tangent=False)
    except ArithmeticError as exc:
        out.append(_na("moving_basis", tol, str(exc)))
        return rep
    scale_xi = 1.0 + frob(fs.Dxi)
    tang = fb.tangency_residual / scale_xi
    tangent = bool(np.all(tang <= 1e-8))
    if tangent or scene.has_omega:
        out.append(_result("xi_tangent_to_basis", tang, 1e-8))
    else:
        # the fallback basis spans the tangent planes of x, which need not contain xi'
        out.append(_na("xi_tangent_to_basis", 1e-8,
                       f"no omega given and (x_u1, x_u2) is not tangent to xi "
                       f"(residual {float(np.max(tang)):.3g})"))
    if not tangent:
        note = "omega is not a tangent moving basis of xi"
        for name in ("kummer_first_form_decomposition", "kummer_second_form_decomposition",
                     "rescaling", "normality_agreement", "factorization_theorem",
                     "factorization_coefficients", "principal_discriminant", "developable_triple"):
            out.append(_na(name, tol, note))
    else:
        _omega_checks(scene, fb, out, tol, rng)

    # frontal identities for the induced normal
    gram = T(fs.Omega) @ fs.Omega
    mu = -T(-T(fs.Omega) @ fs.Dn) @ inv2(gram)
    dn = frob(fs.Dn - fs.Omega @ T(mu))
    out.append(_result("normal_derivative", dn / (1.0 + frob(fs.Dn)), tol))
    lam = T(fs.Dx) @ fs.Omega @ inv2(gram)
    x_tangent = frob(fs.Dx - fs.Omega @ T(lam)) <= 1e-8 * (1.0 + frob(fs.Dx))
    if np.all(x_tangent):
        ortho = np.abs(np.einsum("...i,...ij->...j", fs.n, fs.Dx)).max(axis=-1)
        out.append(_result("normal_orthogonal_to_x", ortho / (1.0 + frob(fs.Dx)), 1e-10))
        rc = relative_curvatures_matrices(fs.Dx, fs.Omega, fs.Dn)
        real = np.isfinite(rc.k1)
        s = 1.0 + np.abs(rc.H) + np.abs(rc.lam * rc.K)
        alg = np.maximum(np.abs(rc.k1 * rc.k2 - rc.lam * rc.K), np.abs(rc.k1 + rc.k2 - 2 * rc.H)) / s
        out.append(_result("relative_curvature_algebra", alg, 1e-10, mask=real))
    else:
        out.append(_na("normal_orthogonal_to_x", 1e-10, "omega is not tangent to x"))
        out.append(_na("relative_curvature_algebra", 1e-10, "omega is not tangent to x"))
    if scene.xi_is_normal and tangent:
        mu = relative_curvatures_matrices(fs.Dx, fs.Omega, fs.Dn).mu
        out.append(_result("delta_equals_mu", np.abs(fb.Delta - mu).max(axis=(-2, -1)), 1e-10,
                           note="" if np.all(x_tangent) else "x is not tangent to omega"))
        if np.all(x_tangent):
            lhs = C.principal_matrix(fb)
            alpha = C.alpha_matrix(fb)
            out.append(_result("principal_via_alpha", frob(lhs - alpha) / (1.0 + frob(lhs)), tol))
        else:
            out.append(_na("principal_via_alpha", tol, "x is not tangent to omega"))
    else:
        out.append(_na("delta_equals_mu", 1e-10, "xi is not the induced normal"))
        out.append(_na("principal_via_alpha", tol, "xi is not the induced normal"))

    _classical_checks(fb, out)
    return rep


def _omega_checks(scene, fb: C.FormBundle, out: list, tol: float, rng):
    r1, r2 = C.decomposition_residuals(fb)
    out.append(_result("kummer_first_form_decomposition", r1 / (1.0 + frob(fb.I)), tol))
    out.append(_result("kummer_second_form_decomposition", r2 / (1.0 + frob(fb.II)), tol))

    delta = np.asarray(fb.delta)
    detI = fb.detI
    regular = (np.abs(delta) > REGULAR_DELTA) & (detI > 1e-10 * (1.0 + frob(fb.I) ** 2))
    a = rng.normal(size=delta.shape + (2,))
    b = np.einsum("...ji,...j->...i", fb.Delta, a)
    with np.errstate(divide="ignore", invalid="ignore"):
        k_cl = C._quad(fb.II, a) / C._quad(fb.I, a)
        k_om = C.curvature_omega_from(fb, b)
        resc = np.abs(delta * k_cl - k_om) / (1.0 + np.abs(k_om))
    out.append(_result("rescaling", resc, tol, mask=regular))

    asym = C.asymmetry(fb.S)
    normal = asym <= C.SYMMETRY_TOL
    m12 = np.abs(fb.II[..., 0, 1] - fb.II[..., 1, 0]) <= C.SYMMETRY_TOL * (1.0 + frob(fb.II))
    disagree = (normal != m12).astype(float)
    out.append(_result("normality_agreement", disagree, 0.0, mask=regular))

    lhs, rhs = C.theorem_matrices(fb)
    thm = frob(lhs - rhs) / (1.0 + frob(lhs))
    if np.any(normal):
        note = "" if np.all(normal) else f"{int(np.sum(~normal))} non-normal points excluded"
        out.append(_result("factorization_theorem", thm, tol, note, mask=normal))
        pb = C.principal_from(fb).pulled_back
        dev = C.developable_from(fb)
        diff = pb.vector - 2.0 * delta[..., None] * dev.vector
        fac = np.abs(diff).max(axis=-1) / (1.0 + np.abs(pb.vector).max(axis=-1))
        out.append(_result("factorization_coefficients", fac, tol, note, mask=normal))
    else:
        out.append(_na("factorization_theorem", tol, "congruence is not normal at the sample points"))
        out.append(_na("factorization_coefficients", tol, "congruence is not normal at the sample points"))

    c = C.principal_from(fb)
    disc = np.asarray(c.discriminant)
    cmax = np.abs(c.vector).max(axis=-1)
    bad = np.where(disc < -1e-12, -disc, 0.0)
    # a vanishing discriminant must come with vanishing coefficients
    bad = np.maximum(bad, np.where((np.abs(disc) <= 1e-12) & (cmax > 1e-8), cmax, 0.0))
    out.append(_result("principal_discriminant", bad, 0.0))

    dev = C.developable_from(fb)
    tri = np.stack(C.triple_coefficients(fb.fields.Dx, fb.fields.Dxi, fb.fields.xi), axis=-1)
    out.append(_result("developable_triple", proportionality_gap(dev.vector, tri, atol=1e-12), tol))


def _classical_checks(fb: C.FormBundle, out: list):
    detI = fb.detI
    regular = detI > 1e-6 * (1.0 + frob(fb.I) ** 2)
    idx = np.flatnonzero(np.asarray(regular).reshape(-1))
    if idx.size == 0:
        out.append(_na("midpoint_system", 1e-8, "no regular points"))
        return
    I = fb.I.reshape(-1, 2, 2)[idx]
    II = fb.II.reshape(-1, 2, 2)[idx]
    worst = []
    for a, b in zip(I, II):
        cf = C._classical_from(a, b)
        rho = C.quadratic_roots(*C.focal_coefficients(cf))
        kap = C.quadratic_roots(*C.limit_coefficients(cf))
        r1 = abs((rho[0] + rho[1]) - (kap[0] + kap[1]))
        lhs = complex((kap[0] - kap[1]) ** 2 - (rho[0] - rho[1]) ** 2)
        r2 = abs(lhs.real - (cf.M1 - cf.M2) ** 2 / cf.det_I) + abs(lhs.imag)
        s = 1.0 + abs(kap[0]) + abs(kap[1])
        worst.append(max(r1 / s, r2 / s ** 2))
    out.append(_result("midpoint_system", worst, 1e-8))
