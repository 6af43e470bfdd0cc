"""Integral curves of direction equations and their discriminant sets.

Curves are traced with fixed-step RK4 on the unit direction field.  At
every stage the root closest in angle to the current heading is taken, so
the curve keeps to one branch; it stops instead of switching when the two
roots merge.  Several seeds are traced together, one vectorized field
evaluation per RK4 stage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .contour import zero_curves
from .fields import pointwise
from .jet import EvalError
from .linalg import P, quad_coeffs
from .scene import CongruenceScene, DomainRect

SINGULAR_TOL = 1e-10
COLLISION_ANGLE = 1e-3
ZERO_TOL = 1e-12
DEFAULT_STEP = 1e-3
DEFAULT_MAX_STEPS = 100_000

TERMINATIONS = ("left_domain", "hit_discriminant_zero", "hit_singular_set", "max_steps", "evaluation_error")


class SeedError(ValueError):
    def __init__(self, message: str, reason: str):
        super().__init__(message)
        self.reason = reason


# -- direction fields -------------------------------------------------------------

class DirectionField:
    """Quadratic direction equation in (u1', u2') over a domain.

    ``coeffs(q)`` maps points (m, 2) to arrays A, B, C of shape (m,).
    ``singular(q)`` returns the function whose zero set stops tracing
    (delta or lambda) or ``None`` when there is none.
    """

    kind = "synthetic"
    domain: DomainRect

    def coeffs(self, q: np.ndarray):
        raise NotImplementedError

    def singular(self, q: np.ndarray) -> Optional[np.ndarray]:
        return None

    _ref: Optional[float] = None

    def reference_scale(self) -> float:
        """Largest coefficient magnitude on a coarse grid (for zero tests)."""
        if self._ref is None:
            g = self.domain.grid(8).reshape(-1, 2)
            vals = pointwise(lambda p: np.stack(self.coeffs(np.atleast_2d(p)), axis=-1), g)
            ref = float(np.nanmax(np.abs(vals))) if np.isfinite(vals).any() else 1.0
            self._ref = ref if ref > 0 else 1.0
        return self._ref


class FunctionField(DirectionField):
    def __init__(self, fn: Callable, domain: DomainRect, kind: str = "synthetic"):
        self.fn = fn
        self.domain = domain
        self.kind = kind

    def coeffs(self, q):
        q = np.atleast_2d(q)
        a, b, c = self.fn(q)
        return tuple(np.broadcast_to(np.asarray(v, dtype=float), q.shape[:-1]) for v in (a, b, c))


class SceneField(DirectionField):
    def __init__(self, scene: CongruenceScene, kind: str):
        if kind not in ("principal", "developable", "curvature_line"):
            raise ValueError(f"unknown equation kind {kind!r}")
        self.scene = scene
        self.kind = kind
        self.domain = scene.domain

    def _eval(self, q):
        from . import congruence as C
        from .frontal import curvature_line_matrix, relative_curvatures_matrices

        if self.kind == "curvature_line":
            from .fields import sample_scene

            fs = sample_scene(self.scene, q)
            rc = relative_curvatures_matrices(fs.Dx, fs.Omega, fs.Dn)
            return quad_coeffs(curvature_line_matrix(rc)), rc.lam
        fb = C.form_bundle(self.scene, q)
        if self.kind == "principal":
            pb = C.principal_from(fb).pulled_back
            return (pb.A, pb.B, pb.C), fb.delta
        d = C.developable_from(fb)
        return (d.A, d.B, d.C), fb.delta

    def coeffs(self, q):
        return self._eval(np.atleast_2d(q))[0]

    def singular(self, q):
        return self._eval(np.atleast_2d(q))[1]

    def both(self, q):
        return self._eval(np.atleast_2d(q))


def field_for(scene_or_field, kind: str) -> DirectionField:
    if isinstance(scene_or_field, DirectionField):
        return scene_or_field
    return SceneField(scene_or_field, kind)


# -- batched root selection ----------------------------------------------------------

def direction_roots(A, B, C):
    """Both real roots of the direction equation for each row.

    Returns (d1, d2, gap, ok): unit roots sorted by angle in (-pi/2, pi/2],
    the projective angle between them, and a mask of rows with two real
    roots.  The null directions of [[A, B/2], [B/2, C]] are
    sqrt(l2) e1 +- sqrt(-l1) e2 for eigenpairs (l1, e1), (l2, e2).
    """
    A, B, C = (np.asarray(v, dtype=float) for v in (A, B, C))
    m = 0.5 * (A + C)
    r = np.hypot(0.5 * (A - C), 0.5 * B)
    l1, l2 = m - r, m + r
    phi = 0.5 * np.arctan2(B, A - C)
    e2 = np.stack([np.cos(phi), np.sin(phi)], axis=-1)
    e1 = np.stack([-np.sin(phi), np.cos(phi)], axis=-1)
    ok = (l1 <= 0) & (l2 >= 0) & (r > 0)
    s2 = np.sqrt(np.maximum(l2, 0.0))[..., None]
    s1 = np.sqrt(np.maximum(-l1, 0.0))[..., None]
    da = s2 * e1 + s1 * e2
    db = s2 * e1 - s1 * e2
    da = da / np.maximum(np.linalg.norm(da, axis=-1, keepdims=True), 1e-300)
    db = db / np.maximum(np.linalg.norm(db, axis=-1, keepdims=True), 1e-300)
    da, db = _canon(da), _canon(db)
    ta = np.arctan2(da[..., 1], da[..., 0])
    tb = np.arctan2(db[..., 1], db[..., 0])
    swap = (tb < ta)[..., None]
    d1 = np.where(swap, db, da)
    d2 = np.where(swap, da, db)
    gap = np.arccos(np.clip(np.abs(np.sum(d1 * d2, axis=-1)), 0.0, 1.0))
    return d1, d2, gap, ok


def _canon(d):
    flip = (d[..., 0] < 0) | ((d[..., 0] == 0) & (d[..., 1] < 0))
    return np.where(flip[..., None], -d, d)


# -- curves ---------------------------------------------------------------------------

@dataclass
class IntegralCurve:
    """Samples (t, u1, u2) along one traced curve.

    ``status`` is ``regular`` for curves of the direction field and
    ``singular_branch`` for curves that follow the singular set, where every
    direction solves the pulled-back principal equation.  ``residuals`` is the
    normalized equation residual of the tangent used at each sample.
    """

    samples: np.ndarray
    branch: int
    termination: str
    kind: str
    status: str = "regular"
    residuals: np.ndarray = field(default_factory=lambda: np.zeros(0))
    termination_start: Optional[str] = None

    @property
    def t(self) -> np.ndarray:
        return self.samples[:, 0]

    @property
    def points(self) -> np.ndarray:
        return self.samples[:, 1:3]

    def __len__(self) -> int:
        return len(self.samples)


def _exit_point(domain: DomainRect, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Point where the segment a -> b leaves the closed domain (a inside)."""
    s = 1.0
    d = b - a
    for k, (lo, hi) in enumerate(((domain.u1_min, domain.u1_max), (domain.u2_min, domain.u2_max))):
        if d[k] > 0 and b[k] > hi:
            s = min(s, (hi - a[k]) / d[k])
        elif d[k] < 0 and b[k] < lo:
            s = min(s, (lo - a[k]) / d[k])
    return a + max(s, 0.0) * d


class _Stepper:
    def __init__(self, fld: DirectionField, zero_scale: float):
        self.fld = fld
        self.zero = ZERO_TOL * zero_scale

    def eval(self, q):
        try:
            if isinstance(self.fld, SceneField):
                (A, B, C), sing = self.fld.both(q)
            else:
                A, B, C = self.fld.coeffs(q)
                sing = self.fld.singular(q)
            err = np.zeros(len(q), dtype=bool)
        except (EvalError, ArithmeticError):
            # fall back point by point so one bad point does not stop the others
            A, B, C = (np.full(len(q), np.nan) for _ in range(3))
            sing = np.full(len(q), np.nan)
            err = np.zeros(len(q), dtype=bool)
            for i, p in enumerate(q):
                try:
                    if isinstance(self.fld, SceneField):
                        (a, b, c), s = self.fld.both(p[None])
                    else:
                        a, b, c = self.fld.coeffs(p[None])
                        s = self.fld.singular(p[None])
                    A[i], B[i], C[i] = a[0], b[0], c[0]
                    sing[i] = np.nan if s is None else np.asarray(s).reshape(-1)[0]
                except (EvalError, ArithmeticError):
                    err[i] = True
        A, B, C = (np.broadcast_to(np.asarray(v, dtype=float), (len(q),)) for v in (A, B, C))
        if sing is not None:
            sing = np.broadcast_to(np.asarray(sing, dtype=float), (len(q),))
        return A, B, C, sing, err

    def direction(self, q, ref):
        """Unit direction nearest to ``ref`` plus a per-row failure code.

        Codes: 0 ok, 1 roots merge or vanish, 2 evaluation error.
        Also returns the normalized residual and the singular values.
        """
        A, B, C, sing, err = self.eval(q)
        d1, d2, gap, ok = direction_roots(A, B, C)
        scale = np.maximum(np.maximum(np.abs(A), np.abs(B)), np.abs(C))
        c1 = np.abs(np.sum(d1 * ref, axis=-1))
        c2 = np.abs(np.sum(d2 * ref, axis=-1))
        d = np.where((c1 >= c2)[..., None], d1, d2)
        d = d * np.where(np.sum(d * ref, axis=-1) < 0, -1.0, 1.0)[..., None]
        bad = ~ok | (gap < COLLISION_ANGLE) | (scale <= self.zero) | ~np.isfinite(scale)
        code = np.where(err, 2, np.where(bad, 1, 0))
        res = np.abs(A * d[:, 0] ** 2 + B * d[:, 0] * d[:, 1] + C * d[:, 1] ** 2) / np.maximum(
            np.abs(A) + np.abs(B) + np.abs(C), 1e-300)
        return d, code, res, sing


def seed_directions(fld: DirectionField, seed) -> tuple[np.ndarray, np.ndarray, float]:
    """Branch directions (2, 2) at a seed and the singular value there."""
    st = _Stepper(fld, fld.reference_scale())
    q = np.asarray(seed, dtype=float)[None]
    A, B, C, sing, err = st.eval(q)
    if err[0]:
        raise SeedError("the equation cannot be evaluated at the seed", "evaluation_error")
    d1, d2, gap, ok = direction_roots(A, B, C)
    scale = max(abs(A[0]), abs(B[0]), abs(C[0]))
    s = float(sing[0]) if sing is not None else math.nan
    if not ok[0] or gap[0] < COLLISION_ANGLE or scale <= st.zero:
        raise SeedError("seed lies on the discriminant set (no two distinct real directions)",
                        "discriminant_zero")
    return np.stack([d1[0], d2[0]]), np.array([A[0], B[0], C[0]]), s


def trace_many(scene_or_field, kind: str, seeds, branch: int = 1, step: float = DEFAULT_STEP,
               max_steps: int = DEFAULT_MAX_STEPS, headings=None) -> list:
    """Trace one curve per seed; returns IntegralCurve or SeedError per seed."""
    if branch not in (1, 2):
        raise ValueError("branch must be 1 or 2")
    if step <= 0:
        raise ValueError("step must be positive")
    fld = field_for(scene_or_field, kind)
    seeds = np.atleast_2d(np.asarray(seeds, dtype=float))
    out: list = [None] * len(seeds)
    dom = fld.domain
    st = _Stepper(fld, fld.reference_scale())

    live_idx, q0, h0 = [], [], []
    for i, s in enumerate(seeds):
        if not dom.contains(s):
            out[i] = SeedError("seed is outside the domain", "outside_domain")
            continue
        try:
            dirs, _, sv = seed_directions(fld, s)
        except SeedError as exc:
            out[i] = exc
            continue
        if math.isfinite(sv) and abs(sv) <= SINGULAR_TOL:
            out[i] = SeedError("seed lies on the singular set", "singular_set")
            continue
        d = dirs[branch - 1]
        if headings is not None:
            hd = np.asarray(headings[i], dtype=float)
            d = d if d @ hd >= 0 else -d
        live_idx.append(i)
        q0.append(s)
        h0.append(d)
    if not live_idx:
        return out

    n = len(live_idx)
    q = np.array(q0)
    heading = np.array(h0)
    paths = [[q[k].copy()] for k in range(n)]
    resid: list[list[float]] = [[] for _ in range(n)]
    reason: list[Optional[str]] = [None] * n
    last_sing = np.full(n, np.nan)
    active = np.ones(n, dtype=bool)

    for _ in range(max_steps + 1):
        idx = np.flatnonzero(active)
        if len(idx) == 0:
            break
        k1, c1, r1, s1 = st.direction(q[idx], heading[idx])
        keep = np.ones(len(idx), dtype=bool)
        for j, i in enumerate(idx):
            sv = math.nan if s1 is None else float(s1[j])
            if math.isfinite(sv):
                if abs(sv) <= SINGULAR_TOL:
                    reason[i] = "hit_singular_set"
                elif sv * last_sing[i] < 0:
                    # crossed the singular set during the last step
                    paths[i].pop()
                    reason[i] = "hit_singular_set"
                last_sing[i] = sv
            if reason[i] is None:
                resid[i].append(float(r1[j]))
                if len(paths[i]) > max_steps:
                    reason[i] = "max_steps"
            if reason[i] is not None:
                active[i] = False
                keep[j] = False
        idx, k1, c1 = idx[keep], k1[keep], c1[keep]
        if len(idx) == 0:
            break
        qa = q[idx]
        k2, c2, _, _ = st.direction(qa + 0.5 * step * k1, k1)
        k3, c3, _, _ = st.direction(qa + 0.5 * step * k2, k1)
        k4, c4, _, _ = st.direction(qa + step * k3, k1)
        qn = qa + step / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        code = np.maximum.reduce([c1, c2, c3, c4])
        for j, i in enumerate(idx):
            if code[j]:
                reason[i] = "evaluation_error" if code[j] == 2 else "hit_discriminant_zero"
                active[i] = False
            elif not dom.contains(qn[j], closed=True):
                paths[i].append(_exit_point(dom, qa[j], qn[j]))
                reason[i] = "left_domain"
                active[i] = False
            else:
                q[i] = qn[j]
                heading[i] = k4[j]
                paths[i].append(q[i].copy())
    for k in range(n):
        if reason[k] is None:
            reason[k] = "max_steps"

    for k, i in enumerate(live_idx):
        pts = np.array(paths[k])
        seg = np.linalg.norm(np.diff(pts, axis=0), axis=-1)
        t = np.concatenate([[0.0], np.cumsum(seg)])
        r = np.array(resid[k][:len(pts)])
        if len(r) < len(pts):
            r = np.concatenate([r, np.full(len(pts) - len(r), np.nan)])
        out[i] = IntegralCurve(np.column_stack([t, pts]), branch, reason[k], fld.kind, "regular", r)
    return out


# -- the singular branch of the principal equation --------------------------------------

def trace_singular_branch(fld: SceneField, seed, step: float = DEFAULT_STEP,
                          max_steps: int = DEFAULT_MAX_STEPS, heading=None) -> IntegralCurve:
    """Follow delta = 0 through ``seed`` by predictor-corrector continuation.

    On the singular set of xi the pulled-back principal coefficients all
    vanish, so any curve inside it solves the equation; the tracer therefore
    follows the level set itself.
    """
    dom = fld.domain
    h = 1e-6
    stencil = np.array([[0, 0], [h, 0], [-h, 0], [0, h], [0, -h]])

    def value_grad(p):
        v = np.asarray(fld.singular(p + stencil), dtype=float)
        return float(v[0]), np.array([(v[1] - v[2]) / (2 * h), (v[3] - v[4]) / (2 * h)])

    def along(g, ref):
        ng = np.linalg.norm(g)
        if ng < 1e-12:
            return None
        d = (P @ g) / ng
        if ref is None:
            return _canon(d[None])[0]
        return d if d @ ref >= 0 else -d

    def project(p):
        v, g = value_grad(p)
        for _ in range(8):
            if abs(v) <= SINGULAR_TOL:
                return p, g
            gg = g @ g
            if gg < 1e-24:
                return None
            p = p - v * g / gg
            v, g = value_grad(p)
        return (p, g) if abs(v) <= 1e-8 else None

    q = np.asarray(seed, dtype=float)
    _, g0 = value_grad(q)
    d = along(g0, None if heading is None else np.asarray(heading, dtype=float))
    if d is None:
        raise SeedError("singular set is not a smooth curve at the seed", "singular_set")
    pts = [q.copy()]
    reason = "max_steps"
    for _ in range(max_steps):
        proj = project(q + step * d)
        if proj is None:
            reason = "hit_discriminant_zero"
            break
        qn, g = proj
        if not dom.contains(qn, closed=True):
            pts.append(_exit_point(dom, q, qn))
            reason = "left_domain"
            break
        dn = along(g, d)
        if dn is None:
            pts.append(qn)
            reason = "hit_discriminant_zero"
            break
        q, d = qn, dn
        pts.append(q.copy())
    arr = np.array(pts)
    seg = np.linalg.norm(np.diff(arr, axis=0), axis=-1)
    t = np.concatenate([[0.0], np.cumsum(seg)])
    return IntegralCurve(np.column_stack([t, arr]), 1, reason, "principal", "singular_branch",
                         np.zeros(len(arr)))


# -- public entry points -------------------------------------------------------------------

def _on_singular_normal_branch(fld: DirectionField, seed) -> bool:
    if not (isinstance(fld, SceneField) and fld.kind == "principal"):
        return False
    from .congruence import asymmetry, form_bundle

    fb = form_bundle(fld.scene, np.asarray(seed, dtype=float))
    return abs(float(fb.delta)) <= SINGULAR_TOL and float(asymmetry(fb.S)) <= 1e-8


def trace(scene_or_field, kind: str, seed, branch: int = 1, step: float = DEFAULT_STEP,
          max_steps: int = DEFAULT_MAX_STEPS, heading=None) -> IntegralCurve:
    """Trace one integral curve forward from ``seed``.

    ``heading`` (optional) selects the orientation along the branch; by
    default the branch direction with positive first component is used.
    Raises :class:`SeedError` for seeds outside the domain or on the
    discriminant or singular set.  The one exception is a principal seed on
    the singular set of a normal congruence: the curve then follows that
    set and has status ``singular_branch``.
    """
    fld = field_for(scene_or_field, kind)
    seed = np.asarray(seed, dtype=float)
    if not fld.domain.contains(seed):
        raise SeedError("seed is outside the domain", "outside_domain")
    if _on_singular_normal_branch(fld, seed):
        return trace_singular_branch(fld, seed, step, max_steps, heading)
    res = trace_many(fld, kind, seed[None], branch, step, max_steps,
                     None if heading is None else [heading])[0]
    if isinstance(res, SeedError):
        raise res
    return res


def trace_both_ways(scene_or_field, kind: str, seed, branch: int = 1, step: float = DEFAULT_STEP,
                    max_steps: int = DEFAULT_MAX_STEPS) -> IntegralCurve:
    """Trace forward and backward from ``seed`` and join the halves (t = 0 at the seed)."""
    fwd = trace(scene_or_field, kind, seed, branch, step, max_steps)
    d0 = fwd.points[1] - fwd.points[0] if len(fwd) > 1 else np.array([1.0, 0.0])
    back = trace(scene_or_field, kind, seed, branch, step, max_steps, heading=-d0)
    return join_halves(fwd, back)


def join_halves(fwd: IntegralCurve, back: IntegralCurve) -> IntegralCurve:
    b = back.samples[::-1].copy()
    b[:, 0] = -b[:, 0]
    samples = np.vstack([b[:-1], fwd.samples])
    res = np.concatenate([back.residuals[::-1][:-1], fwd.residuals])
    return IntegralCurve(samples, fwd.branch, fwd.termination, fwd.kind, fwd.status, res,
                         termination_start=back.termination)


def hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    from scipy.spatial.distance import directed_hausdorff

    return max(directed_hausdorff(a, b)[0], directed_hausdorff(b, a)[0])


# -- discriminant sets -------------------------------------------------------------------------

@dataclass(frozen=True)
class DiscriminantSet:
    """Zero set of the discriminant of a direction equation.

    ``curves`` are sign changes of the discriminant of the reduced
    equation (basis coordinates for the principal kind, the form without
    the lambda prefactor for curvature lines).  ``singular_curves`` are the
    zeros of that prefactor (delta or lambda), along which the equation in
    (u1', u2') degenerates entirely.  ``status`` is ``degenerate`` when the
    discriminant vanishes on the whole grid.
    """

    kind: str
    curves: list
    singular_curves: list
    status: str
    max_abs: float


def _reduced(scene: CongruenceScene, kind: str, q):
    from . import congruence as C
    from .fields import sample_scene
    from .frontal import relative_curvatures_matrices

    if kind == "principal":
        fb = C.form_bundle(scene, q)
        c = C.principal_from(fb)
        return (c.A, c.B, c.C), fb.delta
    if kind == "developable":
        fb = C.form_bundle(scene, q)
        d = C.developable_from(fb)
        return (d.A, d.B, d.C), fb.delta
    if kind == "curvature_line":
        fs = sample_scene(scene, q)
        rc = relative_curvatures_matrices(fs.Dx, fs.Omega, fs.Dn)
        a, b, c = quad_coeffs(P @ np.swapaxes(rc.alpha, -1, -2))
        return (a, b, c), rc.lam
    raise ValueError(f"unknown equation kind {kind!r}")


def discriminant_values(scene: CongruenceScene, kind: str, q) -> np.ndarray:
    (a, b, c), _ = _reduced(scene, kind, q)
    return np.asarray(b * b - 4 * a * c, dtype=float)


def discriminant_zero_set(scene: CongruenceScene, kind: str = "principal", grid_n: int = 64,
                          degenerate_tol: float = 1e-12) -> DiscriminantSet:
    if grid_n < 8:
        raise ValueError("grid_n must be at least 8")
    grid = scene.domain.grid(grid_n)

    def disc_and_prefactor(p):
        (a, b, c), pref = _reduced(scene, kind, p)
        return np.stack(np.broadcast_arrays(b * b - 4 * a * c, pref), axis=-1)

    vals = pointwise(disc_and_prefactor, grid)
    disc, pref = vals[..., 0], vals[..., 1]
    max_abs = float(np.nanmax(np.abs(disc))) if np.isfinite(disc).any() else 0.0
    if max_abs <= degenerate_tol:
        return DiscriminantSet(kind, [], [], "degenerate", max_abs)

    def fd(p):
        return float(discriminant_values(scene, kind, p))

    def fp(p):
        return float(_reduced(scene, kind, p)[1])

    # only genuinely negative regions count; round-off dips around touching
    # zeros of a non-negative discriminant are ignored
    tol = 1e-10 * max_abs
    shaped = np.where(disc < -tol, disc, np.maximum(disc, tol))
    curves = zero_curves(fd, scene.domain, grid_n, values=shaped)
    sing = zero_curves(fp, scene.domain, grid_n, values=pref)
    status = "ok" if (curves or sing) else "empty"
    return DiscriminantSet(kind, curves, sing, status, max_abs)
