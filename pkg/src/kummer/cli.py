"""Command-line front end: ``kummer <subcommand> [scene] [options]``.

Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
3 runtime math error.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import congruence as C
from .expr import eval_vector
from .fields import sample_scene
from .fixtures import FIXTURES, load_fixture
from .frontal import relative_curvatures_matrices
from .jet import EvalError
from .linalg import frob
from .parser import ParseError, parse_scene
from .report import SCHEMA, to_csv, to_json, to_obj
from .scene import CongruenceScene
from .tracing import (
    DEFAULT_MAX_STEPS,
    DEFAULT_STEP,
    SINGULAR_TOL,
    IntegralCurve,
    SceneField,
    SeedError,
    _on_singular_normal_branch,
    discriminant_zero_set,
    join_halves,
    trace_both_ways,
    trace_many,
)
from .verify import DEFAULT_POINTS, DEFAULT_TOL, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_MATH = 0, 1, 2, 3
UMBILIC_TOL = 1e-10
FORMATS = {
    "forms": ("json",),
    "verify": ("json", "csv"),
    "lines": ("csv", "json"),
    "mesh": ("obj",),
    "singular": ("csv", "json"),
    "striction": ("csv", "json"),
}
KIND_ALIASES = {"principal": "principal", "developable": "developable",
                "curvature": "curvature_line", "curvature_line": "curvature_line"}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    scene: CongruenceScene
    out: Path | None
    fmt: str
    tol: float | None
    seed: list
    grid: int | None
    args: argparse.Namespace


# -- argument handling -----------------------------------------------------------------

def _pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"expected 'a,b', got {text!r}")
    try:
        a, b = float(parts[0]), float(parts[1])
    except ValueError:
        raise UsageError(f"expected two numbers, got {text!r}") from None
    if not (math.isfinite(a) and math.isfinite(b)):
        raise UsageError(f"expected finite numbers, got {text!r}")
    return a, b


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("source", nargs="?", help="fixture name or path to a .cong file")
    p.add_argument("--scene", metavar="PATH", help="congruence file")
    p.add_argument("--fixture", metavar="NAME", help=f"built-in scene ({', '.join(FIXTURES)})")
    p.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    p.add_argument("--format", dest="fmt", choices=("json", "csv", "obj"))
    p.add_argument("--tol", type=float, help="tolerance override")
    p.add_argument("--seed", action="append", default=[],
                   help="RNG seed (verify) or a seed point u1,u2 (lines; repeatable)")
    p.add_argument("--grid", type=int, help="grid resolution")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(prog="kummer", description="Line congruences with frontal directions.")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("forms", parents=[common], help="forms and equations at one point")
    p.add_argument("--point", required=True, metavar="U1,U2", help="evaluation point (use --point=-a,b for negatives)")

    p = sub.add_parser("verify", parents=[common], help="run the identity suite")
    p.add_argument("--points", type=int, default=DEFAULT_POINTS)
    p.add_argument("--singular-points", type=int, default=20)

    p = sub.add_parser("lines", parents=[common], help="trace integral curves")
    p.add_argument("--kind", default="principal", choices=sorted(KIND_ALIASES))
    p.add_argument("--branch", default="both", choices=("1", "2", "both"))
    p.add_argument("--step", type=float, default=DEFAULT_STEP)
    p.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)

    for name, helptext in (("mesh", "surface of the congruence along a directrix"),
                           ("striction", "striction line along a directrix")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--u1", required=True, metavar="EXPR", help="u1(t)")
        p.add_argument("--u2", required=True, metavar="EXPR", help="u2(t)")
        p.add_argument("--t-range", default="0,1", metavar="A,B")
        p.add_argument("--t-samples", type=int, default=51)
        if name == "mesh":
            p.add_argument("--w-range", default="-1,1", metavar="A,B")
            p.add_argument("--w-samples", type=int, default=11)
            p.add_argument("--striction", action="store_true", help="append the striction polyline")

    p = sub.add_parser("singular", parents=[common], help="singular sets of x and xi")
    p.add_argument("--also-discriminant", metavar="KIND", choices=sorted(KIND_ALIASES))
    return ap


def _load_scene(args) -> CongruenceScene:
    given = [s for s in (args.source, args.scene, args.fixture) if s is not None]
    if len(given) != 1:
        raise UsageError("give exactly one scene source (positional, --scene or --fixture)")
    if args.fixture is not None:
        if args.fixture not in FIXTURES:
            raise UsageError(f"unknown fixture {args.fixture!r}; choose from {', '.join(FIXTURES)}")
        return load_fixture(args.fixture)
    path = args.scene if args.scene is not None else args.source
    if args.scene is None and path in FIXTURES:
        return load_fixture(path)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read scene {path!r}: {exc.strerror}") from None
    return parse_scene(text)


def make_config(args) -> RunConfig:
    scene = _load_scene(args)
    fmt = args.fmt or FORMATS[args.subcommand][0]
    if fmt not in FORMATS[args.subcommand]:
        raise UsageError(f"{args.subcommand} writes {' or '.join(FORMATS[args.subcommand])}, not {fmt}")
    if args.tol is not None and not (args.tol > 0 and math.isfinite(args.tol)):
        raise UsageError("--tol must be positive")
    if args.grid is not None and args.grid < 1:
        raise UsageError("--grid must be positive")
    return RunConfig(args.subcommand, scene, Path(args.out) if args.out else None, fmt,
                     args.tol, list(args.seed), args.grid, args)


# -- subcommands ---------------------------------------------------------------------------

def _block(m: np.ndarray) -> dict:
    return {"E": m[0, 0], "F": m[0, 1], "G": m[1, 1]}


def _second(m: np.ndarray) -> dict:
    return {"L": m[0, 0], "M1": m[0, 1], "M2": m[1, 0], "N": m[1, 1]}


def cmd_forms(cfg: RunConfig) -> tuple[str, int]:
    scene = cfg.scene
    q = np.array(_pair(cfg.args.point))
    if not scene.domain.contains(q):
        raise UsageError(f"point {tuple(q)} is outside the domain")
    fb = C.form_bundle(scene, q, require_tangent=False)
    delta = float(fb.delta)
    detI = float(fb.detI)
    scaleI = float(frob(fb.I)) ** 2
    singular = abs(delta) <= SINGULAR_TOL
    classical = {"defined": bool(detI > SINGULAR_TOL * max(scaleI, 1e-300)) and not singular,
                 **_block(fb.I), **_second(fb.II), "det_I": detI}
    if classical["defined"]:
        fl = C.focal_and_limit(scene, q)
        classical.update(focal=list(fl.rho), kummer_principal_curvatures=list(fl.kappa),
                         midpoint_residuals=list(fl.midpoint_residuals))
    else:
        classical["reason"] = "Kummer first form is degenerate (point of the singular set of xi)"

    tangent = bool(fb.is_tangent)
    omega = {"tangent": tangent, "tangency_residual": float(fb.tangency_residual),
             **{k + "_omega": v for k, v in _block(fb.I_O).items()},
             **{k + "_omega": v for k, v in _second(fb.II_O).items()}}
    rep = {"schema": SCHEMA, "command": "forms", "scene": scene.name, "point": q,
           "classical": classical, "omega": omega}
    if tangent:
        nr = C.asymmetry(fb.S)
        pb = C.principal_from(fb)
        dev = C.developable_from(fb)
        cmax = float(np.max(np.abs(pb.vector)))
        umb_scale = 1.0 + float(frob(fb.I_O) * frob(fb.II_O) * frob(fb.Delta))
        omega.update(Delta=fb.Delta, delta=delta, singular_xi=singular)
        rep.update(
            is_normal=bool(float(nr) <= C.SYMMETRY_TOL),
            asymmetry=float(nr),
            umbilic=bool(cmax <= UMBILIC_TOL * umb_scale),
            discriminant=float(pb.discriminant),
            principal_equation={"C1": pb.A, "C2": pb.B, "C3": pb.C,
                                "pulled_back": {"A": pb.pulled_back.A, "B": pb.pulled_back.B,
                                                "C": pb.pulled_back.C}},
            developable_equation={"A": dev.A, "B": dev.B, "C": dev.C,
                                  "discriminant": float(dev.discriminant)},
        )
    else:
        rep["note"] = "omega is not a tangent moving basis of xi; Delta and the equations are undefined"
    try:
        fs = fb.fields
        rc = relative_curvatures_matrices(fs.Dx, fs.Omega, fs.Dn)
        rep["frontal"] = {"Lambda": rc.Lambda, "lambda": rc.lam, "K": rc.K, "H": rc.H,
                          "relative_curvatures": list(rc.k_complex) if not math.isfinite(rc.k1)
                          else [rc.k1, rc.k2],
                          "singular_x": abs(rc.lam) <= SINGULAR_TOL}
    except ArithmeticError as exc:
        rep["frontal"] = {"defined": False, "reason": str(exc)}
    return to_json(rep), EXIT_OK


def cmd_verify(cfg: RunConfig) -> tuple[str, int]:
    if len(cfg.seed) > 1:
        raise UsageError("verify takes a single --seed")
    try:
        seed = int(cfg.seed[0]) if cfg.seed else 0
    except ValueError:
        raise UsageError(f"--seed must be an integer for verify, got {cfg.seed[0]!r}") from None
    if cfg.args.points < 1 or cfg.args.singular_points < 0:
        raise UsageError("--points must be positive and --singular-points non-negative")
    rep = run_suite(cfg.scene, cfg.args.points, seed, cfg.tol or DEFAULT_TOL, cfg.args.singular_points)
    code = EXIT_OK if rep.all_pass else EXIT_FAIL
    if cfg.fmt == "csv":
        rows = [(r.name, r.status, "" if r.max_residual is None else r.max_residual, r.tolerance,
                 r.evaluated, r.note) for r in rep.identities]
        return to_csv(("identity", "status", "max_residual", "tolerance", "evaluated", "note"), rows), code
    return to_json(rep.to_dict()), code


def _lift(scene: CongruenceScene, pts: np.ndarray) -> np.ndarray:
    x, _ = eval_vector(scene.x, pts)
    return np.broadcast_to(x, pts.shape[:-1] + (3,))


def trace_seeds(scene: CongruenceScene, kind: str, seeds: np.ndarray, branches=(1, 2),
                step: float = DEFAULT_STEP, max_steps: int = DEFAULT_MAX_STEPS):
    """Trace both ways from every seed on every branch.

    Returns (curves, skipped) with curves as (seed index, IntegralCurve) and
    skipped as (seed index, branch, reason, message), in seed order.
    """
    fld = SceneField(scene, kind)
    curves, skipped = [], []
    special = set()
    if kind == "principal":
        for i, s in enumerate(seeds):
            try:
                if scene.domain.contains(s) and _on_singular_normal_branch(fld, s):
                    special.add(i)
            except (ArithmeticError, EvalError):
                pass
    regular = [i for i in range(len(seeds)) if i not in special]
    for b in branches:
        fwd = trace_many(fld, kind, seeds[regular], b, step, max_steps) if regular else []
        ok = [(i, c) for i, c in zip(regular, fwd) if isinstance(c, IntegralCurve)]
        for i, c in zip(regular, fwd):
            if isinstance(c, SeedError):
                skipped.append((i, b, c.reason, str(c)))
        heads = [-(c.points[1] - c.points[0]) if len(c) > 1 else np.array([-1.0, 0.0]) for _, c in ok]
        back = trace_many(fld, kind, seeds[[i for i, _ in ok]], b, step, max_steps, heads) if ok else []
        for (i, f), bk in zip(ok, back):
            curves.append((i, join_halves(f, bk) if isinstance(bk, IntegralCurve) else f))
        for i in sorted(special):
            if b == branches[0]:
                curves.append((i, trace_both_ways(fld, kind, seeds[i], b, step, max_steps)))
            else:
                skipped.append((i, b, "singular_branch", "seed on the singular set; traced once"))
    order = {v: k for k, v in enumerate(branches)}
    curves.sort(key=lambda ic: (ic[0], order[ic[1].branch]))
    skipped.sort(key=lambda s: (s[0], order[s[1]]))
    return curves, skipped


def cmd_lines(cfg: RunConfig) -> tuple[str, int]:
    scene, args = cfg.scene, cfg.args
    kind = KIND_ALIASES[args.kind]
    if args.step <= 0 or args.max_steps < 1:
        raise UsageError("--step must be positive and --max-steps at least 1")
    if cfg.seed:
        seeds = np.array([_pair(s) for s in cfg.seed])
    else:
        seeds = scene.domain.grid(cfg.grid or 10).reshape(-1, 2)
    branches = (1, 2) if args.branch == "both" else (int(args.branch),)
    curves, skipped = trace_seeds(scene, kind, seeds, branches, args.step, args.max_steps)
    for i, b, reason, msg in skipped:
        print(f"skipped seed {i} ({seeds[i][0]:g},{seeds[i][1]:g}) branch {b}: {reason}", file=sys.stderr)
    if cfg.fmt == "json":
        rep = {"schema": SCHEMA, "command": "lines", "scene": scene.name, "kind": kind,
               "curves": [{"curve": k, "seed": seeds[i], "branch": c.branch, "status": c.status,
                           "termination": c.termination, "termination_start": c.termination_start,
                           "t": c.t, "u": c.points, "x": _lift(scene, c.points)}
                          for k, (i, c) in enumerate(curves)],
               "skipped": [{"seed": seeds[i], "branch": b, "reason": r, "message": m}
                           for i, b, r, m in skipped]}
        return to_json(rep), EXIT_OK
    rows = []
    for k, (_, c) in enumerate(curves):
        xyz = _lift(scene, c.points)
        for (t, u1, u2), p in zip(c.samples, xyz):
            rows.append((k, c.branch, t, u1, u2, p[0], p[1], p[2]))
    return to_csv(("curve", "branch", "t", "u1", "u2", "x", "y", "z"), rows), EXIT_OK


def _directrix(args):
    curve = C.ParamCurve.parse(args.u1, args.u2)
    a, b = _pair(args.t_range)
    if args.t_samples < 2:
        raise UsageError("--t-samples must be at least 2")
    return curve, np.linspace(a, b, args.t_samples)


def cmd_mesh(cfg: RunConfig) -> tuple[str, int]:
    args = cfg.args
    curve, t = _directrix(args)
    if args.w_samples < 1:
        raise UsageError("--w-samples must be positive")
    try:
        mesh = C.surface_of_congruence(cfg.scene, curve, t, _pair(args.w_range), args.w_samples)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    verts, lines = mesh.vertices, []
    if args.striction:
        st = C.striction_curve(cfg.scene, curve, t)
        n0 = len(verts)
        verts = np.vstack([verts, st.beta])
        lines = [list(range(n0, n0 + len(st.beta)))]
    return to_obj(verts, mesh.faces, lines, comment=f"surface of {cfg.scene.name}"), EXIT_OK


def cmd_striction(cfg: RunConfig) -> tuple[str, int]:
    curve, t = _directrix(cfg.args)
    pts, _ = curve.jets(t)
    if not np.all(cfg.scene.domain.contains(pts, closed=True)):
        raise UsageError("the directrix leaves the domain")
    st = C.striction_curve(cfg.scene, curve, t)
    if cfg.fmt == "json":
        rep = {"schema": SCHEMA, "command": "striction", "scene": cfg.scene.name, "t": st.t,
               "u": st.points, "k": st.k, "beta": st.beta, "residual": st.residual}
        return to_json(rep), EXIT_OK
    rows = [(t_, p[0], p[1], k, b[0], b[1], b[2], r)
            for t_, p, k, b, r in zip(st.t, st.points, st.k, st.beta, st.residual)]
    return to_csv(("t", "u1", "u2", "k", "x", "y", "z", "residual"), rows), EXIT_OK


def cmd_singular(cfg: RunConfig) -> tuple[str, int]:
    from .contour import zero_curves
    from .fields import pointwise

    scene, n = cfg.scene, cfg.grid or 64
    if n < 8:
        raise UsageError("--grid must be at least 8 for singular sets")
    fams: list[tuple[str, list]] = []

    def lam(p):
        fs = sample_scene(scene, p)
        return relative_curvatures_matrices(fs.Dx, fs.Omega, fs.Dn).lam

    def delta(p):
        return C.form_bundle(scene, p).delta

    for name, fn in (("lambda", lam), ("delta", delta)):
        vals = pointwise(fn, scene.domain.grid(n))
        if not np.isfinite(vals).any():
            print(f"{name}: could not be evaluated on the grid", file=sys.stderr)
            fams.append((name, []))
            continue
        fams.append((name, zero_curves(lambda p, fn=fn: float(fn(p)), scene.domain, n, values=vals)))
    if cfg.args.also_discriminant:
        kind = KIND_ALIASES[cfg.args.also_discriminant]
        ds = discriminant_zero_set(scene, kind, n)
        if ds.status == "degenerate":
            print(f"discriminant of {kind}: identically zero", file=sys.stderr)
        elif not ds.curves:
            print(f"discriminant of {kind}: no zero curves on the grid", file=sys.stderr)
        fams.append((f"discriminant_{kind}", ds.curves))
    if not any(curves for name, curves in fams if name in ("lambda", "delta")):
        print("no singular points", file=sys.stderr)
    if cfg.fmt == "json":
        rep = {"schema": SCHEMA, "command": "singular", "scene": scene.name, "grid": n,
               "families": {name: curves for name, curves in fams}}
        return to_json(rep), EXIT_OK
    rows = []
    cid = 0
    for name, curves in fams:
        for c in curves:
            rows.extend((name, cid, u1, u2) for u1, u2 in c)
            cid += 1
    return to_csv(("family", "curve_id", "u1", "u2"), rows), EXIT_OK


COMMANDS = {"forms": cmd_forms, "verify": cmd_verify, "lines": cmd_lines, "mesh": cmd_mesh,
            "singular": cmd_singular, "striction": cmd_striction}


def run(argv=None) -> tuple[str, int]:
    """Parse arguments and run; returns (output text, exit code) without writing."""
    args = build_parser().parse_args(argv)
    cfg = make_config(args)
    return COMMANDS[cfg.subcommand](cfg)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = make_config(args)
        text, code = COMMANDS[cfg.subcommand](cfg)
    except (UsageError, ParseError) as exc:
        print(f"kummer: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, EvalError, ValueError) as exc:
        print(f"kummer: math error: {exc}", file=sys.stderr)
        return EXIT_MATH
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        try:
            cfg.out.write_text(text, encoding="utf-8")
        except OSError as exc:
            print(f"kummer: error: cannot write {cfg.out}: {exc.strerror}", file=sys.stderr)
            return EXIT_USAGE
    return code


if __name__ == "__main__":
    sys.exit(main())
