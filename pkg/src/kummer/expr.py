"""Expression trees for scalar and vector maps of (u1, u2).

Scalar nodes: :class:`Var`, :class:`Num`, :class:`Neg`, :class:`BinOp`,
:class:`Pow`, :class:`Call`.  Vector nodes: :class:`VecLit`, :class:`Cross`,
:class:`Normalize`.  All nodes are immutable and compare structurally.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from . import jet as J
from .jet import EvalError, Jet

VARIABLES = ("u1", "u2")
FUNCTIONS = ("sqrt", "sin", "cos")


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Neg:
    arg: "ScalarExpr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "ScalarExpr"
    right: "ScalarExpr"


@dataclass(frozen=True)
class Pow:
    base: "ScalarExpr"
    exponent: int


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "ScalarExpr"


ScalarExpr = Union[Var, Num, Neg, BinOp, Pow, Call]


@dataclass(frozen=True)
class VecLit:
    components: tuple[ScalarExpr, ScalarExpr, ScalarExpr]

    def __post_init__(self):
        if len(self.components) != 3:
            raise ValueError("a vector literal needs exactly 3 components")


@dataclass(frozen=True)
class Cross:
    left: "VectorExpr"
    right: "VectorExpr"


@dataclass(frozen=True)
class Normalize:
    arg: "VectorExpr"


VectorExpr = Union[VecLit, Cross, Normalize]


def normal_of(w1: VectorExpr, w2: VectorExpr) -> VectorExpr:
    """Unit normal induced by the columns of a moving basis."""
    return Normalize(Cross(w1, w2))


# -- evaluation ---------------------------------------------------------------

def _describe(e) -> str:
    try:
        return to_text(e)
    except Exception:  # pragma: no cover - printing never fails on valid trees
        return repr(e)


def _eval(e: ScalarExpr, env: dict[str, Jet]) -> Jet:
    if isinstance(e, Num):
        return Jet.const(e.value)
    if isinstance(e, Var):
        try:
            return env[e.name]
        except KeyError:
            raise EvalError(f"unbound variable {e.name!r}") from None
    if isinstance(e, Neg):
        return -_eval(e.arg, env)
    if isinstance(e, BinOp):
        a = _eval(e.left, env)
        b = _eval(e.right, env)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        try:
            return a / b
        except EvalError:
            raise EvalError(f"division by zero in {_describe(e)}") from None
    if isinstance(e, Pow):
        a = _eval(e.base, env)
        try:
            return a ** e.exponent
        except (EvalError, ZeroDivisionError):
            raise EvalError(f"zero raised to a negative power in {_describe(e)}") from None
    if isinstance(e, Call):
        a = _eval(e.arg, env)
        if e.fn == "sqrt":
            try:
                return J.sqrt(a)
            except EvalError:
                raise EvalError(f"sqrt of a non-positive value in {_describe(e)}") from None
        if e.fn == "sin":
            return J.sin(a)
        if e.fn == "cos":
            return J.cos(a)
    raise TypeError(f"not a scalar expression node: {e!r}")


def _eval_vec(v: VectorExpr, env: dict[str, Jet]) -> J.Vec3:
    if isinstance(v, VecLit):
        return tuple(_eval(c, env) for c in v.components)  # type: ignore[return-value]
    if isinstance(v, Cross):
        return J.cross(_eval_vec(v.left, env), _eval_vec(v.right, env))
    if isinstance(v, Normalize):
        a = _eval_vec(v.arg, env)
        try:
            return J.normalize(a)
        except EvalError:
            raise EvalError(f"zero vector in {_describe(v)}") from None
    raise TypeError(f"not a vector expression node: {v!r}")


def _env(q) -> dict[str, Jet]:
    q = np.asarray(q, dtype=float)
    if q.shape[-1] != 2:
        raise ValueError("points must have two coordinates (u1, u2)")
    if not np.all(np.isfinite(q)):
        raise ValueError("points must be finite")
    if q.ndim == 1:
        u1, u2 = Jet.variables(float(q[0]), float(q[1]))
    else:
        u1, u2 = Jet.variables(q[..., 0], q[..., 1])
    return {"u1": u1, "u2": u2}


def eval_jet(e: ScalarExpr, q) -> Jet:
    """Value and exact first partials of ``e`` at ``q`` (shape (2,) or (..., 2))."""
    return _eval(e, _env(q))


def eval_vector_jet(v: VectorExpr, q) -> J.Vec3:
    return _eval_vec(v, _env(q))


def eval_vector(v: VectorExpr, q) -> tuple[np.ndarray, np.ndarray]:
    """Value (..., 3) and Jacobian (..., 3, 2) of a vector expression."""
    jets = eval_vector_jet(v, q)
    shape = np.shape(q)[:-1]
    return J.stack_value(jets, shape), J.stack_jacobian(jets, shape)


def eval_with(e: ScalarExpr, env: dict[str, Jet]) -> Jet:
    """Evaluate with an explicit variable binding (used for curve parameters)."""
    return _eval(e, env)


def eval_vec_with(v: VectorExpr, env: dict[str, Jet]) -> J.Vec3:
    return _eval_vec(v, env)


# -- printing -------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _fmt_num(x: float) -> str:
    s = str(int(x)) if x == int(x) and abs(x) < 1e15 else repr(float(x))
    return f"({s})" if x < 0 else s


def _to_text(e: ScalarExpr, ctx: int) -> str:
    # ctx: binding strength required by the parent (0 = none)
    if isinstance(e, Num):
        return _fmt_num(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Call):
        return f"{e.fn}({_to_text(e.arg, 0)})"
    if isinstance(e, Pow):
        exp = str(e.exponent) if e.exponent >= 0 else f"({e.exponent})"
        s = f"{_to_text(e.base, 5)}^{exp}"
        return f"({s})" if ctx > 4 else s
    if isinstance(e, Neg):
        s = "-" + _to_text(e.arg, 3)
        return f"({s})" if ctx > 3 else s
    if isinstance(e, BinOp):
        p = _PREC[e.op]
        s = f"{_to_text(e.left, p)} {e.op} {_to_text(e.right, p + 1)}"
        return f"({s})" if ctx > p else s
    raise TypeError(f"not a scalar expression node: {e!r}")


def to_text(e) -> str:
    """Render an expression in the congruence-file syntax."""
    if isinstance(e, VecLit):
        return "(" + ", ".join(_to_text(c, 0) for c in e.components) + ")"
    if isinstance(e, Cross):
        return f"cross({to_text(e.left)}, {to_text(e.right)})"
    if isinstance(e, Normalize):
        return f"normalize({to_text(e.arg)})"
    return _to_text(e, 0)


# -- symbolic partial derivatives (no simplification) -------------------------

def derivative(e: ScalarExpr, var: str) -> ScalarExpr:
    """Partial derivative tree of ``e`` with respect to ``var``.

    Only used to build the fallback moving basis (x_u1, x_u2) when a scene
    does not supply one, so that the induced normal can still be
    differentiated by forward mode.
    """
    if isinstance(e, Num):
        return Num(0.0)
    if isinstance(e, Var):
        return Num(1.0 if e.name == var else 0.0)
    if isinstance(e, Neg):
        return Neg(derivative(e.arg, var))
    if isinstance(e, BinOp):
        da, db = derivative(e.left, var), derivative(e.right, var)
        if e.op in "+-":
            return BinOp(e.op, da, db)
        if e.op == "*":
            return BinOp("+", BinOp("*", da, e.right), BinOp("*", e.left, db))
        num = BinOp("-", BinOp("*", da, e.right), BinOp("*", e.left, db))
        return BinOp("/", num, Pow(e.right, 2))
    if isinstance(e, Pow):
        if e.exponent == 0:
            return Num(0.0)
        inner = Pow(e.base, e.exponent - 1) if e.exponent != 1 else Num(1.0)
        return BinOp("*", BinOp("*", Num(float(e.exponent)), inner), derivative(e.base, var))
    if isinstance(e, Call):
        da = derivative(e.arg, var)
        if e.fn == "sqrt":
            return BinOp("/", da, BinOp("*", Num(2.0), e))
        if e.fn == "sin":
            return BinOp("*", Call("cos", e.arg), da)
        return Neg(BinOp("*", Call("sin", e.arg), da))
    raise TypeError(f"not a scalar expression node: {e!r}")


def vector_derivative(v: VectorExpr, var: str) -> VecLit:
    if not isinstance(v, VecLit):
        raise TypeError("symbolic derivatives are only built for component vectors")
    return VecLit(tuple(derivative(c, var) for c in v.components))  # type: ignore[arg-type]


def variables_used(e) -> set[str]:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Num):
        return set()
    if isinstance(e, (Neg,)):
        return variables_used(e.arg)
    if isinstance(e, (BinOp, Cross)):
        return variables_used(e.left) | variables_used(e.right)
    if isinstance(e, Pow):
        return variables_used(e.base)
    if isinstance(e, (Call, Normalize)):
        return variables_used(e.arg)
    if isinstance(e, VecLit):
        out: set[str] = set()
        for c in e.components:
            out |= variables_used(c)
        return out
    raise TypeError(f"not an expression node: {e!r}")
