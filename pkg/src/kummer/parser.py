"""Recursive-descent parser for expressions and congruence files.

File format (UTF-8, one statement per line, ``#`` starts a comment, a
statement may continue over several lines while a parenthesis is open)::

    name = "parabolic"
    domain = u1 in (-1, 1), u2 in (-1, 1)
    x = (u1, u2, u1^2*u2 + u2^2)
    omega = ((1, 0, 2*u1*u2), (0, 1, u1^2 + 2*u2))
    xi = normal(omega)
    unitize_xi = true

Vector positions accept ``(e1, e2, e3)``, ``cross(v, w)``, ``normalize(v)``
and ``normal(omega)``.  Scalars use ``+ - * / ^``, parentheses, ``sqrt``,
``sin`` and ``cos``; ``^`` takes an integer literal and binds tighter than
unary minus.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .expr import (
    FUNCTIONS,
    VARIABLES,
    BinOp,
    Call,
    Cross,
    Neg,
    Normalize,
    Num,
    Pow,
    ScalarExpr,
    Var,
    VecLit,
    VectorExpr,
    normal_of,
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0, expected: str | None = None):
        self.line = line
        self.col = col
        self.expected = expected
        self.bare_message = message
        where = f"line {line}, column {col}: " if line else ""
        tail = f" (expected {expected})" if expected else ""
        super().__init__(f"{where}{message}{tail}")


class UnknownIdentifierError(ParseError):
    pass


class ArityError(ParseError):
    pass


class MissingFieldError(ParseError):
    pass


@dataclass(frozen=True)
class Token:
    kind: str  # num, ident, str, op, newline, eof
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<newline>\n)
  | (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<str>"[^"\n]*")
  | (?P<op>[-+*/^(),=])
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, line_start, depth, pos = 1, 0, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        s = m.group()
        if kind == "newline":
            if depth == 0:
                tokens.append(Token("newline", s, line, col))
            line += 1
            line_start = m.end()
        elif kind in ("num", "ident", "str", "op"):
            if s == "(":
                depth += 1
            elif s == ")":
                depth = max(depth - 1, 0)
            tokens.append(Token(kind, s, line, col))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token], allowed_vars=VARIABLES, omega=None):
        self.toks = tokens
        self.i = 0
        self.allowed_vars = tuple(allowed_vars)
        self.omega = omega

    # token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, message: str, expected: str | None = None, tok: Token | None = None, cls=ParseError):
        t = tok or self.tok
        return cls(message, t.line, t.col, expected)

    def expect(self, text: str) -> Token:
        if self.tok.text != text or self.tok.kind in ("str", "eof"):
            found = self.tok.text or "end of input"
            raise self.error(f"unexpected {found!r}", expected=repr(text))
        return self.advance()

    def at(self, text: str) -> bool:
        return self.tok.kind in ("op", "ident") and self.tok.text == text

    # scalar grammar
    def expr(self) -> ScalarExpr:
        node = self.term()
        while self.at("+") or self.at("-"):
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> ScalarExpr:
        node = self.unary()
        while self.at("*") or self.at("/"):
            op = self.advance().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> ScalarExpr:
        if self.at("-"):
            self.advance()
            return Neg(self.unary())
        if self.at("+"):
            self.advance()
            return self.unary()
        return self.power()

    def power(self) -> ScalarExpr:
        base = self.atom()
        if self.at("^"):
            self.advance()
            base = Pow(base, self.int_literal())
            if self.at("^"):
                raise self.error("chained powers need parentheses")
        return base

    def int_literal(self) -> int:
        paren = self.at("(")
        if paren:
            self.advance()
        sign = 1
        if self.at("-") or self.at("+"):
            sign = -1 if self.advance().text == "-" else 1
        t = self.tok
        if t.kind != "num" or not t.text.isdigit():
            raise self.error("exponent must be an integer literal", expected="integer")
        self.advance()
        if paren:
            self.expect(")")
        return sign * int(t.text)

    def atom(self) -> ScalarExpr:
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Num(float(t.text))
        if t.kind == "ident":
            if t.text in FUNCTIONS:
                self.advance()
                self.expect("(")
                arg = self.expr()
                if self.at(","):
                    raise self.error(f"{t.text} takes one argument", cls=ArityError)
                self.expect(")")
                return Call(t.text, arg)
            if t.text in self.allowed_vars:
                self.advance()
                return Var(t.text)
            raise self.error(f"unknown identifier {t.text!r}", cls=UnknownIdentifierError)
        if self.at("("):
            self.advance()
            node = self.expr()
            if self.at(","):
                raise self.error("a vector is not allowed where a scalar is expected", cls=ArityError)
            self.expect(")")
            return node
        found = t.text or "end of input"
        raise self.error(f"unexpected {found!r}", expected="number, variable, function or '('")

    # vector grammar
    def vector(self) -> VectorExpr:
        t = self.tok
        if t.kind == "ident" and t.text in ("cross", "normalize", "normal"):
            self.advance()
            self.expect("(")
            if t.text == "cross":
                a = self.vector()
                self.expect(",")
                b = self.vector()
                self.expect(")")
                return Cross(a, b)
            if t.text == "normalize":
                a = self.vector()
                self.expect(")")
                return Normalize(a)
            arg = self.tok
            if not (arg.kind == "ident" and arg.text == "omega"):
                raise self.error("normal() takes the moving basis 'omega'", expected="'omega'")
            self.advance()
            self.expect(")")
            if self.omega is None:
                raise self.error("normal(omega) used before omega is defined", tok=t,
                                 cls=UnknownIdentifierError)
            return normal_of(*self.omega)
        if self.at("("):
            start = self.advance()
            comps = [self.expr()]
            while self.at(","):
                self.advance()
                comps.append(self.expr())
            self.expect(")")
            if len(comps) != 3:
                raise ArityError(f"a vector needs 3 components, got {len(comps)}",
                                 start.line, start.col)
            return VecLit(tuple(comps))
        if t.kind == "ident" and t.text not in FUNCTIONS + self.allowed_vars:
            raise self.error(f"unknown identifier {t.text!r}", cls=UnknownIdentifierError)
        raise self.error(f"unexpected {t.text or 'end of input'!r}", expected="vector")

    def basis(self) -> tuple[VectorExpr, VectorExpr]:
        start = self.expect("(")
        cols = [self.vector()]
        while self.at(","):
            self.advance()
            cols.append(self.vector())
        self.expect(")")
        if len(cols) != 2:
            raise ArityError(f"omega needs 2 columns, got {len(cols)}", start.line, start.col)
        return cols[0], cols[1]

    def end_of_statement(self):
        if self.tok.kind not in ("newline", "eof"):
            raise self.error(f"unexpected {self.tok.text!r}", expected="end of line")


def _finish(p: _Parser):
    while p.tok.kind == "newline":
        p.advance()
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p.tok.text!r}", expected="end of input")


def parse_expr(text: str, variables=VARIABLES) -> ScalarExpr:
    p = _Parser(tokenize(text), variables)
    node = p.expr()
    _finish(p)
    return node


def parse_vector(text: str, omega=None, variables=VARIABLES) -> VectorExpr:
    p = _Parser(tokenize(text), variables, omega)
    node = p.vector()
    _finish(p)
    return node


def parse_constant(text: str) -> float:
    from .expr import eval_jet

    node = parse_expr(text, variables=())
    return float(eval_jet(node, (0.0, 0.0)).value)


_KEYS = ("name", "domain", "x", "omega", "xi", "unitize_xi")


def parse_scene(text: str):
    """Parse a congruence file into a :class:`~kummer.scene.CongruenceScene`."""
    from .expr import eval_jet
    from .scene import CongruenceScene, DomainRect

    p = _Parser(tokenize(text))
    fields: dict = {}
    xi_tok = None
    while p.tok.kind != "eof":
        if p.tok.kind == "newline":
            p.advance()
            continue
        key = p.tok
        if key.kind != "ident":
            raise p.error(f"unexpected {key.text!r}", expected="a key (" + ", ".join(_KEYS) + ")")
        if key.text not in _KEYS:
            raise p.error(f"unknown key {key.text!r}", cls=UnknownIdentifierError)
        if key.text in fields:
            raise p.error(f"duplicate key {key.text!r}")
        p.advance()
        p.expect("=")
        if key.text == "name":
            if p.tok.kind != "str":
                raise p.error("name must be a quoted string", expected="string")
            fields["name"] = p.advance().text[1:-1]
        elif key.text == "domain":
            bounds = {}
            for k in range(2):
                if k:
                    p.expect(",")
                v = p.tok
                if v.text not in VARIABLES:
                    raise p.error(f"unknown variable {v.text!r}", expected="u1 or u2")
                p.advance()
                if p.tok.text != "in":
                    raise p.error(f"unexpected {p.tok.text!r}", expected="'in'")
                p.advance()
                p.expect("(")
                sub = _Parser(p.toks, allowed_vars=())
                sub.i = p.i
                lo = sub.expr()
                sub.expect(",")
                hi = sub.expr()
                p.i = sub.i
                p.expect(")")
                bounds[v.text] = (float(eval_jet(lo, (0.0, 0.0)).value),
                                  float(eval_jet(hi, (0.0, 0.0)).value))
            if set(bounds) != {"u1", "u2"}:
                raise p.error("domain must give both u1 and u2", tok=key)
            try:
                fields["domain"] = DomainRect(*bounds["u1"], *bounds["u2"])
            except ValueError as exc:
                raise ParseError(str(exc), key.line, key.col) from None
        elif key.text == "x":
            fields["x"] = p.vector()
        elif key.text == "omega":
            fields["omega"] = p.basis()
            p.omega = fields["omega"]
        elif key.text == "xi":
            xi_tok = p.tok
            fields["xi_is_normal"] = xi_tok.text == "normal"
            fields["xi"] = p.vector()
        elif key.text == "unitize_xi":
            flag = p.advance()
            if flag.text not in ("true", "false"):
                raise ParseError(f"unexpected {flag.text!r}", flag.line, flag.col, "true or false")
            fields["unitize_xi"] = flag.text == "true"
        p.end_of_statement()

    for required in ("x", "xi"):
        if required not in fields:
            raise MissingFieldError(f"missing required key {required!r}", p.tok.line, 1)
    return CongruenceScene(
        name=fields.get("name", "unnamed"),
        domain=fields.get("domain", DomainRect(-1.0, 1.0, -1.0, 1.0)),
        x=fields["x"],
        xi_raw=fields["xi"],
        omega=fields.get("omega"),
        unitize_xi=fields.get("unitize_xi", True),
        xi_is_normal=fields.get("xi_is_normal", False),
    )
