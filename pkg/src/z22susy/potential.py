"""A small expression language for the superpotential W(x).

Grammar::

    expr   := term (("+"|"-") term)*
    term   := factor (("*"|"/") factor)*
    factor := "-" factor | power
    power  := atom ("^" signed_number)?
    atom   := number | ident | ident "(" expr ")" | "(" expr ")"

Functions: sin, cos, exp, tanh, sqrt. Identifiers other than ``x`` and the
function names are parameters and must be present in the parameter table.
Exponents are literal integers or half-integers.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

FUNCTIONS = ("sin", "cos", "exp", "tanh", "sqrt")
DEFAULT_PARAMS = {"m": 1.0, "omega": 1.0, "hbar": 1.0}


class PotentialError(ValueError):
    pass


class PotentialSyntaxError(PotentialError):
    def __init__(self, message: str, source: str, position: int):
        self.source = source
        self.position = position
        self.message = message
        super().__init__(f"{message} at position {position}\n{source}\n{' ' * position}^")


class DomainError(PotentialError, ArithmeticError):
    def __init__(self, message: str, node=None, x=None):
        self.node = node
        self.x = x
        where = "" if x is None else f" at x={x!r}"
        super().__init__(f"{message}{where} in {to_source(node) if node is not None else '?'}")


# -- AST --------------------------------------------------------------------


class Node:
    __slots__ = ()


@dataclass(frozen=True)
class Const(Node):
    value: float


@dataclass(frozen=True)
class Param(Node):
    name: str


@dataclass(frozen=True)
class Var(Node):
    pass


@dataclass(frozen=True)
class Neg(Node):
    arg: Node


@dataclass(frozen=True)
class Add(Node):
    left: Node
    right: Node


@dataclass(frozen=True)
class Sub(Node):
    left: Node
    right: Node


@dataclass(frozen=True)
class Mul(Node):
    left: Node
    right: Node


@dataclass(frozen=True)
class Div(Node):
    left: Node
    right: Node


@dataclass(frozen=True)
class Pow(Node):
    base: Node
    exponent: Fraction


@dataclass(frozen=True)
class Func(Node):
    name: str
    arg: Node


X = Var()


# -- parser -------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))"
)


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(src: str) -> list[_Tok]:
    toks, pos = [], 0
    while pos < len(src):
        if src[pos:].strip() == "":
            break
        m = _TOKEN.match(src, pos)
        if not m or m.end() == pos:
            bad = pos + (len(src[pos:]) - len(src[pos:].lstrip()))
            raise PotentialSyntaxError(f"unexpected character {src[bad]!r}", src, bad)
        kind = m.lastgroup
        start = m.start(kind)
        text = m.group(kind)
        if kind == "num" and m.end() < len(src) and (src[m.end()].isalpha() or src[m.end()] == "."):
            raise PotentialSyntaxError(f"malformed number {text + src[m.end()]!r}", src, start)
        toks.append(_Tok(kind, text, start))
        pos = m.end()
    toks.append(_Tok("end", "", len(src)))
    return toks


class _Parser:
    def __init__(self, src: str, params: dict[str, float]):
        self.src = src
        self.params = params
        self.toks = _tokenize(src)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        raise PotentialSyntaxError(msg, self.src, tok.pos)

    def accept(self, text) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text):
        if not self.accept(text):
            found = self.tok.text or "end of input"
            self.error(f"expected {text!r}, found {found!r}")

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "end":
            self.error(f"unexpected {self.tok.text!r}")
        return node

    def expr(self) -> Node:
        node = self.term()
        while True:
            if self.accept("+"):
                node = Add(node, self.term())
            elif self.accept("-"):
                node = Sub(node, self.term())
            else:
                return node

    def term(self) -> Node:
        node = self.factor()
        while True:
            if self.accept("*"):
                node = Mul(node, self.factor())
            elif self.accept("/"):
                node = Div(node, self.factor())
            else:
                return node

    def factor(self) -> Node:
        if self.accept("-"):
            return Neg(self.factor())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.accept("^"):
            return Pow(base, self.signed_number())
        return base

    def signed_number(self) -> Fraction:
        neg = self.accept("-")
        tok = self.tok
        if tok.kind != "num":
            self.error("exponent must be a literal number")
        self.i += 1
        value = Fraction(tok.text)
        if (2 * value).denominator != 1:
            self.error("exponent must be an integer or half-integer", tok)
        return -value if neg else value

    def atom(self) -> Node:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Const(float(tok.text))
        if tok.kind == "ident":
            self.i += 1
            if self.accept("("):
                if tok.text not in FUNCTIONS:
                    self.error(f"unknown function {tok.text!r}", tok)
                arg = self.expr()
                self.expect(")")
                return Func(tok.text, arg)
            if tok.text == "x":
                return X
            if tok.text in FUNCTIONS:
                self.error(f"function {tok.text!r} needs an argument", tok)
            if tok.text not in self.params:
                self.error(f"unknown identifier {tok.text!r}", tok)
            return Param(tok.text)
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        self.error("expected a number, identifier or '('" if tok.kind != "end" else "unexpected end of input")


def parse_ast(source: str, params: dict[str, float] | None = None) -> Node:
    if not source or not source.strip():
        raise PotentialSyntaxError("empty expression", source or "", 0)
    return _Parser(source, DEFAULT_PARAMS if params is None else params).parse()


# -- printer ------------------------------------------------------------------

_PREC = {Add: 1, Sub: 1, Mul: 2, Div: 2, Neg: 3}


def _num(v: float) -> str:
    if v == int(v) and abs(v) < 1e15:
        s = str(int(v))
    else:
        s = repr(v)
    return f"({s})" if v < 0 or s.startswith("-") else s


def _exp(e: Fraction) -> str:
    return str(e.numerator) if e.denominator == 1 else repr(float(e))


def to_source(node: Node) -> str:
    """Render ``node`` so that parsing the text gives back the same tree."""
    if isinstance(node, Const):
        return _num(node.value)
    if isinstance(node, Param):
        return node.name
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Func):
        return f"{node.name}({to_source(node.arg)})"
    if isinstance(node, Pow):
        base = to_source(node.base)
        if not isinstance(node.base, (Const, Param, Var, Func)):
            base = f"({base})"
        return f"{base}^{_exp(node.exponent)}"
    if isinstance(node, Neg):
        inner = to_source(node.arg)
        if isinstance(node.arg, (Add, Sub, Mul, Div)):
            inner = f"({inner})"
        return f"-{inner}"
    op = {Add: "+", Sub: "-", Mul: "*", Div: "/"}[type(node)]
    prec = _PREC[type(node)]
    left = to_source(node.left)
    if isinstance(node.left, (Add, Sub, Mul, Div)) and _PREC[type(node.left)] < prec:
        left = f"({left})"
    right = to_source(node.right)
    if isinstance(node.right, (Add, Sub, Mul, Div)) and _PREC[type(node.right)] <= prec:
        right = f"({right})"
    sep = " " if prec == 1 else ""
    return f"{left}{sep}{op}{sep}{right}"


# -- simplifying constructors ---------------------------------------------------


def _c(node):
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Neg) and isinstance(node.arg, Const):
        return -node.arg.value
    return None


def _const(v: float) -> Node:
    # the grammar has no negative literals, so keep folded constants printable
    return Neg(Const(-v)) if v < 0 else Const(v + 0.0)


def add(a: Node, b: Node) -> Node:
    ca, cb = _c(a), _c(b)
    if ca is not None and cb is not None:
        return _const(ca + cb)
    if ca == 0:
        return b
    if cb == 0:
        return a
    if isinstance(b, Neg):
        return Sub(a, b.arg)
    return Add(a, b)


def sub(a: Node, b: Node) -> Node:
    ca, cb = _c(a), _c(b)
    if ca is not None and cb is not None:
        return _const(ca - cb)
    if cb == 0:
        return a
    if ca == 0:
        return neg(b)
    return Sub(a, b)


def neg(a: Node) -> Node:
    if isinstance(a, Const):
        return _const(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def mul(a: Node, b: Node) -> Node:
    ca, cb = _c(a), _c(b)
    if ca is not None and cb is not None:
        return _const(ca * cb)
    if ca == 0 or cb == 0:
        return Const(0.0)
    if ca == 1:
        return b
    if cb == 1:
        return a
    if ca == -1:
        return neg(b)
    if cb == -1:
        return neg(a)
    if cb is not None:
        a, b = b, a  # constants to the left
    return Mul(a, b)


def div(a: Node, b: Node) -> Node:
    ca, cb = _c(a), _c(b)
    if ca is not None and cb is not None and cb != 0:
        return _const(ca / cb)
    if ca == 0:
        return Const(0.0)
    if cb == 1:
        return a
    return Div(a, b)


def power(a: Node, n: Fraction) -> Node:
    if n == 0:
        return Const(1.0)
    if n == 1:
        return a
    ca = _c(a)
    if ca is not None and (n.denominator == 1 or ca >= 0) and not (ca == 0 and n < 0):
        return _const(ca ** float(n))
    return Pow(a, n)


def depends_on_x(node: Node) -> bool:
    if isinstance(node, Var):
        return True
    if isinstance(node, (Const, Param)):
        return False
    if isinstance(node, (Neg, Func)):
        return depends_on_x(node.arg)
    if isinstance(node, Pow):
        return depends_on_x(node.base)
    return depends_on_x(node.left) or depends_on_x(node.right)


def differentiate_ast(node: Node) -> Node:
    """d/dx with light simplification; the node set is closed under it."""
    if not depends_on_x(node):
        return Const(0.0)
    if isinstance(node, Var):
        return Const(1.0)
    if isinstance(node, Neg):
        return neg(differentiate_ast(node.arg))
    if isinstance(node, Add):
        return add(differentiate_ast(node.left), differentiate_ast(node.right))
    if isinstance(node, Sub):
        return sub(differentiate_ast(node.left), differentiate_ast(node.right))
    if isinstance(node, Mul):
        a, b = node.left, node.right
        return add(mul(differentiate_ast(a), b), mul(a, differentiate_ast(b)))
    if isinstance(node, Div):
        a, b = node.left, node.right
        da, db = differentiate_ast(a), differentiate_ast(b)
        if _c(db) == 0:
            return div(da, b)
        return div(sub(mul(da, b), mul(a, db)), power(b, Fraction(2)))
    if isinstance(node, Pow):
        n = node.exponent
        inner = mul(Const(float(n)), power(node.base, n - 1))
        return mul(inner, differentiate_ast(node.base))
    if isinstance(node, Func):
        u = node.arg
        du = differentiate_ast(u)
        if node.name == "sin":
            outer = Func("cos", u)
        elif node.name == "cos":
            outer = neg(Func("sin", u))
        elif node.name == "exp":
            outer = node
        elif node.name == "tanh":
            outer = sub(Const(1.0), power(node, Fraction(2)))
        elif node.name == "sqrt":
            return div(du, mul(Const(2.0), node))
        else:  # pragma: no cover - parser rejects other names
            raise PotentialError(f"no derivative rule for {node.name}")
        return mul(outer, du)
    raise TypeError(f"unknown node {node!r}")  # pragma: no cover


# -- evaluation -------------------------------------------------------------------


def _first_bad(x, mask):
    idx = np.flatnonzero(np.broadcast_to(mask, np.shape(x)) if np.ndim(x) else mask)
    if np.ndim(x) == 0:
        return float(x)
    return float(np.asarray(x).ravel()[idx[0]])


def evaluate_ast(node: Node, x, params: dict[str, float]):
    """Vectorized IEEE evaluation; raises DomainError instead of producing nan/inf."""
    if isinstance(node, Const):
        return np.full(np.shape(x), node.value) if np.ndim(x) else node.value
    if isinstance(node, Var):
        return x
    if isinstance(node, Param):
        try:
            v = params[node.name]
        except KeyError:
            raise DomainError(f"unbound parameter {node.name!r}", node) from None
        return np.full(np.shape(x), v) if np.ndim(x) else v
    if isinstance(node, Neg):
        return -evaluate_ast(node.arg, x, params)
    if isinstance(node, Func):
        u = np.asarray(evaluate_ast(node.arg, x, params), dtype=float)
        if node.name == "sqrt":
            bad = u < 0
            if np.any(bad):
                raise DomainError("square root of a negative number", node, _first_bad(x, bad))
            return np.sqrt(u)
        with np.errstate(over="raise"):
            try:
                return getattr(np, node.name)(u)
            except FloatingPointError:
                raise DomainError("overflow", node) from None
    if isinstance(node, Pow):
        b = np.asarray(evaluate_ast(node.base, x, params), dtype=float)
        n = node.exponent
        if n.denominator != 1:
            bad = b < 0
            if np.any(bad):
                raise DomainError("fractional power of a negative number", node, _first_bad(x, bad))
        if n < 0:
            bad = b == 0
            if np.any(bad):
                raise DomainError("negative power of zero", node, _first_bad(x, bad))
        return b ** float(n) if n.denominator != 1 else b ** int(n)
    left = evaluate_ast(node.left, x, params)
    right = evaluate_ast(node.right, x, params)
    if isinstance(node, Add):
        return left + right
    if isinstance(node, Sub):
        return left - right
    if isinstance(node, Mul):
        return left * right
    if isinstance(node, Div):
        bad = np.asarray(right) == 0
        if np.any(bad):
            raise DomainError("division by zero", node, _first_bad(x, bad))
        return np.asarray(left, dtype=float) / right
    raise TypeError(f"unknown node {node!r}")  # pragma: no cover


# -- public API -------------------------------------------------------------------


def validate_params(params: dict[str, float]) -> dict[str, float]:
    out = dict(DEFAULT_PARAMS)
    for k, v in params.items():
        v = float(v)
        if not math.isfinite(v) or v <= 0:
            raise PotentialError(f"parameter {k} must be a positive real, got {v}")
        out[k] = v
    return out


@dataclass(frozen=True)
class PotentialExpr:
    ast: Node
    params: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_PARAMS), compare=False)
    source: str | None = field(default=None, compare=False)

    def differentiate(self) -> PotentialExpr:
        return PotentialExpr(differentiate_ast(self.ast), self.params)

    def eval(self, x: float) -> float:
        return float(evaluate_ast(self.ast, float(x), self.params))

    def eval_grid(self, grid) -> np.ndarray:
        xs = np.asarray(getattr(grid, "x", grid), dtype=float)
        return np.asarray(evaluate_ast(self.ast, xs, self.params), dtype=float) * np.ones_like(xs)

    def with_params(self, **params) -> PotentialExpr:
        return PotentialExpr(self.ast, validate_params({**self.params, **params}), self.source)

    def __str__(self):
        return to_source(self.ast)


def parse(source: str, params: dict[str, float] | None = None) -> PotentialExpr:
    table = validate_params(params or {})
    return PotentialExpr(parse_ast(source, table), table, source)


def differentiate(e: PotentialExpr) -> PotentialExpr:
    return e.differentiate()


def eval_potential(e: PotentialExpr, x: float) -> float:
    return e.eval(x)


def eval_grid(e: PotentialExpr, grid) -> np.ndarray:
    return e.eval_grid(grid)


# -- confinement heuristic ------------------------------------------------------------


@dataclass
class ConfinementVerdict:
    verdict: str  # "confining" or "suspect"
    left: list[tuple[float, float]]
    right: list[tuple[float, float]]
    reason: str = ""

    @property
    def confining(self) -> bool:
        return self.verdict == "confining"

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "reason": self.reason, "left": self.left, "right": self.right}


def check_confinement(
    e: PotentialExpr,
    bounds: tuple[float, float] = (-12.0, 12.0),
    n_probes: int = 6,
    min_ratio: float = 1.2,
) -> ConfinementVerdict:
    """Sample |W| at points approaching each end geometrically.

    A side counts as confining when |W| grows by at least ``min_ratio``
    between consecutive probes. This is a heuristic; it never raises.
    """
    lo, hi = bounds
    centre = 0.5 * (lo + hi)
    fractions = [2.0 ** -k for k in range(n_probes - 1, -1, -1)]
    sides = {}
    reason = ""
    for name, end in (("left", lo), ("right", hi)):
        pts = [centre + f * (end - centre) for f in fractions]
        try:
            vals = [abs(e.eval(p)) for p in pts]
        except DomainError as exc:
            return ConfinementVerdict("suspect", [], [], f"evaluation failed: {exc}")
        sides[name] = list(zip(pts, vals))
        for (p0, v0), (p1, v1) in zip(sides[name], sides[name][1:]):
            if not v1 >= min_ratio * v0 or v1 == 0:
                reason = reason or f"|W| does not grow on the {name} between x={p0:g} and x={p1:g}"
    verdict = "suspect" if reason else "confining"
    return ConfinementVerdict(verdict, sides["left"], sides["right"], reason)
