"""Scalar expressions in one variable with symbolic differentiation.

Grammar (``^`` is right-associative and binds tighter than unary minus)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" unary)?
    atom   := NUMBER | VAR | "pi" | "e" | FUNC "(" expr ")" | "(" expr ")"

``FUNC`` is one of sin, cos, tan, exp, log, sqrt, abs.  The variable is ``t``
unless another name is passed to :func:`parse`.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _kernels as K
from . import accel
from .errors import DomainError, NonFiniteError, ParseError, UnknownIdentifierError

FUNCTIONS = ("sin", "cos", "tan", "exp", "log", "sqrt", "abs")
CONSTANTS = {"pi": math.pi, "e": math.e}

_FUNC_OPS = {
    "sin": K.OP_SIN, "cos": K.OP_COS, "tan": K.OP_TAN, "exp": K.OP_EXP,
    "log": K.OP_LOG, "sqrt": K.OP_SQRT, "abs": K.OP_ABS,
}
_BIN_OPS = {"+": K.OP_ADD, "-": K.OP_SUB, "*": K.OP_MUL, "/": K.OP_DIV, "^": K.OP_POW}


class Expression:
    """Base node.  Nodes are immutable and compare structurally."""

    __slots__ = ()

    def __call__(self, t):
        return evaluate(self, t)

    def __str__(self) -> str:
        return unparse(self)

    def derivative(self) -> "Expression":
        return differentiate(self)

    @property
    def is_constant(self) -> bool:
        return not _mentions_var(self)


@dataclass(frozen=True, slots=True)
class Num(Expression):
    value: float


@dataclass(frozen=True, slots=True)
class Const(Expression):
    name: str

    @property
    def value(self) -> float:
        return CONSTANTS[self.name]


@dataclass(frozen=True, slots=True)
class Var(Expression):
    name: str = "t"


@dataclass(frozen=True, slots=True)
class Neg(Expression):
    arg: Expression


@dataclass(frozen=True, slots=True)
class BinOp(Expression):
    op: str
    left: Expression
    right: Expression


@dataclass(frozen=True, slots=True)
class Call(Expression):
    func: str
    arg: Expression


def _mentions_var(e: Expression) -> bool:
    if isinstance(e, Var):
        return True
    if isinstance(e, (Num, Const)):
        return False
    if isinstance(e, (Neg, Call)):
        return _mentions_var(e.arg)
    return _mentions_var(e.left) or _mentions_var(e.right)


# -------------------------------------------------------------------- parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


@dataclass(frozen=True)
class _Tok:
    kind: str  # "num", "name", "op", "end"
    text: str
    offset: int


def _tokenize(src: str) -> list[_Tok]:
    toks = []
    pos = 0
    n = len(src)
    while True:
        while pos < n and src[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN.match(src, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"unexpected character {src[pos]!r}", _byte_offset(src, pos))
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), _byte_offset(src, m.start(kind))))
        pos = m.end()
    toks.append(_Tok("end", "", _byte_offset(src, n)))
    return toks


def _byte_offset(src: str, index: int) -> int:
    return len(src[:index].encode("utf-8"))


_ATOM_START = frozenset({"number", "variable", "function", "constant", "(", "-"})


class _Parser:
    def __init__(self, src: str, var: str):
        self.toks = _tokenize(src)
        self.i = 0
        self.var = var

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect_op(self, text: str) -> None:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return
        raise ParseError(f"unexpected {self._describe()}", self.tok.offset, frozenset({text}))

    def _describe(self) -> str:
        return "end of input" if self.tok.kind == "end" else f"token {self.tok.text!r}"

    def parse(self) -> Expression:
        node = self.expr()
        if self.tok.kind != "end":
            raise ParseError(f"unexpected {self._describe()}", self.tok.offset,
                             frozenset({"+", "-", "*", "/", "^", "end of input"}))
        return node

    def expr(self) -> Expression:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.take().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expression:
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.take().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Expression:
        if self.tok.kind == "op" and self.tok.text == "-":
            self.i += 1
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expression:
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.i += 1
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Expression:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Num(float(tok.text))
        if tok.kind == "name":
            self.i += 1
            if tok.text == self.var:
                return Var(self.var)
            if tok.text in FUNCTIONS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Call(tok.text, arg)
            if tok.text in CONSTANTS:
                return Const(tok.text)
            raise UnknownIdentifierError(tok.text, tok.offset)
        if tok.kind == "op" and tok.text == "(":
            self.i += 1
            node = self.expr()
            self.expect_op(")")
            return node
        raise ParseError(f"unexpected {self._describe()}", tok.offset, _ATOM_START)


def parse(source: str, var: str = "t") -> Expression:
    """Parse ``source`` into an expression tree.

    Raises :class:`ParseError` (with byte offset and expected-token set) or
    :class:`UnknownIdentifierError`.
    """
    if not source or not source.strip():
        raise ParseError("empty expression", 0, _ATOM_START)
    if var in FUNCTIONS or var in CONSTANTS:
        raise ValueError(f"variable name {var!r} clashes with a builtin")
    return _Parser(source, var).parse()


# ------------------------------------------------------------------ unparsing

_PREC_ADD, _PREC_MUL, _PREC_UNARY, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _prec(e: Expression) -> int:
    if isinstance(e, BinOp):
        return {"+": _PREC_ADD, "-": _PREC_ADD, "*": _PREC_MUL, "/": _PREC_MUL}.get(e.op, _PREC_POW)
    if isinstance(e, Neg):
        return _PREC_UNARY
    if isinstance(e, Num) and e.value < 0:
        return _PREC_UNARY
    return _PREC_ATOM


def _fmt_num(v: float) -> str:
    if v < 0:
        return "-" + _fmt_num(-v)
    if v.is_integer() and v < 1e16:
        return str(int(v))
    return repr(v)


def unparse(e: Expression) -> str:
    """Canonical text with the minimum parentheses needed to reparse to ``e``."""

    def wrap(child: Expression, need: int) -> str:
        s = unparse(child)
        return f"({s})" if _prec(child) < need else s

    if isinstance(e, Num):
        return _fmt_num(e.value)
    if isinstance(e, Const):
        return e.name
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        return "-" + wrap(e.arg, _PREC_UNARY)
    if isinstance(e, Call):
        return f"{e.func}({unparse(e.arg)})"
    if e.op in "+-":
        return f"{wrap(e.left, _PREC_ADD)} {e.op} {wrap(e.right, _PREC_MUL)}"
    if e.op in "*/":
        return f"{wrap(e.left, _PREC_MUL)}{e.op}{wrap(e.right, _PREC_UNARY)}"
    return f"{wrap(e.left, _PREC_ATOM)}^{wrap(e.right, _PREC_UNARY)}"


# ----------------------------------------------------------------- evaluation

def _check(value: float, t: float) -> float:
    if not math.isfinite(value):
        raise NonFiniteError("non-finite intermediate result", t)
    return value


def _eval(e: Expression, t: float) -> float:
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        return t
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Neg):
        return -_eval(e.arg, t)
    if isinstance(e, Call):
        a = _eval(e.arg, t)
        f = e.func
        try:
            if f == "log":
                if a <= 0.0:
                    raise DomainError("log of a non-positive number", t)
                return math.log(a)
            if f == "sqrt":
                if a < 0.0:
                    raise DomainError("sqrt of a negative number", t)
                return math.sqrt(a)
            if f == "abs":
                return abs(a)
            return _check(getattr(math, f)(a), t)
        except OverflowError:
            raise NonFiniteError("non-finite intermediate result", t) from None
    a = _eval(e.left, t)
    b = _eval(e.right, t)
    op = e.op
    if op == "+":
        return _check(a + b, t)
    if op == "-":
        return _check(a - b, t)
    if op == "*":
        return _check(a * b, t)
    if op == "/":
        if b == 0.0:
            raise DomainError("division by zero", t)
        return _check(a / b, t)
    if a < 0.0 and b != math.floor(b):
        raise DomainError("power outside the real domain", t)
    if a == 0.0 and b < 0.0:
        raise DomainError("power outside the real domain", t)
    try:
        return _check(math.pow(a, b), t)
    except OverflowError:
        raise NonFiniteError("non-finite intermediate result", t) from None


def evaluate(expr: Expression, t):
    """Evaluate at a scalar ``t`` (tree walk) or an array of ``t`` (kernel)."""
    if np.ndim(t) == 0:
        return _eval(expr, float(t))
    return evaluate_many(expr, t)


@dataclass(frozen=True)
class Program:
    ops: np.ndarray
    args: np.ndarray
    consts: np.ndarray
    stack_size: int


def compile_program(expr: Expression) -> Program:
    """Flatten a tree to postfix bytecode for the batch kernels."""
    ops: list[int] = []
    args: list[int] = []
    consts: list[float] = []
    depth = 0
    peak = 0

    def emit(op: int, arg: int, delta: int) -> None:
        nonlocal depth, peak
        ops.append(op)
        args.append(arg)
        depth += delta
        peak = max(peak, depth)

    def walk(e: Expression) -> None:
        if isinstance(e, (Num, Const)):
            consts.append(e.value)
            emit(K.OP_CONST, len(consts) - 1, 1)
        elif isinstance(e, Var):
            emit(K.OP_VAR, 0, 1)
        elif isinstance(e, Neg):
            walk(e.arg)
            emit(K.OP_NEG, 0, 0)
        elif isinstance(e, Call):
            walk(e.arg)
            emit(_FUNC_OPS[e.func], 0, 0)
        else:
            walk(e.left)
            walk(e.right)
            emit(_BIN_OPS[e.op], 0, -1)

    walk(expr)
    return Program(
        np.asarray(ops, dtype=np.int64),
        np.asarray(args, dtype=np.int64),
        np.asarray(consts if consts else [0.0], dtype=np.float64),
        max(peak, 1),
    )


_PROGRAMS: dict[Expression, Program] = {}


def evaluate_many(expr: Expression, ts) -> np.ndarray:
    """Vectorised evaluation; raises on the first sample that fails."""
    ts = np.ascontiguousarray(ts, dtype=np.float64).reshape(-1)
    prog = _PROGRAMS.get(expr)
    if prog is None:
        prog = _PROGRAMS.setdefault(expr, compile_program(expr))
    values, code, idx = accel.run_program(prog.ops, prog.args, prog.consts, ts, prog.stack_size)
    if code != K.ERR_OK:
        cls = NonFiniteError if code == K.ERR_NONFINITE else DomainError
        raise cls(K.ERROR_MESSAGES[code], float(ts[idx]))
    return values


# ------------------------------------------------------------ differentiation

_ZERO = Num(0.0)
_ONE = Num(1.0)
_TWO = Num(2.0)


def _is_num(e: Expression, v: float) -> bool:
    return isinstance(e, Num) and e.value == v


def _add(a, b):
    if _is_num(a, 0.0):
        return b
    if _is_num(b, 0.0):
        return a
    return BinOp("+", a, b)


def _sub(a, b):
    if _is_num(b, 0.0):
        return a
    if _is_num(a, 0.0):
        return _neg(b)
    return BinOp("-", a, b)


def _neg(a):
    if _is_num(a, 0.0):
        return a
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def _mul(a, b):
    if _is_num(a, 0.0) or _is_num(b, 0.0):
        return _ZERO
    if _is_num(a, 1.0):
        return b
    if _is_num(b, 1.0):
        return a
    return BinOp("*", a, b)


def _div(a, b):
    if _is_num(a, 0.0):
        return _ZERO
    if _is_num(b, 1.0):
        return a
    return BinOp("/", a, b)


def differentiate(expr: Expression) -> Expression:
    """Exact derivative with respect to the variable, by the usual rules.

    Only trivial 0/1 folding is applied; the result is not simplified.
    """
    e = expr
    if isinstance(e, (Num, Const)):
        return _ZERO
    if isinstance(e, Var):
        return _ONE
    if isinstance(e, Neg):
        return _neg(differentiate(e.arg))
    if isinstance(e, Call):
        a = e.arg
        da = differentiate(a)
        if _is_num(da, 0.0):
            return _ZERO
        f = e.func
        if f == "sin":
            outer = Call("cos", a)
        elif f == "cos":
            outer = Neg(Call("sin", a))
        elif f == "tan":
            outer = _add(_ONE, BinOp("^", Call("tan", a), _TWO))
        elif f == "exp":
            outer = e
        elif f == "log":
            return _div(da, a)
        elif f == "sqrt":
            return _div(da, BinOp("*", _TWO, e))
        else:
            # d|a| = a/|a| * a'; undefined (division by zero) at a = 0
            outer = BinOp("/", a, e)
        return _mul(outer, da)
    a, b = e.left, e.right
    da, db = differentiate(a), differentiate(b)
    if e.op == "+":
        return _add(da, db)
    if e.op == "-":
        return _sub(da, db)
    if e.op == "*":
        return _add(_mul(da, b), _mul(a, db))
    if e.op == "/":
        if _is_num(db, 0.0):
            return _div(da, b)
        return _div(_sub(_mul(da, b), _mul(a, db)), BinOp("^", b, _TWO))
    # power
    if _is_num(db, 0.0):
        if _is_num(da, 0.0):
            return _ZERO
        if isinstance(b, Num):
            lowered = Num(b.value - 1.0) if b.value >= 1.0 else Neg(Num(1.0 - b.value))
        else:
            lowered = BinOp("-", b, _ONE)
        return _mul(_mul(b, BinOp("^", a, lowered)), da)
    if _is_num(da, 0.0):
        return _mul(_mul(e, Call("log", a)), db)
    return _mul(e, _add(_mul(db, Call("log", a)), _div(_mul(b, da), a)))


# --------------------------------------------------------------- scalar curve

class ExprCurve:
    """A :class:`~liesys.curves.ScalarCurve` backed by an expression."""

    def __init__(self, expr: Expression | str, var: str = "t"):
        self.expr = parse(expr, var) if isinstance(expr, str) else expr

    def __call__(self, t):
        return evaluate(self.expr, t)

    @cached_property
    def _derivative(self) -> "ExprCurve":
        return ExprCurve(differentiate(self.expr))

    def derivative(self) -> "ExprCurve":
        return self._derivative

    def __repr__(self) -> str:
        return f"ExprCurve({unparse(self.expr)!r})"

    def __str__(self) -> str:
        return unparse(self.expr)
