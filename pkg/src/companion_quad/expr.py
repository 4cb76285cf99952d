"""Integrand expressions: parsing, evaluation and symbolic differentiation.

Grammar (whitespace is insignificant)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | base ('^' factor)?
    base   := number | 't' | name '(' expr ')' | '(' expr ')'

``^`` is right associative and binds tighter than unary minus, so ``-t^2``
is ``-(t^2)``.  Exponents must be free of ``t``.  Recognised functions are
``abs sin cos exp ln sqrt sign``.

Evaluation is vectorised over numpy arrays; scalars in give floats out.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    ArityError,
    DerivativeUnavailableError,
    DomainError,
    NonDifferentiableError,
    ParseError,
    UnknownIdentifierError,
)

VARIABLE = "t"
FUNCTIONS = ("abs", "sin", "cos", "exp", "ln", "sqrt", "sign")
BINARY_OPS = ("+", "-", "*", "/", "^")


class Expression:
    """Base class of the immutable expression tree."""

    __slots__ = ()

    def __call__(self, t):
        return evaluate(self, t)

    def __str__(self):
        return render(self)

    def children(self) -> tuple[Expression, ...]:
        return ()

    def walk(self) -> Iterator[Expression]:
        yield self
        for child in self.children():
            yield from child.walk()

    @property
    def has_variable(self) -> bool:
        return any(isinstance(node, Var) for node in self.walk())


@dataclass(frozen=True)
class Const(Expression):
    value: float


@dataclass(frozen=True)
class Var(Expression):
    name: str = VARIABLE


@dataclass(frozen=True)
class Unary(Expression):
    op: str  # "neg" or one of FUNCTIONS
    arg: Expression

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class Binary(Expression):
    op: str  # one of BINARY_OPS
    left: Expression
    right: Expression

    def children(self):
        return (self.left, self.right)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
    |(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
    |(?P<name>[A-Za-z_][A-Za-z_0-9]*)
    |(?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # number | name | op | end
    text: str
    offset: int  # byte offset


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0

    def byte_offset(i: int) -> int:
        return len(text[:i].encode("utf-8"))

    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", byte_offset(pos))
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), byte_offset(pos)))
        pos = m.end()
    tokens.append(_Token("end", "", byte_offset(len(text))))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def unexpected(self) -> ParseError:
        tok = self.tok
        if tok.kind == "end":
            return ParseError("unexpected end of input", tok.offset)
        return ParseError(f"unexpected token {tok.text!r}", tok.offset)

    def expect(self, text: str) -> _Token:
        if self.tok.kind == "op" and self.tok.text == text:
            return self.advance()
        if self.tok.kind == "end":
            raise ParseError(f"expected {text!r} but input ended", self.tok.offset)
        raise ParseError(f"expected {text!r}, found {self.tok.text!r}", self.tok.offset)

    def at_op(self, *ops: str) -> bool:
        return self.tok.kind == "op" and self.tok.text in ops

    def parse(self) -> Expression:
        if self.tok.kind == "end":
            raise ParseError("empty expression", self.tok.offset)
        node = self.expr()
        if self.tok.kind != "end":
            raise self.unexpected()
        return node

    def expr(self) -> Expression:
        node = self.term()
        while self.at_op("+", "-"):
            op = self.advance().text
            node = Binary(op, node, self.term())
        return node

    def term(self) -> Expression:
        node = self.factor()
        while self.at_op("*", "/"):
            op = self.advance().text
            node = Binary(op, node, self.factor())
        return node

    def factor(self) -> Expression:
        if self.at_op("-"):
            self.advance()
            return Unary("neg", self.factor())
        node = self.base()
        if self.at_op("^"):
            caret = self.advance()
            exponent = self.factor()
            if exponent.has_variable:
                raise ParseError("exponent must not depend on t", caret.offset)
            try:
                value = float(evaluate(exponent, 0.0))
            except DomainError as exc:
                raise ParseError(f"invalid exponent: {exc}", caret.offset) from None
            node = Binary("^", node, Const(value))
        return node

    def base(self) -> Expression:
        tok = self.tok
        if tok.kind == "number":
            self.advance()
            return Const(float(tok.text))
        if tok.kind == "name":
            self.advance()
            if tok.text == VARIABLE:
                return Var()
            if tok.text not in FUNCTIONS:
                raise UnknownIdentifierError(f"unknown identifier {tok.text!r}", tok.offset)
            self.expect("(")
            if self.at_op(")"):
                raise ArityError(f"{tok.text}() takes exactly one argument, got 0", self.tok.offset)
            arg = self.expr()
            if self.at_op(","):
                raise ArityError(
                    f"{tok.text}() takes exactly one argument, got more", self.tok.offset
                )
            self.expect(")")
            return Unary(tok.text, arg)
        if self.at_op("("):
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        raise self.unexpected()


def parse(text: str) -> Expression:
    """Parse ``text`` into an expression tree.

    Raises :class:`ParseError` (or one of its subclasses) carrying the byte
    offset of the offending token.
    """
    return _Parser(text).parse()


def render(e: Expression) -> str:
    """Fully parenthesised text that :func:`parse` maps back to an equivalent tree."""
    if isinstance(e, Const):
        text = repr(float(e.value))
        return f"({text})" if e.value < 0 or text.startswith("-") else text
    if isinstance(e, Var):
        return VARIABLE
    if isinstance(e, Unary):
        if e.op == "neg":
            return f"(-{render(e.arg)})"
        return f"{e.op}({render(e.arg)})"
    if isinstance(e, Binary):
        return f"({render(e.left)} {e.op} {render(e.right)})"
    raise TypeError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def _fail(node: Expression, what: str, t: np.ndarray, bad: np.ndarray) -> DomainError:
    where = float(np.asarray(t)[bad].flat[0]) if bad.any() else float("nan")
    return DomainError(f"{what} in {render(node)} at t = {where!r}", node)


def _eval(node: Expression, t: np.ndarray, side: int) -> np.ndarray:
    if isinstance(node, Const):
        return np.full(t.shape, float(node.value))
    if isinstance(node, Var):
        return t
    if isinstance(node, Unary):
        v = _eval(node.arg, t, side)
        op = node.op
        if op == "neg":
            return -v
        if op == "abs":
            return np.abs(v)
        if op == "sin":
            return np.sin(v)
        if op == "cos":
            return np.cos(v)
        if op == "exp":
            with np.errstate(over="ignore"):
                return np.exp(v)
        if op == "ln":
            bad = v <= 0
            if bad.any():
                raise _fail(node, "logarithm of a non-positive value", t, bad)
            return np.log(v)
        if op == "sqrt":
            bad = v < 0
            if bad.any():
                raise _fail(node, "square root of a negative value", t, bad)
            return np.sqrt(v)
        if op == "sign":
            s = np.sign(v)
            if side and (v == 0).any():
                # one-sided limit: look at the argument just beside t
                zero = v == 0
                step = 1e-6 * np.maximum(1.0, np.abs(t))
                nudged = np.sign(_eval(node.arg, t + side * step, 0))
                s = np.where(zero, nudged, s)
            return s
        raise DomainError(f"unknown unary operator {op!r}", node)
    if isinstance(node, Binary):
        u = _eval(node.left, t, side)
        w = _eval(node.right, t, side)
        op = node.op
        if op == "+":
            return u + w
        if op == "-":
            return u - w
        if op == "*":
            return u * w
        if op == "/":
            bad = w == 0
            if bad.any():
                raise _fail(node, "division by zero", t, bad)
            return u / w
        if op == "^":
            bad = (u < 0) & (w != np.round(w))
            if bad.any():
                raise _fail(node, "fractional power of a negative value", t, bad)
            bad = (u == 0) & (w < 0)
            if bad.any():
                raise _fail(node, "negative power of zero", t, bad)
            with np.errstate(over="ignore"):
                return np.power(u, w)
        raise DomainError(f"unknown binary operator {op!r}", node)
    raise TypeError(f"not an expression node: {node!r}")


def evaluate(e: Expression, t, side: int = 0):
    """Evaluate ``e`` at ``t`` (float or array) in double precision.

    ``side`` (-1, 0 or +1) selects one-sided limits for ``sign`` nodes whose
    argument vanishes exactly at ``t``.
    """
    arr = np.asarray(t, dtype=float)
    out = _eval(e, arr, side)
    if not np.isfinite(out).all():
        bad = ~np.isfinite(out)
        raise _fail(e, "non-finite value", np.broadcast_to(arr, out.shape), bad)
    if arr.ndim == 0:
        return float(out)
    return out


# ---------------------------------------------------------------------------
# Differentiation
# ---------------------------------------------------------------------------

ZERO = Const(0.0)
ONE = Const(1.0)


def _is_const(e: Expression, value: float | None = None) -> bool:
    return isinstance(e, Const) and (value is None or e.value == value)


def _neg(u):
    if _is_const(u):
        return Const(-u.value)
    if isinstance(u, Unary) and u.op == "neg":
        return u.arg
    return Unary("neg", u)


def _add(u, w):
    if _is_const(u, 0.0):
        return w
    if _is_const(w, 0.0):
        return u
    if _is_const(u) and _is_const(w):
        return Const(u.value + w.value)
    return Binary("+", u, w)


def _sub(u, w):
    if _is_const(w, 0.0):
        return u
    if _is_const(u, 0.0):
        return _neg(w)
    if _is_const(u) and _is_const(w):
        return Const(u.value - w.value)
    return Binary("-", u, w)


def _mul(u, w):
    if _is_const(u, 0.0) or _is_const(w, 0.0):
        return ZERO
    if _is_const(u, 1.0):
        return w
    if _is_const(w, 1.0):
        return u
    if _is_const(u) and _is_const(w):
        return Const(u.value * w.value)
    return Binary("*", u, w)


def _div(u, w):
    if _is_const(u, 0.0):
        return ZERO
    if _is_const(w, 1.0):
        return u
    return Binary("/", u, w)


def _pow(u, c: float):
    if c == 0.0:
        return ONE
    if c == 1.0:
        return u
    return Binary("^", u, Const(c))


def _affine_coefficients(u: Expression) -> tuple[float, float] | None:
    """``(slope, intercept)`` if ``u`` is affine in t, else None."""
    try:
        du = differentiate(u)
    except NonDifferentiableError:
        return None
    if du.has_variable:
        return None
    u0 = evaluate(u, 0.0)
    return evaluate(u, 1.0) - u0, u0


def differentiate(e: Expression) -> Expression:
    """Symbolic derivative with respect to t.

    ``abs`` is accepted only around affine arguments, where it becomes
    ``sign(u) * u'``; anything else raises :class:`NonDifferentiableError`.
    """
    if isinstance(e, Const):
        return ZERO
    if isinstance(e, Var):
        return ONE
    if isinstance(e, Unary):
        u = e.arg
        op = e.op
        if op == "neg":
            return _neg(differentiate(u))
        if op == "sign":
            raise NonDifferentiableError(f"sign() is discontinuous: {render(e)}")
        if op == "abs":
            if _affine_coefficients(u) is None:
                raise NonDifferentiableError(
                    f"abs() of a non-affine argument cannot be differentiated: {render(e)}; "
                    "supply the derivative and kink points explicitly"
                )
            return _mul(Unary("sign", u), differentiate(u))
        du = differentiate(u)
        if op == "sin":
            return _mul(Unary("cos", u), du)
        if op == "cos":
            return _neg(_mul(Unary("sin", u), du))
        if op == "exp":
            return _mul(e, du)
        if op == "ln":
            return _div(du, u)
        if op == "sqrt":
            return _div(du, _mul(Const(2.0), e))
        raise NonDifferentiableError(f"unknown function {op!r}")
    if isinstance(e, Binary):
        u, w = e.left, e.right
        if e.op == "^":
            if w.has_variable:
                raise NonDifferentiableError(f"variable exponent in {render(e)}")
            c = float(evaluate(w, 0.0))
            return _mul(_mul(Const(c), _pow(u, c - 1.0)), differentiate(u))
        du, dw = differentiate(u), differentiate(w)
        if e.op == "+":
            return _add(du, dw)
        if e.op == "-":
            return _sub(du, dw)
        if e.op == "*":
            return _add(_mul(du, w), _mul(u, dw))
        if e.op == "/":
            return _div(_sub(_mul(du, w), _mul(u, dw)), _pow(w, 2.0))
    raise TypeError(f"not an expression node: {e!r}")


def kink_points(e: Expression, strict: bool = True) -> tuple[float, ...]:
    """Zeros of the affine arguments of every ``abs``/``sign`` node, sorted.

    With ``strict`` a non-affine argument raises :class:`NonDifferentiableError`;
    otherwise it is skipped.
    """
    points = set()
    for node in e.walk():
        if isinstance(node, Unary) and node.op in ("abs", "sign"):
            coeffs = _affine_coefficients(node.arg)
            if coeffs is None:
                if strict:
                    raise NonDifferentiableError(
                        f"cannot locate the kinks of {render(node)} exactly"
                    )
                continue
            slope, intercept = coeffs
            if slope != 0.0:
                points.add(-intercept / slope)
    return tuple(sorted(points))


# ---------------------------------------------------------------------------
# Integrands
# ---------------------------------------------------------------------------


def _vectorize(fn: Callable) -> Callable[[np.ndarray], np.ndarray]:
    def call(t):
        arr = np.asarray(t, dtype=float)
        try:
            out = np.asarray(fn(arr), dtype=float)
            if out.shape == arr.shape:
                return out
        except (TypeError, ValueError):
            pass
        flat = [float(fn(float(s))) for s in arr.ravel()]
        return np.array(flat, dtype=float).reshape(arr.shape)

    return call


@dataclass(frozen=True, eq=False)
class IntegrandFunction:
    """A real function of t with an optional derivative and known kinks.

    ``certified`` is true when the derivative is exact (symbolic or closed
    form) and ``kink_points`` lists every point where it may jump.  Norms
    computed from such a function carry the flag forward.
    """

    func: Callable[[np.ndarray], np.ndarray]
    dfunc: Callable[..., np.ndarray] | None = None
    kink_points: tuple[float, ...] = ()
    expression: Expression | None = None
    derivative: Expression | None = None
    certified: bool = False

    def __call__(self, t):
        arr = np.asarray(t, dtype=float)
        out = np.asarray(self.func(arr), dtype=float)
        return float(out) if arr.ndim == 0 else out

    def value(self, t, side: int = 0):
        """Like calling the function, with one-sided limits at jumps."""
        arr = np.asarray(t, dtype=float)
        if self.expression is not None:
            out = evaluate(self.expression, arr, side=side)
        else:
            if side:
                arr = arr + side * 64.0 * np.spacing(np.abs(arr))
            out = self.func(arr)
        out = np.asarray(out, dtype=float)
        return float(out) if out.ndim == 0 else out

    @property
    def has_derivative(self) -> bool:
        return self.dfunc is not None

    def prime(self, t, side: int = 0):
        """Derivative at ``t``; ``side`` = +1/-1 asks for the right/left limit."""
        if self.dfunc is None:
            raise DerivativeUnavailableError(
                "no derivative available; supply one explicitly"
            )
        arr = np.asarray(t, dtype=float)
        if self.derivative is not None:
            out = evaluate(self.derivative, arr, side=side)
        else:
            if side:
                arr = arr + side * 64.0 * np.spacing(np.abs(arr))
            out = self.dfunc(arr)
        out = np.asarray(out, dtype=float)
        return float(out) if out.ndim == 0 else out

    def scaled(self, k: float) -> IntegrandFunction:
        """The function ``k * f`` with matching derivative and kinks."""
        k = float(k)
        if self.expression is not None:
            deriv = None if self.derivative is None else _mul(Const(k), self.derivative)
            return IntegrandFunction.from_expression(
                _mul(Const(k), self.expression),
                derivative=deriv,
                kink_points=self.kink_points,
                certified=self.certified,
            )
        f, df = self.func, self.dfunc
        return IntegrandFunction(
            func=lambda t: k * f(t),
            dfunc=None if df is None else (lambda t: k * df(t)),
            kink_points=self.kink_points,
            certified=self.certified,
        )

    @classmethod
    def from_expression(
        cls,
        e: Expression | str,
        derivative: Expression | str | None = None,
        kink_points: Sequence[float] | None = None,
        certified: bool | None = None,
    ) -> IntegrandFunction:
        """Wrap an expression, differentiating it symbolically when no
        derivative is given.

        If symbolic differentiation is impossible the result has no
        derivative; the composite rule still works but every norm-based
        bound raises :class:`DerivativeUnavailableError`.
        """
        if isinstance(e, str):
            e = parse(e)
        if isinstance(derivative, str):
            derivative = parse(derivative)
        supplied = derivative is not None
        if derivative is None:
            try:
                derivative = differentiate(e)
            except NonDifferentiableError:
                derivative = None
        if kink_points is None:
            found: set[float] = set(kink_points_lenient(e))
            if derivative is not None:
                found.update(kink_points_lenient(derivative))
            kink_points = sorted(found)
        if certified is None:
            certified = derivative is not None and (supplied or _kinks_exact(e))
        expr, deriv = e, derivative
        return cls(
            func=lambda t: evaluate(expr, t),
            dfunc=None if deriv is None else (lambda t: evaluate(deriv, t)),
            kink_points=tuple(float(k) for k in kink_points),
            expression=e,
            derivative=derivative,
            certified=bool(certified),
        )

    @classmethod
    def from_callable(
        cls,
        func: Callable,
        derivative: Callable | None = None,
        kink_points: Iterable[float] = (),
        certified: bool = False,
    ) -> IntegrandFunction:
        """Wrap plain Python callables (scalar or vectorised)."""
        return cls(
            func=_vectorize(func),
            dfunc=None if derivative is None else _vectorize(derivative),
            kink_points=tuple(sorted(float(k) for k in kink_points)),
            certified=certified,
        )


def kink_points_lenient(e: Expression) -> tuple[float, ...]:
    return kink_points(e, strict=False)


def _kinks_exact(e: Expression) -> bool:
    try:
        kink_points(e, strict=True)
    except NonDifferentiableError:
        return False
    return True
