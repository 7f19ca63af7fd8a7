"""Tokenizer, expression parser and evaluators for the text formats.

One grammar serves polynomials, star functions and cross elements:

    expr   := ['-'] term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := atom ('^' INT)?
    atom   := NUMBER | NAME | '(' expr ')' | '-' atom
    NUMBER := INT ['/' INT]

What a NAME may resolve to depends on the evaluator: chart variables
``x1..x{2n}`` everywhere, the formal parameter ``h`` where a star function is
expected, and Lie basis names inside cross elements (where multiplication is
the noncommutative cross product, evaluated left to right).

Errors carry the 1-based line and column of the offending token, offset by
where the fragment sits in its source file.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .poly import Poly
from .starprod import StarFunction
from .weyl import ChartContext


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        self.message = message
        self.line = line
        self.col = col
        super().__init__(f"line {line}, col {col}: {message}")


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "name", "op", "end"
    text: str
    line: int
    col: int


_OPS = set("+-*/^()[]=,")


def tokenize(text: str, line: int = 1, col: int = 1) -> list[Token]:
    """Split a fragment into tokens, tracking positions from (line, col)."""
    tokens: list[Token] = []
    i = 0
    cur_line, cur_col = line, col
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            cur_line += 1
            cur_col = 1
            i += 1
            continue
        if ch in " \t\r":
            cur_col += 1
            i += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_col = cur_col
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token("num", text[i:j], cur_line, start_col))
            cur_col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(Token("name", text[i:j], cur_line, start_col))
            cur_col += j - i
            i = j
            continue
        if ch in _OPS:
            tokens.append(Token("op", ch, cur_line, start_col))
            cur_col += 1
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", cur_line, start_col)
    tokens.append(Token("end", "", cur_line, cur_col))
    return tokens


class TokenStream:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "end":
            self.pos += 1
        return tok

    def at_op(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind == "op" and tok.text == text

    def take_op(self, text: str) -> bool:
        if self.at_op(text):
            self.next()
            return True
        return False

    def expect_op(self, text: str) -> Token:
        tok = self.peek()
        if tok.kind != "op" or tok.text != text:
            raise ParseError(f"expected {text!r}, found {tok.text or 'end of input'!r}",
                             tok.line, tok.col)
        return self.next()

    def expect_name(self, what: str = "a name") -> Token:
        tok = self.peek()
        if tok.kind != "name":
            raise ParseError(f"expected {what}, found {tok.text or 'end of input'!r}",
                             tok.line, tok.col)
        return self.next()

    def expect_end(self) -> None:
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(f"unexpected trailing input {tok.text!r}", tok.line, tok.col)

    def expect_int(self, what: str = "an integer") -> int:
        tok = self.peek()
        if tok.kind != "num":
            raise ParseError(f"expected {what}, found {tok.text or 'end of input'!r}",
                             tok.line, tok.col)
        self.next()
        return int(tok.text)


class ExprParser:
    """Recursive-descent evaluator over a token stream.

    The evaluator object supplies ``number``, ``name``, ``add``, ``sub``,
    ``neg``, ``mul`` and ``power``; values are whatever it produces.
    """

    def __init__(self, stream: TokenStream, evaluator):
        self.s = stream
        self.ev = evaluator

    def parse(self):
        negate = self.s.take_op("-")
        value = self._term()
        if negate:
            value = self.ev.neg(value)
        while True:
            if self.s.take_op("+"):
                value = self.ev.add(value, self._term())
            elif self.s.take_op("-"):
                value = self.ev.sub(value, self._term())
            else:
                return value

    def _term(self):
        value = self._factor()
        while self.s.at_op("*"):
            tok = self.s.next()
            value = self.ev.mul(value, self._factor(), tok)
        return value

    def _factor(self):
        value = self._atom()
        if self.s.take_op("^"):
            tok = self.s.peek()
            exponent = self.s.expect_int("a nonnegative integer exponent")
            if exponent < 0:
                raise ParseError("exponent must be nonnegative", tok.line, tok.col)
            value = self.ev.power(value, exponent, tok)
        return value

    def _atom(self):
        tok = self.s.peek()
        if tok.kind == "num":
            self.s.next()
            numerator = int(tok.text)
            if self.s.at_op("/"):
                self.s.next()
                denom = self.s.expect_int("a denominator")
                if denom == 0:
                    raise ParseError("zero denominator", tok.line, tok.col)
                return self.ev.number(Fraction(numerator, denom))
            return self.ev.number(Fraction(numerator))
        if tok.kind == "name":
            self.s.next()
            return self.ev.name(tok)
        if tok.kind == "op" and tok.text == "(":
            self.s.next()
            value = self.parse()
            self.s.expect_op(")")
            return value
        if tok.kind == "op" and tok.text == "-":
            self.s.next()
            return self.ev.neg(self._atom())
        raise ParseError(
            f"expected a number, name or '(', found {tok.text or 'end of input'!r}",
            tok.line, tok.col,
        )


def _chart_index(tok: Token, dim: int) -> int | None:
    """Resolve a token of the form x<k> to a 0-based index, if it is one."""
    text = tok.text
    if len(text) >= 2 and text[0] == "x" and text[1:].isdigit():
        k = int(text[1:])
        if 1 <= k <= dim:
            return k - 1
        raise ParseError(f"variable {text} out of range for dimension {dim}", tok.line, tok.col)
    return None


class PolyEvaluator:
    def __init__(self, ctx_dim: int):
        self.dim = ctx_dim

    def number(self, value: Fraction) -> Poly:
        return Poly.const(self.dim, value)

    def name(self, tok: Token) -> Poly:
        idx = _chart_index(tok, self.dim)
        if idx is not None:
            return Poly.variable(self.dim, idx)
        if tok.text == "h":
            raise ParseError("h is not allowed in a plain polynomial", tok.line, tok.col)
        raise ParseError(f"unknown name {tok.text!r}", tok.line, tok.col)

    def add(self, a: Poly, b: Poly) -> Poly:
        return a + b

    def sub(self, a: Poly, b: Poly) -> Poly:
        return a - b

    def neg(self, a: Poly) -> Poly:
        return -a

    def mul(self, a: Poly, b: Poly, tok: Token) -> Poly:
        return a * b

    def power(self, a: Poly, exponent: int, tok: Token) -> Poly:
        return a**exponent


class StarEvaluator:
    """Evaluates to StarFunction; multiplication is the formal (coefficient)
    product of h series, which is what a function literal denotes."""

    def __init__(self, ctx: ChartContext):
        self.ctx = ctx

    def number(self, value: Fraction) -> StarFunction:
        return StarFunction.from_poly(self.ctx, value)

    def name(self, tok: Token) -> StarFunction:
        idx = _chart_index(tok, self.ctx.dim)
        if idx is not None:
            return StarFunction.from_poly(self.ctx, Poly.variable(self.ctx.dim, idx))
        if tok.text == "h":
            return StarFunction(self.ctx, {1: Poly.const(self.ctx.dim, 1)})
        raise ParseError(f"unknown name {tok.text!r}", tok.line, tok.col)

    def add(self, a: StarFunction, b: StarFunction) -> StarFunction:
        return a + b

    def sub(self, a: StarFunction, b: StarFunction) -> StarFunction:
        return a - b

    def neg(self, a: StarFunction) -> StarFunction:
        return -a

    def mul(self, a: StarFunction, b: StarFunction, tok: Token) -> StarFunction:
        return formal_mul(a, b)

    def power(self, a: StarFunction, exponent: int, tok: Token) -> StarFunction:
        out = StarFunction.from_poly(self.ctx, 1)
        for _ in range(exponent):
            out = formal_mul(out, a)
        return out


def formal_mul(a: StarFunction, b: StarFunction) -> StarFunction:
    """The commutative product of coefficient series (no star deformation)."""
    acc: dict[int, Poly] = {}
    for la, pa in a.coeffs.items():
        for lb, pb in b.coeffs.items():
            l = la + lb
            prod = pa * pb
            prev = acc.get(l)
            total = prod if prev is None else prev + prod
            if total:
                acc[l] = total
            else:
                acc.pop(l, None)
    return StarFunction(a.ctx, acc)


class CrossEvaluator:
    """Evaluates to CrossElement; multiplication is the cross product,
    applied left to right, so generator order in the input is respected."""

    def __init__(self, algebra):
        self.algebra = algebra

    def number(self, value: Fraction):
        return self.algebra.embed(value)

    def name(self, tok: Token):
        ctx = self.algebra.ctx
        idx = _chart_index(tok, ctx.dim)
        if idx is not None:
            return self.algebra.embed(Poly.variable(ctx.dim, idx))
        if tok.text == "h":
            return self.algebra.embed(StarFunction(ctx, {1: Poly.const(ctx.dim, 1)}))
        names = self.algebra.action.algebra.names
        if tok.text in names:
            return self.algebra.gen(names.index(tok.text))
        raise ParseError(f"unknown name {tok.text!r}", tok.line, tok.col)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b, tok: Token):
        return self.algebra.mul(a, b)

    def power(self, a, exponent: int, tok: Token):
        out = self.algebra.one()
        for _ in range(exponent):
            out = self.algebra.mul(out, a)
        return out


def parse_poly(text: str, dim: int, line: int = 1, col: int = 1) -> Poly:
    stream = TokenStream(tokenize(text, line, col))
    value = ExprParser(stream, PolyEvaluator(dim)).parse()
    stream.expect_end()
    return value


def parse_star(text: str, ctx: ChartContext, line: int = 1, col: int = 1) -> StarFunction:
    stream = TokenStream(tokenize(text, line, col))
    value = ExprParser(stream, StarEvaluator(ctx)).parse()
    stream.expect_end()
    return value


def parse_cross(text: str, algebra, line: int = 1, col: int = 1):
    stream = TokenStream(tokenize(text, line, col))
    value = ExprParser(stream, CrossEvaluator(algebra)).parse()
    stream.expect_end()
    return value


class LieComboEvaluator:
    """Evaluates a rational linear combination of basis names to coordinates."""

    def __init__(self, names: tuple[str, ...]):
        self.names = names

    def number(self, value: Fraction):
        return (value, (Fraction(0),) * len(self.names))

    def name(self, tok: Token):
        if tok.text not in self.names:
            raise ParseError(f"unknown basis name {tok.text!r}", tok.line, tok.col)
        vec = [Fraction(0)] * len(self.names)
        vec[self.names.index(tok.text)] = Fraction(1)
        return (Fraction(0), tuple(vec))

    def add(self, a, b):
        return (a[0] + b[0], tuple(x + y for x, y in zip(a[1], b[1])))

    def sub(self, a, b):
        return (a[0] - b[0], tuple(x - y for x, y in zip(a[1], b[1])))

    def neg(self, a):
        return (-a[0], tuple(-x for x in a[1]))

    def mul(self, a, b, tok: Token):
        if any(a[1]) and any(b[1]):
            raise ParseError("products of basis elements are not allowed here",
                             tok.line, tok.col)
        if any(b[1]):
            a, b = b, a
        return (a[0] * b[0], tuple(x * b[0] for x in a[1]))

    def power(self, a, exponent: int, tok: Token):
        if any(a[1]) and exponent != 1:
            raise ParseError("powers of basis elements are not allowed here",
                             tok.line, tok.col)
        return (a[0] ** exponent, a[1] if exponent == 1 else (Fraction(0),) * len(self.names))


def parse_lie_combo(
    text: str, names: tuple[str, ...], line: int = 1, col: int = 1
) -> tuple[Fraction, ...]:
    stream = TokenStream(tokenize(text, line, col))
    first = stream.peek()
    scalar, vec = ExprParser(stream, LieComboEvaluator(names)).parse()
    stream.expect_end()
    if scalar:
        raise ParseError("a bracket value must be a combination of basis elements (or 0)",
                         first.line, first.col)
    return vec
