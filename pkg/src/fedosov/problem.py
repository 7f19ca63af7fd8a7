"""Line-oriented problem files: the input format of the command line tools.

A problem file declares a chart, an optional connection and omega matrix,
named vector fields, and an optional Lie algebra with an action:

    # comments run to end of line
    dim 2                     # chart dimension 2n (required, first)
    order 8                   # truncation order N (default 6)
    omega 1 2 = 1             # optional; default is the standard block form
    gamma 1 1 1 = x2          # Christoffel entry, symmetrized automatically
    field X = [1, 0]          # 2n polynomial components, must be symplectic
    field Y = [x1, -x2]
    lie e1 e2                 # basis names of the Lie algebra
    bracket e1 e2 = e1        # [e1, e2] as a combination of basis names
    action e1 = X             # basis element -> named field
    action e2 = Y

All indices are 1-based in the file.  Every error is reported with the line
and column of the offending token; semantic problems (asymmetric gamma
entries, non-symplectic fields, bad actions) are rejected here, not later.
"""

from __future__ import annotations

import zlib
from fractions import Fraction

from .liecross import ActionError, CrossAlgebra, LieAction, LieAlgebra, LieStructureError
from .parsing import (ExprParser, LieComboEvaluator, ParseError, PolyEvaluator,
                      Token, TokenStream, tokenize)
from .poly import Poly
from .starprod import FedosovSolution, SymplecticConnection
from .vectorfield import NotSymplecticError, SymplecticVectorField
from .weyl import ChartContext


class Problem:
    """A parsed problem: chart, connection, fields, and optional Lie action."""

    def __init__(
        self,
        ctx: ChartContext,
        conn: SymplecticConnection,
        fields: dict[str, SymplecticVectorField],
        algebra: LieAlgebra | None,
        action: LieAction | None,
        source: str,
    ):
        self.ctx = ctx
        self.conn = conn
        self.fields = fields
        self.algebra = algebra
        self.action = action
        self.source = source
        self._solution: FedosovSolution | None = None
        self._cross: CrossAlgebra | None = None

    def solution(self) -> FedosovSolution:
        if self._solution is None:
            self._solution = FedosovSolution.solve(self.conn)
        return self._solution

    def cross(self) -> CrossAlgebra:
        if self._cross is None:
            if self.action is None:
                raise ValueError("the problem declares no Lie algebra action")
            self._cross = CrossAlgebra(self.action, self.solution())
        return self._cross

    def field(self, name: str) -> SymplecticVectorField:
        try:
            return self.fields[name]
        except KeyError:
            raise KeyError(f"unknown field {name!r}") from None

    def default_seed(self) -> int:
        """A deterministic seed derived from the problem text."""
        return zlib.crc32(self.source.encode("utf-8"))


def _expect_index(stream: TokenStream, dim: int, what: str) -> tuple[int, Token]:
    tok = stream.peek()
    value = stream.expect_int(what)
    if not 1 <= value <= dim:
        raise ParseError(f"{what} {value} out of range 1..{dim}", tok.line, tok.col)
    return value - 1, tok


def parse_problem(text: str, order_override: int | None = None) -> Problem:
    """Parse and fully validate a problem file."""
    dim: int | None = None
    order: int | None = None
    omega_entries: list[tuple[int, int, Fraction, Token]] = []
    gamma_entries: list[tuple[int, int, int, Poly, Token]] = []
    fields_raw: list[tuple[str, list[Poly], Token]] = []
    lie_names: tuple[str, ...] | None = None
    lie_token: Token | None = None
    brackets: list[tuple[int, int, tuple[Fraction, ...], Token]] = []
    actions_raw: list[tuple[str, str, Token]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0]
        if not stripped.strip():
            continue
        stream = TokenStream(tokenize(stripped, line=lineno, col=1))
        keyword = stream.expect_name("a keyword")

        if keyword.text == "dim":
            if dim is not None:
                raise ParseError("duplicate dim declaration", keyword.line, keyword.col)
            tok = stream.peek()
            dim = stream.expect_int("the chart dimension")
            if dim <= 0 or dim % 2:
                raise ParseError(f"dimension must be a positive even number, got {dim}",
                                 tok.line, tok.col)
            stream.expect_end()
            continue

        if keyword.text == "order":
            if order is not None:
                raise ParseError("duplicate order declaration", keyword.line, keyword.col)
            tok = stream.peek()
            order = stream.expect_int("the truncation order")
            if order < 0:
                raise ParseError("order must be nonnegative", tok.line, tok.col)
            stream.expect_end()
            continue

        if dim is None:
            raise ParseError("dim must be declared before this line",
                             keyword.line, keyword.col)

        if keyword.text == "omega":
            i, itok = _expect_index(stream, dim, "row index")
            j, _ = _expect_index(stream, dim, "column index")
            if i == j:
                raise ParseError("omega is antisymmetric: diagonal entries are zero",
                                 itok.line, itok.col)
            stream.expect_op("=")
            value = ExprParser(stream, PolyEvaluator(dim)).parse()
            stream.expect_end()
            if not value.is_constant():
                raise ParseError("omega entries must be rational constants",
                                 itok.line, itok.col)
            omega_entries.append((i, j, value.constant_value(), itok))
            continue

        if keyword.text == "gamma":
            i, itok = _expect_index(stream, dim, "first index")
            j, _ = _expect_index(stream, dim, "second index")
            k, _ = _expect_index(stream, dim, "third index")
            stream.expect_op("=")
            value = ExprParser(stream, PolyEvaluator(dim)).parse()
            stream.expect_end()
            gamma_entries.append((i, j, k, value, itok))
            continue

        if keyword.text == "field":
            name_tok = stream.expect_name("a field name")
            if any(name_tok.text == n for n, _, _ in fields_raw):
                raise ParseError(f"duplicate field {name_tok.text!r}",
                                 name_tok.line, name_tok.col)
            stream.expect_op("=")
            stream.expect_op("[")
            comps: list[Poly] = []
            while True:
                comps.append(ExprParser(stream, PolyEvaluator(dim)).parse())
                if stream.take_op(","):
                    continue
                stream.expect_op("]")
                break
            stream.expect_end()
            if len(comps) != dim:
                raise ParseError(
                    f"field {name_tok.text!r} has {len(comps)} components, expected {dim}",
                    name_tok.line, name_tok.col,
                )
            fields_raw.append((name_tok.text, comps, name_tok))
            continue

        if keyword.text == "lie":
            if lie_names is not None:
                raise ParseError("duplicate lie declaration", keyword.line, keyword.col)
            names = []
            while stream.peek().kind == "name":
                names.append(stream.next().text)
            stream.expect_end()
            if not names:
                raise ParseError("lie needs at least one basis name",
                                 keyword.line, keyword.col)
            if len(set(names)) != len(names):
                raise ParseError("duplicate basis names", keyword.line, keyword.col)
            lie_names = tuple(names)
            lie_token = keyword
            continue

        if keyword.text == "bracket":
            if lie_names is None:
                raise ParseError("bracket before lie declaration",
                                 keyword.line, keyword.col)
            atok = stream.expect_name("a basis name")
            btok = stream.expect_name("a basis name")
            for tok in (atok, btok):
                if tok.text not in lie_names:
                    raise ParseError(f"unknown basis name {tok.text!r}", tok.line, tok.col)
            stream.expect_op("=")
            first = stream.peek()
            scalar, vec = ExprParser(stream, LieComboEvaluator(lie_names)).parse()
            stream.expect_end()
            if scalar:
                raise ParseError("a bracket value must combine basis names (or be 0)",
                                 first.line, first.col)
            i, j = lie_names.index(atok.text), lie_names.index(btok.text)
            if any(i == a and j == b for a, b, _, _ in brackets):
                raise ParseError(
                    f"duplicate bracket [{atok.text}, {btok.text}]", atok.line, atok.col
                )
            brackets.append((i, j, vec, atok))
            continue

        if keyword.text == "action":
            if lie_names is None:
                raise ParseError("action before lie declaration",
                                 keyword.line, keyword.col)
            btok = stream.expect_name("a basis name")
            if btok.text not in lie_names:
                raise ParseError(f"unknown basis name {btok.text!r}", btok.line, btok.col)
            stream.expect_op("=")
            ftok = stream.expect_name("a field name")
            stream.expect_end()
            if any(btok.text == b for b, _, _ in actions_raw):
                raise ParseError(f"duplicate action for {btok.text!r}",
                                 btok.line, btok.col)
            actions_raw.append((btok.text, ftok.text, ftok))
            continue

        raise ParseError(f"unknown keyword {keyword.text!r}", keyword.line, keyword.col)

    if dim is None:
        raise ParseError("problem file declares no dim", 1, 1)
    if order_override is not None:
        order = order_override
    if order is None:
        order = 6

    # chart
    if omega_entries:
        rows = [[Fraction(0)] * dim for _ in range(dim)]
        seen: dict[tuple[int, int], Fraction] = {}
        for i, j, v, tok in omega_entries:
            for (a, b), w in ((i, j), v), ((j, i), -v):
                if (a, b) in seen and seen[(a, b)] != w:
                    raise ParseError(
                        f"conflicting omega entries at ({a + 1}, {b + 1})", tok.line, tok.col
                    )
                seen[(a, b)] = w
                rows[a][b] = w
        try:
            ctx = ChartContext(rows, order)
        except ValueError as exc:
            tok = omega_entries[0][3]
            raise ParseError(f"bad omega matrix: {exc}", tok.line, tok.col) from None
    else:
        ctx = ChartContext.standard(dim // 2, order)

    # connection, with symmetry conflicts rejected at parse time
    conn_acc: dict[tuple[int, int, int], tuple[Poly, Token]] = {}
    for i, j, k, p, tok in gamma_entries:
        skey = tuple(sorted((i, j, k)))
        if skey in conn_acc and conn_acc[skey][0] != p:
            raise ParseError(
                "gamma entry conflicts with an earlier entry for the same "
                f"symmetric class ({skey[0] + 1},{skey[1] + 1},{skey[2] + 1})",
                tok.line, tok.col,
            )
        conn_acc[skey] = (p, tok)
    conn = SymplecticConnection(ctx, {k: p for k, (p, _) in conn_acc.items()})

    fields: dict[str, SymplecticVectorField] = {}
    for name, comps, tok in fields_raw:
        try:
            fields[name] = SymplecticVectorField(ctx, comps)
        except NotSymplecticError as exc:
            raise ParseError(f"field {name!r} is not symplectic: {exc}",
                             tok.line, tok.col) from None

    algebra: LieAlgebra | None = None
    action: LieAction | None = None
    if lie_names is not None:
        constants: dict[tuple[int, int, int], Fraction] = {}
        for i, j, vec, tok in brackets:
            for k, v in enumerate(vec):
                if v:
                    constants[(i, j, k)] = v
        try:
            algebra = LieAlgebra(lie_names, constants)
        except LieStructureError as exc:
            tok = brackets[0][3] if brackets else lie_token
            raise ParseError(str(exc), tok.line, tok.col) from None
        if actions_raw:
            if len(actions_raw) != len(lie_names):
                tok = actions_raw[0][2]
                raise ParseError(
                    f"action assigns {len(actions_raw)} of {len(lie_names)} basis elements",
                    tok.line, tok.col,
                )
            images = []
            for basis_name in lie_names:
                fname, tok = next(
                    (f, t) for b, f, t in actions_raw if b == basis_name
                )
                if fname not in fields:
                    raise ParseError(f"unknown field {fname!r}", tok.line, tok.col)
                images.append(fields[fname])
            try:
                action = LieAction(algebra, images)
            except ActionError as exc:
                tok = actions_raw[0][2]
                raise ParseError(str(exc), tok.line, tok.col) from None

    return Problem(ctx, conn, fields, algebra, action, text)


def load_problem(path: str, order_override: int | None = None) -> Problem:
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    return parse_problem(text, order_override=order_override)
