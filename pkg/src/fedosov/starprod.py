"""Fedosov's construction on a Darboux chart: from a symplectic connection
to the flat connection D and the star product.

The pipeline is:

    connection Gamma  ->  curvature R  ->  unique 1-form r with
        delta(r) = R + partial(r) - (1/h) r*r,   delta_inv(r) = 0
    ->  D = -delta + partial - [r/h, .]  with  D^2 = 0 (mod truncation)
    ->  flat sections lifting functions  ->  f (*) g = sigma(lift f * lift g).

Both recursions (for r and for the flat-section lift) raise the first
undetermined total degree by one per pass, so they reach a fixed point in at
most N iterations at truncation order N; a hard cap converts any
non-termination into a diagnosable error rather than a hang.

Precision contract: with truncation order N, star-product coefficients at
h^q are exact for 2q <= N.  Quantities derived through an h-division of a
truncated input (and the checks of identities involving them) are compared at
correspondingly reduced orders; see the individual docstrings.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from .poly import Poly, Scalar
from .weyl import (
    ChartContext,
    ContextMismatchError,
    WeylForm,
    commutator,
    core_part,
    d,
    delta,
    delta_inv,
    moyal,
)


class ConvergenceError(RuntimeError):
    """A filtered fixed-point iteration failed to stabilize within its cap."""


class FlatnessError(RuntimeError):
    """A computed section failed its closedness postcondition."""


class SymplecticConnection:
    """Totally symmetric Christoffel data Gamma_ijk with polynomial entries.

    Stored on canonically sorted index triples; ``component`` resolves any
    index order, and ``raised`` contracts with the inverse symplectic matrix.
    """

    __slots__ = ("ctx", "gamma", "_form", "_form_over_h")

    def __init__(self, ctx: ChartContext, gamma: Mapping[tuple[int, int, int], Poly]):
        cleaned: dict[tuple[int, int, int], Poly] = {}
        for key, p in gamma.items():
            if any(not 0 <= i < ctx.dim for i in key):
                raise ValueError(f"connection index {key} out of range")
            skey = tuple(sorted(key))
            if skey in cleaned and cleaned[skey] != p:
                raise ValueError(f"conflicting values for symmetric class {skey}")
            if p:
                cleaned[skey] = p
        self.ctx = ctx
        self.gamma = cleaned
        self._form: WeylForm | None = None
        self._form_over_h: WeylForm | None = None

    @classmethod
    def flat(cls, ctx: ChartContext) -> SymplecticConnection:
        return cls(ctx, {})

    @classmethod
    def from_entries(
        cls, ctx: ChartContext, entries: Iterable[tuple[int, int, int, Poly]]
    ) -> SymplecticConnection:
        """Build from (i, j, k, poly) items, symmetrizing and rejecting conflicts."""
        acc: dict[tuple[int, int, int], Poly] = {}
        for i, j, k, p in entries:
            skey = tuple(sorted((i, j, k)))
            if skey in acc and acc[skey] != p:
                raise ValueError(
                    f"conflicting connection entries for symmetric class "
                    f"({skey[0] + 1},{skey[1] + 1},{skey[2] + 1})"
                )
            acc[skey] = p
        return cls(ctx, acc)

    def is_flat(self) -> bool:
        return not self.gamma

    def component(self, i: int, j: int, k: int) -> Poly:
        """Gamma_ijk (any index order; total symmetry)."""
        return self.gamma.get(tuple(sorted((i, j, k))), Poly.zero(self.ctx.dim))

    def raised(self, l: int, j: int, k: int) -> Poly:
        """Gamma^l_jk = omega^{l i} Gamma_ijk."""
        total = Poly.zero(self.ctx.dim)
        for i in range(self.ctx.dim):
            w = self.ctx.omega_inv[l][i]
            if w:
                total = total + self.component(i, j, k) * w
        return total

    def form(self) -> WeylForm:
        """The local connection form (1/2) Gamma_ijk y^i y^j dx^k."""
        if self._form is None:
            half = Fraction(1, 2)
            entries = []
            for i in range(self.ctx.dim):
                for j in range(self.ctx.dim):
                    for k in range(self.ctx.dim):
                        p = self.component(i, j, k)
                        if p:
                            entries.append((p * half, (i, j), (k,), 0))
            self._form = self.ctx.form(entries)
        return self._form

    def form_over_h(self) -> WeylForm:
        if self._form_over_h is None:
            self._form_over_h = self.form().times_h(-1)
        return self._form_over_h

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SymplecticConnection):
            return NotImplemented
        return self.ctx == other.ctx and self.gamma == other.gamma


def curvature_component(conn: SymplecticConnection, i: int, j: int, k: int, l: int) -> Poly:
    """R_ijkl from the coordinate-frame curvature of the connection.

    Convention: R(X, Y) = nabla_X nabla_Y - nabla_Y nabla_X on the coordinate
    frame, paired with omega.  Validated against the operator identity
    partial^2 = -[R/h, .].
    """
    total = conn.component(i, l, j).diff(k) - conn.component(i, k, j).diff(l)
    for m in range(conn.ctx.dim):
        total = total + conn.raised(m, l, j) * conn.component(i, k, m)
        total = total - conn.raised(m, k, j) * conn.component(i, l, m)
    return total


def curvature_form(conn: SymplecticConnection) -> WeylForm:
    """The curvature form (1/4) R_ijkl y^i y^j dx^k wedge dx^l."""
    quarter = Fraction(1, 4)
    entries = []
    dim = conn.ctx.dim
    for i in range(dim):
        for j in range(dim):
            for k in range(dim):
                for l in range(dim):
                    if k == l:
                        continue
                    p = curvature_component(conn, i, j, k, l)
                    if p:
                        entries.append((p * quarter, (i, j), (k, l), 0))
    return conn.ctx.form(entries)


def partial(a: WeylForm, conn: SymplecticConnection) -> WeylForm:
    """The covariant derivative: d a - [Gamma/h, a]."""
    if a.ctx != conn.ctx:
        raise ContextMismatchError("form and connection use different charts")
    if conn.is_flat():
        return d(a)
    return d(a) - commutator(conn.form_over_h(), a)


# -- star functions -----------------------------------------------------------


class StarFunction:
    """A polynomial function of the chart with formal h coefficients.

    Coefficients are kept for h^l with 2l <= N (higher ones are outside the
    truncation contract and are dropped).  Immutable.
    """

    __slots__ = ("ctx", "coeffs", "_hash")

    def __init__(self, ctx: ChartContext, coeffs: Mapping[int, Poly]):
        stored: dict[int, Poly] = {}
        for l, p in coeffs.items():
            if l < 0:
                raise ValueError("negative h power in a star function")
            if not p:
                continue
            if 2 * l > ctx.trunc:
                continue
            stored[l] = p
        self.ctx = ctx
        self.coeffs = stored
        self._hash: int | None = None

    @classmethod
    def from_poly(cls, ctx: ChartContext, p: Poly | Scalar) -> StarFunction:
        if not isinstance(p, Poly):
            p = ctx.poly_const(p)
        return cls(ctx, {0: p})

    def coeff(self, l: int) -> Poly:
        return self.coeffs.get(l, Poly.zero(self.ctx.dim))

    def classical(self) -> Poly:
        """The h^0 coefficient."""
        return self.coeff(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __add__(self, other: StarFunction) -> StarFunction:
        self._check(other)
        acc = dict(self.coeffs)
        for l, p in other.coeffs.items():
            total = acc.get(l, Poly.zero(self.ctx.dim)) + p
            if total:
                acc[l] = total
            else:
                acc.pop(l, None)
        return StarFunction(self.ctx, acc)

    def __sub__(self, other: StarFunction) -> StarFunction:
        return self + (-other)

    def __neg__(self) -> StarFunction:
        return StarFunction(self.ctx, {l: -p for l, p in self.coeffs.items()})

    def scale(self, value: Poly | Scalar) -> StarFunction:
        return StarFunction(self.ctx, {l: p * value for l, p in self.coeffs.items()})

    def truncated_h(self, max_power: int) -> StarFunction:
        return StarFunction(
            self.ctx, {l: p for l, p in self.coeffs.items() if l <= max_power}
        )

    def _check(self, other: StarFunction) -> None:
        if self.ctx != other.ctx:
            raise ContextMismatchError("star functions use different charts")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StarFunction):
            return NotImplemented
        return self.ctx == other.ctx and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ctx, frozenset(self.coeffs.items())))
        return self._hash

    def to_form(self) -> WeylForm:
        zero_exp = (0,) * self.ctx.dim
        return WeylForm(self.ctx, {(zero_exp, (), l): p for l, p in self.coeffs.items()})

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        pieces: list[str] = []
        for l in sorted(self.coeffs):
            p = self.coeffs[l]
            if l == 0:
                pieces.append(str(p))
                continue
            hfactor = "h" if l == 1 else f"h^{l}"
            if len(p.terms) > 1:
                text = f"({p})*{hfactor}"
                sign = 1
            else:
                ((exp, coeff),) = p.terms.items()
                sign = 1 if coeff > 0 else -1
                body = _abs_monomial_text(exp, coeff)
                text = f"{body}*{hfactor}" if body else hfactor
            if not pieces:
                pieces.append(text if sign > 0 else f"-{text}")
            else:
                pieces.append(f"+ {text}" if sign > 0 else f"- {text}")
        return " ".join(pieces)

    def __repr__(self) -> str:
        return f"StarFunction({self})"


def _abs_monomial_text(exp: tuple[int, ...], coeff: Fraction) -> str:
    from .poly import monomial_text

    body = monomial_text(exp)
    c = abs(coeff)
    if not body:
        return str(c) if c != 1 else ""
    if c == 1:
        return body
    return f"{c}*{body}"


def to_star_function(a: WeylForm) -> StarFunction:
    """sigma of a 0-form as a StarFunction; rejects forms with dx content at y=0."""
    acc: dict[int, Poly] = {}
    for (yexp, dxset, hpow), p in a.terms.items():
        if sum(yexp):
            continue
        if dxset:
            raise ValueError("cannot project a form with antisymmetric degree > 0")
        acc[hpow] = acc.get(hpow, Poly.zero(a.ctx.dim)) + p
    return StarFunction(a.ctx, acc)


# -- the Fedosov solution ------------------------------------------------------


class FedosovSolution:
    """The solved flat-connection data for one symplectic connection.

    Immutable after ``solve``; lifts are cached, so concurrent star products
    over a shared solution at worst duplicate a computation.
    """

    __slots__ = ("conn", "ctx", "curvature", "r", "_r_over_h", "_lift_cache")

    def __init__(self, conn: SymplecticConnection, r: WeylForm, curvature: WeylForm):
        self.conn = conn
        self.ctx = conn.ctx
        self.curvature = curvature
        self.r = r
        self._r_over_h = r.times_h(-1) if r else conn.ctx.zero_form()
        self._lift_cache: dict[StarFunction, WeylForm] = {}

    @classmethod
    def solve(cls, conn: SymplecticConnection) -> FedosovSolution:
        """Fixed point of r <- delta_inv(R + partial(r) - (r*r)/h) from r = 0.

        Each pass determines one more total degree, so the iterate repeats
        after at most N passes; the unique solution has delta_inv(r) = 0 and
        minimal total degree >= 3.

        The h-division of r*r consumes two degrees of product precision, so
        the recursion runs with truncation headroom N + 2 and the result is
        cut back to N; this keeps every stored term of r exact.
        """
        ctx = conn.ctx
        ctx_plus = ctx.with_trunc(ctx.trunc + 2)
        conn_plus = SymplecticConnection(ctx_plus, conn.gamma)
        r = ctx_plus.zero_form()
        # rhs accumulates R + partial(r) - (r*r)/h incrementally: each pass
        # only feeds the newly determined slice of r through the (bilinear) map.
        rhs = curvature_form(conn_plus)
        for _ in range(ctx_plus.trunc + 2):
            nxt = delta_inv(rhs)
            inc = nxt - r
            if not inc:
                break
            cross = moyal(r, inc) + moyal(inc, r) + moyal(inc, inc)
            rhs = rhs + partial(inc, conn_plus) - cross.times_h(-1)
            r = nxt
        else:
            raise ConvergenceError(
                "curvature recursion did not stabilize within the iteration cap"
            )
        r = WeylForm(ctx, r.terms)  # re-home; drops the headroom degrees
        if delta_inv(r):
            raise FlatnessError("normalization delta_inv(r) = 0 violated")
        mindeg = r.min_total_degree()
        if mindeg is not None and mindeg < 3:
            raise FlatnessError(f"r has a term of total degree {mindeg} < 3")
        return cls(conn, r, curvature_form(conn))

    @property
    def trunc(self) -> int:
        return self.ctx.trunc

    def r_over_h(self) -> WeylForm:
        return self._r_over_h

    def horizontal(self, a: WeylForm) -> WeylForm:
        """partial(a) - [r/h, a]: the non-delta part of the flat derivative."""
        out = partial(a, self.conn)
        if self.r:
            out = out - commutator(self._r_over_h, a)
        return out

    def D(self, a: WeylForm) -> WeylForm:
        """The flat covariant derivative: -delta(a) + partial(a) - [r/h, a]."""
        return self.horizontal(a) - delta(a)

    def lift(self, f: StarFunction) -> WeylForm:
        """The unique section with D = 0 (mod truncation) projecting to f.

        Computed as the fixed point of a <- f + delta_inv(partial(a) - [r/h, a]),
        feeding only the new slice through the (linear) map each pass; the
        closedness of the result is checked, not assumed (valid to total
        degree N - 1 because delta consumes one degree of the truncated input).
        """
        if f.ctx != self.ctx:
            raise ContextMismatchError("star function uses a different chart")
        cached = self._lift_cache.get(f)
        if cached is not None:
            return cached
        base = f.to_form()
        a = base
        ga = self.horizontal(a)
        for _ in range(self.ctx.trunc + 2):
            nxt = base + delta_inv(ga)
            inc = nxt - a
            if not inc:
                break
            ga = ga + self.horizontal(inc)
            a = nxt
        else:
            raise ConvergenceError(
                "flat-section recursion did not stabilize within the iteration cap"
            )
        residue = self.D(a).truncated(self.ctx.trunc - 1)
        if residue:
            raise FlatnessError(f"lift failed closedness check: D(a) = {residue}")
        self._lift_cache[f] = a
        return a

    def star(self, f: StarFunction, g: StarFunction) -> StarFunction:
        """f (*) g = sigma(lift(f) * lift(g)); coefficients exact for 2q <= N."""
        product = moyal(self.lift(f), self.lift(g))
        return to_star_function(core_part(product))

    def star_poly(self, f: Poly | Scalar, g: Poly | Scalar) -> StarFunction:
        return self.star(
            StarFunction.from_poly(self.ctx, f), StarFunction.from_poly(self.ctx, g)
        )


def star(f: StarFunction, g: StarFunction, sol: FedosovSolution) -> StarFunction:
    return sol.star(f, g)


def poisson(f: Poly, g: Poly, ctx: ChartContext) -> Poly:
    """{f, g} = -omega^{ij} (df/dx^i)(dg/dx^j), so {x^i, x^j} = -omega^{ij}."""
    if f.nvars != ctx.dim or g.nvars != ctx.dim:
        raise ValueError("polynomial dimension does not match the chart")
    total = Poly.zero(ctx.dim)
    for i, j, w in ctx._inv_pairs:
        df = f.diff(i)
        if not df:
            continue
        dg = g.diff(j)
        if not dg:
            continue
        total = total - df * dg * w
    return total
