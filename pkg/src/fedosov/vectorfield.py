"""Symplectic vector fields and their quantization to derivations.

A polynomial vector field X = X^i d/dx^i is symplectic when
(dX^k/dx^i) omega_kj is symmetric in (i, j); the constructor enforces this.
For such a field:

  * ``lie_derivative`` extends X to the Weyl forms by the Leibniz rule,
    acting on coefficients and substituting into each y and dx factor;
  * ``eta_form`` produces the closed 1-form measuring [D, L_X];
  * ``solve_u`` produces the 0-form primitive with D u = -eta/h;
  * :class:`QuantizedDerivation` packages L_X + [u, .] acting on star
    functions through the flat-section lift;
  * ``tau`` is the antisymmetric pairing measuring how far quantization is
    from preserving brackets.

Identities that the construction guarantees are re-checked on every computed
object (closedness of eta, the primitive property of u, flatness of tau) and
raise :class:`IdentityCheckError` on failure, so inconsistent inputs or
regressions surface immediately instead of corrupting downstream results.
"""

from __future__ import annotations

from fractions import Fraction

from .poly import Poly, Scalar
from .starprod import (
    FedosovSolution,
    StarFunction,
    SymplecticConnection,
    partial,
    to_star_function,
)
from .weyl import (
    ChartContext,
    ContextMismatchError,
    WeylForm,
    _accumulate,
    commutator,
    core_part,
    delta_inv,
    sort_sign,
)


class NotSymplecticError(ValueError):
    """The field does not preserve the symplectic form."""

    def __init__(self, i: int, j: int, defect: Poly):
        self.pair = (i, j)
        self.defect = defect
        super().__init__(
            f"field is not symplectic: condition fails at (i, j) = "
            f"({i + 1}, {j + 1}) with defect {defect}"
        )


class IdentityCheckError(RuntimeError):
    """A postcondition identity failed; inputs are inconsistent or a bug surfaced."""


class SymplecticVectorField:
    """A polynomial vector field with L_X omega = 0 (validated on construction)."""

    __slots__ = ("ctx", "components", "_jacobian")

    def __init__(self, ctx: ChartContext, components: list[Poly] | tuple[Poly, ...]):
        comps = tuple(components)
        if len(comps) != ctx.dim:
            raise ValueError(f"expected {ctx.dim} components, got {len(comps)}")
        for c in comps:
            if c.nvars != ctx.dim:
                raise ValueError("component dimension does not match the chart")
        jac = tuple(tuple(comps[i].diff(j) for j in range(ctx.dim)) for i in range(ctx.dim))
        for i in range(ctx.dim):
            for j in range(i + 1, ctx.dim):
                left = Poly.zero(ctx.dim)
                right = Poly.zero(ctx.dim)
                for k in range(ctx.dim):
                    if ctx.omega[k][j]:
                        left = left + jac[k][i] * ctx.omega[k][j]
                    if ctx.omega[k][i]:
                        right = right + jac[k][j] * ctx.omega[k][i]
                if left != right:
                    raise NotSymplecticError(i, j, left - right)
        self.ctx = ctx
        self.components = comps
        self._jacobian = jac

    @classmethod
    def from_scalars(
        cls, ctx: ChartContext, components: list[Poly | Scalar]
    ) -> SymplecticVectorField:
        comps = [
            c if isinstance(c, Poly) else ctx.poly_const(c) for c in components
        ]
        return cls(ctx, comps)

    @classmethod
    def hamiltonian(cls, ctx: ChartContext, f: Poly) -> SymplecticVectorField:
        """The Hamiltonian field of f: the i-th component is omega^{ji} df/dx^j."""
        comps = []
        for i in range(ctx.dim):
            total = Poly.zero(ctx.dim)
            for j in range(ctx.dim):
                w = ctx.omega_inv[j][i]
                if w:
                    total = total + f.diff(j) * w
            comps.append(total)
        return cls(ctx, comps)

    @classmethod
    def zero(cls, ctx: ChartContext) -> SymplecticVectorField:
        return cls(ctx, [Poly.zero(ctx.dim)] * ctx.dim)

    def is_zero(self) -> bool:
        return all(not c for c in self.components)

    def apply_to(self, p: Poly) -> Poly:
        """The classical action X(p) = X^i dp/dx^i."""
        total = Poly.zero(self.ctx.dim)
        for i, comp in enumerate(self.components):
            if comp:
                total = total + comp * p.diff(i)
        return total

    def bracket(self, other: SymplecticVectorField) -> SymplecticVectorField:
        """[X, Y]^i = X^j dY^i/dx^j - Y^j dX^i/dx^j (revalidated on construction)."""
        self._check(other)
        comps = [
            self.apply_to(other.components[i]) - other.apply_to(self.components[i])
            for i in range(self.ctx.dim)
        ]
        return SymplecticVectorField(self.ctx, comps)

    def __add__(self, other: SymplecticVectorField) -> SymplecticVectorField:
        self._check(other)
        return SymplecticVectorField(
            self.ctx,
            [a + b for a, b in zip(self.components, other.components)],
        )

    def __sub__(self, other: SymplecticVectorField) -> SymplecticVectorField:
        return self + (-other)

    def __neg__(self) -> SymplecticVectorField:
        return SymplecticVectorField(self.ctx, [-c for c in self.components])

    def scale(self, value: Scalar) -> SymplecticVectorField:
        return SymplecticVectorField(self.ctx, [c * value for c in self.components])

    def _check(self, other: SymplecticVectorField) -> None:
        if self.ctx != other.ctx:
            raise ContextMismatchError("fields use different charts")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SymplecticVectorField):
            return NotImplemented
        return self.ctx == other.ctx and self.components == other.components

    def __hash__(self) -> int:
        return hash((self.ctx, self.components))

    def __str__(self) -> str:
        return "[" + ", ".join(str(c) for c in self.components) + "]"

    def __repr__(self) -> str:
        return f"SymplecticVectorField({self})"


def lie_derivative(X: SymplecticVectorField, a: WeylForm) -> WeylForm:
    """Term-by-term Leibniz action of X on a form.

    X differentiates the coefficient, substitutes (dX^i/dx^j) y^j for each y^i
    factor and (dX^s/dx^j) dx^j for each dx^s factor; y-degree, form degree
    and h-power are all preserved.
    """
    if X.ctx != a.ctx:
        raise ContextMismatchError("field and form use different charts")
    dim = X.ctx.dim
    jac = X._jacobian
    acc: dict = {}
    for (yexp, dxset, hpow), p in a.terms.items():
        moved = X.apply_to(p)
        if moved:
            _accumulate(acc, (yexp, dxset, hpow), moved)
        for i, e in enumerate(yexp):
            if not e:
                continue
            for j in range(dim):
                c = jac[i][j]
                if not c:
                    continue
                newy = list(yexp)
                newy[i] -= 1
                newy[j] += 1
                _accumulate(acc, (tuple(newy), dxset, hpow), p * c * e)
        for pos, s in enumerate(dxset):
            for j in range(dim):
                c = jac[s][j]
                if not c:
                    continue
                replaced = dxset[:pos] + (j,) + dxset[pos + 1 :]
                sorted_dx = sort_sign(replaced)
                if sorted_dx is None:
                    continue
                sign, newdx = sorted_dx
                _accumulate(acc, (yexp, newdx, hpow), p * c * sign)
    return WeylForm(a.ctx, acc)


def hessian_term(X: SymplecticVectorField) -> WeylForm:
    """(1/2) omega_il (d^2 X^l / dx^j dx^k) y^i y^j dx^k."""
    ctx = X.ctx
    half = Fraction(1, 2)
    entries = []
    for l in range(ctx.dim):
        comp = X.components[l]
        if not comp:
            continue
        for j in range(ctx.dim):
            dj = comp.diff(j)
            if not dj:
                continue
            for k in range(ctx.dim):
                djk = dj.diff(k)
                if not djk:
                    continue
                for i in range(ctx.dim):
                    w = ctx.omega[i][l]
                    if w:
                        entries.append((djk * (half * w), (i, j), (k,), 0))
    return ctx.form(entries)


def eta_form(X: SymplecticVectorField, sol: FedosovSolution, check: bool = True) -> WeylForm:
    """The closed 1-form L_X(Gamma-form) + L_X(r) + hessian correction.

    Closedness D(eta) = 0 is verified to total degree N - 1 (one delta applied
    to degree-N-trusted data) unless ``check`` is disabled.
    """
    if X.ctx != sol.ctx:
        raise ContextMismatchError("field and solution use different charts")
    eta = hessian_term(X)
    if not sol.conn.is_flat():
        eta = eta + lie_derivative(X, sol.conn.form())
    if sol.r:
        eta = eta + lie_derivative(X, sol.r)
    if check and eta:
        residue = sol.D(eta).truncated(sol.trunc - 1)
        if residue:
            raise IdentityCheckError(f"D(eta) != 0: residue {residue}")
    return eta


def transported_connection(
    X: SymplecticVectorField, conn: SymplecticConnection
) -> SymplecticConnection:
    """The Christoffel data of the connection transported along X.

    Computed from the raised-index transformation

        Gamma'^l_jk = Gamma^l_jk + X(Gamma^l_jk) - (dX^l/dx^p) Gamma^p_jk
                      + (dX^p/dx^j) Gamma^l_pk + (dX^p/dx^k) Gamma^l_jp
                      + d^2 X^l / dx^j dx^k

    and lowered with omega.  Used as an independent cross-check route for eta;
    total symmetry of the result is verified by the constructor.
    """
    ctx = conn.ctx
    dim = ctx.dim
    jac = X._jacobian
    raised: dict[tuple[int, int, int], Poly] = {}
    for l in range(dim):
        for j in range(dim):
            for k in range(dim):
                base = conn.raised(l, j, k)
                total = base + X.apply_to(base)
                for p in range(dim):
                    if jac[l][p]:
                        total = total - jac[l][p] * conn.raised(p, j, k)
                    if jac[p][j]:
                        total = total + jac[p][j] * conn.raised(l, p, k)
                    if jac[p][k]:
                        total = total + jac[p][k] * conn.raised(l, j, p)
                total = total + X.components[l].diff(j).diff(k)
                if total:
                    raised[(l, j, k)] = total
    lowered: dict[tuple[int, int, int], Poly] = {}
    for i in range(dim):
        for j in range(dim):
            for k in range(dim):
                total = Poly.zero(dim)
                for l in range(dim):
                    w = ctx.omega[i][l]
                    if w and (l, j, k) in raised:
                        total = total + raised[(l, j, k)] * w
                if total:
                    lowered[(i, j, k)] = total
    # Constructor rejects any asymmetry between equivalent index triples.
    entries = [(i, j, k, p) for (i, j, k), p in lowered.items()]
    for (i, j, k), p in list(lowered.items()):
        for perm in ((j, i, k), (k, j, i), (i, k, j)):
            if lowered.get(perm, Poly.zero(dim)) != p:
                raise IdentityCheckError(
                    f"transported connection is not totally symmetric at {(i, j, k)}"
                )
    return SymplecticConnection.from_entries(ctx, entries)


def eta_form_via_connection(X: SymplecticVectorField, sol: FedosovSolution) -> WeylForm:
    """Definitional route for eta: (transported Gamma - Gamma) + L_X r."""
    transported = transported_connection(X, sol.conn)
    eta = transported.form() - sol.conn.form()
    if sol.r:
        eta = eta + lie_derivative(X, sol.r)
    return eta


def solve_u(
    X: SymplecticVectorField,
    sol: FedosovSolution,
    eta: WeylForm | None = None,
    check: bool = True,
) -> WeylForm:
    """Fixed point of u <- delta_inv((D + delta) u + eta/h) from u = 0.

    The primitive property D u = -eta/h is verified at total degree N - 2
    (eta/h is only trusted to N - 2 after the h-division of the truncated r).
    The result may carry negative h powers; admissibility is preserved.
    """
    if eta is None:
        eta = eta_form(X, sol, check=check)
    ctx = sol.ctx
    if not eta:
        return ctx.zero_form()
    source = eta.times_h(-1)
    u = ctx.zero_form()
    gu = source  # accumulates (D + delta) u + eta/h, fed incrementally
    for _ in range(ctx.trunc + 2):
        nxt = delta_inv(gu)
        inc = nxt - u
        if not inc:
            break
        gu = gu + partial_plus_delta(inc, sol)
        u = nxt
    else:
        raise IdentityCheckError("primitive recursion did not stabilize")
    if check:
        residue = (sol.D(u) + source).truncated(sol.trunc - 2)
        if residue:
            raise IdentityCheckError(f"D(u) != -eta/h: residue {residue}")
    return u


def partial_plus_delta(u: WeylForm, sol: FedosovSolution) -> WeylForm:
    """(D + delta) u = partial(u) - [r/h, u]."""
    return sol.horizontal(u)


class QuantizedDerivation:
    """L_X + [u_X, .]: a derivation of the star algebra extending X.

    ``apply`` acts on star functions through the flat-section lift; the h^0
    part of the result is always the classical action X f.  Results are
    cached per input (pure computation, immutable inputs).
    """

    __slots__ = ("field", "sol", "u", "eta", "_apply_cache")

    def __init__(self, field: SymplecticVectorField, sol: FedosovSolution,
                 u: WeylForm, eta: WeylForm):
        self.field = field
        self.sol = sol
        self.u = u
        self.eta = eta
        self._apply_cache: dict[StarFunction, StarFunction] = {}

    @classmethod
    def build(cls, field: SymplecticVectorField, sol: FedosovSolution) -> QuantizedDerivation:
        eta = eta_form(field, sol)
        u = solve_u(field, sol, eta=eta)
        return cls(field, sol, u, eta)

    def apply_form(self, a: WeylForm) -> WeylForm:
        out = lie_derivative(self.field, a)
        if self.u:
            out = out + commutator(self.u, a)
        return out

    def apply(self, f: StarFunction) -> StarFunction:
        cached = self._apply_cache.get(f)
        if cached is not None:
            return cached
        lifted = self.sol.lift(f)
        result = to_star_function(core_part(self.apply_form(lifted)))
        self._apply_cache[f] = result
        return result

    def apply_poly(self, f: Poly | Scalar) -> StarFunction:
        return self.apply(StarFunction.from_poly(self.sol.ctx, f))


def tau_trust_order(trunc: int) -> int:
    """Highest h power of tau trusted at truncation order ``trunc``.

    The primitives u are determined only to total degree N - 1 (their source
    passes through an h-division of the truncated r), so the function part of
    tau is exact for 2q <= N - 2.
    """
    return max((trunc - 2) // 2, 0)


def tau_form(
    X: SymplecticVectorField,
    Y: SymplecticVectorField,
    sol: FedosovSolution,
    uX: WeylForm | None = None,
    uY: WeylForm | None = None,
    check: bool = True,
) -> WeylForm:
    """[u_X, u_Y] - u_[X,Y] + L_X u_Y - L_Y u_X, verified flat.

    Flatness D(tau) = 0 is checked at total degree N - 2; the trusted part of
    the result never contains negative h powers (checked), consistent with
    flat sections living in the nonnegative-power subalgebra.
    """
    if uX is None:
        uX = solve_u(X, sol, check=check)
    if uY is None:
        uY = solve_u(Y, sol, check=check)
    uZ = solve_u(X.bracket(Y), sol, check=check)
    t = commutator(uX, uY) - uZ + lie_derivative(X, uY) - lie_derivative(Y, uX)
    if check and t:
        residue = sol.D(t).truncated(sol.trunc - 2)
        if residue:
            raise IdentityCheckError(f"D(tau) != 0: residue {residue}")
        trusted = t.truncated(sol.trunc - 1)
        rng = trusted.hpow_range()
        if rng is not None and rng[0] < 0:
            raise IdentityCheckError(
                f"flat tau contains a negative h power: min power {rng[0]}"
            )
    return t


def tau(
    X: SymplecticVectorField,
    Y: SymplecticVectorField,
    sol: FedosovSolution,
    uX: WeylForm | None = None,
    uY: WeylForm | None = None,
) -> StarFunction:
    """The function part of tau, truncated to its trusted h order."""
    t = tau_form(X, Y, sol, uX=uX, uY=uY)
    return to_star_function(core_part(t)).truncated_h(tau_trust_order(sol.trunc))
