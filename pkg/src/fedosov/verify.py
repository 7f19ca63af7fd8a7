"""The identity suite: every structural identity of the construction, run
against a problem's own data with seeded randomness.

Each check is one named line in the report.  Identities that involve the
flat connection data are compared at the total degree to which both sides
are determined at truncation order N:

  * products and Lie derivatives of exactly known forms: full stored order;
  * one application of D (or delta) to degree-N data: N - 1;
  * identities routed through an h-division of truncated data (u, eta/h,
    D twice): N - 2;
  * star coefficients: h^q for 2q <= N; tau and everything downstream of it:
    2q <= N - 2.

Failures carry the seed, so any run is replayable.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

from .liecross import CrossAlgebra, classical_cross_mul
from .poly import Poly
from .problem import Problem
from .starprod import (
    FedosovSolution,
    StarFunction,
    SymplecticConnection,
    curvature_component,
    curvature_form,
    partial,
    poisson,
    to_star_function,
)
from .vectorfield import (
    QuantizedDerivation,
    SymplecticVectorField,
    eta_form,
    eta_form_via_connection,
    lie_derivative,
    solve_u,
    tau,
    tau_trust_order,
)
from .weyl import (
    ChartContext,
    WeylForm,
    commutator,
    core_part,
    delta,
    delta_inv,
    delta_star,
    is_central,
    moyal,
    sigma,
)

SUITES = ("weyl", "fedosov", "symfield", "liecross")


@dataclass
class CheckResult:
    name: str
    status: str  # "PASS", "FAIL", "SKIP"
    detail: str = ""


@dataclass
class Report:
    seed: int
    results: list[CheckResult]

    @property
    def failed(self) -> bool:
        return any(r.status == "FAIL" for r in self.results)

    def lines(self) -> list[str]:
        out = [f"# seed {self.seed}"]
        for r in self.results:
            line = f"{r.status} {r.name}"
            if r.detail:
                line += f" -- {r.detail}"
            out.append(line)
        passed = sum(r.status == "PASS" for r in self.results)
        failed = sum(r.status == "FAIL" for r in self.results)
        skipped = sum(r.status == "SKIP" for r in self.results)
        out.append(f"# {passed} passed, {failed} failed, {skipped} skipped")
        return out

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "results": [
                {"name": r.name, "status": r.status, "detail": r.detail}
                for r in self.results
            ],
            "ok": not self.failed,
        }


# -- random data -----------------------------------------------------------


def random_poly(rng: random.Random, dim: int, degree: int = 2, terms: int = 3) -> Poly:
    acc: dict[tuple[int, ...], Fraction] = {}
    for _ in range(rng.randint(1, terms)):
        exp = [0] * dim
        for _ in range(rng.randint(0, degree)):
            exp[rng.randrange(dim)] += 1
        coeff = Fraction(rng.randint(-3, 3))
        if coeff:
            acc[tuple(exp)] = coeff
    return Poly(dim, acc)


def random_form(rng: random.Random, ctx: ChartContext, terms: int = 4) -> WeylForm:
    """A random admissible form whose y-carrying terms have total degree >= 1
    (the subspace on which every operator of the construction stays
    admissible)."""
    entries = []
    for _ in range(rng.randint(1, terms)):
        ydeg = rng.randint(0, 3)
        if ydeg == 0:
            hpow = rng.randint(0, 2)
        else:
            low = max(-((ydeg - 1) // 2), -1)
            hpow = rng.randint(low, 2)
            if ydeg + 2 * hpow < 1:
                hpow += 1
        if ydeg + 2 * hpow > ctx.trunc:
            continue
        ys = tuple(rng.randrange(ctx.dim) for _ in range(ydeg))
        dxs = tuple(rng.sample(range(ctx.dim), rng.randint(0, min(2, ctx.dim))))
        p = random_poly(rng, ctx.dim)
        if p:
            entries.append((p, ys, dxs, hpow))
    return ctx.form(entries)


def random_star(rng: random.Random, ctx: ChartContext) -> StarFunction:
    coeffs = {}
    for l in range(0, 2):
        p = random_poly(rng, ctx.dim)
        if p and 2 * l <= ctx.trunc:
            coeffs[l] = p
    return StarFunction(ctx, coeffs)


def random_hamiltonian_field(
    rng: random.Random, ctx: ChartContext, degree: int = 3
) -> SymplecticVectorField:
    return SymplecticVectorField.hamiltonian(ctx, random_poly(rng, ctx.dim, degree))


# -- check registry ----------------------------------------------------------


class _Session:
    """Lazily shared resources plus the accumulating report."""

    def __init__(self, problem: Problem, rng: random.Random):
        self.problem = problem
        self.ctx = problem.ctx
        self.rng = rng
        self.results: list[CheckResult] = []
        self._sol: FedosovSolution | None = None
        self._derivations: dict[SymplecticVectorField, QuantizedDerivation] = {}

    @property
    def sol(self) -> FedosovSolution:
        if self._sol is None:
            self._sol = self.problem.solution()
        return self._sol

    def derivation(self, X: SymplecticVectorField) -> QuantizedDerivation:
        qd = self._derivations.get(X)
        if qd is None:
            qd = QuantizedDerivation.build(X, self.sol)
            self._derivations[X] = qd
        return qd

    def run(self, name: str, func) -> None:
        try:
            detail = func()
        except Exception as exc:  # noqa: BLE001 - a failing check must not abort the suite
            self.results.append(CheckResult(name, "FAIL", f"{type(exc).__name__}: {exc}"))
            return
        if detail is None:
            self.results.append(CheckResult(name, "PASS"))
        else:
            self.results.append(CheckResult(name, "FAIL", detail))

    def skip(self, name: str, reason: str) -> None:
        self.results.append(CheckResult(name, "SKIP", reason))


def run_verification(
    problem: Problem, suites: tuple[str, ...] = SUITES, seed: int | None = None
) -> Report:
    if seed is None:
        seed = problem.default_seed()
    session = _Session(problem, random.Random(seed))
    for suite in suites:
        if suite == "weyl":
            _suite_weyl(session)
        elif suite == "fedosov":
            _suite_fedosov(session)
        elif suite == "symfield":
            _suite_symfield(session)
        elif suite == "liecross":
            _suite_liecross(session)
        else:
            raise ValueError(f"unknown suite {suite!r}")
    return Report(seed, session.results)


# -- weyl ---------------------------------------------------------------------


def _suite_weyl(s: _Session) -> None:
    ctx, rng = s.ctx, s.rng

    def moyal_associativity():
        for _ in range(8):
            a, b, c = (random_form(rng, ctx) for _ in range(3))
            if moyal(moyal(a, b), c) != moyal(a, moyal(b, c)):
                return f"associativity fails on {a}; {b}; {c}"
        return None

    def scalar_product():
        for _ in range(5):
            p = random_poly(rng, ctx.dim)
            a = random_form(rng, ctx)
            if moyal(ctx.scalar(p), a) != a.scale(p):
                return f"scalar product deviates on {p}; {a}"
        return None

    def delta_squared():
        for _ in range(6):
            a = random_form(rng, ctx)
            if delta(delta(a)):
                return f"delta^2 != 0 on {a}"
            if delta_star(delta_star(a)):
                return f"delta*^2 != 0 on {a}"
        return None

    def hodge():
        for _ in range(6):
            a = random_form(rng, ctx)
            rebuilt = delta(delta_inv(a)) + delta_inv(delta(a)) + core_part(a)
            if rebuilt != a:
                return f"decomposition fails on {a}"
        return None

    def graded_derivation():
        # delta consumes one total degree, so the truncated identity is
        # determined through degree N - 1.
        window = ctx.trunc - 1
        for _ in range(6):
            a, b = random_form(rng, ctx), random_form(rng, ctx)
            for k, ak in a.antisym_split():
                lhs = delta(moyal(ak, b))
                rhs = moyal(delta(ak), b) + (moyal(ak, delta(b)) if k % 2 == 0 else -moyal(ak, delta(b)))
                if (lhs - rhs).truncated(window):
                    return f"graded Leibniz fails at form degree {k}"
        return None

    def inner_commutator():
        # The generator has total degree 1 and the h division costs two more,
        # so the commutator route is determined through degree N - 2.
        gen = ctx.form(
            [(ctx.omega[i][j], (i,), (j,), 0) for i in range(ctx.dim) for j in range(ctx.dim)]
        )
        window = ctx.trunc - 2
        for _ in range(6):
            a = random_form(rng, ctx)
            lhs = commutator(gen, a).times_h(-1)
            if (lhs - delta(a)).truncated(window):
                return f"inner-derivation identity fails on {a}"
        return None

    def filtration():
        for _ in range(6):
            a, b = random_form(rng, ctx), random_form(rng, ctx)
            p = moyal(a, b)
            if a and b and p:
                if p.min_total_degree() < a.min_total_degree() + b.min_total_degree():
                    return f"filtration violated: {a}; {b}"
        return None

    def admissibility():
        for _ in range(6):
            a, b = random_form(rng, ctx), random_form(rng, ctx)
            for out in (moyal(a, b), delta(a), delta_star(a), delta_inv(a), sigma(a)):
                for (y, _, h) in out.terms:
                    if sum(y) + 2 * h < 0:
                        return f"inadmissible term in {out}"
        return None

    s.run("weyl.moyal-associativity", moyal_associativity)
    s.run("weyl.moyal-scalar-product", scalar_product)
    s.run("weyl.delta-squared-zero", delta_squared)
    s.run("weyl.hodge-decomposition", hodge)
    s.run("weyl.delta-graded-derivation", graded_derivation)
    s.run("weyl.delta-as-inner-commutator", inner_commutator)
    s.run("weyl.filtration-compatibility", filtration)
    s.run("weyl.admissibility-preservation", admissibility)


# -- fedosov --------------------------------------------------------------------


def _suite_fedosov(s: _Session) -> None:
    ctx, rng = s.ctx, s.rng
    conn = s.problem.conn

    def curvature_symmetries():
        for i in range(ctx.dim):
            for j in range(ctx.dim):
                for k in range(ctx.dim):
                    for l in range(ctx.dim):
                        r_ijkl = curvature_component(conn, i, j, k, l)
                        if r_ijkl != curvature_component(conn, j, i, k, l):
                            return f"not symmetric in (i,j) at {(i, j, k, l)}"
                        if r_ijkl != -curvature_component(conn, i, j, l, k):
                            return f"not antisymmetric in (k,l) at {(i, j, k, l)}"
        return None

    def partial_squared():
        R_over_h = curvature_form(conn).times_h(-1) if not conn.is_flat() else None
        for _ in range(5):
            a = random_form(rng, ctx)
            lhs = partial(partial(a, conn), conn)
            rhs = -commutator(R_over_h, a) if R_over_h is not None else ctx.zero_form()
            if lhs != rhs:
                return f"partial^2 deviates on {a}"
        return None

    def r_normalization():
        r = s.sol.r
        if delta_inv(r):
            return "delta_inv(r) != 0"
        mindeg = r.min_total_degree()
        if mindeg is not None and mindeg < 3:
            return f"min total degree {mindeg} < 3"
        return None

    def r_equation():
        sol = s.sol
        r = sol.r
        rhs = sol.curvature + partial(r, conn)
        if r:
            rhs = rhs - moyal(r, r).times_h(-1)
        residue = (delta(r) - rhs).truncated(ctx.trunc - 2)
        if residue:
            return f"defining equation residue {residue}"
        return None

    def d_squared():
        for _ in range(5):
            a = random_form(rng, ctx)
            residue = s.sol.D(s.sol.D(a)).truncated(ctx.trunc - 2)
            if residue:
                return f"D^2 residue {residue} on {a}"
        return None

    def lift_sections():
        for _ in range(4):
            f = random_star(rng, ctx)
            lifted = s.sol.lift(f)  # lift itself checks D(a) ~ 0
            if to_star_function(core_part(lifted)) != f:
                return f"sigma(lift(f)) != f for {f}"
            again = s.sol.lift(to_star_function(core_part(lifted)))
            if again != lifted:
                return "lift(sigma(a)) != a on a flat section"
        return None

    def star_unital():
        one = StarFunction.from_poly(ctx, 1)
        for _ in range(4):
            f = random_star(rng, ctx)
            if s.sol.star(one, f) != f or s.sol.star(f, one) != f:
                return f"unit law fails for {f}"
        return None

    def star_center():
        c = StarFunction.from_poly(ctx, Fraction(rng.randint(1, 5), rng.randint(1, 5)))
        for _ in range(4):
            f = random_star(rng, ctx)
            cf = f.scale(c.classical())
            if s.sol.star(c, f) != cf or s.sol.star(f, c) != cf:
                return f"constants are not central on {f}"
        return None

    def first_order_bracket():
        for _ in range(6):
            f = random_poly(rng, ctx.dim, 3)
            g = random_poly(rng, ctx.dim, 3)
            c = s.sol.star_poly(f, g) - s.sol.star_poly(g, f)
            if c.coeff(0):
                return "commutator has an h^0 part"
            if c.coeff(1) != poisson(f, g, ctx):
                return f"h^1 coefficient differs from the bracket for {f}; {g}"
        return None

    def star_associativity():
        qmax = ctx.trunc // 2
        for _ in range(4):
            f, g, k = (StarFunction.from_poly(ctx, random_poly(rng, ctx.dim)) for _ in range(3))
            lhs = s.sol.star(s.sol.star(f, g), k).truncated_h(qmax)
            rhs = s.sol.star(f, s.sol.star(g, k)).truncated_h(qmax)
            if lhs != rhs:
                return f"associativity fails: {lhs} vs {rhs}"
        return None

    def poisson_jacobi():
        for _ in range(5):
            f, g, k = (random_poly(rng, ctx.dim, 3) for _ in range(3))
            total = (
                poisson(f, poisson(g, k, ctx), ctx)
                + poisson(g, poisson(k, f, ctx), ctx)
                + poisson(k, poisson(f, g, ctx), ctx)
            )
            if total:
                return f"Jacobi defect {total}"
        return None

    def truncation_stability():
        ctx_hi = ctx.with_trunc(ctx.trunc + 2)
        conn_hi = SymplecticConnection(ctx_hi, conn.gamma)
        sol_hi = FedosovSolution.solve(conn_hi)
        if dict(sol_hi.r.truncated(ctx.trunc).terms) != dict(s.sol.r.terms):
            return "r differs between truncation orders"
        for _ in range(3):
            f = random_poly(rng, ctx.dim)
            g = random_poly(rng, ctx.dim)
            low = s.sol.star_poly(f, g)
            high = sol_hi.star_poly(f, g).truncated_h(ctx.trunc // 2)
            if low.coeffs != high.coeffs:  # contexts differ, compare coefficients
                return f"star coefficients differ between orders for {f}; {g}"
        return None

    s.run("fedosov.curvature-symmetries", curvature_symmetries)
    s.run("fedosov.partial-squared-curvature", partial_squared)
    s.run("fedosov.r-normalization", r_normalization)
    s.run("fedosov.r-equation", r_equation)
    s.run("fedosov.d-squared-zero", d_squared)
    s.run("fedosov.flat-section-lift", lift_sections)
    s.run("fedosov.star-unital", star_unital)
    s.run("fedosov.star-center-constants", star_center)
    s.run("fedosov.first-order-bracket", first_order_bracket)
    s.run("fedosov.star-associativity", star_associativity)
    s.run("fedosov.poisson-jacobi", poisson_jacobi)
    s.run("fedosov.truncation-stability", truncation_stability)


# -- symfield -------------------------------------------------------------------


def _suite_symfield(s: _Session) -> None:
    ctx, rng = s.ctx, s.rng
    fields = list(s.problem.fields.values())
    if not fields:
        for name in (
            "symfield.lie-delta-commute",
            "symfield.lie-moyal-derivation",
            "symfield.partial-lie-commutator",
            "symfield.D-lie-commutator",
            "symfield.eta-closed",
            "symfield.eta-two-route",
            "symfield.u-primitive",
            "symfield.linearity",
            "symfield.eta-cocycle",
            "symfield.quantized-classical-limit",
            "symfield.quantized-derivation-law",
            "symfield.commutator-condition",
            "symfield.tau-antisymmetry",
            "symfield.tau-cyclic-closure",
        ):
            s.skip(name, "problem declares no fields")
        return
    sol = s.sol
    qmax = tau_trust_order(ctx.trunc)

    def lie_delta():
        for X in fields:
            for _ in range(3):
                a = random_form(rng, ctx)
                if lie_derivative(X, delta(a)) != delta(lie_derivative(X, a)):
                    return f"fails for field {X}"
        return None

    def lie_moyal():
        for X in fields:
            for _ in range(3):
                a, b = random_form(rng, ctx), random_form(rng, ctx)
                lhs = lie_derivative(X, moyal(a, b))
                rhs = moyal(lie_derivative(X, a), b) + moyal(a, lie_derivative(X, b))
                if lhs != rhs:
                    return f"Leibniz fails for field {X}"
        return None

    def partial_lie():
        from .vectorfield import transported_connection

        for X in fields:
            gx = transported_connection(X, s.problem.conn)
            gen = (gx.form() - s.problem.conn.form())
            gen_over_h = gen.times_h(-1) if gen else None
            for _ in range(3):
                a = random_form(rng, ctx)
                lhs = partial(lie_derivative(X, a), s.problem.conn) - lie_derivative(
                    X, partial(a, s.problem.conn)
                )
                rhs = commutator(gen_over_h, a) if gen_over_h is not None else ctx.zero_form()
                if lhs != rhs:
                    return f"fails for field {X}"
        return None

    def d_lie():
        for X in fields:
            eta = s.derivation(X).eta
            eta_over_h = eta.times_h(-1) if eta else None
            for _ in range(3):
                a = random_form(rng, ctx)
                lhs = sol.D(lie_derivative(X, a)) - lie_derivative(X, sol.D(a))
                rhs = commutator(eta_over_h, a) if eta_over_h is not None else ctx.zero_form()
                if (lhs - rhs).truncated(ctx.trunc - 2):
                    return f"fails for field {X}"
        return None

    def eta_closed():
        for X in fields:
            eta = s.derivation(X).eta
            if eta and sol.D(eta).truncated(ctx.trunc - 1):
                return f"D(eta) != 0 for field {X}"
        return None

    def eta_two_route():
        for X in fields:
            if eta_form(X, sol, check=False) != eta_form_via_connection(X, sol):
                return f"routes disagree for field {X}"
        return None

    def u_primitive():
        for X in fields:
            qd = s.derivation(X)
            if not qd.eta:
                if qd.u:
                    return f"eta = 0 but u != 0 for {X}"
                continue
            residue = (sol.D(qd.u) + qd.eta.times_h(-1)).truncated(ctx.trunc - 2)
            if residue:
                return f"D(u) != -eta/h for field {X}"
        return None

    def linearity():
        if len(fields) < 2:
            X, Y = fields[0], fields[0]
        else:
            X, Y = fields[0], fields[1]
        total = X + Y
        if eta_form(total, sol, check=False) != eta_form(X, sol, check=False) + eta_form(Y, sol, check=False):
            return "eta is not additive"
        if solve_u(total, sol, check=False) != solve_u(X, sol, check=False) + solve_u(Y, sol, check=False):
            return "u is not additive"
        return None

    def eta_cocycle():
        for X, Y in itertools.combinations(fields, 2):
            lhs = lie_derivative(X, eta_form(Y, sol, check=False)) - lie_derivative(
                Y, eta_form(X, sol, check=False)
            )
            rhs = eta_form(X.bracket(Y), sol, check=False)
            if lhs != rhs:
                return f"cocycle fails for {X}; {Y}"
        return None

    def classical_limit():
        for X in fields:
            qd = s.derivation(X)
            for _ in range(3):
                f = random_poly(rng, ctx.dim)
                if qd.apply_poly(f).classical() != X.apply_to(f):
                    return f"h^0 part differs from X f for field {X}"
        return None

    def derivation_law():
        qtop = ctx.trunc // 2
        for X in fields:
            qd = s.derivation(X)
            for _ in range(2):
                f = StarFunction.from_poly(ctx, random_poly(rng, ctx.dim))
                g = StarFunction.from_poly(ctx, random_poly(rng, ctx.dim))
                lhs = qd.apply(sol.star(f, g)).truncated_h(qtop)
                rhs = (sol.star(qd.apply(f), g) + sol.star(f, qd.apply(g))).truncated_h(qtop)
                if lhs != rhs:
                    return f"Leibniz fails for field {X}"
        return None

    def commutator_condition():
        for X, Y in itertools.combinations(fields, 2):
            qX, qY = s.derivation(X), s.derivation(Y)
            qB = s.derivation(X.bracket(Y))
            t = tau(X, Y, sol, uX=qX.u, uY=qY.u)
            for _ in range(2):
                f = StarFunction.from_poly(ctx, random_poly(rng, ctx.dim))
                lhs = (qX.apply(qY.apply(f)) - qY.apply(qX.apply(f)) - qB.apply(f)).truncated_h(qmax)
                rhs = (sol.star(t, f) - sol.star(f, t)).truncated_h(qmax)
                if lhs != rhs:
                    return f"fails for {X}; {Y}"
        return None

    def tau_antisymmetry():
        for X, Y in itertools.combinations(fields, 2):
            if tau(X, Y, sol) + tau(Y, X, sol):
                return f"tau(X, Y) + tau(Y, X) != 0 for {X}; {Y}"
            if tau(X, X, sol):
                return f"tau(X, X) != 0 for {X}"
        return None

    def tau_cyclic():
        if len(fields) < 3:
            return None
        for X, Y, Z in itertools.combinations(fields, 3):
            lhs = (
                tau(X.bracket(Y), Z, sol)
                + tau(Y.bracket(Z), X, sol)
                + tau(Z.bracket(X), Y, sol)
            ).truncated_h(qmax)
            rhs = (
                s.derivation(X).apply(tau(Y, Z, sol))
                + s.derivation(Y).apply(tau(Z, X, sol))
                + s.derivation(Z).apply(tau(X, Y, sol))
            ).truncated_h(qmax)
            if lhs != rhs:
                return f"closure fails for {X}; {Y}; {Z}"
        return None

    s.run("symfield.lie-delta-commute", lie_delta)
    s.run("symfield.lie-moyal-derivation", lie_moyal)
    s.run("symfield.partial-lie-commutator", partial_lie)
    s.run("symfield.D-lie-commutator", d_lie)
    s.run("symfield.eta-closed", eta_closed)
    s.run("symfield.eta-two-route", eta_two_route)
    s.run("symfield.u-primitive", u_primitive)
    s.run("symfield.linearity", linearity)
    s.run("symfield.eta-cocycle", eta_cocycle)
    s.run("symfield.quantized-classical-limit", classical_limit)
    s.run("symfield.quantized-derivation-law", derivation_law)
    s.run("symfield.commutator-condition", commutator_condition)
    s.run("symfield.tau-antisymmetry", tau_antisymmetry)
    s.run("symfield.tau-cyclic-closure", tau_cyclic)


# -- liecross -------------------------------------------------------------------


def _suite_liecross(s: _Session) -> None:
    ctx, rng = s.ctx, s.rng
    names = (
        "liecross.pair-bracket-antisymmetry",
        "liecross.pair-bracket-jacobi",
        "liecross.cross-associativity",
        "liecross.rewrite-confluence",
        "liecross.classical-limit",
        "liecross.star-embedding",
        "liecross.unit-element",
    )
    if s.problem.action is None:
        for name in names:
            s.skip(name, "problem declares no Lie algebra action")
        return
    algebra = s.problem.cross()
    m = algebra.action.algebra.dim
    words = [()] + [(i,) for i in range(m)] + [
        (i, j) for i in range(m) for j in range(i, m)
    ]

    def rand_pair():
        coords = [Fraction(rng.randint(-2, 2)) for _ in range(m)]
        return algebra.pair(random_poly(rng, ctx.dim), coords)

    def pair_antisym():
        for _ in range(4):
            u, v = rand_pair(), rand_pair()
            uv, vu = algebra.pair_bracket(u, v), algebra.pair_bracket(v, u)
            if (uv.a + vu.a) or any(a + b for a, b in zip(uv.x, vu.x)):
                return "bracket is not antisymmetric"
        return None

    def pair_jacobi():
        for _ in range(4):
            u, v, w = rand_pair(), rand_pair(), rand_pair()
            parts = [
                algebra.pair_bracket(algebra.pair_bracket(u, v), w),
                algebra.pair_bracket(algebra.pair_bracket(v, w), u),
                algebra.pair_bracket(algebra.pair_bracket(w, u), v),
            ]
            total_a = parts[0].a + parts[1].a + parts[2].a
            total_x = [sum(p.x[i] for p in parts) for i in range(m)]
            if total_a or any(total_x):
                return "Jacobi identity fails"
        return None

    def associativity():
        sample = [algebra.monomial(w) for w in words]
        sample.append(algebra.monomial(words[rng.randrange(len(words))], random_poly(rng, ctx.dim)))
        for _ in range(12):
            u, v, w = (sample[rng.randrange(len(sample))] for _ in range(3))
            if algebra.mul(algebra.mul(u, v), w) != algebra.mul(u, algebra.mul(v, w)):
                return "associativity fails"
        return None

    def confluence():
        for wa, wb in itertools.product(words, repeat=2):
            u = algebra.monomial(wa, random_poly(rng, ctx.dim))
            v = algebra.monomial(wb)
            if algebra.mul(u, v, strategy="leftmost") != algebra.mul(u, v, strategy="rightmost"):
                return f"strategies disagree on {wa} x {wb}"
        # explicit diamonds on descending words with two overlapping redexes
        for word in itertools.product(range(m), repeat=3):
            items = tuple(word)
            redexes = algebra._find_redexes(items)
            if len(redexes) < 2:
                continue
            base = algebra.normalize(items, first_redex=redexes[0])
            for p in redexes[1:]:
                if algebra.normalize(items, first_redex=p) != base:
                    return f"diamond fails on {items}"
        return None

    def classical():
        action = s.problem.action
        for _ in range(6):
            wa = words[rng.randrange(len(words))]
            wb = words[rng.randrange(len(words))]
            u = algebra.monomial(wa, random_poly(rng, ctx.dim))
            v = algebra.monomial(wb, random_poly(rng, ctx.dim))
            got = algebra.mul(u, v).classical_limit().classical_terms()
            want = classical_cross_mul(u.classical_terms(), v.classical_terms(), action)
            if got != want:
                return f"classical limit deviates on {wa} x {wb}"
        return None

    def embedding():
        for _ in range(4):
            f = random_star(rng, ctx).truncated_h(algebra.h_order)
            g = random_star(rng, ctx).truncated_h(algebra.h_order)
            lhs = algebra.mul(algebra.embed(f), algebra.embed(g))
            rhs = algebra.embed(algebra.star(f, g))
            if lhs != rhs:
                return "embedding is not multiplicative"
        return None

    def unit():
        one = algebra.one()
        for w in words:
            u = algebra.monomial(w, random_poly(rng, ctx.dim))
            if algebra.mul(one, u) != u or algebra.mul(u, one) != u:
                return f"unit law fails on {w}"
        return None

    s.run("liecross.pair-bracket-antisymmetry", pair_antisym)
    s.run("liecross.pair-bracket-jacobi", pair_jacobi)
    s.run("liecross.cross-associativity", associativity)
    s.run("liecross.rewrite-confluence", confluence)
    s.run("liecross.classical-limit", classical)
    s.run("liecross.star-embedding", embedding)
    s.run("liecross.unit-element", unit)
