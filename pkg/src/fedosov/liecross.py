"""Lie algebra actions by symplectic vector fields and the deformed cross
product algebra.

A finite-dimensional Lie algebra acts through validated symplectic vector
fields; the cross product algebra is presented by generators and relations in
a PBW basis (words of non-decreasing basis indices with star-function
coefficients on the left).  Products are computed by a rewriting system:

    e_j e_i  ->  e_i e_j + sum_k c^k_ji e_k + tau(F_j, F_i)     (j > i)
    e_i f    ->  Xt_i(f) + f e_i                                 (f a function)
    f g      ->  f (*) g                                         (star product)

where Xt_i is the quantized derivation of the i-th basis field and tau is the
bracket-defect pairing.  Confluence of the system (and hence associativity of
the product) holds exactly through the h order at which tau is trusted, so
all coefficients in this module are truncated to that order; requesting more
is an error rather than a silent truncation.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from .poly import Poly, Scalar
from .starprod import FedosovSolution, StarFunction
from .vectorfield import QuantizedDerivation, SymplecticVectorField, tau, tau_trust_order
from .weyl import ChartContext, ContextMismatchError

Word = tuple[int, ...]


class LieStructureError(ValueError):
    """Structure constants violate antisymmetry or the Jacobi identity."""


class ActionError(ValueError):
    """A basis-field assignment is not a Lie algebra homomorphism."""


class LieAlgebra:
    """A Lie algebra presented by basis names and structure constants.

    ``c[(i, j, k)]`` is the e_k coefficient of [e_i, e_j].  Antisymmetry and
    the Jacobi identity are validated on construction; missing (j, i) entries
    are completed by antisymmetry, present ones are checked.
    """

    __slots__ = ("names", "dim", "c")

    def __init__(self, names: Iterable[str], constants: Mapping[tuple[int, int, int], Scalar]):
        names = tuple(names)
        m = len(names)
        if m == 0:
            raise LieStructureError("a Lie algebra needs at least one basis element")
        if len(set(names)) != m:
            raise LieStructureError("duplicate basis names")
        full: dict[tuple[int, int, int], Fraction] = {}
        for (i, j, k), v in constants.items():
            if not (0 <= i < m and 0 <= j < m and 0 <= k < m):
                raise LieStructureError(f"structure constant index {(i, j, k)} out of range")
            v = Fraction(v)
            if not v:
                continue
            if i == j:
                raise LieStructureError(
                    f"antisymmetry violated: [{names[i]}, {names[i]}] must vanish"
                )
            full[(i, j, k)] = v
        for (i, j, k), v in list(full.items()):
            mirror = full.get((j, i, k))
            if mirror is None:
                full[(j, i, k)] = -v
            elif mirror != -v:
                raise LieStructureError(
                    f"antisymmetry violated between c^{names[k]}_({names[i]},{names[j]}) "
                    f"and c^{names[k]}_({names[j]},{names[i]})"
                )
        self.names = names
        self.dim = m
        self.c = full
        self._check_jacobi()

    def _check_jacobi(self) -> None:
        m = self.dim
        for i in range(m):
            for j in range(m):
                for k in range(m):
                    for l in range(m):
                        total = Fraction(0)
                        for p in range(m):
                            total += self.constant(i, j, p) * self.constant(p, k, l)
                            total += self.constant(j, k, p) * self.constant(p, i, l)
                            total += self.constant(k, i, p) * self.constant(p, j, l)
                        if total:
                            raise LieStructureError(
                                f"Jacobi identity fails on "
                                f"({self.names[i]}, {self.names[j]}, {self.names[k]}) "
                                f"at {self.names[l]}: defect {total}"
                            )

    @classmethod
    def abelian(cls, names: Iterable[str]) -> LieAlgebra:
        return cls(names, {})

    def constant(self, i: int, j: int, k: int) -> Fraction:
        return self.c.get((i, j, k), Fraction(0))

    def bracket_coords(self, x: tuple[Fraction, ...], y: tuple[Fraction, ...]) -> tuple[Fraction, ...]:
        out = [Fraction(0)] * self.dim
        for (i, j, k), v in self.c.items():
            if x[i] and y[j]:
                out[k] += v * x[i] * y[j]
        return tuple(out)

    def index_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown basis name {name!r}") from None


class LieAction:
    """A Lie algebra homomorphism into symplectic vector fields, validated."""

    __slots__ = ("algebra", "fields", "ctx")

    def __init__(self, algebra: LieAlgebra, fields: Iterable[SymplecticVectorField]):
        fields = tuple(fields)
        if len(fields) != algebra.dim:
            raise ActionError(
                f"expected {algebra.dim} basis fields, got {len(fields)}"
            )
        ctx = fields[0].ctx
        for f in fields:
            if f.ctx != ctx:
                raise ContextMismatchError("basis fields use different charts")
        for i in range(algebra.dim):
            for j in range(i + 1, algebra.dim):
                lhs = fields[i].bracket(fields[j])
                rhs = SymplecticVectorField.zero(ctx)
                for k in range(algebra.dim):
                    v = algebra.constant(i, j, k)
                    if v:
                        rhs = rhs + fields[k].scale(v)
                if lhs != rhs:
                    raise ActionError(
                        f"not a homomorphism: [{algebra.names[i]}, {algebra.names[j]}] "
                        f"maps to {lhs}, structure constants give {rhs}"
                    )
        self.algebra = algebra
        self.fields = fields
        self.ctx = ctx


class CrossElement:
    """An element of the deformed cross product in PBW normal form.

    ``terms`` maps non-decreasing index words to star-function coefficients
    (standing to the left of the word).  Elements are tied to the algebra that
    produced them; mixing elements of different algebras is rejected.
    """

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: CrossAlgebra, terms: Mapping[Word, StarFunction]):
        stored: dict[Word, StarFunction] = {}
        for word, coeff in terms.items():
            if any(word[i] > word[i + 1] for i in range(len(word) - 1)):
                raise ValueError(f"word {word} is not in normal order")
            coeff = coeff.truncated_h(algebra.h_order)
            if coeff:
                stored[word] = coeff
        self.algebra = algebra
        self.terms = stored

    def _check(self, other: CrossElement) -> None:
        if self.algebra is not other.algebra:
            raise ValueError("cross elements belong to different algebras")

    def __add__(self, other: CrossElement) -> CrossElement:
        self._check(other)
        acc = dict(self.terms)
        for w, c in other.terms.items():
            total = acc.get(w)
            total = c if total is None else total + c
            if total:
                acc[w] = total
            else:
                acc.pop(w, None)
        return CrossElement(self.algebra, acc)

    def __sub__(self, other: CrossElement) -> CrossElement:
        return self + (-other)

    def __neg__(self) -> CrossElement:
        return CrossElement(self.algebra, {w: -c for w, c in self.terms.items()})

    def __mul__(self, other: CrossElement) -> CrossElement:
        return self.algebra.mul(self, other)

    def scale(self, value: Poly | Scalar) -> CrossElement:
        return CrossElement(self.algebra, {w: c.scale(value) for w, c in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CrossElement):
            return NotImplemented
        return self.algebra is other.algebra and self.terms == other.terms

    def classical_limit(self) -> CrossElement:
        """Reduce every coefficient mod h (keep only the h^0 part)."""
        return CrossElement(
            self.algebra, {w: c.truncated_h(0) for w, c in self.terms.items()}
        )

    def classical_terms(self) -> dict[Word, Poly]:
        """The h^0 coefficients as plain polynomials (for the undeformed product)."""
        out = {}
        for w, c in self.terms.items():
            p = c.classical()
            if p:
                out[w] = p
        return out

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        names = self.algebra.action.algebra.names
        one = StarFunction.from_poly(self.algebra.ctx, 1)
        pieces = []
        for word in sorted(self.terms, key=lambda w: (len(w), w)):
            coeff = self.terms[word]
            gens = "*".join(names[i] for i in word)
            if not gens:
                pieces.append(str(coeff))
                continue
            if coeff == one:
                pieces.append(gens)
                continue
            ctext = str(coeff)
            if len(coeff.coeffs) > 1 or (coeff.coeffs and len(next(iter(coeff.coeffs.values())).terms) > 1):
                ctext = f"({coeff})"
            pieces.append(f"{ctext}*{gens}")
        return " + ".join(pieces)

    def __repr__(self) -> str:
        return f"CrossElement({self})"


class CrossPairElement:
    """An element (function part, Lie coordinates) of the extension bracket."""

    __slots__ = ("a", "x")

    def __init__(self, a: StarFunction, x: tuple[Fraction, ...]):
        self.a = a
        self.x = tuple(Fraction(v) for v in x)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CrossPairElement):
            return NotImplemented
        return self.a == other.a and self.x == other.x

    def __str__(self) -> str:
        return f"({self.a}, {self.x})"


class CrossAlgebra:
    """The deformed cross product of a Lie action with a Fedosov solution.

    All star-function coefficients are truncated to the h order at which tau
    is trusted: ``h_order = (N - 2) // 2`` for truncation order N.  Basis
    derivations and tau values are computed once and reused.
    """

    __slots__ = ("action", "sol", "ctx", "h_order", "derivations", "_tau")

    def __init__(self, action: LieAction, sol: FedosovSolution, h_order: int | None = None):
        if action.ctx != sol.ctx:
            raise ContextMismatchError("action and solution use different charts")
        limit = tau_trust_order(sol.trunc)
        if h_order is None:
            h_order = limit
        elif h_order > limit:
            raise ValueError(
                f"requested h order {h_order} exceeds the solution's contract {limit}"
            )
        self.action = action
        self.sol = sol
        self.ctx = sol.ctx
        self.h_order = h_order
        self.derivations = tuple(
            QuantizedDerivation.build(f, sol) for f in action.fields
        )
        m = action.algebra.dim
        taus: dict[tuple[int, int], StarFunction] = {}
        for i in range(m):
            for j in range(i + 1, m):
                taus[(i, j)] = tau(
                    action.fields[i],
                    action.fields[j],
                    sol,
                    uX=self.derivations[i].u,
                    uY=self.derivations[j].u,
                ).truncated_h(h_order)
        self._tau = taus

    # -- constructors --------------------------------------------------------

    def zero(self) -> CrossElement:
        return CrossElement(self, {})

    def one(self) -> CrossElement:
        return CrossElement(self, {(): StarFunction.from_poly(self.ctx, 1)})

    def embed(self, f: StarFunction | Poly | Scalar) -> CrossElement:
        if not isinstance(f, StarFunction):
            f = StarFunction.from_poly(self.ctx, f)
        return CrossElement(self, {(): f})

    def gen(self, index: int) -> CrossElement:
        if not 0 <= index < self.action.algebra.dim:
            raise ValueError(f"generator index {index} out of range")
        return CrossElement(self, {(index,): StarFunction.from_poly(self.ctx, 1)})

    def monomial(self, word: Word, coeff: StarFunction | Poly | Scalar = 1) -> CrossElement:
        if not isinstance(coeff, StarFunction):
            coeff = StarFunction.from_poly(self.ctx, coeff)
        return CrossElement(self, {tuple(word): coeff})

    def tau_value(self, i: int, j: int) -> StarFunction:
        """tau of the i-th and j-th basis fields (antisymmetric in (i, j))."""
        if i == j:
            return StarFunction(self.ctx, {})
        if i < j:
            return self._tau[(i, j)]
        return -self._tau[(j, i)]

    def star(self, f: StarFunction, g: StarFunction) -> StarFunction:
        return self.sol.star(f, g).truncated_h(self.h_order)

    def derive(self, index: int, f: StarFunction) -> StarFunction:
        return self.derivations[index].apply(f).truncated_h(self.h_order)

    # -- the rewriting engine --------------------------------------------------

    def _find_redexes(self, items: tuple) -> list[int]:
        """Positions where an adjacent pair is reducible.

        A pair is reducible when it is (function, function), (generator,
        function), or a strictly descending generator pair.  A terminal item
        sequence is an optional leading function followed by a non-decreasing
        generator word.
        """
        out = []
        for p in range(len(items) - 1):
            left, right = items[p], items[p + 1]
            lf = isinstance(left, StarFunction)
            rf = isinstance(right, StarFunction)
            if lf and rf:
                out.append(p)
            elif not lf and rf:
                out.append(p)
            elif not lf and not rf and left > right:
                out.append(p)
        return out

    def _rewrite(self, items: tuple, p: int) -> list[tuple]:
        left, right = items[p], items[p + 1]
        head, tail = items[:p], items[p + 2 :]
        if isinstance(left, StarFunction) and isinstance(right, StarFunction):
            return [head + (self.star(left, right),) + tail]
        if isinstance(right, StarFunction):
            # generator times function: e_i f = Xt_i(f) + f e_i
            moved = self.derive(left, right)
            branches = [head + (right, left) + tail]
            if moved:
                branches.append(head + (moved,) + tail)
            return branches
        # descending generator pair: e_j e_i = e_i e_j + sum c^k e_k + tau
        j, i = left, right
        alg = self.action.algebra
        branches = [head + (i, j) + tail]
        for k in range(alg.dim):
            v = alg.constant(j, i, k)
            if v:
                branches.append(head + (StarFunction.from_poly(self.ctx, v), k) + tail)
        t = self.tau_value(j, i)
        if t:
            branches.append(head + (t,) + tail)
        return branches

    def normalize(self, items: Iterable, strategy: str = "leftmost",
                  first_redex: int | None = None) -> CrossElement:
        """Rewrite an item sequence (generators and functions) to normal form.

        ``strategy`` picks which redex each step reduces; the result is
        independent of the choice (confluence), which the test suite checks.
        ``first_redex`` forces the position of the first reduction only.
        """
        if strategy not in ("leftmost", "rightmost"):
            raise ValueError(f"unknown strategy {strategy!r}")
        acc: dict[Word, StarFunction] = {}
        stack: list[tuple] = []
        start = tuple(items)
        if first_redex is not None:
            if first_redex not in self._find_redexes(start):
                raise ValueError(f"position {first_redex} is not a redex of {start}")
            stack.extend(self._rewrite(start, first_redex))
        else:
            stack.append(start)
        while stack:
            current = stack.pop()
            redexes = self._find_redexes(current)
            if not redexes:
                if current and isinstance(current[0], StarFunction):
                    coeff, word = current[0], current[1:]
                else:
                    coeff, word = StarFunction.from_poly(self.ctx, 1), current
                word = tuple(word)
                prev = acc.get(word)
                total = coeff if prev is None else prev + coeff
                if total:
                    acc[word] = total
                else:
                    acc.pop(word, None)
                continue
            p = redexes[0] if strategy == "leftmost" else redexes[-1]
            stack.extend(self._rewrite(current, p))
        return CrossElement(self, acc)

    def mul(self, u: CrossElement, v: CrossElement, strategy: str = "leftmost") -> CrossElement:
        """The product, term by term through the rewriting system."""
        u._check(v)
        if u.algebra is not self:
            raise ValueError("elements do not belong to this algebra")
        total = self.zero()
        for w1, f1 in u.terms.items():
            for w2, f2 in v.terms.items():
                items = (f1,) + w1 + (f2,) + w2
                total = total + self.normalize(items, strategy=strategy)
        return total

    # -- the extension bracket -------------------------------------------------

    def pair(self, a: StarFunction | Poly | Scalar, x: Iterable[Scalar]) -> CrossPairElement:
        if not isinstance(a, StarFunction):
            a = StarFunction.from_poly(self.ctx, a)
        coords = tuple(Fraction(v) for v in x)
        if len(coords) != self.action.algebra.dim:
            raise ValueError("wrong number of Lie coordinates")
        return CrossPairElement(a.truncated_h(self.h_order), coords)

    def rho(self, x: tuple[Fraction, ...], f: StarFunction) -> StarFunction:
        """The quantized action of the Lie element with coordinates x."""
        total = StarFunction(self.ctx, {})
        for i, v in enumerate(x):
            if v:
                total = total + self.derive(i, f).scale(v)
        return total

    def tau_pair(self, x: tuple[Fraction, ...], y: tuple[Fraction, ...]) -> StarFunction:
        total = StarFunction(self.ctx, {})
        for i, xi in enumerate(x):
            if not xi:
                continue
            for j, yj in enumerate(y):
                if not yj or i == j:
                    continue
                total = total + self.tau_value(i, j).scale(xi * yj)
        return total

    def pair_bracket(self, u: CrossPairElement, v: CrossPairElement) -> CrossPairElement:
        """[(a, x), (b, y)] = ([a, b] + rho_x(b) - rho_y(a) + tau(x, y), [x, y])."""
        a, x = u.a, u.x
        b, y = v.a, v.x
        func = self.star(a, b) - self.star(b, a)
        func = func + self.rho(x, b) - self.rho(y, a) + self.tau_pair(x, y)
        coords = self.action.algebra.bracket_coords(x, y)
        return CrossPairElement(func.truncated_h(self.h_order), coords)


# -- the undeformed cross product (independent classical oracle) ---------------


def classical_cross_mul(
    u: Mapping[Word, Poly], v: Mapping[Word, Poly], action: LieAction
) -> dict[Word, Poly]:
    """The h = 0 cross product: pointwise coefficients, classical action,
    structure-constant straightening only.  Kept independent of the deformed
    engine so the classical limit can be checked against it.
    """
    alg = action.algebra
    dim = action.ctx.dim

    def mono_mul(word: Word, f: Poly) -> dict[Word, Poly]:
        # word * f as sum of (word', poly) with functions moved to the left
        if not word:
            return {(): f}
        head, last = word[:-1], word[-1]
        out: dict[Word, Poly] = {}
        moved = action.fields[last].apply_to(f)
        if moved:
            for w, p in mono_mul(head, moved).items():
                _acc_poly(out, w, p)
        for w, p in mono_mul(head, f).items():
            _acc_poly(out, w + (last,), p)
        return out

    def straighten(word: Word) -> dict[Word, Fraction]:
        for p in range(len(word) - 1):
            if word[p] > word[p + 1]:
                j, i = word[p], word[p + 1]
                head, tail = word[:p], word[p + 2 :]
                out: dict[Word, Fraction] = {}
                for w, c in straighten(head + (i, j) + tail).items():
                    out[w] = out.get(w, Fraction(0)) + c
                for k in range(alg.dim):
                    v = alg.constant(j, i, k)
                    if v:
                        for w, c in straighten(head + (k,) + tail).items():
                            out[w] = out.get(w, Fraction(0)) + v * c
                return {w: c for w, c in out.items() if c}
        return {word: Fraction(1)}

    total: dict[Word, Poly] = {}
    for w1, f1 in u.items():
        for w2, f2 in v.items():
            for mid_word, mid_poly in mono_mul(w1, f2).items():
                for word, c in straighten(mid_word + w2).items():
                    _acc_poly(total, word, f1 * mid_poly * c)
    return {w: p for w, p in total.items() if p}


def _acc_poly(acc: dict[Word, Poly], word: Word, p: Poly) -> None:
    if not p:
        return
    prev = acc.get(word)
    total = p if prev is None else prev + p
    if total:
        acc[word] = total
    else:
        acc.pop(word, None)
