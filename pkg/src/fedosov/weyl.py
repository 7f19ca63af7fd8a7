"""Truncated formal Weyl algebra forms over a Darboux chart.

An element is a finite sum of terms

    p(x) * y^alpha * dx^S * h^k

where ``p`` is a :class:`~fedosov.poly.Poly` in the chart coordinates,
``alpha`` is a multi-index over the fiber variables y1..y2n, ``S`` is a
strictly increasing tuple of dx indices (the wedge factor, with any reordering
sign absorbed into ``p``), and ``k`` is an integer power of the formal
parameter h.  Negative h powers are allowed subject to the admissibility rule

    total degree := |alpha| + 2*k  >=  0,

and every stored term has total degree <= the chart's truncation order N.
All computations are exact modulo the ideal of terms of total degree > N.
The x-degree of the coefficient polynomial does not count toward the total
degree.

The fiberwise product combines the Moyal contraction sum on the y variables
with the wedge product on the dx factors; it is evaluated by iterating the
single-contraction bidifferential step, which is exact and terminates because
each step removes one y from each factor.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .poly import Poly, Scalar

YExp = tuple[int, ...]
DxSet = tuple[int, ...]
TermKey = tuple[YExp, DxSet, int]


class AdmissibilityError(ValueError):
    """A term would violate the nonnegative-total-degree rule."""


class ContextMismatchError(ValueError):
    """Operands belong to different chart contexts."""


def _invert(matrix: list[list[Fraction]]) -> list[list[Fraction]]:
    """Exact inverse of a square matrix of Fractions (Gauss-Jordan)."""
    n = len(matrix)
    aug = [row[:] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col]), None)
        if pivot is None:
            raise ValueError("matrix is singular")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = Fraction(1) / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                factor = aug[r][col]
                aug[r] = [v - factor * w for v, w in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


class ChartContext:
    """A Darboux chart R^2n with a constant symplectic matrix and a truncation order.

    ``omega[i][j]`` is the symplectic pairing of the i-th and j-th coordinate
    directions (0-based); ``omega_inv`` is its exact inverse.  The default is
    the standard block form with omega[i][n+i] = 1.
    """

    __slots__ = ("dim", "n", "trunc", "omega", "omega_inv", "_inv_pairs")

    def __init__(self, omega: list[list[Scalar]], trunc: int):
        dim = len(omega)
        if dim % 2 != 0 or dim == 0:
            raise ValueError(f"chart dimension must be a positive even number, got {dim}")
        if trunc < 0:
            raise ValueError("truncation order must be nonnegative")
        rows = [[Fraction(v) for v in row] for row in omega]
        if any(len(row) != dim for row in rows):
            raise ValueError("omega must be square")
        for i in range(dim):
            for j in range(dim):
                if rows[i][j] != -rows[j][i]:
                    raise ValueError(f"omega is not antisymmetric at ({i}, {j})")
        self.dim = dim
        self.n = dim // 2
        self.trunc = trunc
        self.omega = tuple(tuple(row) for row in rows)
        inv = _invert(rows)
        self.omega_inv = tuple(tuple(row) for row in inv)
        # nonzero entries of the inverse, precomputed for the contraction loop
        self._inv_pairs = tuple(
            (i, j, inv[i][j]) for i in range(dim) for j in range(dim) if inv[i][j]
        )

    @classmethod
    def standard(cls, n: int, trunc: int) -> ChartContext:
        dim = 2 * n
        omega = [[Fraction(0)] * dim for _ in range(dim)]
        for i in range(n):
            omega[i][n + i] = Fraction(1)
            omega[n + i][i] = Fraction(-1)
        return cls(omega, trunc)

    def with_trunc(self, trunc: int) -> ChartContext:
        return ChartContext([list(row) for row in self.omega], trunc)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ChartContext):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.trunc == other.trunc
            and self.omega == other.omega
        )

    def __hash__(self) -> int:
        return hash((self.dim, self.trunc, self.omega))

    def __repr__(self) -> str:
        return f"ChartContext(dim={self.dim}, trunc={self.trunc})"

    # -- convenience constructors -------------------------------------------

    def poly_const(self, value: Scalar) -> Poly:
        return Poly.const(self.dim, value)

    def poly_var(self, index: int) -> Poly:
        return Poly.variable(self.dim, index)

    def zero_form(self) -> WeylForm:
        return WeylForm(self, {})

    def scalar(self, value: Poly | Scalar) -> WeylForm:
        p = value if isinstance(value, Poly) else self.poly_const(value)
        return WeylForm(self, {((0,) * self.dim, (), 0): p})

    def y(self, index: int) -> WeylForm:
        exp = [0] * self.dim
        exp[index] = 1
        return WeylForm(self, {(tuple(exp), (), 0): self.poly_const(1)})

    def dx(self, index: int) -> WeylForm:
        if not 0 <= index < self.dim:
            raise ValueError(f"dx index {index} out of range")
        return WeylForm(self, {((0,) * self.dim, (index,), 0): self.poly_const(1)})

    def h(self, power: int = 1) -> WeylForm:
        return WeylForm(self, {((0,) * self.dim, (), power): self.poly_const(1)})

    def form(self, entries: Iterable[tuple[Poly | Scalar, Iterable[int], Iterable[int], int]]) -> WeylForm:
        """Build a form from (coefficient, y-indices, dx-indices, h-power) items.

        The y-indices list one index per y factor (repetitions allowed); the
        dx-indices may come in any order and the wedge reordering sign is
        absorbed into the coefficient.  A repeated dx index kills the term.
        """
        acc: dict[TermKey, Poly] = {}
        for coeff, ys, dxs, hpow in entries:
            p = coeff if isinstance(coeff, Poly) else self.poly_const(coeff)
            exp = [0] * self.dim
            for i in ys:
                exp[i] += 1
            sorted_dx = sort_sign(tuple(dxs))
            if sorted_dx is None:
                continue
            sign, dxset = sorted_dx
            if sign < 0:
                p = -p
            _accumulate(acc, (tuple(exp), dxset, hpow), p)
        return WeylForm(self, acc)


def sort_sign(indices: tuple[int, ...]) -> tuple[int, DxSet] | None:
    """Sort wedge indices, returning (parity sign, sorted tuple); None if repeated."""
    if len(set(indices)) != len(indices):
        return None
    inversions = 0
    n = len(indices)
    for a in range(n):
        for b in range(a + 1, n):
            if indices[a] > indices[b]:
                inversions += 1
    return (-1 if inversions % 2 else 1, tuple(sorted(indices)))


def wedge_merge(left: DxSet, right: DxSet) -> tuple[int, DxSet] | None:
    """Sign and index set of dx^left wedge dx^right; None if they collide."""
    if set(left) & set(right):
        return None
    return sort_sign(left + right)


def wedge_insert(index: int, dxset: DxSet) -> tuple[int, DxSet] | None:
    """Sign and index set of dx^index wedge dx^dxset."""
    if index in dxset:
        return None
    before = sum(1 for s in dxset if s < index)
    sign = -1 if before % 2 else 1
    return (sign, tuple(sorted(dxset + (index,))))


def _accumulate(acc: dict[TermKey, Poly], key: TermKey, value: Poly) -> None:
    if not value:
        return
    if key in acc:
        total = acc[key] + value
        if total:
            acc[key] = total
        else:
            del acc[key]
    else:
        acc[key] = value


@dataclass(frozen=True)
class FormDegrees:
    """Observable degree data of a form."""

    total_degree_min: int | None  # None for the zero form
    antisym_degrees: frozenset[int]


class WeylForm:
    """Canonical truncated element of the Weyl algebra tensor forms.

    Immutable after construction.  The constructor drops terms above the
    chart's truncation order and rejects inadmissible terms (negative total
    degree); cancellation happens before the admissibility check, so operator
    identities whose offending contributions cancel exactly are representable.
    """

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: ChartContext, terms: Mapping[TermKey, Poly]):
        stored: dict[TermKey, Poly] = {}
        for (yexp, dxset, hpow), p in terms.items():
            if not p:
                continue
            degree = sum(yexp) + 2 * hpow
            if degree < 0:
                raise AdmissibilityError(
                    f"term y^{yexp} dx^{dxset} h^{hpow} has total degree {degree} < 0"
                )
            if degree > ctx.trunc:
                continue
            stored[(yexp, dxset, hpow)] = p
        self.ctx = ctx
        self.terms = stored

    # -- structural queries -------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def min_total_degree(self) -> int | None:
        if not self.terms:
            return None
        return min(sum(y) + 2 * h for (y, _, h) in self.terms)

    def degrees(self) -> FormDegrees:
        return FormDegrees(
            self.min_total_degree(),
            frozenset(len(s) for (_, s, _) in self.terms),
        )

    def hpow_range(self) -> tuple[int, int] | None:
        """(min, max) h power over stored terms; None for the zero form."""
        if not self.terms:
            return None
        powers = [h for (_, _, h) in self.terms]
        return (min(powers), max(powers))

    def antisym_component(self, degree: int) -> WeylForm:
        return WeylForm(
            self.ctx,
            {k: p for k, p in self.terms.items() if len(k[1]) == degree},
        )

    def antisym_split(self) -> Iterator[tuple[int, WeylForm]]:
        present = sorted({len(s) for (_, s, _) in self.terms})
        for k in present:
            yield k, self.antisym_component(k)

    def _check_ctx(self, other: WeylForm) -> None:
        if self.ctx != other.ctx:
            raise ContextMismatchError("forms belong to different chart contexts")

    # -- linear structure ---------------------------------------------------

    def __add__(self, other: WeylForm) -> WeylForm:
        self._check_ctx(other)
        acc = dict(self.terms)
        for key, p in other.terms.items():
            _accumulate(acc, key, p)
        return WeylForm(self.ctx, acc)

    def __sub__(self, other: WeylForm) -> WeylForm:
        return self + (-other)

    def __neg__(self) -> WeylForm:
        return WeylForm(self.ctx, {k: -p for k, p in self.terms.items()})

    def scale(self, value: Poly | Scalar) -> WeylForm:
        p = value if isinstance(value, Poly) else self.ctx.poly_const(value)
        return WeylForm(self.ctx, {k: q * p for k, q in self.terms.items()})

    def __mul__(self, other: WeylForm | Poly | Scalar) -> WeylForm:
        """Fiberwise product; scalars multiply coefficients directly."""
        if isinstance(other, WeylForm):
            return moyal(self, other)
        return self.scale(other)

    def __rmul__(self, other: Poly | Scalar) -> WeylForm:
        return self.scale(other)

    def times_h(self, power: int) -> WeylForm:
        """Multiply by h^power (power may be negative).

        Division by h is total only when every term keeps a nonnegative
        total degree; otherwise AdmissibilityError is raised.
        """
        acc: dict[TermKey, Poly] = {}
        for (yexp, dxset, hpow), p in self.terms.items():
            new = hpow + power
            if sum(yexp) + 2 * new < 0:
                raise AdmissibilityError(
                    f"dividing term y^{yexp} h^{hpow} by h^{-power} leaves total "
                    f"degree {sum(yexp) + 2 * new} < 0"
                )
            acc[(yexp, dxset, new)] = p
        return WeylForm(self.ctx, acc)

    def truncated(self, order: int) -> WeylForm:
        """Drop all terms of total degree > order."""
        return WeylForm(
            self.ctx,
            {k: p for k, p in self.terms.items() if sum(k[0]) + 2 * k[2] <= order},
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeylForm):
            return NotImplemented
        return self.ctx == other.ctx and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.ctx, frozenset((k, p) for k, p in self.terms.items())))

    # -- rendering ----------------------------------------------------------

    def sorted_keys(self) -> list[TermKey]:
        return sorted(
            self.terms,
            key=lambda k: (sum(k[0]) + 2 * k[2], k[2], k[0], k[1]),
        )

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for key in self.sorted_keys():
            yexp, dxset, hpow = key
            factors = [f"({self.terms[key]})"]
            for i, e in enumerate(yexp):
                factors.extend([f"y{i + 1}"] * e)
            factors.extend(f"dx{i + 1}" for i in dxset)
            if hpow:
                factors.append(f"h^{hpow}")
            pieces.append(" * ".join(factors))
        return " + ".join(pieces)

    def __repr__(self) -> str:
        return f"WeylForm({self})"


# -- core operators ----------------------------------------------------------


def moyal(a: WeylForm, b: WeylForm) -> WeylForm:
    """The fiberwise Moyal product combined with the wedge product.

    Per term pair the contraction sum is evaluated by iterating the
    single-contraction step: q contractions carry the weight (-1/2)^q / q!
    together with q extra powers of h.  Every contribution of a term pair has
    the same total degree, so pairs beyond the truncation order are skipped
    outright.
    """
    a._check_ctx(b)
    ctx = a.ctx
    limit = ctx.trunc
    pairs = ctx._inv_pairs
    acc: dict[TermKey, Poly] = {}
    for (ya, sa, ha), pa in a.terms.items():
        for (yb, sb, hb), pb in b.terms.items():
            total = sum(ya) + sum(yb) + 2 * (ha + hb)
            if total > limit:
                continue
            merged = wedge_merge(sa, sb)
            if merged is None:
                continue
            sign, dxset = merged
            coeff = pa * pb
            if sign < 0:
                coeff = -coeff
            hbase = ha + hb
            # contraction states: (remaining exponents of a, of b) -> weight
            states: dict[tuple[YExp, YExp], Fraction] = {(ya, yb): Fraction(1)}
            q = 0
            factor = Fraction(1)  # (-1/2)^q / q!
            while states:
                for (ra, rb), w in states.items():
                    key = (
                        tuple(x + y for x, y in zip(ra, rb)),
                        dxset,
                        hbase + q,
                    )
                    _accumulate(acc, key, coeff * (w * factor))
                nxt: dict[tuple[YExp, YExp], Fraction] = {}
                for (ra, rb), w in states.items():
                    for i, j, wij in pairs:
                        if ra[i] and rb[j]:
                            na = list(ra)
                            na[i] -= 1
                            nb = list(rb)
                            nb[j] -= 1
                            state = (tuple(na), tuple(nb))
                            nxt[state] = nxt.get(state, Fraction(0)) + w * wij * ra[i] * rb[j]
                states = {s: w for s, w in nxt.items() if w}
                q += 1
                factor = factor * Fraction(-1, 2) / q
    return WeylForm(ctx, acc)


def commutator(a: WeylForm, b: WeylForm) -> WeylForm:
    """Graded commutator [a, b] = a*b - (-1)^{kl} b*a, extended bilinearly."""
    a._check_ctx(b)
    total = a.ctx.zero_form()
    for k, ak in a.antisym_split():
        for l, bl in b.antisym_split():
            term = moyal(ak, bl)
            swap = moyal(bl, ak)
            if (k * l) % 2:
                total = total + term + swap
            else:
                total = total + term - swap
    return total


def delta(a: WeylForm) -> WeylForm:
    """dx^i wedge d/dy^i: lowers y-degree by one, raises form degree by one."""
    acc: dict[TermKey, Poly] = {}
    for (yexp, dxset, hpow), p in a.terms.items():
        for i, e in enumerate(yexp):
            if not e:
                continue
            ins = wedge_insert(i, dxset)
            if ins is None:
                continue
            sign, newdx = ins
            newy = list(yexp)
            newy[i] -= 1
            _accumulate(acc, (tuple(newy), newdx, hpow), p * (e * sign))
    return WeylForm(a.ctx, acc)


def delta_star(a: WeylForm) -> WeylForm:
    """y^i contracted with the i-th coordinate interior product."""
    acc: dict[TermKey, Poly] = {}
    for (yexp, dxset, hpow), p in a.terms.items():
        for pos, s in enumerate(dxset):
            newy = list(yexp)
            newy[s] += 1
            newdx = dxset[:pos] + dxset[pos + 1 :]
            sign = -1 if pos % 2 else 1
            _accumulate(acc, (tuple(newy), newdx, hpow), p * sign)
    return WeylForm(a.ctx, acc)


def delta_inv(a: WeylForm) -> WeylForm:
    """The normalized homotopy: delta_star / (y-degree + form-degree) per term."""
    acc: dict[TermKey, Poly] = {}
    for (yexp, dxset, hpow), p in a.terms.items():
        weight = sum(yexp) + len(dxset)
        if weight == 0:
            continue
        scaled = p * Fraction(1, weight)
        for pos, s in enumerate(dxset):
            newy = list(yexp)
            newy[s] += 1
            newdx = dxset[:pos] + dxset[pos + 1 :]
            sign = -1 if pos % 2 else 1
            _accumulate(acc, (tuple(newy), newdx, hpow), scaled * sign)
    return WeylForm(a.ctx, acc)


def sigma(a: WeylForm) -> WeylForm:
    """Evaluation at y = 0: keeps only the y-free terms."""
    return WeylForm(a.ctx, {k: p for k, p in a.terms.items() if sum(k[0]) == 0})


def core_part(a: WeylForm) -> WeylForm:
    """The y-free, dx-free part (the constant term of the fiber expansion)."""
    return WeylForm(
        a.ctx,
        {k: p for k, p in a.terms.items() if sum(k[0]) == 0 and not k[1]},
    )


def is_central(a: WeylForm) -> bool:
    """True iff a has no y-dependence (graded center = scalar forms)."""
    return all(sum(k[0]) == 0 for k in a.terms)


def d(a: WeylForm) -> WeylForm:
    """Coefficient-wise de Rham differential: dx^i wedge d/dx^i on the Poly part."""
    acc: dict[TermKey, Poly] = {}
    for (yexp, dxset, hpow), p in a.terms.items():
        for i in range(a.ctx.dim):
            dp = p.diff(i)
            if not dp:
                continue
            ins = wedge_insert(i, dxset)
            if ins is None:
                continue
            sign, newdx = ins
            if sign < 0:
                dp = -dp
            _accumulate(acc, (yexp, newdx, hpow), dp)
    return WeylForm(a.ctx, acc)
