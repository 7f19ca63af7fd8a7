"""Exact sparse multivariate polynomials over the rationals.

A polynomial in ``nvars`` variables is stored as a map from exponent tuples
(one nonnegative integer per variable) to nonzero ``Fraction`` coefficients.
The representation is canonical: zero coefficients are never stored, so two
polynomials are equal exactly when their term maps are equal.  All arithmetic
is exact; there is no floating point anywhere.

Variables are indexed 0..nvars-1 internally and rendered 1-based as
``x1, x2, ...`` in the canonical text form, e.g. ``2*x1^2*x2 - 1/3``.
Terms are printed in descending graded-lexicographic order.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterator, Mapping

Exponent = tuple[int, ...]

Scalar = int | Fraction


class Poly:
    """Immutable sparse polynomial over Q.

    Instances must never be mutated after construction; all operations
    return new values, so they may be shared freely between threads.
    """

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Exponent, Scalar] | None = None):
        if nvars < 1:
            raise ValueError(f"nvars must be positive, got {nvars}")
        cleaned: dict[Exponent, Fraction] = {}
        if terms:
            for exp, coeff in terms.items():
                exp = tuple(exp)
                if len(exp) != nvars:
                    raise ValueError(
                        f"exponent {exp} has length {len(exp)}, expected {nvars}"
                    )
                if any(e < 0 for e in exp):
                    raise ValueError(f"negative exponent in {exp}")
                coeff = Fraction(coeff)
                if coeff:
                    cleaned[exp] = coeff
        self.nvars = nvars
        self.terms = cleaned
        self._hash: int | None = None

    @classmethod
    def _raw(cls, nvars: int, terms: dict[Exponent, Fraction]) -> Poly:
        """Internal constructor for already-canonical term maps (no checks)."""
        self = object.__new__(cls)
        self.nvars = nvars
        self.terms = terms
        self._hash = None
        return self

    @classmethod
    def zero(cls, nvars: int) -> Poly:
        return cls(nvars)

    @classmethod
    def const(cls, nvars: int, value: Scalar) -> Poly:
        return cls(nvars, {(0,) * nvars: Fraction(value)})

    @classmethod
    def variable(cls, nvars: int, index: int) -> Poly:
        """The polynomial x_index (0-based index)."""
        if not 0 <= index < nvars:
            raise ValueError(f"variable index {index} out of range for {nvars} vars")
        exp = [0] * nvars
        exp[index] = 1
        return cls(nvars, {tuple(exp): Fraction(1)})

    def _check_same(self, other: Poly) -> None:
        if self.nvars != other.nvars:
            raise ValueError(
                f"dimension mismatch: {self.nvars} vs {other.nvars} variables"
            )

    # -- ring operations ---------------------------------------------------

    def __add__(self, other: Poly | Scalar) -> Poly:
        other = self._coerce(other)
        self._check_same(other)
        out = dict(self.terms)
        for exp, coeff in other.terms.items():
            acc = out.get(exp)
            acc = coeff if acc is None else acc + coeff
            if acc:
                out[exp] = acc
            else:
                out.pop(exp, None)
        return Poly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly._raw(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: Poly | Scalar) -> Poly:
        return self + (-self._coerce(other))

    def __rsub__(self, other: Scalar) -> Poly:
        return self._coerce(other) - self

    def __mul__(self, other: Poly | Scalar) -> Poly:
        if isinstance(other, (int, Fraction)):
            scalar = Fraction(other)
            if not scalar:
                return Poly._raw(self.nvars, {})
            return Poly._raw(self.nvars, {e: c * scalar for e, c in self.terms.items()})
        self._check_same(other)
        out: dict[Exponent, Fraction] = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                exp = tuple(x + y for x, y in zip(ea, eb))
                acc = out.get(exp)
                prod = ca * cb
                acc = prod if acc is None else acc + prod
                if acc:
                    out[exp] = acc
                else:
                    out.pop(exp, None)
        return Poly._raw(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, power: int) -> Poly:
        if not isinstance(power, int) or power < 0:
            raise ValueError(f"polynomial power must be a nonnegative int, got {power}")
        result = Poly.const(self.nvars, 1)
        base = self
        while power:
            if power & 1:
                result = result * base
            base = base * base
            power >>= 1
        return result

    def _coerce(self, value: Poly | Scalar) -> Poly:
        if isinstance(value, Poly):
            return value
        value = Fraction(value)
        if not value:
            return Poly._raw(self.nvars, {})
        return Poly._raw(self.nvars, {(0,) * self.nvars: value})

    # -- calculus ----------------------------------------------------------

    def diff(self, index: int) -> Poly:
        """Partial derivative with respect to x_index (0-based)."""
        if not 0 <= index < self.nvars:
            raise ValueError(f"variable index {index} out of range for {self.nvars} vars")
        out: dict[Exponent, Fraction] = {}
        for exp, coeff in self.terms.items():
            k = exp[index]
            if k == 0:
                continue
            new = list(exp)
            new[index] = k - 1
            out[tuple(new)] = coeff * k
        return Poly._raw(self.nvars, out)

    # -- queries -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def constant_value(self) -> Fraction:
        """The coefficient of the constant monomial."""
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def total_degree(self) -> int:
        """Max total degree over monomials; 0 for the zero polynomial."""
        if not self.terms:
            return 0
        return max(sum(e) for e in self.terms)

    def evaluate(self, point: list[Scalar] | tuple[Scalar, ...]) -> Fraction:
        if len(point) != self.nvars:
            raise ValueError("wrong number of coordinates")
        total = Fraction(0)
        for exp, coeff in self.terms.items():
            term = coeff
            for e, v in zip(exp, point):
                if e:
                    term *= Fraction(v) ** e
            total += term
        return total

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly.const(self.nvars, other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    # -- rendering ---------------------------------------------------------

    def sorted_terms(self) -> Iterator[tuple[Exponent, Fraction]]:
        """Terms in descending graded-lex order (the canonical print order)."""

        def key(item: tuple[Exponent, Fraction]):
            exp, _ = item
            return (-sum(exp), tuple(-e for e in exp))

        return iter(sorted(self.terms.items(), key=key))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces: list[str] = []
        for exp, coeff in self.sorted_terms():
            body = monomial_text(exp)
            if not body:
                text = str(abs(coeff))
            elif abs(coeff) == 1:
                text = body
            else:
                text = f"{abs(coeff)}*{body}"
            if not pieces:
                pieces.append(text if coeff > 0 else f"-{text}")
            else:
                pieces.append(f"+ {text}" if coeff > 0 else f"- {text}")
        return " ".join(pieces)

    def __repr__(self) -> str:
        return f"Poly({self})"


def monomial_text(exp: Exponent) -> str:
    """Render an exponent tuple as ``x1^2*x3`` (empty string for the unit)."""
    factors = []
    for i, e in enumerate(exp):
        if e == 1:
            factors.append(f"x{i + 1}")
        elif e > 1:
            factors.append(f"x{i + 1}^{e}")
    return "*".join(factors)
