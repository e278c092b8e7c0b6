"""
Exact multivariate polynomials over the rationals.

The arithmetic is delegated to sympy's sparse polynomial rings
(``PolyRing`` over ``QQ`` in graded-lex order); ``Polynomial`` is a thin
immutable wrapper that fixes the variable naming, the canonical printer and
the derivative helpers every bracket in this project is built from.
``LaurentPolynomial`` adds negative powers for differential-operator
coefficients.
"""

from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from sympy.polys.domains import QQ
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyElement, PolyRing

from utils.errors import DimensionMismatchError

Scalar = Union[int, Fraction]

ALIASES = ("x", "y", "z")


@lru_cache(maxsize=None)
def get_ring(n: int) -> PolyRing:
    if n < 1:
        raise DimensionMismatchError(f"Variable count must be positive, got {n}")
    return PolyRing([f"x{i + 1}" for i in range(n)], QQ, grlex)


def to_qq(value: Scalar):
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    if isinstance(value, int):
        return QQ(value)
    return QQ.convert(value)


def to_fraction(value) -> Fraction:
    return Fraction(int(value.numerator), int(value.denominator))


def default_names(n: int) -> Tuple[str, ...]:
    if n <= len(ALIASES):
        return ALIASES[:n]
    return tuple(f"x{i + 1}" for i in range(n))


class MultiIndex(tuple):
    """Exponent vector σ = (σ¹, …, σⁿ) with non-negative entries."""

    def __new__(cls, exponents: Iterable[int]):
        values = tuple(int(e) for e in exponents)
        if any(v < 0 for v in values):
            raise ValueError(f"Multiindex entries must be non-negative: {values}")
        return super().__new__(cls, values)

    @property
    def order(self) -> int:
        return sum(self)

    @property
    def n(self) -> int:
        return len(self)

    def plus(self, other: Sequence[int]) -> "MultiIndex":
        if len(other) != len(self):
            raise DimensionMismatchError(
                f"Cannot add multiindices of lengths {len(self)} and {len(other)}"
            )
        return MultiIndex(a + b for a, b in zip(self, other))

    def sort_key(self) -> Tuple[int, Tuple[int, ...]]:
        # ascending order, then x before y before z within one order
        return (self.order, tuple(-e for e in self))

    def __repr__(self) -> str:
        return f"MultiIndex({tuple(self)})"


def monomials_up_to(n: int, degree: int) -> List[MultiIndex]:
    """All exponent vectors of total degree <= degree, in test-space order."""
    if degree < 0:
        return []
    found = [
        MultiIndex(exps)
        for exps in product(range(degree + 1), repeat=n)
        if sum(exps) <= degree
    ]
    return sorted(found, key=MultiIndex.sort_key)


def monomials_of_order(n: int, order: int) -> List[MultiIndex]:
    return [m for m in monomials_up_to(n, order) if m.order == order]


def format_terms(
    terms: Iterable[Tuple[Sequence[int], Fraction]], n: int, names: Optional[Sequence[str]] = None
) -> str:
    """Canonical ``2*x^2*y - y^-1`` text for (exponents, coefficient) pairs in print order."""
    names = tuple(names) if names else default_names(n)
    if len(names) != n:
        raise DimensionMismatchError(f"Need {n} variable names, got {len(names)}")
    pieces = []
    for monom, value in terms:
        factors = []
        for name, exp in zip(names, monom):
            if exp == 1:
                factors.append(name)
            elif exp != 0:
                factors.append(f"{name}^{exp}")
        sign = "-" if value < 0 else "+"
        magnitude = abs(value)
        if not factors:
            body = str(magnitude)
        elif magnitude == 1:
            body = "*".join(factors)
        else:
            body = f"{magnitude}*" + "*".join(factors)
        pieces.append((sign, body))
    if not pieces:
        return "0"
    first_sign, first_body = pieces[0]
    text = ("-" if first_sign == "-" else "") + first_body
    for sign, body in pieces[1:]:
        text += f" {sign} {body}"
    return text


class Polynomial:
    """Immutable exact polynomial in x1..xn with rational coefficients."""

    __slots__ = ("_rep", "_hash")

    def __init__(self, rep: PolyElement):
        self._rep = rep
        self._hash = None

    # construction

    @classmethod
    def zero(cls, n: int) -> "Polynomial":
        return cls(get_ring(n).zero)

    @classmethod
    def one(cls, n: int) -> "Polynomial":
        return cls(get_ring(n).one)

    @classmethod
    def constant(cls, value: Scalar, n: int) -> "Polynomial":
        ring = get_ring(n)
        return cls(ring.ground_new(to_qq(value)))

    @classmethod
    def monomial(cls, exponents: Sequence[int], coefficient: Scalar = 1) -> "Polynomial":
        exps = MultiIndex(exponents)
        ring = get_ring(len(exps))
        coeff = to_qq(coefficient)
        if not coeff:
            return cls(ring.zero)
        return cls(ring.from_dict({tuple(exps): coeff}))

    @classmethod
    def variable(cls, index: int, n: int) -> "Polynomial":
        if not 0 <= index < n:
            raise DimensionMismatchError(f"Variable index {index} out of range for n={n}")
        return cls(get_ring(n).gens[index])

    @classmethod
    def from_terms(cls, terms: Dict[Sequence[int], Scalar], n: int) -> "Polynomial":
        ring = get_ring(n)
        data = {}
        for exps, coeff in terms.items():
            key = tuple(MultiIndex(exps))
            if len(key) != n:
                raise DimensionMismatchError(
                    f"Exponent vector {key} does not have {n} entries"
                )
            value = to_qq(coeff)
            if value:
                data[key] = data.get(key, QQ.zero) + value
        return cls(ring.from_dict({k: v for k, v in data.items() if v}))

    # introspection

    @property
    def rep(self) -> PolyElement:
        return self._rep

    @property
    def n(self) -> int:
        return self._rep.ring.ngens

    @property
    def is_zero(self) -> bool:
        return not self._rep

    def terms(self) -> Dict[MultiIndex, Fraction]:
        return {
            MultiIndex(monom): to_fraction(coeff)
            for monom, coeff in self._rep.terms()
        }

    def coefficient(self, exponents: Sequence[int]) -> Fraction:
        value = self._rep.get(tuple(exponents))
        return to_fraction(value) if value is not None else Fraction(0)

    def constant_term(self) -> Fraction:
        return self.coefficient((0,) * self.n)

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if self.is_zero:
            return -1
        return max(sum(monom) for monom in self._rep.itermonoms())

    def is_constant(self) -> bool:
        return self.total_degree() <= 0

    # arithmetic

    def _coerce(self, other) -> Optional[PolyElement]:
        if isinstance(other, Polynomial):
            if other.n != self.n:
                raise DimensionMismatchError(
                    f"Cannot combine polynomials in {self.n} and {other.n} variables"
                )
            return other._rep
        if isinstance(other, (int, Fraction)):
            return self._rep.ring.ground_new(to_qq(other))
        return None

    def __add__(self, other):
        rep = self._coerce(other)
        if rep is None:
            return NotImplemented
        return Polynomial(self._rep + rep)

    __radd__ = __add__

    def __sub__(self, other):
        rep = self._coerce(other)
        if rep is None:
            return NotImplemented
        return Polynomial(self._rep - rep)

    def __rsub__(self, other):
        rep = self._coerce(other)
        if rep is None:
            return NotImplemented
        return Polynomial(rep - self._rep)

    def __neg__(self):
        return Polynomial(-self._rep)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Polynomial(self._rep.mul_ground(to_qq(other)))
        rep = self._coerce(other)
        if rep is None:
            return NotImplemented
        return Polynomial(self._rep * rep)

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError(f"Polynomial powers must be non-negative integers, got {exponent}")
        return Polynomial(self._rep ** exponent)

    def scale_down(self, divisor: Scalar) -> "Polynomial":
        value = Fraction(divisor)
        if value == 0:
            raise ZeroDivisionError("Division of a polynomial by zero")
        return self * (1 / value)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.n == other.n and self._rep == other._rep
        if isinstance(other, (int, Fraction)):
            return self._rep == self._rep.ring.ground_new(to_qq(other))
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self._rep.items())))
        return self._hash

    def __bool__(self):
        return not self.is_zero

    # calculus

    def derive(self, var: int) -> "Polynomial":
        if not 0 <= var < self.n:
            raise DimensionMismatchError(
                f"Variable index {var} out of range for a polynomial in {self.n} variables"
            )
        return Polynomial(self._rep.diff(self._rep.ring.gens[var]))

    def apply_multiindex(self, sigma: Sequence[int]) -> "Polynomial":
        sigma = MultiIndex(sigma)
        if sigma.n != self.n:
            raise DimensionMismatchError(
                f"Multiindex of length {sigma.n} applied to a polynomial in {self.n} variables"
            )
        rep = self._rep
        gens = rep.ring.gens
        for var, times in enumerate(sigma):
            for _ in range(times):
                if not rep:
                    return Polynomial(rep)
                rep = rep.diff(gens[var])
        return Polynomial(rep)

    def derivative(self, times: int = 1, var: int = 0) -> "Polynomial":
        sigma = [0] * self.n
        sigma[var] = times
        return self.apply_multiindex(sigma)

    def compose(self, substitute: "Polynomial") -> "Polynomial":
        """p(y(x)) for one-variable p and y."""
        if self.n != 1 or substitute.n != 1:
            raise DimensionMismatchError("Composition is defined for one-variable polynomials")
        rep = self._rep
        return Polynomial(rep.compose(rep.ring.gens[0], substitute._rep))

    def truncate(self, degree: int) -> "Polynomial":
        kept = {m: c for m, c in self._rep.items() if sum(m) <= degree}
        return Polynomial(self._rep.ring.from_dict(kept))

    def linear_part(self) -> List[Fraction]:
        """Coefficients of x1..xn (the degree-one part)."""
        result = []
        for var in range(self.n):
            exps = [0] * self.n
            exps[var] = 1
            result.append(self.coefficient(exps))
        return result

    # printing

    def to_string(self, names: Optional[Sequence[str]] = None) -> str:
        return format_terms(
            ((monom, to_fraction(coeff)) for monom, coeff in self._rep.terms()), self.n, names
        )

    def __str__(self) -> str:
        return self.to_string()

    def __repr__(self) -> str:
        return f"Polynomial({self.to_string()!r}, n={self.n})"


class LaurentPolynomial:
    """
    x^{-shift}·numerator: a polynomial allowed negative powers of each variable.

    ``shift`` is kept minimal, so no variable divides both the numerator and
    the monomial denominator; two equal values have equal representations.
    Values with an empty shift compare and hash like their ``Polynomial``.
    """

    __slots__ = ("numerator", "shift", "_hash")

    def __init__(self, numerator: Polynomial, shift: Optional[Sequence[int]] = None):
        n = numerator.n
        shift = MultiIndex(shift if shift is not None else (0,) * n)
        if shift.n != n:
            raise DimensionMismatchError(f"Shift {tuple(shift)} does not have {n} entries")
        if numerator.is_zero:
            shift = MultiIndex((0,) * n)
        elif any(shift):
            monoms = list(numerator.rep.itermonoms())
            cancel = [min([s] + [m[v] for m in monoms]) for v, s in enumerate(shift)]
            if any(cancel):
                numerator = Polynomial(
                    numerator.rep.ring.from_dict(
                        {
                            tuple(e - c for e, c in zip(m, cancel)): coeff
                            for m, coeff in numerator.rep.items()
                        }
                    )
                )
                shift = MultiIndex(s - c for s, c in zip(shift, cancel))
        self.numerator = numerator
        self.shift = shift
        self._hash = None

    # construction

    @classmethod
    def zero(cls, n: int) -> "LaurentPolynomial":
        return cls(Polynomial.zero(n))

    @classmethod
    def from_terms(cls, terms: Dict[Sequence[int], Scalar], n: int) -> "LaurentPolynomial":
        """Like ``Polynomial.from_terms`` with negative exponents allowed."""
        for exps in terms:
            if len(exps) != n:
                raise DimensionMismatchError(f"Exponent vector {tuple(exps)} does not have {n} entries")
        shift = [max([0] + [-exps[v] for exps in terms]) for v in range(n)]
        lifted: Dict[Tuple[int, ...], Scalar] = {}
        for exps, coeff in terms.items():
            key = tuple(e + s for e, s in zip(exps, shift))
            lifted[key] = lifted.get(key, 0) + coeff
        return cls(Polynomial.from_terms(lifted, n), shift)

    @classmethod
    def monomial(cls, exponents: Sequence[int], coefficient: Scalar = 1) -> "LaurentPolynomial":
        return cls.from_terms({tuple(exponents): coefficient}, len(exponents))

    @classmethod
    def lift(cls, value, n: int) -> "LaurentPolynomial":
        if isinstance(value, LaurentPolynomial):
            result = value
        elif isinstance(value, Polynomial):
            result = cls(value)
        elif isinstance(value, (int, Fraction)):
            return cls(Polynomial.constant(value, n))
        else:
            raise TypeError(f"Cannot read {value!r} as a Laurent polynomial")
        if result.n != n:
            raise DimensionMismatchError(f"Cannot combine Laurent polynomials in {n} and {result.n} variables")
        return result

    # introspection

    @property
    def n(self) -> int:
        return self.numerator.n

    @property
    def is_zero(self) -> bool:
        return self.numerator.is_zero

    @property
    def is_polynomial(self) -> bool:
        return not any(self.shift)

    def to_polynomial(self) -> Polynomial:
        if not self.is_polynomial:
            raise ValueError(f"{self} has negative powers")
        return self.numerator

    def terms(self) -> Dict[Tuple[int, ...], Fraction]:
        return {
            tuple(e - s for e, s in zip(monom, self.shift)): coeff
            for monom, coeff in self.numerator.terms().items()
        }

    def coefficient(self, exponents: Sequence[int]) -> Fraction:
        key = [e + s for e, s in zip(exponents, self.shift)]
        if any(e < 0 for e in key):
            return Fraction(0)
        return self.numerator.coefficient(key)

    def constant_term(self) -> Fraction:
        return self.coefficient((0,) * self.n)

    def is_constant(self) -> bool:
        return self.is_polynomial and self.numerator.is_constant()

    # arithmetic

    def _coerce(self, other) -> Optional["LaurentPolynomial"]:
        if isinstance(other, (LaurentPolynomial, Polynomial, int, Fraction)):
            return LaurentPolynomial.lift(other, self.n)
        return None

    def _aligned(self, other: "LaurentPolynomial") -> Tuple[Polynomial, Polynomial, MultiIndex]:
        """Both numerators over the common denominator x^shift."""
        if self.shift == other.shift:
            return self.numerator, other.numerator, self.shift
        shift = MultiIndex(max(a, b) for a, b in zip(self.shift, other.shift))
        left = self.numerator * Polynomial.monomial([s - a for s, a in zip(shift, self.shift)])
        right = other.numerator * Polynomial.monomial([s - b for s, b in zip(shift, other.shift)])
        return left, right, shift

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        left, right, shift = self._aligned(other)
        return LaurentPolynomial(left + right, shift)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        left, right, shift = self._aligned(other)
        return LaurentPolynomial(left - right, shift)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __neg__(self):
        return LaurentPolynomial(-self.numerator, self.shift)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return LaurentPolynomial(self.numerator * other, self.shift)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return LaurentPolynomial(self.numerator * other.numerator, self.shift.plus(other.shift))

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            raise ValueError(f"Laurent powers must be integers, got {exponent}")
        if exponent >= 0:
            return LaurentPolynomial(self.numerator ** exponent, [s * exponent for s in self.shift])
        terms = self.terms()
        if len(terms) != 1:
            raise ValueError(f"Only a monomial has negative powers, got {self}")
        (exps, coeff), = terms.items()
        return LaurentPolynomial.from_terms(
            {tuple(e * exponent for e in exps): Fraction(1) / coeff ** -exponent}, self.n
        )

    def scale_down(self, divisor: Scalar) -> "LaurentPolynomial":
        return LaurentPolynomial(self.numerator.scale_down(divisor), self.shift)

    def __eq__(self, other):
        if isinstance(other, (LaurentPolynomial, Polynomial)) and other.n != self.n:
            return False
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.shift == other.shift and self.numerator == other.numerator

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.numerator) if self.is_polynomial else hash((self.numerator, self.shift))
        return self._hash

    def __bool__(self):
        return not self.is_zero

    # calculus

    def derive(self, var: int) -> "LaurentPolynomial":
        """∂_v(x_v^{-s}·p) = x_v^{-s-1}·(x_v·∂_v p - s·p)"""
        s = self.shift[var] if 0 <= var < self.n else 0
        if s == 0:
            return LaurentPolynomial(self.numerator.derive(var), self.shift)
        x = Polynomial.variable(var, self.n)
        numerator = x * self.numerator.derive(var) - self.numerator * s
        shift = list(self.shift)
        shift[var] += 1
        return LaurentPolynomial(numerator, shift)

    def apply_multiindex(self, sigma: Sequence[int]) -> "LaurentPolynomial":
        sigma = MultiIndex(sigma)
        if sigma.n != self.n:
            raise DimensionMismatchError(
                f"Multiindex of length {sigma.n} applied to a Laurent polynomial in {self.n} variables"
            )
        result = self
        for var, times in enumerate(sigma):
            for _ in range(times):
                if result.is_zero:
                    return result
                result = result.derive(var)
        return result

    # printing

    def to_string(self, names: Optional[Sequence[str]] = None) -> str:
        shift = self.shift
        return format_terms(
            (
                (tuple(e - s for e, s in zip(monom, shift)), to_fraction(coeff))
                for monom, coeff in self.numerator.rep.terms()
            ),
            self.n,
            names,
        )

    def __str__(self) -> str:
        return self.to_string()

    def __repr__(self) -> str:
        return f"LaurentPolynomial({self.to_string()!r}, n={self.n})"


def derive(p: Polynomial, var: int) -> Polynomial:
    return p.derive(var)


def apply_multiindex(p: Polynomial, sigma: Sequence[int]) -> Polynomial:
    return p.apply_multiindex(sigma)


def determinant(matrix: Sequence[Sequence[Polynomial]]) -> Polynomial:
    """
    Exact determinant of a square matrix of polynomials.

    Expands row by row and merges partial products by the set of columns
    already used, so an N×N determinant costs 2^N·N multiplications and
    needs no division.
    """
    size = len(matrix)
    if size == 0:
        raise DimensionMismatchError("Determinant of an empty matrix")
    if any(len(row) != size for row in matrix):
        raise DimensionMismatchError("Determinant requires a square matrix")
    ring = matrix[0][0].rep.ring
    partial = {0: ring.one}
    for row in range(size):
        entries = [matrix[row][col].rep for col in range(size)]
        following = {}
        for mask, acc in partial.items():
            if not acc:
                continue
            for col in range(size):
                if mask >> col & 1 or not entries[col]:
                    continue
                term = acc * entries[col]
                if bin(mask >> (col + 1)).count("1") % 2:
                    term = -term
                key = mask | (1 << col)
                following[key] = following[key] + term if key in following else term
        partial = following
    return Polynomial(partial.get((1 << size) - 1, ring.zero))
