"""
One-variable Wronskians.

Generalized Wronskians W^ī, the closure of the span of x^k/k!, the W_m
recurrence and its generating function, Vandermonde structure constants for
monomials with rational exponents, and the conformal-weight law under a
change of variable.
"""

import logging
from fractions import Fraction
from math import factorial
from typing import List, NamedTuple, Optional, Sequence, Tuple, Union

from sympy import Matrix, Rational

from services.skew_operators import SkewOp, determinant_operator
from utils.errors import CertificationError, DimensionMismatchError
from utils.polynomial import LaurentPolynomial, Polynomial, determinant

logger = logging.getLogger(__name__)

RationalLike = Union[int, Fraction, str]


class FormalMonomial:
    """c·x^ν with rational c and ν; c = 0 is the zero monomial for every ν."""

    __slots__ = ("coefficient", "exponent")

    def __init__(self, coefficient: RationalLike, exponent: RationalLike = 0):
        self.coefficient = Fraction(coefficient)
        self.exponent = Fraction(exponent) if self.coefficient else Fraction(0)

    @property
    def is_zero(self) -> bool:
        return self.coefficient == 0

    def derivative(self) -> "FormalMonomial":
        return FormalMonomial(self.coefficient * self.exponent, self.exponent - 1)

    def __mul__(self, other: "FormalMonomial") -> "FormalMonomial":
        return FormalMonomial(self.coefficient * other.coefficient, self.exponent + other.exponent)

    def __eq__(self, other):
        if not isinstance(other, FormalMonomial):
            return NotImplemented
        return self.coefficient == other.coefficient and self.exponent == other.exponent

    def __hash__(self):
        return hash((self.coefficient, self.exponent))

    def to_polynomial(self) -> Polynomial:
        if self.is_zero:
            return Polynomial.zero(1)
        if self.exponent.denominator != 1 or self.exponent < 0:
            raise DimensionMismatchError(f"x^{self.exponent} is not a polynomial monomial")
        return Polynomial.monomial([int(self.exponent)], self.coefficient)

    def as_dict(self) -> dict:
        return {"coefficient": str(self.coefficient), "exponent": str(self.exponent)}

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        if self.exponent == 0:
            return str(self.coefficient)
        power = f"x^{self.exponent}" if self.exponent.denominator == 1 else f"x^({self.exponent})"
        return power if self.coefficient == 1 else f"{self.coefficient}*{power}"

    def __repr__(self) -> str:
        return f"FormalMonomial({self})"


def _check_one_variable(args: Sequence[Polynomial]) -> None:
    for a in args:
        if a.n != 1:
            raise DimensionMismatchError(
                f"One-variable Wronskians need polynomials in x, got one in {a.n} variables"
            )


def _check_indices(indices: Sequence[int]) -> Tuple[int, ...]:
    values = tuple(int(i) for i in indices)
    if not values:
        raise ValueError("A generalized Wronskian needs at least one derivative order")
    if values[0] < 0:
        raise ValueError(f"Derivative orders must be non-negative: {list(values)}")
    if any(a >= b for a, b in zip(values, values[1:])):
        raise ValueError(f"Derivative orders must be strictly increasing: {list(values)}")
    return values


def generalized_wronskian_operator(indices: Sequence[int]) -> SkewOp:
    """W^ī = ∂^{i_1} ∧ … ∧ ∂^{i_N} as an operator on one-variable polynomials."""
    values = _check_indices(indices)
    return determinant_operator(
        [(i,) for i in values], f"W[{','.join(str(i) for i in values)}]"
    )


def wronskian_operator(arity: int) -> SkewOp:
    return generalized_wronskian_operator(range(arity))


def generalized_wronskian(indices: Sequence[int], args: Sequence[Polynomial]) -> Polynomial:
    values = _check_indices(indices)
    if len(values) != len(args):
        raise ValueError(f"W^{list(values)} takes {len(values)} arguments, got {len(args)}")
    _check_one_variable(args)
    return determinant([[a.derivative(i) for a in args] for i in values])


def wronskian(args: Sequence[Polynomial]) -> Polynomial:
    """det ‖d^{i-1} a_j / dx^{i-1}‖, the classical Wronskian."""
    if not args:
        raise ValueError("The Wronskian needs at least one argument")
    return generalized_wronskian(range(len(args)), args)


def laurent_wronskian(
    args: Sequence[Union[Polynomial, LaurentPolynomial]],
) -> Union[Polynomial, LaurentPolynomial]:
    """
    Wronskian of one-variable Laurent polynomials.

    With g = x^S clearing every denominator, W(g·a_1, …, g·a_N) = g^N·W(a), so
    the polynomial Wronskian of the cleared arguments is divided by x^{NS}.
    """
    lifted = [LaurentPolynomial.lift(a, 1) for a in args]
    shift = max((a.shift[0] for a in lifted), default=0)
    if shift == 0:
        return wronskian([a.to_polynomial() for a in lifted])
    cleared = [(a * Polynomial.monomial([shift])).to_polynomial() for a in lifted]
    return LaurentPolynomial(wronskian(cleared), [len(args) * shift])


def divided_power(k: int) -> Polynomial:
    """x^k / k!"""
    return Polynomial.monomial([k], Fraction(1, factorial(k)))


def closed_degree_value(N: int, k: int) -> Polynomial:
    """W(a_0, …, â_k, …, a_N) with a_j = x^j/j!; equals a_{N-k}."""
    if not 0 <= k <= N:
        raise ValueError(f"Omitted slot {k} out of range 0..{N}")
    return wronskian([divided_power(j) for j in range(N + 1) if j != k])


def closed_degree_table(N: int) -> List[Tuple[int, Polynomial, Polynomial]]:
    """(k, bracket value, expected a_{N-k}) for every omitted slot."""
    return [(k, closed_degree_value(N, k), divided_power(N - k)) for k in range(N + 1)]


def vandermonde(nodes: Sequence[RationalLike]) -> Fraction:
    values = [Fraction(v) for v in nodes]
    result = Fraction(1)
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            result *= values[j] - values[i]
    return result


def wronskian_monomials(exponents: Sequence[RationalLike]) -> FormalMonomial:
    """W(x^{ν_1}, …, x^{ν_N}) = Vandermonde(ν)·x^{Σν - N(N-1)/2}."""
    nu = [Fraction(v) for v in exponents]
    N = len(nu)
    return FormalMonomial(vandermonde(nu), sum(nu, Fraction(0)) - Fraction(N * (N - 1), 2))


def formal_wronskian(monomials: Sequence[FormalMonomial]) -> FormalMonomial:
    """
    Wronskian of formal monomials through the matrix of falling factorials.

    Row i holds the coefficient of the i-th derivative of each monomial; the
    powers of x factor out of every column and row, so only the determinant
    of the coefficient matrix is computed.
    """
    N = len(monomials)
    if N == 0:
        raise ValueError("The Wronskian needs at least one argument")
    if any(m.is_zero for m in monomials):
        return FormalMonomial(0)
    rows = []
    for i in range(N):
        row = []
        for m in monomials:
            falling = Fraction(1)
            for t in range(i):
                falling *= m.exponent - t
            row.append(Rational(falling.numerator, falling.denominator))
        rows.append(row)
    value = Matrix(rows).det(method="bareiss")
    coefficient = Fraction(int(value.p), int(value.q))
    for m in monomials:
        coefficient *= m.coefficient
    exponent = sum((m.exponent for m in monomials), Fraction(0)) - Fraction(N * (N - 1), 2)
    return FormalMonomial(coefficient, exponent)


def witt_structure_constant(indices: Sequence[int]) -> Fraction:
    """Ω(i_1, …, i_N) = ∏_{j<k} (i_k - i_j)."""
    return vandermonde(indices)


def witt_bracket(indices: Sequence[int]) -> Tuple[Fraction, Fraction]:
    """
    Bracket of the generators a_i = x^{i + N/2}.

    Returns (coefficient, index of the resulting generator); the coefficient
    is computed from the shifted exponents and equals Ω(i).
    """
    N = len(indices)
    shift = Fraction(N, 2)
    value = wronskian_monomials([Fraction(i) + shift for i in indices])
    if value.is_zero:
        return Fraction(0), Fraction(sum(indices))
    return value.coefficient, value.exponent - shift


def recurrence_wm(m: int) -> Polynomial:
    """W_m = Σ_{l=1}^{m-1} W_{m-l}(-1)^{l+1} x^l/l! - (-1)^m x^m/m!, W_1 = x."""
    if m < 1:
        raise ValueError(f"W_m is defined for m >= 1, got {m}")
    values = [Polynomial.zero(1), Polynomial.variable(0, 1)]
    for current in range(2, m + 1):
        total = Polynomial.zero(1)
        for l in range(1, current):
            term = values[current - l] * divided_power(l)
            total = total + term if l % 2 == 1 else total - term
        last = divided_power(current)
        total = total - last if current % 2 == 0 else total + last
        values.append(total)
    return values[m]


def wm_determinant(m: int) -> Polynomial:
    """W(x, x^2/2!, …, x^m/m!) by determinant expansion."""
    if m < 1:
        raise ValueError(f"W_m is defined for m >= 1, got {m}")
    return wronskian([divided_power(j) for j in range(1, m + 1)])


def generating_series(M: int) -> Tuple[Polynomial, Polynomial]:
    """(Σ_{m=1}^{M} W_m, exp(x) - 1 truncated at degree M)."""
    series = Polynomial.zero(1)
    target = Polynomial.zero(1)
    for m in range(1, M + 1):
        series = series + recurrence_wm(m)
        target = target + divided_power(m)
    return series, target


class ConformalResult(NamedTuple):
    passed: bool
    weight: int
    expected_weight: int
    truncation: int
    lhs: Polynomial
    rhs: Polynomial
    residual: Polynomial
    certified_degree: int


def conformal_weight(N: int) -> int:
    return N * (N - 1) // 2


def conformal_weight_check(
    N: int,
    y: Polynomial,
    phis: Sequence[Polynomial],
    truncation: int,
    weight: Optional[int] = None,
) -> ConformalResult:
    """
    Compare W_x(φ∘y) with (dy/dx)^w · (W_y φ)∘y up to degree ``truncation``.

    ``w`` defaults to N(N-1)/2; any other value is a negative control and is
    expected to fail.
    """
    if len(phis) != N:
        raise ValueError(f"Expected {N} functions φ, got {len(phis)}")
    _check_one_variable(list(phis) + [y])
    if y.constant_term() != 0:
        raise CertificationError("The change of variable must fix the origin: y(0) = 0")
    dy = y.derivative()
    if dy.constant_term() == 0:
        raise CertificationError("Non-invertible change of variable: dy/dx vanishes at 0")
    expected = conformal_weight(N)
    w = expected if weight is None else weight
    if w < 0:
        raise CertificationError(f"Negative weight {w} needs a series inverse of dy/dx")

    lhs = wronskian([phi.compose(y) for phi in phis])
    rhs = dy ** w * wronskian(list(phis)).compose(y)
    needed = max(lhs.total_degree(), rhs.total_degree())
    if needed > truncation:
        raise CertificationError(
            f"Truncation degree {truncation} is below the degree {needed} of the compared sides"
        )
    residual = lhs.truncate(truncation) - rhs.truncate(truncation)
    passed = residual.is_zero
    logger.info(
        f"[CONFORMAL] N={N} weight={w} (expected {expected}) truncation={truncation}: "
        f"{'agree' if passed else 'differ'}"
    )
    return ConformalResult(passed, w, expected, truncation, lhs, rhs, residual, truncation)
