"""
The associative algebra of differential operators Σ w_α ∂^α with Laurent
polynomial coefficients, its alternating N-brackets, and the identities relating
brackets of different arities.
"""

import logging
import random
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from math import comb
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

from services.wronskian_service import divided_power, laurent_wronskian
from utils.combinatorics import unshuffles
from utils.errors import ArityError, BudgetExceededError, DimensionMismatchError
from utils.polynomial import LaurentPolynomial, MultiIndex, Polynomial
from utils.text_parser import parse_laurent, split_top_level

Coefficient = Union[Polynomial, LaurentPolynomial]

logger = logging.getLogger(__name__)

COORDINATE_NAMES = {1: ("z",), 2: ("x", "y")}
DERIVATIVE_NAMES = {1: ("d",), 2: ("dx", "dy")}


def coordinate_names(n: int) -> Tuple[str, ...]:
    return COORDINATE_NAMES.get(n, tuple(f"x{i + 1}" for i in range(n)))


def derivative_names(n: int) -> Tuple[str, ...]:
    return DERIVATIVE_NAMES.get(n, tuple(f"d{i + 1}" for i in range(n)))


def _multinomial(alpha: MultiIndex, gamma: Sequence[int]) -> int:
    result = 1
    for a, g in zip(alpha, gamma):
        result *= comb(a, g)
    return result


class DiffOp:
    """
    Σ_α w_α(x) ∂^α with coefficients written to the left of the derivatives.

    For n = 1 the coordinate is printed as ``z`` and ∂ as ``d``. Coefficients
    are stored as ``LaurentPolynomial`` so ``z^-1*d`` is a valid operator.
    """

    __slots__ = ("n", "_coefficients", "_hash")

    def __init__(self, coefficients: Dict[Sequence[int], Coefficient], n: int = 1):
        cleaned: Dict[MultiIndex, LaurentPolynomial] = {}
        for order, value in coefficients.items():
            alpha = MultiIndex((order,) if isinstance(order, int) else order)
            coeff = LaurentPolynomial.lift(value, value.n)
            if alpha.n != n or coeff.n != n:
                raise DimensionMismatchError(
                    f"Differential operator term of order {tuple(alpha)} does not live in {n} variables"
                )
            if not coeff.is_zero:
                cleaned[alpha] = cleaned[alpha] + coeff if alpha in cleaned else coeff
        self.n = n
        self._coefficients = {a: c for a, c in cleaned.items() if not c.is_zero}
        self._hash = None

    @classmethod
    def zero(cls, n: int = 1) -> "DiffOp":
        return cls({}, n)

    @classmethod
    def identity(cls, n: int = 1) -> "DiffOp":
        return cls({(0,) * n: Polynomial.one(n)}, n)

    @classmethod
    def term(cls, coefficient: Coefficient, order: Union[int, Sequence[int]]) -> "DiffOp":
        """w·∂^order"""
        alpha = (order,) if isinstance(order, int) else tuple(order)
        return cls({alpha: coefficient}, coefficient.n)

    @classmethod
    def from_symbol(cls, symbol: Coefficient, n: int) -> "DiffOp":
        """Split a Laurent polynomial in (x_1..x_n, ∂_1..∂_n) into coefficients and orders."""
        if symbol.n != 2 * n:
            raise DimensionMismatchError(f"Symbol in {symbol.n} variables, expected {2 * n}")
        grouped: Dict[MultiIndex, Dict[Tuple[int, ...], Fraction]] = {}
        for monom, coeff in symbol.terms().items():
            if any(e < 0 for e in monom[n:]):
                raise ValueError(f"Negative derivative order {tuple(monom[n:])}")
            grouped.setdefault(MultiIndex(monom[n:]), {})[tuple(monom[:n])] = coeff
        return cls(
            {alpha: LaurentPolynomial.from_terms(terms, n) for alpha, terms in grouped.items()}, n
        )

    # introspection

    @property
    def is_zero(self) -> bool:
        return not self._coefficients

    @property
    def order(self) -> int:
        """Highest |α| present; -1 for the zero operator."""
        return max((alpha.order for alpha in self._coefficients), default=-1)

    def orders(self) -> List[MultiIndex]:
        return sorted(self._coefficients, key=MultiIndex.sort_key)

    def coefficient(self, order: Union[int, Sequence[int]]) -> LaurentPolynomial:
        alpha = MultiIndex((order,) if isinstance(order, int) else order)
        return self._coefficients.get(alpha, LaurentPolynomial.zero(self.n))

    def items(self) -> List[Tuple[MultiIndex, LaurentPolynomial]]:
        return [(alpha, self._coefficients[alpha]) for alpha in self.orders()]

    def restricted(self, keep) -> "DiffOp":
        return DiffOp({a: c for a, c in self._coefficients.items() if keep(a)}, self.n)

    # arithmetic

    def _check(self, other: "DiffOp") -> None:
        if other.n != self.n:
            raise DimensionMismatchError(
                f"Cannot combine operators in {self.n} and {other.n} variables"
            )

    def __add__(self, other: "DiffOp") -> "DiffOp":
        self._check(other)
        merged = dict(self._coefficients)
        for alpha, coeff in other._coefficients.items():
            merged[alpha] = merged[alpha] + coeff if alpha in merged else coeff
        return DiffOp(merged, self.n)

    def __neg__(self) -> "DiffOp":
        return DiffOp({a: -c for a, c in self._coefficients.items()}, self.n)

    def __sub__(self, other: "DiffOp") -> "DiffOp":
        return self + (-other)

    def scaled(self, factor: Union[int, Fraction, Coefficient]) -> "DiffOp":
        return DiffOp({a: c * factor for a, c in self._coefficients.items()}, self.n)

    def __mul__(self, factor):
        if isinstance(factor, (int, Fraction, Polynomial, LaurentPolynomial)):
            return self.scaled(factor)
        return NotImplemented

    __rmul__ = __mul__

    def compose(self, other: "DiffOp") -> "DiffOp":
        """
        (a∂^α)∘(b∂^β) = Σ_{γ≤α} C(α,γ)·a·(∂^γ b)·∂^{α-γ+β}.
        """
        self._check(other)
        result: Dict[MultiIndex, LaurentPolynomial] = {}
        for alpha, a in self._coefficients.items():
            lower = list(product(*(range(e + 1) for e in alpha)))
            for beta, b in other._coefficients.items():
                for gamma in lower:
                    derived = b.apply_multiindex(gamma)
                    if derived.is_zero:
                        continue
                    order = beta.plus([ai - gi for ai, gi in zip(alpha, gamma)])
                    term = a * derived * _multinomial(alpha, gamma)
                    result[order] = result[order] + term if order in result else term
        return DiffOp(result, self.n)

    def __matmul__(self, other: "DiffOp") -> "DiffOp":
        return self.compose(other)

    def apply(self, p: Coefficient) -> Coefficient:
        """The operator applied to ``p``; a ``Polynomial`` whenever no negative power survives."""
        total = LaurentPolynomial.zero(self.n)
        for alpha, a in self._coefficients.items():
            total = total + a * p.apply_multiindex(alpha)
        return total.to_polynomial() if total.is_polynomial else total

    def __eq__(self, other):
        if not isinstance(other, DiffOp):
            return NotImplemented
        return self.n == other.n and self._coefficients == other._coefficients

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self._coefficients.items())))
        return self._hash

    # printing

    def symbol(self) -> LaurentPolynomial:
        """The operator as a Laurent polynomial in (x, ∂) with coefficients on the left."""
        n = self.n
        terms: Dict[Tuple[int, ...], Fraction] = {}
        for alpha, coeff in self._coefficients.items():
            for monom, value in coeff.terms().items():
                terms[tuple(monom) + tuple(alpha)] = value
        return LaurentPolynomial.from_terms(terms, 2 * n)

    def to_string(self) -> str:
        return self.symbol().to_string(coordinate_names(self.n) + derivative_names(self.n))

    def as_dict(self) -> Dict[str, str]:
        """Coefficient polynomials keyed by derivative order."""
        names = coordinate_names(self.n)
        return {
            (str(alpha[0]) if self.n == 1 else ",".join(map(str, alpha))): coeff.to_string(names)
            for alpha, coeff in self.items()
        }

    def __str__(self) -> str:
        return self.to_string()

    def __repr__(self) -> str:
        return f"DiffOp({self.to_string()!r}, n={self.n})"


def parse_diffop(text: str, n: int = 1) -> DiffOp:
    """
    Parse ``z*d^2 + z^-1``-style operators (n = 1) or ``x*dy - y*dx`` (n = 2).

    The expression is read as a polynomial in the coordinates and the
    derivative symbols; every monomial is normal-ordered with its
    coordinates to the left of the derivatives.
    """
    aliases = {name: i for i, name in enumerate(coordinate_names(n))}
    aliases.update({name: n + i for i, name in enumerate(derivative_names(n))})
    if n == 1:
        aliases["x"] = 0
    return DiffOp.from_symbol(parse_laurent(text, 2 * n, aliases), n)


def parse_diffop_list(text: str, n: int = 1) -> List[DiffOp]:
    return [parse_diffop(item, n) for item in split_top_level(text, ";")]


# alternating brackets


@lru_cache(maxsize=4096)
def _alt_bracket(ops: Tuple[DiffOp, ...]) -> DiffOp:
    N = len(ops)
    n = ops[0].n
    # composed[T] = Σ_{orderings of T} sign · a_{t1}∘…∘a_{ts}, built from smaller subsets
    composed = {0: DiffOp.identity(n)}
    for size in range(1, N + 1):
        for subset in combinations(range(N), size):
            mask = 0
            for i in subset:
                mask |= 1 << i
            total = DiffOp.zero(n)
            for position, i in enumerate(subset):
                rest = composed[mask & ~(1 << i)]
                if rest.is_zero:
                    continue
                term = ops[i].compose(rest)
                total = total + term if position % 2 == 0 else total - term
            composed[mask] = total
        for mask in [m for m in composed if bin(m).count("1") < size - 1]:
            del composed[mask]
    return composed[(1 << N) - 1]


def alt_bracket(ops: Sequence[DiffOp]) -> DiffOp:
    """Σ_{σ∈S_N} (-1)^σ a_{σ(1)}∘…∘a_{σ(N)}."""
    ops = tuple(ops)
    if len(ops) < 1:
        raise ArityError("The alternating bracket needs at least one operator")
    n = ops[0].n
    if any(op.n != n for op in ops):
        raise DimensionMismatchError("All operators of a bracket must act in the same variables")
    return _alt_bracket(ops)


def bracket_action(outer: int, inner: int, ops: Sequence[DiffOp]) -> DiffOp:
    """Δ_outer[Δ_inner](a_1, …, a_{outer+inner-1}) over unshuffles."""
    ops = tuple(ops)
    if len(ops) != outer + inner - 1:
        raise ArityError(
            f"Δ_{outer}[Δ_{inner}] takes {outer + inner - 1} operators, got {len(ops)}"
        )
    total = DiffOp.zero(ops[0].n)
    for head, tail, sign in unshuffles(inner, len(ops)):
        nested = alt_bracket([ops[i] for i in head])
        value = alt_bracket([nested] + [ops[i] for i in tail])
        total = total + value if sign > 0 else total - value
    return total


class DeltaIdentityResult(NamedTuple):
    identity: str
    outer: int
    inner: int
    passed: bool
    lhs: DiffOp
    rhs: DiffOp
    residual: DiffOp


def delta_identity(outer: int, inner: int) -> Tuple[str, int]:
    """(name, multiple of Δ_{outer+inner-1}) predicted for Δ_outer[Δ_inner]."""
    if inner % 2 == 1:
        return "inner-odd", outer
    if outer % 2 == 0:
        return "both-even", 0
    return "inner-even", 1


def delta_identity_check(outer: int, inner: int, sample: Sequence[DiffOp]) -> DeltaIdentityResult:
    if outer < 2 or inner < 2:
        raise ArityError(f"Bracket arities must be at least 2, got ({outer}, {inner})")
    name, multiple = delta_identity(outer, inner)
    lhs = bracket_action(outer, inner, sample)
    rhs = alt_bracket(sample).scaled(multiple) if multiple else DiffOp.zero(sample[0].n)
    residual = lhs - rhs
    logger.info(
        f"[DELTA] Δ_{outer}[Δ_{inner}] ({name}, multiple {multiple}): "
        f"{'holds' if residual.is_zero else 'residual ' + residual.to_string()}"
    )
    return DeltaIdentityResult(name, outer, inner, residual.is_zero, lhs, rhs, residual)


# top-order structure of brackets of w_i ∂^p


class OnlyWronskianResult(NamedTuple):
    passed: bool
    exact: bool
    N: int
    p: int
    balance: int
    normalization: Fraction
    bracket: DiffOp
    wronskian: Coefficient
    residual: DiffOp
    tail: DiffOp


def balance_exponent(N: int, p: int) -> int:
    return N * p - N * (N - 1) // 2


@lru_cache(maxsize=None)
def wronskian_normalization(N: int, p: int) -> Fraction:
    """Coefficient of ∂^balance in the bracket of (z^j/j!)∂^p, whose Wronskian is 1."""
    probes = [DiffOp.term(divided_power(j), p) for j in range(N)]
    top = alt_bracket(probes).coefficient(balance_exponent(N, p))
    if not top.is_constant():
        raise ValueError(f"Top coefficient {top} of the probe bracket is not constant")
    value = top.constant_term()
    if value == 0:
        logger.warning(f"[ONLY-WRONSKIAN] normalization vanishes for N={N}, p={p}")
    return value


def check_only_wronskian(N: int, p: int, weights: Sequence[Coefficient]) -> OnlyWronskianResult:
    """
    Bracket of N operators w_i∂^p against W(w_1, …, w_N)·∂^{Np - N(N-1)/2}.

    ``passed`` certifies the top order: nothing above the balance exponent
    and the coefficient there equal to normalization·W. ``exact`` is the
    literal equality with normalization 1 and no lower-order tail.
    """
    if N % 2:
        raise ValueError(f"Only even N is supported (odd N needs half-integer powers of ∂), got {N}")
    if 2 * p < N - 1:
        raise ValueError(f"Need p >= (N-1)/2, got p={p} for N={N}")
    if len(weights) != N:
        raise ArityError(f"Expected {N} weights, got {len(weights)}")
    ops = [DiffOp.term(w, p) for w in weights]
    bracket = alt_bracket(ops)
    m = balance_exponent(N, p)
    c = wronskian_normalization(N, p)
    w = laurent_wronskian(weights)

    excess = bracket.restricted(lambda alpha: alpha.order > m)
    top_residual = DiffOp.term(bracket.coefficient(m) - w * c, m)
    residual = excess + top_residual
    tail = bracket.restricted(lambda alpha: alpha.order < m)
    passed = residual.is_zero
    exact = passed and c == 1 and tail.is_zero
    logger.info(
        f"[ONLY-WRONSKIAN] N={N} p={p} balance={m} normalization={c}: "
        f"{'top order matches' if passed else 'mismatch'}; tail {'empty' if tail.is_zero else 'present'}"
    )
    return OnlyWronskianResult(passed, exact, N, p, m, c, bracket, w, residual, tail)


def closure_check(N: int, weights: Sequence[Coefficient]) -> Tuple[bool, DiffOp]:
    """The bracket of N operators w_i∂^{N/2} has the form u∂^{N/2}."""
    if N % 2:
        raise ValueError(f"Closure of w∂^(N/2) needs even N, got {N}")
    bracket = alt_bracket([DiffOp.term(w, N // 2) for w in weights])
    closed = all(alpha.order == N // 2 for alpha in bracket.orders())
    return closed, bracket


# even-N homotopy structure


class HomotopyScan(NamedTuple):
    passed: bool
    tuples_total: int
    tuples_checked: int
    witness: Optional[Tuple[DiffOp, ...]]
    value: Optional[DiffOp]


def basis_operators(max_degree: int, max_order: int) -> List[DiffOp]:
    """z^a ∂^b for a ≤ max_degree, b ≤ max_order, ordered by (b, a)."""
    return [
        DiffOp.term(Polynomial.monomial([a]), b)
        for b in range(max_order + 1)
        for a in range(max_degree + 1)
    ]


def even_homotopy_check(
    N: int, basis: Sequence[DiffOp], budget: Optional[int] = None
) -> HomotopyScan:
    """Δ_N[Δ_N] on every increasing (2N-1)-tuple of distinct basis operators."""
    arity = 2 * N - 1
    total = comb(len(basis), arity) if arity <= len(basis) else 0
    if budget is not None and total > budget:
        raise BudgetExceededError(total, budget)
    if total == 0:
        logger.warning(f"[HOMOTOPY] {len(basis)} basis operators cannot fill {arity} slots")
    checked = 0
    for indices in combinations(range(len(basis)), arity):
        args = tuple(basis[i] for i in indices)
        checked += 1
        value = bracket_action(N, N, args)
        if not value.is_zero:
            logger.info(f"[HOMOTOPY] Δ_{N}[Δ_{N}] nonzero on tuple {checked}")
            return HomotopyScan(False, total, checked, args, value)
    return HomotopyScan(True, total, checked, None, None)


# vector fields


def vector_field(components: Sequence[Polynomial]) -> DiffOp:
    """Σ f_i ∂_i"""
    n = len(components)
    terms = {}
    for i, f in enumerate(components):
        alpha = [0] * n
        alpha[i] = 1
        terms[tuple(alpha)] = f
    return DiffOp(terms, n)


def is_vector_field(op: DiffOp) -> bool:
    return all(alpha.order == 1 for alpha in op.orders())


def vector_field_bracket_check(n: int, N: int, fields: Sequence[DiffOp]) -> Tuple[bool, DiffOp]:
    """Whether the N-bracket of the given vector fields on n-space is again a vector field."""
    if len(fields) != N:
        raise ArityError(f"An {N}-bracket takes {N} vector fields, got {len(fields)}")
    for field in fields:
        if field.n != n:
            raise DimensionMismatchError(f"{field} acts in {field.n} variables, expected {n}")
        if not is_vector_field(field):
            raise ValueError(f"{field} is not a vector field")
    bracket = alt_bracket(fields)
    closed = is_vector_field(bracket)
    logger.info(
        f"[VECTOR-FIELDS] {N}-bracket in {n} variables: "
        f"{'vector field' if closed else 'orders ' + str([tuple(a) for a in bracket.orders()])}"
    )
    return closed, bracket


# random samples


def random_polynomial(rng: random.Random, n: int, max_degree: int, spread: int = 3) -> Polynomial:
    terms = {}
    for exps in product(range(max_degree + 1), repeat=n):
        if sum(exps) <= max_degree:
            terms[exps] = rng.randint(-spread, spread)
    return Polynomial.from_terms(terms, n)


def random_diffops(
    count: int, max_order: int, max_degree: int, seed: int, n: int = 1
) -> List[DiffOp]:
    """Seeded operators with random integer coefficients."""
    rng = random.Random(seed)
    result = []
    for _ in range(count):
        terms = {}
        for alpha in product(range(max_order + 1), repeat=n):
            if sum(alpha) <= max_order:
                terms[alpha] = random_polynomial(rng, n, max_degree)
        result.append(DiffOp(terms, n))
    return result


def random_vector_fields(count: int, n: int, max_degree: int, seed: int) -> List[DiffOp]:
    rng = random.Random(seed)
    return [
        vector_field([random_polynomial(rng, n, max_degree) for _ in range(n)])
        for _ in range(count)
    ]
