"""
Skew-symmetric multilinear operators on the polynomial algebra and the
operator calculus built on them: inner product, exterior multiplication,
action, Richardson–Nijenhuis bracket and the Wronskian norm.

Operators are evaluated lazily; equality of two operators is decided on a
finite ``TestSpace`` of monomials.
"""

import logging
import random
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Callable, Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

from utils.combinatorics import unshuffles
from utils.errors import (
    ArityError,
    BudgetExceededError,
    DimensionMismatchError,
    MissingMetadataError,
)
from utils.polynomial import MultiIndex, Polynomial, determinant, monomials_up_to

logger = logging.getLogger(__name__)

Evaluator = Callable[[Tuple[Polynomial, ...]], Polynomial]

EVALUATION_CACHE_SIZE = 8192


class SkewOp:
    """
    A k-linear alternating operator A^k -> A.

    ``wronskian_spec`` is the list of derivative multiindices when the
    operator is a (generalized) Wronskian ∂^{σ_1} ∧ … ∧ ∂^{σ_k};
    ``slot_order_bound`` is the highest derivative order any single argument
    can receive, which is what makes finite test spaces conclusive.
    """

    __slots__ = ("arity", "n", "label", "slot_order_bound", "wronskian_spec", "_evaluator")

    def __init__(
        self,
        arity: int,
        n: int,
        evaluator: Evaluator,
        label: str,
        slot_order_bound: int,
        wronskian_spec: Optional[Tuple[MultiIndex, ...]] = None,
        memoize: bool = False,
    ):
        if arity < 0:
            raise ArityError(f"Operator arity must be non-negative, got {arity}")
        self.arity = arity
        self.n = n
        self.label = label
        self.slot_order_bound = slot_order_bound
        self.wronskian_spec = wronskian_spec
        self._evaluator = lru_cache(maxsize=EVALUATION_CACHE_SIZE)(evaluator) if memoize else evaluator

    def __call__(self, *args: Polynomial) -> Polynomial:
        if len(args) != self.arity:
            raise ArityError(f"{self.label} takes {self.arity} arguments, got {len(args)}")
        for arg in args:
            if arg.n != self.n:
                raise DimensionMismatchError(
                    f"{self.label} acts on polynomials in {self.n} variables, got {arg.n}"
                )
        return self._evaluator(tuple(args))

    def evaluate(self, args: Sequence[Polynomial]) -> Polynomial:
        return self(*args)

    def _check_compatible(self, other: "SkewOp") -> None:
        if other.n != self.n:
            raise DimensionMismatchError(
                f"{self.label} and {other.label} act on different algebras "
                f"({self.n} vs {other.n} variables)"
            )

    def __add__(self, other: "SkewOp") -> "SkewOp":
        self._check_compatible(other)
        if other.arity != self.arity:
            raise ArityError(f"Cannot add operators of arity {self.arity} and {other.arity}")
        left, right = self._evaluator, other._evaluator
        return SkewOp(
            self.arity,
            self.n,
            lambda args: left(args) + right(args),
            f"({self.label} + {other.label})",
            max(self.slot_order_bound, other.slot_order_bound),
        )

    def __sub__(self, other: "SkewOp") -> "SkewOp":
        return self + other.scaled(-1)

    def __neg__(self) -> "SkewOp":
        return self.scaled(-1)

    def scaled(self, factor: Union[int, Fraction]) -> "SkewOp":
        inner = self._evaluator
        return SkewOp(
            self.arity,
            self.n,
            lambda args: inner(args) * factor,
            f"{factor}*{self.label}",
            self.slot_order_bound,
        )

    def __rmul__(self, factor: Union[int, Fraction]) -> "SkewOp":
        return self.scaled(factor)

    def __repr__(self) -> str:
        return f"SkewOp({self.label}, arity={self.arity}, n={self.n})"


class TestSpace:
    """Monomials of total degree <= degree in n variables, in a fixed order."""

    __test__ = False

    def __init__(self, n: int, degree: int):
        if degree < 0:
            raise ValueError(f"Test-space degree must be non-negative, got {degree}")
        self.n = n
        self.degree = degree
        self.exponents = monomials_up_to(n, degree)
        self.basis = [Polynomial.monomial(exps) for exps in self.exponents]

    @property
    def size(self) -> int:
        return len(self.basis)

    def tuple_count(self, arity: int) -> int:
        return comb(self.size, arity) if arity <= self.size else 0

    def tuples(self, arity: int) -> Iterator[Tuple[Polynomial, ...]]:
        for indices in combinations(range(self.size), arity):
            yield tuple(self.basis[i] for i in indices)

    def describe(self) -> dict:
        return {"n": self.n, "degree": self.degree, "basis_size": self.size}

    def __repr__(self) -> str:
        return f"TestSpace(n={self.n}, degree={self.degree}, size={self.size})"


class ScanResult(NamedTuple):
    witness: Optional[Tuple[Polynomial, ...]]
    value: Optional[Polynomial]
    tuples_checked: int
    tuples_total: int
    vacuous: bool
    certifying: bool


class EqualityResult(NamedTuple):
    equal: bool
    witness: Optional[Tuple[Polynomial, ...]]
    difference: Optional[Polynomial]
    tuples_checked: int
    vacuous: bool
    certifying: bool


# constructors


def total_derivative(sigma: Sequence[int]) -> SkewOp:
    """The arity-one operator a -> D_σ(a)."""
    sigma = MultiIndex(sigma)
    label = f"d^{sigma[0]}" if sigma.n == 1 else f"D[{','.join(map(str, sigma))}]"
    return SkewOp(
        1,
        sigma.n,
        lambda args: args[0].apply_multiindex(sigma),
        label,
        sigma.order,
        wronskian_spec=(sigma,),
    )


def derivation_power(i: int, n: int = 1, var: int = 0) -> SkewOp:
    sigma = [0] * n
    sigma[var] = i
    return total_derivative(sigma)


def identity_operator(n: int = 1) -> SkewOp:
    op = total_derivative([0] * n)
    op.label = "id"
    return op


def constant_operator(value: Polynomial) -> SkewOp:
    return SkewOp(0, value.n, lambda args: value, f"const({value})", 0)


def zero_operator(arity: int, n: int) -> SkewOp:
    zero = Polynomial.zero(n)
    return SkewOp(arity, n, lambda args: zero, "0", 0)


def determinant_operator(sigmas: Sequence[Sequence[int]], label: str) -> SkewOp:
    """det‖D_{σ_i}(a_j)‖: rows are multiindices, columns are arguments."""
    rows = tuple(MultiIndex(s) for s in sigmas)
    if not rows:
        raise ArityError("A determinant operator needs at least one row")
    n = rows[0].n
    if any(s.n != n for s in rows):
        raise DimensionMismatchError("All multiindices of a determinant operator need equal length")

    def evaluate(args: Tuple[Polynomial, ...]) -> Polynomial:
        matrix = [[a.apply_multiindex(sigma) for a in args] for sigma in rows]
        return determinant(matrix)

    return SkewOp(
        len(rows),
        n,
        evaluate,
        label,
        max(s.order for s in rows),
        wronskian_spec=rows,
        memoize=True,
    )


# operations


def inner_product(op: SkewOp, args: Sequence[Polynomial]) -> SkewOp:
    """Δ_{a_1..a_m}(a_{m+1}, …) = Δ(a_1, …, a_k)."""
    fixed = tuple(args)
    if len(fixed) > op.arity:
        raise ArityError(
            f"Inner product with {len(fixed)} arguments exceeds the arity {op.arity} of {op.label}"
        )
    for arg in fixed:
        if arg.n != op.n:
            raise DimensionMismatchError(f"Inner product argument in {arg.n} variables, expected {op.n}")
    evaluator = op._evaluator
    label = f"inner({op.label}; {', '.join(str(a) for a in fixed)})"
    return SkewOp(
        op.arity - len(fixed),
        op.n,
        lambda rest: evaluator(fixed + rest),
        label,
        op.slot_order_bound,
        memoize=True,
    )


def wedge(left: SkewOp, right: SkewOp) -> SkewOp:
    """Exterior product Σ_{σ∈S^k_{k+l}} (-1)^σ Δ(a_σ(1..k))·∇(a_σ(k+1..k+l))."""
    left._check_compatible(right)
    k, l = left.arity, right.arity
    terms = unshuffles(k, k + l)
    first, second = left._evaluator, right._evaluator

    def evaluate(args: Tuple[Polynomial, ...]) -> Polynomial:
        total = Polynomial.zero(left.n)
        for head, tail, sign in terms:
            value = first(tuple(args[i] for i in head))
            if value.is_zero:
                continue
            value = value * second(tuple(args[i] for i in tail))
            total = total + value if sign > 0 else total - value
        return total

    spec = None
    if left.wronskian_spec is not None and right.wronskian_spec is not None:
        spec = left.wronskian_spec + right.wronskian_spec
    return SkewOp(
        k + l,
        left.n,
        evaluate,
        f"wedge({left.label}, {right.label})",
        max(left.slot_order_bound, right.slot_order_bound),
        wronskian_spec=spec,
        memoize=True,
    )


def action(outer: SkewOp, inner: SkewOp) -> SkewOp:
    """Δ[∇] = Σ_{σ∈S^l_{k+l-1}} (-1)^σ Δ(∇(a_σ(1..l)), a_σ(l+1..k+l-1))."""
    outer._check_compatible(inner)
    k, l = outer.arity, inner.arity
    arity = k + l - 1
    if arity < 0:
        raise ArityError("The action of an arity-0 operator on an arity-0 operator is undefined")
    label = f"act({outer.label}, {inner.label})"
    bound = outer.slot_order_bound + inner.slot_order_bound
    if k == 0:
        zero = Polynomial.zero(outer.n)
        return SkewOp(arity, outer.n, lambda args: zero, label, bound)
    terms = unshuffles(l, arity)
    apply_outer, apply_inner = outer._evaluator, inner._evaluator

    def evaluate(args: Tuple[Polynomial, ...]) -> Polynomial:
        total = Polynomial.zero(outer.n)
        for head, tail, sign in terms:
            inside = apply_inner(tuple(args[i] for i in head))
            if inside.is_zero:
                continue
            value = apply_outer((inside,) + tuple(args[i] for i in tail))
            total = total + value if sign > 0 else total - value
        return total

    return SkewOp(arity, outer.n, evaluate, label, bound, memoize=True)


def rn_bracket(left: SkewOp, right: SkewOp) -> SkewOp:
    """[[Δ, ∇]] = Δ[∇] - (-1)^{(k-1)(l-1)} ∇[Δ]."""
    k, l = left.arity, right.arity
    forward = action(left, right)
    backward = action(right, left)
    sign = -1 if ((k - 1) * (l - 1)) % 2 else 1
    ahead, behind = forward._evaluator, backward._evaluator

    def evaluate(args: Tuple[Polynomial, ...]) -> Polynomial:
        if sign > 0:
            return ahead(args) - behind(args)
        return ahead(args) + behind(args)

    return SkewOp(
        k + l - 1,
        left.n,
        evaluate,
        f"rn({left.label}, {right.label})",
        left.slot_order_bound + right.slot_order_bound,
        memoize=True,
    )


def op_norm(op: SkewOp) -> int:
    """|W^ī| = Σ |σ_j| over the Wronskian multiindices."""
    if op.wronskian_spec is None:
        raise MissingMetadataError(f"{op.label} carries no Wronskian metadata")
    return sum(sigma.order for sigma in op.wronskian_spec)


# verification on test spaces


def scan_for_nonzero(
    op: SkewOp,
    space: TestSpace,
    budget: Optional[int] = None,
    sample: Optional[int] = None,
    seed: Optional[int] = None,
) -> ScanResult:
    """
    Evaluate ``op`` on strictly increasing tuples of test monomials and stop
    at the first nonzero value.

    By multilinearity and skew-symmetry these tuples determine the operator
    on the span of the test space. A ``sample`` run evaluates a seeded
    random subset instead and is not certifying.
    """
    if op.n != space.n:
        raise DimensionMismatchError(
            f"{op.label} acts in {op.n} variables but the test space has {space.n}"
        )
    total = space.tuple_count(op.arity)
    if total == 0:
        logger.warning(
            f"[SCAN] {op.label}: arity {op.arity} exceeds the test-space basis "
            f"({space.size}); the check is vacuous"
        )
        return ScanResult(None, None, 0, 0, True, sample is None)

    if sample is not None:
        rng = random.Random(seed)
        picked = sorted(
            {tuple(sorted(rng.sample(range(space.size), op.arity))) for _ in range(sample)}
        )
        candidates = (tuple(space.basis[i] for i in indices) for indices in picked)
        logger.warning(f"[SCAN] {op.label}: sampling {len(picked)} of {total} tuples (non-certifying)")
    else:
        if budget is not None and total > budget:
            raise BudgetExceededError(total, budget)
        candidates = space.tuples(op.arity)

    checked = 0
    for args in candidates:
        checked += 1
        value = op._evaluator(args)
        if not value.is_zero:
            logger.info(f"[SCAN] {op.label}: nonzero value {value} at tuple {checked}")
            return ScanResult(args, value, checked, total, False, sample is None)
    return ScanResult(None, None, checked, total, False, sample is None)


def op_equal_on(
    left: SkewOp,
    right: SkewOp,
    space: TestSpace,
    budget: Optional[int] = None,
    sample: Optional[int] = None,
    seed: Optional[int] = None,
) -> EqualityResult:
    if left.arity != right.arity:
        raise ArityError(f"Cannot compare operators of arity {left.arity} and {right.arity}")
    scan = scan_for_nonzero(left - right, space, budget=budget, sample=sample, seed=seed)
    return EqualityResult(
        equal=scan.witness is None,
        witness=scan.witness,
        difference=scan.value,
        tuples_checked=scan.tuples_checked,
        vacuous=scan.vacuous,
        certifying=scan.certifying,
    )


def is_alternating_on(op: SkewOp, args: Sequence[Polynomial], i: int, j: int) -> bool:
    """Swapping arguments i and j flips the sign of the value."""
    swapped = list(args)
    swapped[i], swapped[j] = swapped[j], swapped[i]
    return op(*swapped) == -op(*args)


def format_tuple(args: Sequence[Polynomial]) -> List[str]:
    return [str(a) for a in args]
