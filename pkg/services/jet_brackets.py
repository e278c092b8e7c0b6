"""
Brackets on polynomials in n variables: □_k = det‖D_{σ_i}(a_j)‖ over all
multiindices of order ≤ k, the Nambu Jacobian bracket, and the harness for
the vanishing of □_{k_out}[□_{k_in}].
"""

import logging
from itertools import combinations
from math import comb
from typing import List, NamedTuple, Optional, Sequence, Tuple

from models.reports import JacobiReport
from services.homotopy_checks import check_action_vanishing
from services.skew_operators import SkewOp, TestSpace, determinant_operator
from utils.errors import ArityError, BudgetExceededError, DimensionMismatchError
from utils.polynomial import MultiIndex, Polynomial, monomials_up_to

logger = logging.getLogger(__name__)


def jet_dimension(n: int, k: int) -> int:
    """Σ_{i=0}^{k} C(n+i-1, n-1), checked against the closed form C(n+k, n)."""
    if n < 1 or k < 0:
        raise ValueError(f"Need n >= 1 and k >= 0, got n={n}, k={k}")
    summed = sum(comb(n + i - 1, n - 1) for i in range(k + 1))
    closed = comb(n + k, n)
    if summed != closed:
        raise ArithmeticError(f"Jet dimension mismatch: {summed} != {closed}")
    return closed


class JetBracketSpec:
    """Row layout of □_k: every σ with |σ| ≤ k, by order and then lexicographically."""

    def __init__(self, n: int, k: int):
        self.n = n
        self.k = k
        self.basis: List[MultiIndex] = monomials_up_to(n, k)
        if len(self.basis) != jet_dimension(n, k):
            raise ArithmeticError(f"Row count {len(self.basis)} differs from the jet dimension")

    @property
    def N(self) -> int:
        return len(self.basis)

    @property
    def norm(self) -> int:
        return sum(sigma.order for sigma in self.basis)

    def operator(self) -> SkewOp:
        return determinant_operator(self.basis, f"box({self.n},{self.k})")

    def describe(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "N": self.N,
            "norm": self.norm,
            "rows": [list(sigma) for sigma in self.basis],
        }

    def __repr__(self) -> str:
        return f"JetBracketSpec(n={self.n}, k={self.k}, N={self.N})"


def box_operator(n: int, k: int) -> SkewOp:
    return JetBracketSpec(n, k).operator()


def box_bracket(spec: JetBracketSpec, args: Sequence[Polynomial]) -> Polynomial:
    if len(args) != spec.N:
        raise ArityError(f"box({spec.n},{spec.k}) takes {spec.N} arguments, got {len(args)}")
    return spec.operator()(*args)


def nambu_operator(n: int) -> SkewOp:
    """det‖∂f_i/∂x^j‖; rows are the unit multiindices."""
    units = []
    for j in range(n):
        sigma = [0] * n
        sigma[j] = 1
        units.append(sigma)
    return determinant_operator(units, f"nambu{n}")


def nambu_bracket(args: Sequence[Polynomial]) -> Polynomial:
    if not args:
        raise ArityError("The Nambu bracket needs at least one argument")
    n = args[0].n
    if len(args) != n:
        raise ArityError(f"The Nambu bracket in {n} variables takes {n} arguments, got {len(args)}")
    return nambu_operator(n)(*args)


def cross_vanishing_space(n: int, k_in: int, k_out: int, degree_margin: int = 0) -> TestSpace:
    return TestSpace(n, k_in + k_out + degree_margin)


def check_cross_vanishing(
    n: int,
    k_in: int,
    k_out: int,
    degree_margin: int = 0,
    budget: Optional[int] = None,
    sample: Optional[int] = None,
    seed: Optional[int] = None,
) -> JacobiReport:
    """□_{k_out}[□_{k_in}] = 0 on monomials of per-slot degree ≤ k_in + k_out."""
    if min(n, k_in, k_out) < 1:
        raise ValueError(f"Need n, k_in, k_out >= 1, got ({n}, {k_in}, {k_out})")
    inner_spec, outer_spec = JetBracketSpec(n, k_in), JetBracketSpec(n, k_out)
    space = cross_vanishing_space(n, k_in, k_out, degree_margin)
    arity = inner_spec.N + outer_spec.N - 1
    required = space.tuple_count(arity)
    if sample is None and budget is not None and required > budget:
        raise BudgetExceededError(required, budget)
    report = check_action_vanishing(
        outer_spec.operator(),
        inner_spec.operator(),
        space,
        identity="jet-jacobi" if k_in == k_out else "jet-cross-jacobi",
        budget=budget,
        sample=sample,
        seed=seed,
        parameters={
            "n": n,
            "k_in": k_in,
            "k_out": k_out,
            "degree_margin": degree_margin,
            "norm_in": inner_spec.norm,
            "norm_out": outer_spec.norm,
            "norm_action": inner_spec.norm + outer_spec.norm,
        },
    )
    logger.info(
        f"[JET] box({n},{k_out})[box({n},{k_in})]: {'zero' if report.passed else 'nonzero'} "
        f"on {report.tuples_checked} tuples"
    )
    return report


class LeibnizResult(NamedTuple):
    holds: bool
    checked: int
    witness: Optional[Tuple[Polynomial, Polynomial, Tuple[Polynomial, ...]]]
    lhs: Optional[Polynomial]
    rhs: Optional[Polynomial]


def leibniz_rule_check(op: SkewOp, space: TestSpace) -> LeibnizResult:
    """
    Search for a failure of Δ(ab, c_2, …) = aΔ(b, c_2, …) + Δ(a, c_2, …)b
    over test monomials a ≤ b and increasing tuples c.
    """
    if op.n != space.n:
        raise DimensionMismatchError(f"{op.label} acts in {op.n} variables, test space has {space.n}")
    checked = 0
    basis = space.basis
    for i, j in combinations(range(space.size + 1), 2):
        a, b = basis[i], basis[j - 1]
        for rest in space.tuples(op.arity - 1):
            checked += 1
            lhs = op(a * b, *rest)
            rhs = a * op(b, *rest) + op(a, *rest) * b
            if lhs != rhs:
                logger.info(f"[LEIBNIZ] {op.label} fails on a={a}, b={b}, rest={list(map(str, rest))}")
                return LeibnizResult(False, checked, (a, b, rest), lhs, rhs)
    logger.info(f"[LEIBNIZ] {op.label} is a multi-derivation on {checked} test cases")
    return LeibnizResult(True, checked, None, None, None)
