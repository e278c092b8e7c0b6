"""
Identity verifiers for skew operators: the homotopy N-Jacobi identity, the
(N,k,r)-Jacobi family, the full-permutation normalization, vanishing
certificates, the Hochschild differential and the graded Jacobi identity of
the Richardson–Nijenhuis bracket.
"""

import logging
from fractions import Fraction
from itertools import permutations
from math import comb, factorial
from typing import Dict, List, NamedTuple, Optional, Sequence

from models.reports import JacobiReport, Witness
from services.skew_operators import (
    ScanResult,
    SkewOp,
    TestSpace,
    action,
    format_tuple,
    inner_product,
    rn_bracket,
    scan_for_nonzero,
)
from utils.combinatorics import permutation_sign
from utils.errors import ArityError, BudgetExceededError, NotCertifiedError
from utils.polynomial import Polynomial

logger = logging.getLogger(__name__)


def build_report(
    identity: str,
    operators: Sequence[SkewOp],
    arity: int,
    space: TestSpace,
    scan: ScanResult,
    soundness_bound: int,
    unshuffles_per_tuple: int = 0,
    parameters: Optional[Dict] = None,
    notes: Optional[List[str]] = None,
    seed: Optional[int] = None,
    extra: Optional[Dict[str, str]] = None,
) -> JacobiReport:
    witness = None
    if scan.witness is not None:
        witness = Witness(
            arguments=format_tuple(scan.witness), value=str(scan.value), extra=extra or {}
        )
    notes = list(notes or [])
    if scan.vacuous:
        notes.append(
            f"arity {arity} exceeds the test-space basis of {space.size} monomials; vacuous"
        )
    if not scan.certifying:
        notes.append("sampled run: non-certifying")
    if space.degree < soundness_bound:
        notes.append(
            f"test-space degree {space.degree} is below the soundness bound {soundness_bound}"
        )
    return JacobiReport(
        identity=identity,
        operators=[o.label for o in operators],
        n=space.n,
        degree_bound=space.degree,
        soundness_bound=soundness_bound,
        basis_size=space.size,
        arity=arity,
        tuples_total=scan.tuples_total,
        tuples_checked=scan.tuples_checked,
        unshuffles_per_tuple=unshuffles_per_tuple,
        passed=scan.witness is None,
        vacuous=scan.vacuous,
        certifying=scan.certifying and space.degree >= soundness_bound,
        witness=witness,
        parameters=parameters or {},
        notes=notes,
        seed=seed,
    )


def check_action_vanishing(
    outer: SkewOp,
    inner: SkewOp,
    space: TestSpace,
    identity: str = "action-vanishing",
    budget: Optional[int] = None,
    sample: Optional[int] = None,
    seed: Optional[int] = None,
    parameters: Optional[Dict] = None,
    soundness_bound: Optional[int] = None,
) -> JacobiReport:
    """
    outer[inner] = 0 on every increasing tuple of test monomials.

    ``soundness_bound`` overrides the sum of slot bounds for operators that
    only read a truncation of their arguments.
    """
    op = action(outer, inner)
    scan = scan_for_nonzero(op, space, budget=budget, sample=sample, seed=seed)
    report = build_report(
        identity,
        [outer, inner],
        op.arity,
        space,
        scan,
        op.slot_order_bound if soundness_bound is None else soundness_bound,
        unshuffles_per_tuple=comb(op.arity, inner.arity),
        parameters=parameters,
        seed=seed if sample is not None else None,
    )
    logger.info(
        f"[JACOBI] {op.label} on {space}: {'pass' if report.passed else 'fail'} "
        f"after {report.tuples_checked}/{report.tuples_total} tuples"
    )
    return report


def check_homotopy_jacobi(
    op: SkewOp,
    space: TestSpace,
    budget: Optional[int] = None,
    sample: Optional[int] = None,
    seed: Optional[int] = None,
    soundness_bound: Optional[int] = None,
) -> JacobiReport:
    """Δ[Δ] = 0; each tuple sums C(2N-1, N) unshuffles."""
    return check_action_vanishing(
        op,
        op,
        space,
        identity="homotopy-jacobi",
        budget=budget,
        sample=sample,
        seed=seed,
        soundness_bound=soundness_bound,
    )


def nkr_tuple_count(space: TestSpace, N: int, k: int, r: int) -> int:
    return space.tuple_count(r) * space.tuple_count(k) * space.tuple_count(2 * N - k - r - 1)


def check_nkr_jacobi(
    op: SkewOp,
    k: int,
    r: int,
    space: TestSpace,
    budget: Optional[int] = None,
) -> JacobiReport:
    """
    [[Δ_{a_1..a_r}, Δ_{b_1..b_k}]] = 0 for all test tuples a, b.

    (N, N-1, 0) is the Filippov identity; (N, 0, 0) is [[Δ, Δ]] = 0.
    """
    N = op.arity
    if not 0 <= r <= k < N:
        raise ArityError(f"(N,k,r)-Jacobi needs 0 <= r <= k < N, got N={N}, k={k}, r={r}")
    total = nkr_tuple_count(space, N, k, r)
    if budget is not None and total > budget:
        raise BudgetExceededError(total, budget)

    checked = 0
    label = f"({N},{k},{r})-jacobi"
    bracket_arity = 2 * N - k - r - 1
    for a_args in space.tuples(r):
        left = inner_product(op, a_args)
        for b_args in space.tuples(k):
            right = inner_product(op, b_args)
            bracket = rn_bracket(left, right)
            scan = scan_for_nonzero(bracket, space)
            checked += scan.tuples_checked
            if scan.witness is not None:
                logger.info(f"[NKR] {op.label} {label}: fail")
                scan = ScanResult(scan.witness, scan.value, checked, total, False, True)
                return build_report(
                    label,
                    [op],
                    bracket.arity,
                    space,
                    scan,
                    2 * op.slot_order_bound,
                    parameters={"N": N, "k": k, "r": r},
                    extra={"a": ", ".join(format_tuple(a_args)), "b": ", ".join(format_tuple(b_args))},
                )

    notes = []
    if r == 0 and k == 0 and N % 2 == 1:
        notes.append("[[Δ, Δ]] vanishes identically for odd arity")
    vacuous = space.tuple_count(bracket_arity) == 0
    if vacuous:
        logger.warning(f"[NKR] {op.label} {label}: bracket arity {bracket_arity} exceeds the basis")
    scan = ScanResult(None, None, checked, total, vacuous, True)
    logger.info(f"[NKR] {op.label} {label}: pass after {checked} evaluations")
    return build_report(
        label,
        [op],
        bracket_arity,
        space,
        scan,
        2 * op.slot_order_bound,
        parameters={"N": N, "k": k, "r": r},
        notes=notes,
    )


def full_permutation_value(op: SkewOp, args: Sequence[Polynomial]) -> Polynomial:
    """1/(N!(N-1)!) Σ_{σ∈S_{2N-1}} (-1)^σ Δ(Δ(a_σ(1..N)), a_σ(N+1..2N-1))."""
    N = op.arity
    if len(args) != 2 * N - 1:
        raise ArityError(f"Expected {2 * N - 1} arguments, got {len(args)}")
    total = Polynomial.zero(op.n)
    for perm in permutations(range(len(args))):
        inside = op(*(args[i] for i in perm[:N]))
        if inside.is_zero:
            continue
        value = op(inside, *(args[i] for i in perm[N:]))
        total = total + value if permutation_sign(perm) > 0 else total - value
    return total * Fraction(1, factorial(N) * factorial(N - 1))


# certificates and differentials


class Certificate(NamedTuple):
    """A vanishing verdict scoped to the operator and test space it was obtained on."""

    kind: str
    operator: str
    n: int
    degree: int
    passed: bool
    certifying: bool

    def covers(self, op: SkewOp, kind: str, space: Optional[TestSpace] = None) -> bool:
        """A certificate obtained on a lower degree or another algebra says nothing about ``space``."""
        if space is not None and (self.n != space.n or self.degree < space.degree):
            return False
        return self.kind == kind and self.operator == op.label and self.passed and self.certifying


def certify_rn_vanishing(op: SkewOp, space: TestSpace, budget: Optional[int] = None) -> Certificate:
    scan = scan_for_nonzero(rn_bracket(op, op), space, budget=budget)
    certificate = Certificate(
        "rn-vanishing",
        op.label,
        space.n,
        space.degree,
        scan.witness is None,
        space.degree >= 2 * op.slot_order_bound,
    )
    logger.info(f"[CERTIFY] [[{op.label}, {op.label}]] = 0 on {space}: {certificate.passed}")
    return certificate


def certify_homotopy_jacobi(
    op: SkewOp, space: TestSpace, budget: Optional[int] = None
) -> Certificate:
    report = check_homotopy_jacobi(op, space, budget=budget)
    return Certificate(
        "homotopy-jacobi",
        op.label,
        space.n,
        space.degree,
        report.passed,
        report.certifying,
    )


def hochschild_differential(
    op: SkewOp, other: SkewOp, certificate: Certificate, space: Optional[TestSpace] = None
) -> SkewOp:
    """
    d_Δ(∇) = [[Δ, ∇]] for an even-arity Δ with a vanishing certificate.

    Pass the working ``space`` to require the certificate to cover it.
    """
    if op.arity % 2:
        raise NotCertifiedError(f"The Hochschild differential needs even arity, {op.label} has {op.arity}")
    if not certificate.covers(op, "rn-vanishing", space):
        scope = f" covering {space}" if space is not None else ""
        raise NotCertifiedError(f"No passing [[Δ, Δ]] = 0 certificate for {op.label}{scope}")
    return rn_bracket(op, other)


def graded_jacobiator(first: SkewOp, second: SkewOp, third: SkewOp) -> SkewOp:
    """
    [[P,[[Q,R]]]] - [[[[P,Q]],R]] - (-1)^{pq} [[Q,[[P,R]]]] with p, q the
    arities minus one; vanishes identically.
    """
    p, q = first.arity - 1, second.arity - 1
    left = rn_bracket(first, rn_bracket(second, third))
    middle = rn_bracket(rn_bracket(first, second), third)
    last = rn_bracket(second, rn_bracket(first, third))
    result = left - middle - last if (p * q) % 2 == 0 else left - middle + last
    result.label = f"jacobiator({first.label}, {second.label}, {third.label})"
    return result


def check_zero_operator(
    op: SkewOp,
    space: TestSpace,
    identity: str,
    soundness_bound: Optional[int] = None,
    budget: Optional[int] = None,
    sample: Optional[int] = None,
    seed: Optional[int] = None,
    parameters: Optional[Dict] = None,
) -> JacobiReport:
    """Generic report for "op vanishes on the test space"."""
    scan = scan_for_nonzero(op, space, budget=budget, sample=sample, seed=seed)
    return build_report(
        identity,
        [op],
        op.arity,
        space,
        scan,
        op.slot_order_bound if soundness_bound is None else soundness_bound,
        parameters=parameters,
        seed=seed if sample is not None else None,
    )
