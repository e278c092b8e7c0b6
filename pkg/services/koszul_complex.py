"""
The Koszul differential of a homotopy bracket on exterior powers of a
finite-dimensional subspace of polynomials, and homology ranks of the
resulting complex.
"""

import logging
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

from services.homotopy_checks import Certificate
from services.skew_operators import SkewOp
from utils.combinatorics import insert_sorted, sort_with_sign, unshuffles
from utils.errors import DimensionMismatchError, NotCertifiedError, NotClosedError
from utils.linear_algebra import SpanCoordinates, fraction_free_rank, matrix_product, row_reduction_rank
from utils.polynomial import Polynomial

logger = logging.getLogger(__name__)


class SpanBasis:
    """An ordered list of linearly independent polynomials with coordinate lookup."""

    def __init__(self, polys: Sequence[Polynomial]):
        if not polys:
            raise ValueError("A span basis needs at least one polynomial")
        self.n = polys[0].n
        self.polys: List[Polynomial] = []
        self._span = SpanCoordinates()
        for p in polys:
            if not self.extend(p):
                raise ValueError(f"{p} is linearly dependent on the preceding basis elements")

    def __len__(self) -> int:
        return len(self.polys)

    def __getitem__(self, index: int) -> Polynomial:
        return self.polys[index]

    def extend(self, p: Polynomial) -> bool:
        if p.n != self.n:
            raise DimensionMismatchError(f"Basis lives in {self.n} variables, got {p.n}")
        if not self._span.add(p.terms()):
            self._span.size -= 1
            return False
        self.polys.append(p)
        return True

    def coordinates(self, p: Polynomial) -> Optional[Dict[int, Fraction]]:
        return self._span.coordinates(p.terms())

    def labels(self) -> List[str]:
        return [str(p) for p in self.polys]


class ExteriorTensor:
    """Σ c_I e_{i_1} ∧ … ∧ e_{i_r} over strictly increasing index tuples I."""

    def __init__(self, base: SpanBasis, degree: int, components: Optional[Dict[Tuple[int, ...], Fraction]] = None):
        self.base = base
        self.degree = degree
        self.components: Dict[Tuple[int, ...], Fraction] = {}
        for indices, value in (components or {}).items():
            self.add(indices, value)

    @classmethod
    def basis_tensor(cls, base: SpanBasis, indices: Sequence[int]) -> "ExteriorTensor":
        return cls(base, len(indices), {tuple(indices): Fraction(1)})

    def add(self, indices: Sequence[int], value) -> None:
        """Accumulate value·e_indices after sorting the indices with sign."""
        if len(indices) != self.degree:
            raise DimensionMismatchError(f"Component of degree {len(indices)} in a degree-{self.degree} tensor")
        ordered, sign = sort_with_sign(indices)
        if sign == 0 or not value:
            return
        updated = self.components.get(ordered, Fraction(0)) + sign * Fraction(value)
        if updated:
            self.components[ordered] = updated
        else:
            self.components.pop(ordered, None)

    @property
    def is_zero(self) -> bool:
        return not self.components

    def __add__(self, other: "ExteriorTensor") -> "ExteriorTensor":
        result = ExteriorTensor(self.base, self.degree, self.components)
        for indices, value in other.components.items():
            result.add(indices, value)
        return result

    def scaled(self, factor) -> "ExteriorTensor":
        return ExteriorTensor(self.base, self.degree, {k: v * factor for k, v in self.components.items()})

    def as_dict(self) -> List[dict]:
        labels = self.base.labels()
        return [
            {"indices": list(indices), "factors": [labels[i] for i in indices], "value": str(value)}
            for indices, value in sorted(self.components.items())
        ]

    def __eq__(self, other):
        if not isinstance(other, ExteriorTensor):
            return NotImplemented
        return self.degree == other.degree and self.components == other.components

    def __repr__(self) -> str:
        return f"ExteriorTensor(degree={self.degree}, terms={len(self.components)})"


def _check_certificate(op: SkewOp, certificate: Optional[Certificate]) -> None:
    if certificate is None or not certificate.covers(op, "homotopy-jacobi"):
        raise NotCertifiedError(f"No passing Δ[Δ] = 0 certificate for {op.label}")


def koszul_differential(
    op: SkewOp,
    tensor: ExteriorTensor,
    certificate: Optional[Certificate] = None,
    auto_extend: bool = True,
) -> ExteriorTensor:
    """
    ∂_Δ(a_1∧…∧a_r) = Σ_{σ∈S^k_r} (-1)^σ Δ(a_σ(1..k)) ∧ a_σ(k+1) ∧ … ∧ a_σ(r).

    Values outside the span of the base are appended to it when
    ``auto_extend`` is set; the shared base grows in place.
    """
    _check_certificate(op, certificate)
    k, r = op.arity, tensor.degree
    base = tensor.base
    result = ExteriorTensor(base, max(r - k + 1, 0))
    if r < k:
        return result
    terms = unshuffles(k, r)
    for indices, coefficient in tensor.components.items():
        for head, tail, sign in terms:
            value = op(*(base[indices[i]] for i in head))
            if value.is_zero:
                continue
            coords = base.coordinates(value)
            if coords is None:
                if not auto_extend:
                    raise NotClosedError(f"{op.label} leaves the span of the base: {value}")
                base.extend(value)
                logger.warning(f"[KOSZUL] extended the base by {value}")
                coords = base.coordinates(value)
            rest = tuple(indices[i] for i in tail)
            for j, c in coords.items():
                merged, wedge_sign = insert_sorted(j, rest)
                if wedge_sign:
                    result.add(merged, coefficient * c * sign * wedge_sign)
    return result


def closure_defect(op: SkewOp, base: SpanBasis) -> Optional[Tuple[Tuple[int, ...], Polynomial]]:
    """First increasing basis tuple whose bracket leaves span(base), if any."""
    for indices in combinations(range(len(base)), op.arity):
        value = op(*(base[i] for i in indices))
        if not value.is_zero and base.coordinates(value) is None:
            return indices, value
    return None


def differential_matrix(
    op: SkewOp, base: SpanBasis, degree: int, certificate: Certificate
) -> List[List[Fraction]]:
    """Matrix of ∂_Δ: Λ^degree → Λ^{degree-k+1}; rows are target tuples, columns source tuples."""
    k = op.arity
    sources = list(combinations(range(len(base)), degree)) if 0 <= degree <= len(base) else []
    target_degree = degree - k + 1
    if target_degree < 0:
        return []
    targets = list(combinations(range(len(base)), target_degree))
    if degree < k:
        return [[Fraction(0)] * len(sources) for _ in targets]
    position = {t: i for i, t in enumerate(targets)}
    matrix = [[Fraction(0)] * len(sources) for _ in targets]
    for col, indices in enumerate(sources):
        image = koszul_differential(
            op, ExteriorTensor.basis_tensor(base, indices), certificate, auto_extend=False
        )
        for key, value in image.components.items():
            matrix[position[key]][col] = value
    return matrix


class KoszulRanks(NamedTuple):
    degree: int
    dimension: int
    rank_out: int
    kernel: int
    rank_in: int
    homology: int
    is_complex: bool
    ranks_agree: bool
    standard_range: bool


def _rank(matrix: List[List[Fraction]]) -> Tuple[int, bool]:
    if not matrix or not matrix[0]:
        return 0, True
    fast = fraction_free_rank(matrix)
    return fast, fast == row_reduction_rank(matrix)


def koszul_homology_rank(
    op: SkewOp, base: SpanBasis, degree: int, certificate: Certificate
) -> KoszulRanks:
    """
    dim ker(Λ^r → Λ^{r-k+1}) - rank(Λ^{r+k-1} → Λ^r), with both ranks computed
    by fraction-free elimination and cross-checked against row reduction.
    """
    _check_certificate(op, certificate)
    defect = closure_defect(op, base)
    if defect is not None:
        raise NotClosedError(f"{op.label} is not closed on the base: value {defect[1]} on {defect[0]}")
    size = len(base)
    dimension = comb(size, degree) if 0 <= degree <= size else 0
    if dimension == 0:
        logger.warning(f"[KOSZUL] Λ^{degree} of a {size}-dimensional base is zero")
        return KoszulRanks(degree, 0, 0, 0, 0, 0, True, True, degree >= 2)

    outgoing = differential_matrix(op, base, degree, certificate)
    incoming = differential_matrix(op, base, degree + op.arity - 1, certificate)
    rank_out, out_agree = _rank(outgoing)
    rank_in, in_agree = _rank(incoming)
    kernel = dimension - rank_out
    if rank_in > kernel:
        logger.warning(f"[KOSZUL] incoming rank {rank_in} exceeds the kernel dimension {kernel}")

    is_complex = True
    if outgoing and incoming and incoming[0]:
        product = matrix_product(outgoing, incoming)
        is_complex = all(value == 0 for row in product for value in row)
    if not is_complex:
        logger.warning(f"[KOSZUL] ∂² ≠ 0 at degree {degree + op.arity - 1} for {op.label}")
    if degree < 2:
        logger.warning(f"[KOSZUL] degree {degree} extends the range Λ^{{≥2}}")
    homology = max(kernel - rank_in, 0)
    return KoszulRanks(
        degree,
        dimension,
        rank_out,
        kernel,
        rank_in,
        homology,
        is_complex,
        out_agree and in_agree,
        degree >= 2,
    )


def square_vanishes(op: SkewOp, base: SpanBasis, degree: int, certificate: Certificate) -> Optional[Tuple[int, ...]]:
    """First basis tensor of the given degree on which ∂_Δ∘∂_Δ is nonzero, if any."""
    for indices in combinations(range(len(base)), degree):
        once = koszul_differential(op, ExteriorTensor.basis_tensor(base, indices), certificate, auto_extend=False)
        twice = koszul_differential(op, once, certificate, auto_extend=False)
        if not twice.is_zero:
            return indices
    return None
