"""
Finite-dimensional N-brackets given by structure constants: the cross
product algebra, the A₂ algebra and its Wronskian representation, the sl₂
Wronskian representation, seeded random brackets and the search for a
Jacobi failure at the threshold dimension r = 2N - 1.
"""

import json
import logging
import random
from fractions import Fraction
from itertools import combinations
from pathlib import Path
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

from sympy import Matrix, Rational

from config import settings
from models.reports import JacobiReport
from services.homotopy_checks import check_homotopy_jacobi
from services.skew_operators import SkewOp, TestSpace
from services.wronskian_service import closed_degree_table, wronskian
from utils.combinatorics import sort_with_sign
from utils.errors import ArityError, DimensionMismatchError
from utils.polynomial import Polynomial
from utils.text_parser import parse_poly

logger = logging.getLogger(__name__)

Vector = Tuple[Fraction, ...]


class StructureTensor:
    """
    [e_{i_1}, …, e_{i_N}] for increasing index tuples; other tuples follow by
    skew-symmetry.
    """

    def __init__(self, r: int, N: int, entries: Optional[Dict[Tuple[int, ...], Sequence]] = None, name: str = "custom"):
        if r < 1 or N < 1:
            raise ValueError(f"Need r >= 1 and N >= 1, got r={r}, N={N}")
        self.r = r
        self.N = N
        self.name = name
        self.entries: Dict[Tuple[int, ...], Vector] = {}
        for indices, value in (entries or {}).items():
            self.set(indices, value)

    def set(self, indices: Sequence[int], value: Sequence) -> None:
        if len(indices) != self.N or any(not 0 <= i < self.r for i in indices):
            raise ArityError(f"Bad index tuple {tuple(indices)} for r={self.r}, N={self.N}")
        if len(value) != self.r:
            raise DimensionMismatchError(f"Bracket value needs {self.r} coordinates, got {len(value)}")
        ordered, sign = sort_with_sign(indices)
        if sign == 0:
            raise ArityError(f"Repeated basis index in {tuple(indices)}")
        vector = tuple(Fraction(v) * sign for v in value)
        if any(vector):
            self.entries[ordered] = vector
        else:
            self.entries.pop(ordered, None)

    def evaluate_indices(self, indices: Sequence[int]) -> Vector:
        ordered, sign = sort_with_sign(indices)
        zero = (Fraction(0),) * self.r
        if sign == 0 or ordered not in self.entries:
            return zero
        return tuple(sign * v for v in self.entries[ordered])

    def bracket(self, vectors: Sequence[Sequence[Fraction]]) -> Vector:
        """Σ_K det(coords restricted to the columns K) · [e_K] by multilinearity."""
        if len(vectors) != self.N:
            raise ArityError(f"The bracket takes {self.N} vectors, got {len(vectors)}")
        result = [Fraction(0)] * self.r
        for key, value in self.entries.items():
            minor = Matrix([[Rational(Fraction(v[i]).numerator, Fraction(v[i]).denominator) for i in key] for v in vectors])
            det = minor.det(method="bareiss")
            if det == 0:
                continue
            scale = Fraction(int(det.p), int(det.q))
            for j in range(self.r):
                result[j] += scale * value[j]
        return tuple(result)

    def embed(self, vector: Sequence[Fraction]) -> Polynomial:
        """Σ v_i x_{i+1}"""
        terms = {}
        for i, v in enumerate(vector):
            exps = [0] * self.r
            exps[i] = 1
            terms[tuple(exps)] = v
        return Polynomial.from_terms(terms, self.r)

    def as_skew_op(self) -> SkewOp:
        """The bracket on polynomials in x_1..x_r, reading the linear part of every argument."""
        return SkewOp(
            self.N,
            self.r,
            lambda args: self.embed(self.bracket([a.linear_part() for a in args])),
            f"{self.name}(r={self.r},N={self.N})",
            1,
            memoize=True,
        )

    def is_dimension_forced(self) -> bool:
        """Jacobi holds automatically when r < 2N - 1."""
        return self.r < 2 * self.N - 1

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "N": self.N,
            "entries": [
                {"indices": list(key), "value": [str(v) for v in value]}
                for key, value in sorted(self.entries.items())
            ],
        }

    @classmethod
    def from_json(cls, data: dict, name: str = "custom") -> "StructureTensor":
        tensor = cls(int(data["r"]), int(data["N"]), name=name)
        for entry in data.get("entries", []):
            tensor.set(entry["indices"], [Fraction(v) for v in entry["value"]])
        return tensor

    def __eq__(self, other):
        if not isinstance(other, StructureTensor):
            return NotImplemented
        return (self.r, self.N, self.entries) == (other.r, other.N, other.entries)

    def __repr__(self) -> str:
        return f"StructureTensor({self.name}, r={self.r}, N={self.N}, entries={len(self.entries)})"


def _unit(r: int, j: int, sign: int = 1) -> List[Fraction]:
    vector = [Fraction(0)] * r
    vector[j] = Fraction(sign)
    return vector


def cross_product_algebra(N: int) -> StructureTensor:
    """[a_0, …, â_j, …, a_N] = (-1)^j a_j on 𝕜^{N+1}."""
    if N < 2:
        raise ValueError(f"Need N >= 2, got {N}")
    tensor = StructureTensor(N + 1, N, name="cross")
    for j in range(N + 1):
        tensor.set(tuple(i for i in range(N + 1) if i != j), _unit(N + 1, j, -1 if j % 2 else 1))
    return tensor


def a2_algebra(N: int) -> StructureTensor:
    """[a_0, …, â_j, …, a_N] = a_{N-j}."""
    if N < 2:
        raise ValueError(f"Need N >= 2, got {N}")
    tensor = StructureTensor(N + 1, N, name="a2")
    for j in range(N + 1):
        tensor.set(tuple(i for i in range(N + 1) if i != j), _unit(N + 1, N - j))
    return tensor


def a2_wronskian_rep_check(N: int) -> Tuple[bool, List[dict]]:
    """W(a_0, …, â_j, …, a_N) = a_{N-j} for a_j = x^j/j!."""
    if N < 2:
        raise ValueError(f"Need N >= 2, got {N}")
    rows = []
    for k, value, expected in closed_degree_table(N):
        rows.append({"omitted": k, "value": str(value), "expected": str(expected), "holds": value == expected})
    passed = all(row["holds"] for row in rows)
    logger.info(f"[A2] Wronskian representation for N={N}: {'holds' if passed else 'fails'}")
    return passed, rows


SL2_REPRESENTATION = {"e": "1", "h": "-2*x", "f": "-x^2"}


def sl2_wronskian_rep_check() -> Tuple[bool, List[dict]]:
    """[h,e] = 2e, [h,f] = -2f, [e,f] = h under ρ(e)=1, ρ(h)=-2x, ρ(f)=-x²."""
    rho = {name: parse_poly(text, 1) for name, text in SL2_REPRESENTATION.items()}
    relations = [
        ("h", "e", rho["e"] * 2),
        ("h", "f", rho["f"] * -2),
        ("e", "f", rho["h"]),
    ]
    rows = []
    for left, right, expected in relations:
        value = wronskian([rho[left], rho[right]])
        rows.append(
            {"relation": f"[{left},{right}]", "value": str(value), "expected": str(expected), "holds": value == expected}
        )
    return all(row["holds"] for row in rows), rows


def random_skew_bracket(r: int, N: int, seed: int, spread: int = 5) -> StructureTensor:
    """Seeded rational constants on every increasing N-tuple of basis indices."""
    if r < 1 or N < 2:
        raise ValueError(f"Need r >= 1 and N >= 2, got r={r}, N={N}")
    rng = random.Random(seed)
    tensor = StructureTensor(r, N, name=f"random[{seed}]")
    for indices in combinations(range(r), N):
        tensor.set(indices, [Fraction(rng.randint(-spread, spread), rng.randint(1, 3)) for _ in range(r)])
    return tensor


def structure_test_space(tensor: StructureTensor) -> TestSpace:
    return TestSpace(tensor.r, 1)


def check_structure_jacobi(tensor: StructureTensor, budget: Optional[int] = None) -> JacobiReport:
    # The bracket reads linear parts only, so degree-1 test monomials certify it.
    report = check_homotopy_jacobi(
        tensor.as_skew_op(), structure_test_space(tensor), budget=budget, soundness_bound=1
    )
    if tensor.is_dimension_forced():
        report.notes.append(f"dimension-forced: r={tensor.r} < 2N-1={2 * tensor.N - 1}")
    report.parameters.update({"r": tensor.r, "N": tensor.N, "algebra": tensor.name})
    return report


class CounterexampleSearch(NamedTuple):
    tensor: Optional[StructureTensor]
    seed: Optional[int]
    attempts: int
    report: Optional[JacobiReport]


def find_threshold_counterexample(N: int, seed: int, attempts: int = 50) -> CounterexampleSearch:
    """Random brackets on 𝕜^{2N-1} until one violates the homotopy Jacobi identity."""
    r = 2 * N - 1
    for offset in range(attempts):
        tensor = random_skew_bracket(r, N, seed + offset)
        report = check_structure_jacobi(tensor)
        if not report.passed:
            logger.info(f"[THRESHOLD] seed {seed + offset} fails Jacobi at r={r}, N={N}")
            return CounterexampleSearch(tensor, seed + offset, offset + 1, report)
    logger.warning(f"[THRESHOLD] no counterexample among {attempts} seeds from {seed}")
    return CounterexampleSearch(None, None, attempts, None)


THRESHOLD_FIXTURE = "threshold_counterexample.json"


def fixture_path(name: str = THRESHOLD_FIXTURE) -> Path:
    path = Path(settings.FIXTURES_DIR)
    if not path.is_absolute():
        path = Path(__file__).resolve().parent.parent / path
    return path / name


def load_threshold_counterexample() -> StructureTensor:
    with open(fixture_path(), "r", encoding="utf-8") as f:
        return StructureTensor.from_json(json.load(f), name="threshold-fixture")


ALGEBRAS = {
    "cross": cross_product_algebra,
    "a2": a2_algebra,
}
