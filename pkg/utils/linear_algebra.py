"""
Exact linear algebra over the rationals: fraction-free rank, the
row-reduction oracle it is checked against, and span coordinates.
"""

import logging
from fractions import Fraction
from math import lcm
from typing import Dict, Hashable, List, Optional, Sequence

from sympy import Matrix, Rational

logger = logging.getLogger(__name__)


def _integer_rows(rows: Sequence[Sequence[Fraction]]) -> List[List[int]]:
    result = []
    for row in rows:
        scale = 1
        for value in row:
            scale = lcm(scale, Fraction(value).denominator)
        result.append([int(Fraction(value) * scale) for value in row])
    return result


def fraction_free_rank(rows: Sequence[Sequence[Fraction]]) -> int:
    """Rank by Bareiss elimination on the denominator-cleared integer matrix."""
    matrix = _integer_rows(rows)
    if not matrix or not matrix[0]:
        return 0
    n_rows, n_cols = len(matrix), len(matrix[0])
    rank = 0
    previous = 1
    for col in range(n_cols):
        if rank == n_rows:
            break
        pivot = next((r for r in range(rank, n_rows) if matrix[r][col] != 0), None)
        if pivot is None:
            continue
        matrix[rank], matrix[pivot] = matrix[pivot], matrix[rank]
        lead = matrix[rank][col]
        for r in range(rank + 1, n_rows):
            factor = matrix[r][col]
            row = matrix[r]
            top = matrix[rank]
            for c in range(col + 1, n_cols):
                row[c] = (row[c] * lead - factor * top[c]) // previous
            row[col] = 0
        previous = lead
        rank += 1
    return rank


def row_reduction_rank(rows: Sequence[Sequence[Fraction]]) -> int:
    """Independent rank oracle: sympy's rational row reduction."""
    if not rows or not rows[0]:
        return 0
    matrix = Matrix(
        [[Rational(Fraction(v).numerator, Fraction(v).denominator) for v in row] for row in rows]
    )
    return matrix.rank()


def matrix_product(
    left: Sequence[Sequence[Fraction]], right: Sequence[Sequence[Fraction]]
) -> List[List[Fraction]]:
    if not left or not right:
        return []
    inner = len(right)
    cols = len(right[0])
    return [
        [sum((row[t] * right[t][c] for t in range(inner)), Fraction(0)) for c in range(cols)]
        for row in left
    ]


class SpanCoordinates:
    """
    Incremental echelon form of a list of sparse vectors.

    ``coordinates(v)`` expresses v in terms of the vectors added so far (by
    their insertion index) or returns None when v is outside the span.
    """

    def __init__(self):
        self._rows: List[tuple] = []
        self.size = 0

    def _reduce(self, vector: Dict[Hashable, Fraction]):
        remainder = {k: Fraction(v) for k, v in vector.items() if v}
        combination: Dict[int, Fraction] = {}
        for pivot, row, row_combination in self._rows:
            coeff = remainder.get(pivot)
            if not coeff:
                continue
            for key, value in row.items():
                updated = remainder.get(key, Fraction(0)) - coeff * value
                if updated:
                    remainder[key] = updated
                else:
                    remainder.pop(key, None)
            for index, value in row_combination.items():
                updated = combination.get(index, Fraction(0)) + coeff * value
                if updated:
                    combination[index] = updated
                else:
                    combination.pop(index, None)
        return remainder, combination

    def add(self, vector: Dict[Hashable, Fraction]) -> bool:
        """Append a vector; returns False when it was already dependent."""
        index = self.size
        self.size += 1
        remainder, combination = self._reduce(vector)
        if not remainder:
            return False
        pivot = min(remainder, key=repr)
        scale = remainder[pivot]
        row = {k: v / scale for k, v in remainder.items()}
        # row = (vector - Σ combination_i·v_i) / scale
        row_combination = {i: -c / scale for i, c in combination.items()}
        row_combination[index] = row_combination.get(index, Fraction(0)) + 1 / scale
        self._rows.append((pivot, row, row_combination))
        return True

    def coordinates(self, vector: Dict[Hashable, Fraction]) -> Optional[Dict[int, Fraction]]:
        remainder, combination = self._reduce(vector)
        if remainder:
            return None
        return combination
