"""
Structure-constant brackets: cross product, A2, seeded random brackets and
the committed threshold counterexample.
"""

from fractions import Fraction

import pytest

from services.finite_algebras import (
    StructureTensor,
    a2_algebra,
    a2_wronskian_rep_check,
    check_structure_jacobi,
    cross_product_algebra,
    find_threshold_counterexample,
    load_threshold_counterexample,
    random_skew_bracket,
)
from utils.errors import ArityError, DimensionMismatchError


def unit(r, i):
    vector = [Fraction(0)] * r
    vector[i] = Fraction(1)
    return vector


class TestStructureTensor:
    """Skew-symmetric tables and their multilinear extension"""

    def test_skew_symmetry_from_storage(self):
        """Test skew symmetry from storage"""
        tensor = StructureTensor(3, 2)
        tensor.set((1, 0), [1, 2, 3])
        assert tensor.entries == {(0, 1): (Fraction(-1), Fraction(-2), Fraction(-3))}
        assert tensor.evaluate_indices((1, 0)) == (1, 2, 3)
        assert tensor.evaluate_indices((2, 2)) == (0, 0, 0)

    def test_rejects_repeated_indices(self):
        """Test rejects repeated indices"""
        with pytest.raises(ArityError):
            StructureTensor(3, 2).set((1, 1), [1, 0, 0])

    def test_rejects_wrong_value_length(self):
        """Test rejects wrong value length"""
        with pytest.raises(DimensionMismatchError):
            StructureTensor(3, 2).set((0, 1), [1, 0])

    def test_multilinear_extension(self):
        """Test multilinear extension"""
        tensor = cross_product_algebra(2)
        value = tensor.bracket([[1, 1, 0], [0, 1, 0]])
        # (e0 + e1) × e1 = e0 × e1 = e2
        assert value == (0, 0, 1)

    def test_json_round_trip(self):
        """Test json round trip"""
        tensor = a2_algebra(3)
        assert StructureTensor.from_json(tensor.to_json(), name="a2") == tensor


class TestClassicalExamples:
    """Cross product and A2"""

    def test_cross_product_relations(self):
        """Test cross product relations"""
        tensor = cross_product_algebra(2)
        assert tensor.bracket([unit(3, 1), unit(3, 2)]) == (1, 0, 0)
        assert tensor.bracket([unit(3, 0), unit(3, 2)]) == (0, -1, 0)

    def test_cross_product_is_lie(self):
        """Test cross product is lie"""
        assert check_structure_jacobi(cross_product_algebra(2)).passed

    def test_a2_for_N2(self):
        """Test a2 for N2"""
        report = check_structure_jacobi(a2_algebra(2))
        assert report.passed
        assert report.parameters["algebra"] == "a2"

    @pytest.mark.parametrize("N", range(2, 7))
    def test_a2_wronskian_representation(self, N):
        """Test a2 wronskian representation"""
        passed, rows = a2_wronskian_rep_check(N)
        assert passed
        assert len(rows) == N + 1


class TestDimensionThreshold:
    """Jacobi is automatic below r = 2N - 1 and fails at it"""

    @pytest.mark.parametrize("seed", range(50))
    def test_random_ternary_on_four_dimensions(self, seed):
        """Test random ternary on four dimensions"""
        report = check_structure_jacobi(random_skew_bracket(4, 3, seed))
        assert report.passed
        assert report.certifying
        assert report.soundness_bound == report.degree_bound == 1
        assert any("dimension-forced" in note for note in report.notes)

    @pytest.mark.parametrize("seed", range(5))
    def test_random_quaternary_on_six_dimensions(self, seed):
        """Test random quaternary on six dimensions"""
        assert check_structure_jacobi(random_skew_bracket(6, 4, seed)).passed

    @pytest.mark.slow
    @pytest.mark.parametrize("seed", range(5, 50))
    def test_random_quaternary_exhaustive(self, seed):
        """Test random quaternary exhaustive"""
        assert check_structure_jacobi(random_skew_bracket(6, 4, seed)).passed

    def test_fixture_fails(self):
        """Test fixture fails"""
        tensor = load_threshold_counterexample()
        assert (tensor.r, tensor.N) == (3, 2)
        assert not tensor.is_dimension_forced()
        report = check_structure_jacobi(tensor)
        assert not report.passed
        assert report.witness.arguments == ["x", "y", "z"]
        assert report.witness.value == "-y"

    def test_search_finds_a_counterexample(self):
        """Test search finds a counterexample"""
        search = find_threshold_counterexample(2, seed=0, attempts=10)
        assert search.tensor is not None
        assert not search.report.passed
        assert search.attempts <= 10

    def test_random_brackets_are_seeded(self):
        """Test random brackets are seeded"""
        assert random_skew_bracket(4, 2, 7) == random_skew_bracket(4, 2, 7)
