import pytest
from hypothesis import given
from hypothesis import strategies as st

from services.operator_expressions import parse_operator
from services.skew_operators import (
    TestSpace,
    action,
    derivation_power,
    identity_operator,
    inner_product,
    is_alternating_on,
    op_equal_on,
    op_norm,
    rn_bracket,
    scan_for_nonzero,
    total_derivative,
    wedge,
    zero_operator,
)
from services.wronskian_service import generalized_wronskian_operator, wronskian_operator
from utils.errors import ArityError, BudgetExceededError, ConfigError, DimensionMismatchError, MissingMetadataError
from utils.polynomial import Polynomial
from utils.text_parser import parse_poly


def P(text, n=1):
    return parse_poly(text, n)


class TestConstructors:
    """Basic operators and their metadata"""

    def test_total_derivative(self):
        """Test total derivative"""
        d2 = total_derivative([2])
        assert d2(P("x^3")) == P("6*x")
        assert d2.label == "d^2"
        assert d2.slot_order_bound == 2

    def test_derivation_power_in_one_slot(self):
        """Test derivation power in one slot"""
        dy = derivation_power(1, n=2, var=1)
        assert dy(P("x*y^2", 2)) == P("2*x*y", 2)
        assert dy.label == "D[0,1]"

    def test_identity(self):
        """Test identity operator"""
        assert identity_operator(2)(P("x*y", 2)) == P("x*y", 2)

    def test_wronskian_values(self):
        """Test wronskian values"""
        w = wronskian_operator(2)
        assert w(P("x"), P("x^2")) == P("x^2")
        assert generalized_wronskian_operator([0, 2])(P("x"), P("x^2")) == P("2*x")

    def test_arity_checked(self):
        """Test arity checked"""
        with pytest.raises(ArityError):
            wronskian_operator(2)(P("x"))

    def test_variable_count_checked(self):
        """Test variable count checked"""
        with pytest.raises(DimensionMismatchError):
            wronskian_operator(2)(P("x", 2), P("y", 2))

    def test_norm(self):
        """Test operator norm"""
        assert op_norm(wronskian_operator(3)) == 3
        assert op_norm(wedge(total_derivative([1]), total_derivative([2]))) == 3
        with pytest.raises(MissingMetadataError):
            op_norm(zero_operator(2, 1))


class TestOperations:
    """Inner product, exterior product, action and the RN bracket"""

    def test_inner_product_fixes_leading_slots(self):
        """Test inner product fixes leading slots"""
        w = wronskian_operator(2)
        fixed = inner_product(w, [Polynomial.one(1)])
        assert fixed.arity == 1
        assert fixed(P("x^2")) == P("2*x")

    def test_inner_product_too_many_arguments(self):
        """Test inner product too many arguments"""
        with pytest.raises(ArityError):
            inner_product(wronskian_operator(1), [P("1"), P("x")])

    def test_wedge_of_derivatives_is_the_wronskian(self):
        """Test wedge of derivatives is the wronskian"""
        wedged = wedge(total_derivative([0]), total_derivative([1]))
        space = TestSpace(1, 3)
        assert op_equal_on(wedged, wronskian_operator(2), space).equal

    def test_action_with_constant_outer_is_zero(self):
        """Test action with constant outer is zero"""
        from services.skew_operators import constant_operator

        op = action(constant_operator(P("x")), wronskian_operator(2))
        assert op.arity == 1
        assert op(P("x^2")).is_zero

    def test_rn_bracket_arity_and_bound(self):
        """Test rn bracket arity and bound"""
        bracket = rn_bracket(wronskian_operator(2), wronskian_operator(3))
        assert bracket.arity == 4
        assert bracket.slot_order_bound == 3

    def test_rn_of_wronskians_vanishes(self):
        """Test rn of wronskians vanishes"""
        bracket = rn_bracket(wronskian_operator(2), wronskian_operator(3))
        scan = scan_for_nonzero(bracket, TestSpace(1, bracket.slot_order_bound))
        assert scan.witness is None
        assert scan.tuples_checked == 1

    @given(st.lists(st.integers(-3, 3), min_size=3, max_size=3))
    def test_wronskian_alternates(self, coefficients):
        """Test wronskian alternates"""
        args = [P("x"), P("x^2"), Polynomial.from_terms({(0,): coefficients[0], (3,): coefficients[1], (1,): coefficients[2]}, 1)]
        assert is_alternating_on(wronskian_operator(3), args, 0, 2)


class TestScanning:
    """Finite test-space verification"""

    def test_zero_operator_passes(self):
        """Test zero operator passes"""
        scan = scan_for_nonzero(zero_operator(2, 1), TestSpace(1, 3))
        assert scan.witness is None
        assert scan.tuples_checked == scan.tuples_total == 6
        assert scan.certifying

    def test_vacuous_when_arity_exceeds_basis(self):
        """Test vacuous when arity exceeds basis"""
        scan = scan_for_nonzero(wronskian_operator(3), TestSpace(1, 1))
        assert scan.vacuous
        assert scan.tuples_total == 0

    def test_budget_refusal(self):
        """Test budget refusal"""
        with pytest.raises(BudgetExceededError) as exc:
            scan_for_nonzero(wronskian_operator(2), TestSpace(1, 5), budget=3)
        assert exc.value.required == 15

    def test_sampling_is_not_certifying(self):
        """Test sampling is not certifying"""
        scan = scan_for_nonzero(zero_operator(2, 1), TestSpace(1, 5), sample=4, seed=1)
        assert not scan.certifying
        assert scan.tuples_checked <= 4

    def test_sampling_is_deterministic(self):
        """Test sampling is deterministic"""
        op = wronskian_operator(2) - generalized_wronskian_operator([0, 2])
        first = scan_for_nonzero(op, TestSpace(1, 4), sample=3, seed=9)
        second = scan_for_nonzero(op, TestSpace(1, 4), sample=3, seed=9)
        assert first == second

    def test_first_witness_of_a_difference(self):
        """Test first witness of a difference"""
        result = op_equal_on(
            generalized_wronskian_operator([0, 1]), generalized_wronskian_operator([0, 2]), TestSpace(1, 3)
        )
        assert not result.equal
        assert result.witness == (P("1"), P("x"))
        assert result.difference == P("1")

    def test_arity_mismatch_in_equality(self):
        """Test arity mismatch in equality"""
        with pytest.raises(ArityError):
            op_equal_on(wronskian_operator(2), wronskian_operator(3), TestSpace(1, 2))


class TestOperatorExpressions:
    """The operator expression language"""

    def test_wronskian(self):
        """Test Wronskian expression"""
        op = parse_operator("W[0,1,3]")
        assert op.arity == 3
        assert op.label == "W[0,1,3]"

    def test_nested_combinators(self):
        """Test nested combinators"""
        op = parse_operator("act(W[0,1], W[0,1])")
        assert op.arity == 3
        assert op.slot_order_bound == 2

    def test_inner(self):
        """Test inner product expression"""
        op = parse_operator("inner(W[0,1]; 1)")
        assert op.arity == 1
        assert op(P("x^3")) == P("3*x^2")

    def test_box_and_nambu(self):
        """Test box and nambu"""
        assert parse_operator("box(2,1)").arity == 3
        assert parse_operator("nambu2").n == 2
        assert parse_operator("nambu(3)").arity == 3

    def test_derivatives_and_identity(self):
        """Test derivatives and identity"""
        assert parse_operator("d^2")(P("x^2")) == P("2")
        assert parse_operator("D[1,0]")(P("x*y", 2)) == P("y", 2)
        assert parse_operator("id").label == "id"

    def test_unknown_expression(self):
        """Test unknown expression"""
        with pytest.raises(ConfigError):
            parse_operator("sqrt(W[0,1])")

    def test_rejects_decreasing_indices(self):
        """Test rejects decreasing indices"""
        with pytest.raises(ValueError):
            parse_operator("W[1,0]")
