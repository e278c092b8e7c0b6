"""
Polynomial core, parser and combinatorial helpers.
"""

from fractions import Fraction

import pytest
from hypothesis import given, settings as hyp_settings
from hypothesis import strategies as st
from sympy import Matrix

from utils.combinatorics import insert_sorted, permutation_sign, sort_with_sign, unshuffle_count, unshuffles
from utils.errors import DimensionMismatchError, PolynomialParseError
from utils.linear_algebra import SpanCoordinates, fraction_free_rank, row_reduction_rank
from utils.polynomial import (
    LaurentPolynomial,
    MultiIndex,
    Polynomial,
    determinant,
    monomials_of_order,
    monomials_up_to,
)
from utils.text_parser import (
    parse_int_list,
    parse_laurent,
    parse_poly,
    parse_poly_list,
    parse_rational_list,
    split_top_level,
)

small_polys = st.dictionaries(
    st.tuples(st.integers(0, 3)), st.integers(-4, 4), max_size=4
).map(lambda terms: Polynomial.from_terms(terms, 1))

plane_polys = st.dictionaries(
    st.tuples(st.integers(0, 3), st.integers(0, 3)), st.integers(-4, 4), max_size=5
).map(lambda terms: Polynomial.from_terms(terms, 2))

small_laurents = st.dictionaries(
    st.tuples(st.integers(-3, 3)), st.integers(-4, 4), max_size=4
).map(lambda terms: LaurentPolynomial.from_terms(terms, 1))

plane_orders = st.tuples(st.integers(0, 3), st.integers(0, 3)).map(MultiIndex)


class TestPolynomialArithmetic:
    """Ring operations and calculus"""

    def test_parse_and_print_round_trip(self):
        """Test parse and print round trip"""
        p = parse_poly("x^2 + 2*x + 1", 1)
        assert p == parse_poly("(x + 1)^2", 1)
        assert str(p) == "x^2 + 2*x + 1"

    def test_juxtaposition_and_division(self):
        """Test juxtaposition and division"""
        assert parse_poly("-2x", 1) == Polynomial.monomial([1], -2)
        assert parse_poly("x/2", 1) == Polynomial.monomial([1], Fraction(1, 2))
        assert parse_poly("1/2*x", 1) == parse_poly("x/2", 1)

    def test_two_variable_aliases(self):
        """Test two variable aliases"""
        p = parse_poly("x*y - y", 2)
        assert p.coefficient((1, 1)) == 1
        assert p.coefficient((0, 1)) == -1
        assert parse_poly("x1*x2", 2) == p + parse_poly("y", 2)

    def test_negative_exponent_rejected(self):
        """Test negative exponent rejected"""
        with pytest.raises(PolynomialParseError):
            parse_poly("x^-1", 1)

    def test_division_by_polynomial_rejected(self):
        """Test division by polynomial rejected"""
        with pytest.raises(PolynomialParseError):
            parse_poly("1/x", 1)

    def test_unknown_variable_reports_position(self):
        """Test unknown variable reports position"""
        with pytest.raises(PolynomialParseError) as exc:
            parse_poly("x + w", 1)
        assert exc.value.position == 4

    def test_mixed_variable_counts_rejected(self):
        """Test mixed variable counts rejected"""
        with pytest.raises(DimensionMismatchError):
            parse_poly("x", 1) + parse_poly("x", 2)

    def test_derivatives(self):
        """Test partial derivatives"""
        p = parse_poly("x^3*y + y^2", 2)
        assert p.derive(0) == parse_poly("3*x^2*y", 2)
        assert p.apply_multiindex((1, 1)) == parse_poly("3*x^2", 2)
        assert p.apply_multiindex((4, 0)).is_zero

    def test_compose_and_truncate(self):
        """Test compose and truncate"""
        p = parse_poly("x^2", 1)
        y = parse_poly("x + x^2", 1)
        assert p.compose(y) == parse_poly("x^2 + 2*x^3 + x^4", 1)
        assert p.compose(y).truncate(3) == parse_poly("x^2 + 2*x^3", 1)

    def test_linear_part(self):
        """Test linear part"""
        assert parse_poly("3 + 2*x - z + y^2", 3).linear_part() == [2, 0, -1]

    def test_total_degree_of_zero(self):
        """Test total degree of zero"""
        assert Polynomial.zero(2).total_degree() == -1

    @given(small_polys, small_polys)
    def test_product_rule(self, a, b):
        """Test product rule"""
        assert (a * b).derivative() == a.derivative() * b + a * b.derivative()

    @hyp_settings(max_examples=50)
    @given(plane_polys, plane_polys, plane_polys)
    def test_ring_axioms(self, a, b, c):
        """Test ring axioms"""
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * b == b * a
        assert a * (b + c) == a * b + a * c
        assert (a - a).is_zero
        assert a * Polynomial.one(2) == a

    @hyp_settings(max_examples=50)
    @given(plane_polys, plane_orders, plane_orders)
    def test_multiindex_derivatives_compose(self, p, sigma, tau):
        """Test multiindex derivatives compose"""
        assert p.apply_multiindex(sigma.plus(tau)) == p.apply_multiindex(sigma).apply_multiindex(tau)

    def test_multiindex_lengths_must_match(self):
        """Test multiindex lengths must match"""
        with pytest.raises(DimensionMismatchError):
            MultiIndex((1, 0)).plus((1,))


class TestLaurentPolynomials:
    """Negative powers for operator coefficients"""

    def test_parse_and_print(self):
        """Test parse and print"""
        p = parse_laurent("z^-1 + 2*z", 1, {"z": 0})
        assert p.to_string(("z",)) == "2*z + z^-1"
        assert p.terms() == {(1,): 2, (-1,): 1}
        assert not p.is_polynomial

    def test_polynomials_embed_unchanged(self):
        """Test polynomials embed unchanged"""
        p = parse_laurent("x^2 - 1", 1)
        q = parse_poly("x^2 - 1", 1)
        assert p == q
        assert hash(p) == hash(q)
        assert p.to_polynomial() == q

    def test_denominators_cancel(self):
        """Test denominators cancel"""
        p = parse_laurent("x^-2", 1) * parse_poly("x^3 + x^2", 1)
        assert p.is_polynomial
        assert p == parse_poly("x + 1", 1)

    def test_negative_power_needs_a_monomial(self):
        """Test negative power needs a monomial"""
        with pytest.raises(PolynomialParseError):
            parse_laurent("(1 + x)^-1", 1)
        assert parse_laurent("(2*x)^-1", 1) == LaurentPolynomial.monomial([-1], Fraction(1, 2))

    def test_derivative_of_inverse(self):
        """Test derivative of inverse"""
        assert parse_laurent("x^-1", 1).derive(0) == parse_laurent("-x^-2", 1)
        assert parse_laurent("x^-1 * y", 2).apply_multiindex((1, 1)) == parse_laurent("-x^-2", 2)

    def test_mixed_arithmetic(self):
        """Test mixed arithmetic"""
        p = parse_laurent("x^-1", 1) + parse_poly("x", 1)
        assert p == parse_laurent("x + x^-1", 1)
        assert parse_poly("x", 1) - parse_laurent("x^-1", 1) == parse_laurent("x - x^-1", 1)
        assert (p - p).is_zero
        assert p.constant_term() == 0

    def test_rejects_to_polynomial_with_denominator(self):
        """Test rejects to polynomial with denominator"""
        with pytest.raises(ValueError):
            parse_laurent("y^-1", 2).to_polynomial()

    @hyp_settings(max_examples=50)
    @given(small_laurents, small_laurents)
    def test_product_rule(self, a, b):
        """Test product rule"""
        assert (a * b).derive(0) == a.derive(0) * b + a * b.derive(0)


class TestDeterminant:
    """Division-free determinant against sympy"""

    def test_two_by_two(self):
        """Test two by two"""
        x = parse_poly("x", 1)
        assert determinant([[x, Polynomial.one(1)], [Polynomial.one(1), x]]) == x * x - 1

    def test_non_square_rejected(self):
        """Test non square rejected"""
        with pytest.raises(DimensionMismatchError):
            determinant([[Polynomial.one(1), Polynomial.one(1)]])

    @hyp_settings(max_examples=30)
    @given(st.lists(st.integers(-5, 5), min_size=9, max_size=9))
    def test_constant_matrices(self, values):
        """Test constant matrices"""
        rows = [values[0:3], values[3:6], values[6:9]]
        expected = Matrix(rows).det()
        polys = [[Polynomial.constant(v, 1) for v in row] for row in rows]
        assert determinant(polys) == int(expected)


class TestMonomialOrder:
    """Test-space basis ordering"""

    def test_two_variables_degree_two(self):
        """Test two variables degree two"""
        assert monomials_up_to(2, 2) == [
            MultiIndex((0, 0)),
            MultiIndex((1, 0)),
            MultiIndex((0, 1)),
            MultiIndex((2, 0)),
            MultiIndex((1, 1)),
            MultiIndex((0, 2)),
        ]

    def test_single_order(self):
        """Test single order"""
        assert monomials_of_order(2, 1) == [MultiIndex((1, 0)), MultiIndex((0, 1))]
        assert len(monomials_of_order(3, 2)) == 6

    def test_negative_multiindex_rejected(self):
        """Test negative multiindex rejected"""
        with pytest.raises(ValueError):
            MultiIndex((1, -1))


class TestListParsing:
    """Separated lists"""

    def test_semicolons_win_over_commas(self):
        """Test semicolons win over commas"""
        assert len(parse_poly_list("1; x; y", 2)) == 3
        assert len(parse_poly_list("1, x, x^2", 1)) == 3

    def test_split_respects_brackets(self):
        """Test split respects brackets"""
        assert split_top_level("wedge(A,B), W[0,1]", ",") == ["wedge(A,B)", "W[0,1]"]

    def test_numeric_lists(self):
        """Test numeric lists"""
        assert parse_int_list("[0, 1, 3]") == [0, 1, 3]
        assert parse_rational_list("1/2,-3") == [Fraction(1, 2), Fraction(-3)]
        with pytest.raises(PolynomialParseError):
            parse_int_list("0,a")


class TestCombinatorics:
    """Signs and unshuffles"""

    def test_permutation_sign(self):
        """Test permutation sign"""
        assert permutation_sign((0, 1, 2)) == 1
        assert permutation_sign((1, 0, 2)) == -1
        assert permutation_sign((2, 0, 1)) == 1

    def test_unshuffles_order_and_signs(self):
        """Test unshuffles order and signs"""
        assert unshuffles(2, 3) == (
            ((0, 1), (2,), 1),
            ((0, 2), (1,), -1),
            ((1, 2), (0,), 1),
        )
        assert len(unshuffles(3, 5)) == unshuffle_count(3, 5) == 10

    @given(st.integers(0, 6), st.integers(0, 6))
    def test_unshuffle_sign_matches_permutation(self, k, extra):
        """Test unshuffle sign matches permutation"""
        m = k + extra
        for head, tail, sign in unshuffles(k, m):
            assert sign == permutation_sign(head + tail)

    def test_sort_with_sign(self):
        """Test sort with sign"""
        assert sort_with_sign((2, 0, 1)) == ((0, 1, 2), 1)
        assert sort_with_sign((1, 0)) == ((0, 1), -1)
        assert sort_with_sign((1, 1))[1] == 0

    def test_insert_sorted(self):
        """Test insert sorted"""
        assert insert_sorted(1, (0, 2)) == ((0, 1, 2), -1)
        assert insert_sorted(0, (1, 2)) == ((0, 1, 2), 1)
        assert insert_sorted(2, (0, 2))[1] == 0


class TestLinearAlgebra:
    """Fraction-free rank and span coordinates"""

    @hyp_settings(max_examples=60)
    @given(
        st.integers(1, 4).flatmap(
            lambda cols: st.lists(
                st.lists(st.integers(-3, 3), min_size=cols, max_size=cols), min_size=1, max_size=5
            )
        )
    )
    def test_rank_agrees_with_row_reduction(self, rows):
        """Test rank agrees with row reduction"""
        matrix = [[Fraction(v) for v in row] for row in rows]
        assert fraction_free_rank(matrix) == row_reduction_rank(matrix)

    def test_rational_entries(self):
        """Test rational entries"""
        matrix = [[Fraction(1, 2), Fraction(1, 3)], [Fraction(3, 2), Fraction(1)]]
        assert fraction_free_rank(matrix) == 1

    def test_span_coordinates(self):
        """Test span coordinates"""
        span = SpanCoordinates()
        assert span.add({"a": Fraction(1)})
        assert span.add({"a": Fraction(1), "b": Fraction(1)})
        assert not span.add({"a": Fraction(2), "b": Fraction(1)})
        assert span.coordinates({"b": Fraction(1)}) == {1: Fraction(1), 0: Fraction(-1)}
        assert span.coordinates({"c": Fraction(1)}) is None
