#!/usr/bin/env python3
"""Test mean-field reduction."""
import unittest

import pytest
import sympy

from hilange.algebra import (
    AffineForm,
    BasisSet,
    ClosureReport,
    MeanFieldContext,
    Monomial,
    Reducer,
    mean_field_reduce,
    parse_operator,
    verify_closure,
)
from hilange.constants import ReductionPolicy
from hilange.exceptions import IrreducibleTermException, ParameterException

NBAR = sympy.Symbol("nbar", positive=True)
MBAR = sympy.Symbol("mbar", positive=True)


def basis(*labels):
    """Return a basis of parsed labels."""
    return BasisSet([(label, parse_operator(label)) for label in labels])


def same(left, right):
    """Return True for exactly equal scalars."""
    return sympy.simplify(sympy.expand(left - right)) == 0


class MeanFieldContextTest(unittest.TestCase):
    """Unittest for the hilange.algebra.meanfield context."""

    def test_invalid(self):
        """Test negative occupations and unknown policies."""
        self.assertRaises(ParameterException, MeanFieldContext, {"a": -1})
        self.assertRaises(ParameterException, MeanFieldContext, {"a": 1}, None, "sideways")

    def test_means(self):
        """Test coherent means of monomials."""
        context = MeanFieldContext({"a": NBAR})
        self.assertEqual(context.mean(Monomial([("a", 1, 1)])), NBAR)
        self.assertEqual(context.mean(Monomial([("a", 0, 2)])), NBAR)
        self.assertEqual(context.mean(Monomial([("a", 2, 2)])), NBAR**2)
        self.assertTrue(same(context.expectation(parse_operator("n + 1/2")), NBAR + sympy.Rational(1, 2)))

    def test_explicit_amplitude(self):
        """Test means with a given amplitude."""
        context = MeanFieldContext({"a": 5}, amplitudes={"a": 2 + sympy.I})
        self.assertEqual(context.mean(Monomial.ladder("a", adjoint=True)), 2 - sympy.I)
        self.assertEqual(context.mean(Monomial([("a", 1, 2)])), 5 * (2 + sympy.I))
        self.assertRaises(ParameterException, context.occupation, "b")

    def test_with_policy(self):
        """Test policy switch keeps the occupations."""
        context = MeanFieldContext({"a": 2}).with_policy(ReductionPolicy.NUMBER_FIRST)
        self.assertEqual(context.policy, ReductionPolicy.NUMBER_FIRST)
        self.assertEqual(context.occupation("a"), 2)


class BasisSetTest(unittest.TestCase):
    """Unittest for the hilange.algebra.meanfield basis."""

    def test_invalid(self):
        """Test empty, duplicate, scalar and dependent bases."""
        a = parse_operator("a")
        self.assertRaises(ParameterException, BasisSet, [])
        self.assertRaises(ParameterException, BasisSet, [("x", a), ("x", parse_operator("b"))])
        self.assertRaises(ParameterException, BasisSet, [("x", a), ("y", a * 2)])
        self.assertRaises(ParameterException, BasisSet, [("one", parse_operator("1"))])

    def test_express(self):
        """Test coordinates of span monomials."""
        span = basis("c", "n")
        form = span.express(parse_operator("a^2 + 3*n"))
        self.assertEqual(form.coefficient("c"), 2)
        self.assertEqual(form.coefficient("n"), 3)
        self.assertEqual(span.index("n"), 1)
        self.assertEqual(span.find(parse_operator("a^2/2")), "c")
        self.assertIsNone(span.find(parse_operator("a")))
        self.assertTrue(span.contains(Monomial.identity()))

    def test_express_with_offset(self):
        """Test elements carrying a constant."""
        span = BasisSet([("x", parse_operator("n + 1/2"))])
        form = span.express(parse_operator("n"))
        self.assertEqual(form.coefficient("x"), 1)
        self.assertEqual(form.constant, sympy.Rational(-1, 2))

    def test_outside_span(self):
        """Test monomials outside the span are named."""
        span = basis("c", "n")
        with self.assertRaises(IrreducibleTermException) as context:
            span.express(parse_operator("ad"))
        self.assertEqual(context.exception.monomial, Monomial.ladder("a", adjoint=True))


class ReducerTest(unittest.TestCase):
    """Unittest for the hilange.algebra.meanfield reducer."""

    def setUp(self):
        """Initialize the test environment"""
        self.span = basis("c", "n")
        self.product = parse_operator("n*c")

    def tearDown(self):
        """Clean up the test environment"""
        del self.span
        del self.product

    def test_number_first(self):
        """Test number operators are replaced by their mean first."""
        context = MeanFieldContext({"a": NBAR}, policy=ReductionPolicy.NUMBER_FIRST)
        form = Reducer(context, self.span).reduce(self.product)
        self.assertTrue(same(form.coefficient("c"), NBAR))
        self.assertTrue(same(form.coefficient("n"), 0))
        self.assertTrue(same(form.constant, 0))

    def test_symmetric_pair(self):
        """Test the symmetric pair rule."""
        context = MeanFieldContext({"a": NBAR}, policy=ReductionPolicy.SYMMETRIC)
        form = mean_field_reduce(self.product, context, self.span)
        self.assertTrue(same(form.coefficient("c"), NBAR / 2))
        self.assertTrue(same(form.coefficient("n"), NBAR / 4))

    def test_number_powers_factorise(self):
        """Test n*m^2 reduces as the product n*m*m."""
        context = MeanFieldContext({"a": NBAR, "b": MBAR})
        form = mean_field_reduce(parse_operator("n*m^2"), context, basis("n", "m", "n*m"))
        self.assertTrue(same(form.coefficient("n*m"), MBAR / 4))
        self.assertTrue(same(form.coefficient("m"), MBAR * NBAR / 2))
        self.assertTrue(same(form.coefficient("n"), MBAR**2 / 4))
        self.assertTrue(same(form.constant, 0))

    def test_number_square_substitution(self):
        """Test m^2 becomes mbar*m under number substitution."""
        context = MeanFieldContext({"b": MBAR}, policy=ReductionPolicy.NUMBER_FIRST)
        form = mean_field_reduce(parse_operator("m^2"), context, basis("m"))
        self.assertTrue(same(form.coefficient("m"), MBAR))
        self.assertTrue(same(form.constant, 0))

    def test_span_terms_pass_through(self):
        """Test elements of the span are kept."""
        context = MeanFieldContext({"a": NBAR})
        form = mean_field_reduce(parse_operator("2*c + n + 1"), context, self.span)
        expected = AffineForm(("c", "n"), (2, 1), 1)
        self.assertTrue(form.equals(expected))

    def test_irreducible(self):
        """Test a monomial no rule reaches."""
        context = MeanFieldContext({"a": NBAR})
        self.assertRaises(IrreducibleTermException, mean_field_reduce, parse_operator("ad"), context, self.span)

    def test_classical_field(self):
        """Test every ladder of a classical mode becomes its amplitude."""
        context = MeanFieldContext({"a": NBAR, "b": MBAR}, policy=ReductionPolicy.FIELD, classical=("a",))
        span = basis("a", "b", "bd")
        number = mean_field_reduce(parse_operator("n"), context, span)
        self.assertTrue(same(number.constant, NBAR))
        self.assertTrue(same(number.coefficient("a"), 0))
        product = mean_field_reduce(parse_operator("a*b"), context, span)
        self.assertTrue(same(product.coefficient("b"), sympy.sqrt(NBAR)))
        self.assertTrue(same(product.constant, 0))

    def test_classical_field_minimal(self):
        """Test only the ladders outside the span are replaced."""
        context = MeanFieldContext(
            {"a": NBAR, "b": MBAR}, policy=ReductionPolicy.FIELD_MINIMAL, classical=("a",)
        )
        form = mean_field_reduce(parse_operator("n"), context, basis("a", "b", "bd"))
        self.assertTrue(same(form.coefficient("a"), sympy.sqrt(NBAR)))
        self.assertTrue(same(form.constant, 0))

    def test_classical_last_resort(self):
        """Test classical ladders are replaced when no other rule applies."""
        span = basis("a", "a*bd")
        product = parse_operator("a*bd^2")
        context = MeanFieldContext({"a": NBAR, "b": MBAR}, classical=("b",))
        form = mean_field_reduce(product, context, span)
        self.assertTrue(same(form.coefficient("a*bd"), sympy.sqrt(MBAR)))
        quantum = MeanFieldContext({"a": NBAR, "b": MBAR})
        self.assertRaises(IrreducibleTermException, mean_field_reduce, product, quantum, span)

    def test_classical_needs_occupation(self):
        """Test a classical mode must carry an occupation."""
        self.assertRaises(ParameterException, MeanFieldContext, {"a": NBAR}, classical=("b",))
        context = MeanFieldContext({"b": MBAR}, classical=("b",))
        self.assertEqual(context.with_policy(ReductionPolicy.FIELD).classical, ("b",))


@pytest.mark.parametrize("labels", [("n", "c", "cd"), ("a", "ad"), ("n", "m", "c*d", "cd*dd")])
def test_closed_bases(labels):
    """Test closure scans of closed bases."""
    context = MeanFieldContext({"a": NBAR, "b": NBAR})
    report = verify_closure(basis(*labels), context)
    assert report.closed  # nosec
    assert not report.failures  # nosec
    assert len(report.entries) == len(labels) * (len(labels) - 1) // 2  # nosec


def test_open_basis():
    """Test a basis whose commutators leave the span."""
    report = verify_closure(basis("a", "cd"), MeanFieldContext({"a": NBAR}))
    assert not report.closed  # nosec
    entry = report.entry("cd", "a")
    assert entry.form is None  # nosec
    assert "ad" in entry.error  # nosec


def test_exact_closure_flags():
    """Test closure entries record exact brackets."""
    report = verify_closure(basis("n", "c", "cd"), MeanFieldContext({"a": NBAR}))
    assert all(entry.exact for entry in report.entries)  # nosec
    bracket = report.entry("c", "cd").form
    assert bracket.coefficient("n") == 1  # nosec
    assert bracket.constant == sympy.Rational(1, 2)  # nosec


def test_report_from_table():
    """Test reports built from tabulated commutators."""
    form = AffineForm(("x", "y"), (0, 1), 0)
    report = ClosureReport.from_table(("x", "y"), {("y", "x"): form})
    assert report.closed  # nosec
    assert report.entry("x", "y").form.coefficient("y") == -1  # nosec
    missing = ClosureReport.from_table(("x", "y", "z"), {("x", "y"): form})
    assert len(missing.failures) == 2  # nosec


# ---------------------------------------------------------------------------#
#  Main
# ---------------------------------------------------------------------------#
if __name__ == "__main__":
    unittest.main()
