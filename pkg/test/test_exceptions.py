#!/usr/bin/env python3
"""Test exceptions."""
import unittest

from hilange.exceptions import (
    ClosureException,
    ConfigException,
    DivergenceException,
    HilangeException,
    IrreducibleTermException,
    NonHermitianException,
    NotImplementedException,
    NumericException,
    ParameterException,
    SingularSystemException,
)


class SimpleExceptionsTest(unittest.TestCase):
    """Unittest for the hilange.exceptions module."""

    def setUp(self):
        """Initialize the test environment"""
        self.exceptions = [
            HilangeException("bad base"),
            ParameterException("bad parameter"),
            IrreducibleTermException("bad product", monomial="a^3"),
            ClosureException("open basis"),
            NonHermitianException("bad hamiltonian"),
            SingularSystemException("singular", frequency=1.0, rank_deficiency=1),
            NumericException("no convergence"),
            DivergenceException("overflow", step=3),
            ConfigException("bad value", path="config.grid.count"),
            NotImplementedException("bad function"),
        ]

    def tearDown(self):
        """Clean up the test environment"""
        del self.exceptions

    def test_exceptions(self):
        """Test all module exceptions"""
        for exc in self.exceptions:
            with self.assertRaises(HilangeException) as context:
                raise exc
            self.assertTrue(str(context.exception).startswith("Hilange Error:"))
            self.assertTrue(context.exception.isError())

    def test_payloads(self):
        """Test the attached context."""
        self.assertEqual(self.exceptions[2].monomial, "a^3")
        self.assertEqual(self.exceptions[5].frequency, 1.0)
        self.assertEqual(self.exceptions[5].rank_deficiency, 1)
        self.assertEqual(self.exceptions[7].step, 3)
        self.assertIsNone(self.exceptions[3].report)

    def test_config_path(self):
        """Test the dotted path leads the message."""
        self.assertEqual(
            str(self.exceptions[8]), "Hilange Error: [Invalid Config] config.grid.count: bad value"
        )
        self.assertEqual(str(ConfigException("bad")), "Hilange Error: [Invalid Config] bad")
        self.assertEqual(str(ParameterException("x")), "Hilange Error: [Invalid Parameter] x")


# ---------------------------------------------------------------------------#
#  Main
# ---------------------------------------------------------------------------#
if __name__ == "__main__":
    unittest.main()
