#!/usr/bin/env python3
"""Test assembler."""
import unittest

import numpy as np
import pytest
import sympy

from hilange.algebra import BasisSet, MeanFieldContext, OperatorExpr, parse_operator
from hilange.assembler import (
    DecayChannel,
    LinearLangevinSystem,
    NoiseInputs,
    check_stability,
    heisenberg_rhs,
    linearize_system,
    steady_state,
)
from hilange.constants import ChannelScope
from hilange.exceptions import (
    ClosureException,
    NonHermitianException,
    ParameterException,
    SingularSystemException,
)


def system_of(matrix, drive=None, weights=None):
    """Return a system with one input per row."""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=complex))
    size = matrix.shape[0]
    labels = tuple(f"x{pos}" for pos in range(size))
    return LinearLangevinSystem(
        labels=labels,
        matrix=matrix,
        drive=np.zeros(size) if drive is None else drive,
        noise_weights=np.eye(size) if weights is None else weights,
        inputs=labels,
    )


class HeisenbergRhsTest(unittest.TestCase):
    """Unittest for the hilange.assembler right hand sides."""

    def setUp(self):
        """Initialize the test environment"""
        self.a = parse_operator("a")
        self.hamiltonian = parse_operator("3*n")
        self.channel = DecayChannel(self.a, 2, label="a")

    def tearDown(self):
        """Clean up the test environment"""
        del self.a
        del self.hamiltonian
        del self.channel

    def test_cavity_mode(self):
        """Test the damped cavity equation."""
        rhs = heisenberg_rhs(self.hamiltonian, self.a, [self.channel])
        self.assertEqual(rhs.coherent, self.a * (-3 * sympy.I))
        self.assertEqual(rhs.damping, -self.a)
        self.assertEqual(rhs.deterministic, self.a * (-3 * sympy.I - 1))
        self.assertEqual(rhs.noise[("a", False)], OperatorExpr.scalar(-sympy.sqrt(2)))
        self.assertNotIn(("a", True), rhs.noise)

    def test_adjoint_row(self):
        """Test the adjoint equation picks up the adjoint input."""
        rhs = heisenberg_rhs(self.hamiltonian, self.a.adjoint(), [self.channel])
        self.assertEqual(rhs.deterministic, self.a.adjoint() * (3 * sympy.I - 1))
        self.assertEqual(rhs.noise[("a", True)], OperatorExpr.scalar(-sympy.sqrt(2)))

    def test_channel_scope(self):
        """Test channels only enter their own rows."""
        number = parse_operator("n")
        self.assertFalse(self.channel.applies_to(number))
        rhs = heisenberg_rhs(self.hamiltonian, number, [self.channel])
        self.assertTrue(rhs.damping.is_zero)
        everywhere = DecayChannel(self.a, 2, scope=ChannelScope.ALL)
        rhs = heisenberg_rhs(self.hamiltonian, number, [everywhere])
        self.assertEqual(rhs.damping, number * -2)

    def test_non_hermitian(self):
        """Test a non self-adjoint Hamiltonian is rejected."""
        self.assertRaises(NonHermitianException, heisenberg_rhs, parse_operator("c"), self.a)

    def test_invalid_channel(self):
        """Test channel validation."""
        self.assertRaises(ParameterException, DecayChannel, self.a, -1)
        self.assertRaises(ParameterException, DecayChannel, OperatorExpr(), 1)
        self.assertRaises(ParameterException, DecayChannel, self.a, 1, scope="nowhere")


class LinearizeTest(unittest.TestCase):
    """Unittest for the hilange.assembler linearisation."""

    def test_single_mode(self):
        """Test the lossy cavity system."""
        basis = BasisSet([("a", parse_operator("a"))])
        channel = DecayChannel(parse_operator("a"), sympy.Rational(1, 2), noise="vacuum")
        system = linearize_system(parse_operator("2*n"), basis, [channel], MeanFieldContext({"a": 1}))
        self.assertAlmostEqual(system.entry("a", "a"), -0.25 - 2j)
        self.assertAlmostEqual(system.noise_weights[0, 0], np.sqrt(0.5))
        self.assertEqual(system.bindings, {"a": "vacuum"})
        self.assertEqual(system.metadata["policy"], "symmetric")

    def test_pair_channel(self):
        """Test the pair channel prefactor uses the occupation."""
        basis = BasisSet([("c", parse_operator("c")), ("cd", parse_operator("cd")), ("n", parse_operator("n"))])
        channel = DecayChannel(parse_operator("c"), 2)
        system = linearize_system(parse_operator("n"), basis, [channel], MeanFieldContext({"a": 1}))
        # <[c, cd]> = nbar + 1/2
        self.assertAlmostEqual(system.entry("c", "c"), -2j - 1.5)
        self.assertAlmostEqual(system.noise_weights[0, 0], 1.5 * np.sqrt(2))
        self.assertAlmostEqual(system.entry("n", "n"), 0)

    def test_exact_damping_in_every_row(self):
        """Test a channel of scope ALL damps the number row exactly."""
        basis = BasisSet(
            [("a", parse_operator("a")), ("ad", parse_operator("ad")), ("n", parse_operator("n"))]
        )
        channel = DecayChannel(parse_operator("a"), 1, scope=ChannelScope.ALL)
        system = linearize_system(parse_operator("2*n"), basis, [channel], MeanFieldContext({"a": 1}))
        self.assertAlmostEqual(system.entry("n", "n"), -1.0)
        self.assertAlmostEqual(system.entry("n", "a"), 0)
        self.assertAlmostEqual(system.entry("a", "a"), -0.5 - 2j)
        self.assertAlmostEqual(system.entry("ad", "ad"), -0.5 + 2j)
        np.testing.assert_allclose(system.noise_weights[2], [1.0, 1.0, 0.0])
        local = DecayChannel(parse_operator("a"), 1)
        system = linearize_system(parse_operator("2*n"), basis, [local], MeanFieldContext({"a": 1}))
        self.assertAlmostEqual(system.entry("n", "n"), 0)

    def test_row_damping(self):
        """Test extra diagonal damping of listed rows."""
        basis = BasisSet([("a", parse_operator("a")), ("n", parse_operator("n"))])
        context = MeanFieldContext({"a": 1})
        system = linearize_system(parse_operator("2*n"), basis, [], context, row_damping={"n": 0.5})
        self.assertAlmostEqual(system.entry("n", "n"), -0.5)
        self.assertAlmostEqual(system.entry("a", "a"), -2j)
        self.assertRaises(
            ParameterException, linearize_system, parse_operator("2*n"), basis, [], context, row_damping={"m": 1}
        )

    def test_noise_override(self):
        """Test explicit input columns replace the channel inputs."""
        basis = BasisSet([("a", parse_operator("a"))])
        channel = DecayChannel(parse_operator("a"), sympy.Rational(1, 2))
        noise = NoiseInputs(("a_in", "b_in"), np.array([[2.0, 0.5]]), {"a_in": "thermal", "b_in": "vacuum"})
        system = linearize_system(parse_operator("2*n"), basis, [channel], MeanFieldContext({"a": 1}), noise=noise)
        self.assertEqual(system.inputs, ("a_in", "b_in"))
        np.testing.assert_allclose(system.noise_weights, [[2.0, 0.5]])
        self.assertEqual(system.bindings, {"a_in": "thermal", "b_in": "vacuum"})
        self.assertAlmostEqual(system.entry("a", "a"), -0.25 - 2j)

    def test_open_basis(self):
        """Test an open basis is refused."""
        basis = BasisSet([("a", parse_operator("a")), ("cd", parse_operator("cd"))])
        with self.assertRaises(ClosureException) as context:
            linearize_system(parse_operator("n"), basis, [], MeanFieldContext({"a": 1}))
        self.assertFalse(context.exception.report.closed)


class LinearSystemTest(unittest.TestCase):
    """Unittest for the hilange.assembler linear systems."""

    def test_validation(self):
        """Test shape and weight checks."""
        self.assertRaises(ParameterException, system_of, np.zeros((2, 3)))
        self.assertRaises(ParameterException, system_of, [[-1.0]], drive=np.zeros(2))
        self.assertRaises(ParameterException, system_of, [[-1.0]], weights=np.array([[1j]]))
        self.assertRaises(ParameterException, system_of, [[np.nan]])

    def test_frozen(self):
        """Test arrays are read only."""
        system = system_of([[-1.0]])
        with pytest.raises(ValueError):
            system.matrix[0, 0] = 1.0

    def test_json(self):
        """Test the JSON document keeps every field."""
        system = system_of([[-1 + 2j, 0.5], [0, -3]], drive=np.array([1j, 2]))
        restored = LinearLangevinSystem.from_json(system.to_json())
        np.testing.assert_allclose(restored.matrix, system.matrix)
        np.testing.assert_allclose(restored.drive, system.drive)
        self.assertEqual(restored.labels, system.labels)
        self.assertRaises(ParameterException, LinearLangevinSystem.from_json, "{}")


def test_stability_report():
    """Test the eigenvalue verdict."""
    report = check_stability(system_of([[-1.0, 0], [0, -2.0]]))
    assert report.stable  # nosec
    assert report.max_real == pytest.approx(-1.0)  # nosec
    assert report.system.stable  # nosec
    unstable = check_stability(system_of([[0.1]]))
    assert not unstable.stable  # nosec
    assert unstable.system.stable is False  # nosec
    assert check_stability(system_of([[0.1]]), tol=0.2).stable  # nosec


def test_steady_state():
    """Test the steady state solve."""
    state = steady_state(system_of([[-2.0]], drive=np.array([4.0])))
    assert state[0] == pytest.approx(2.0)  # nosec
    with pytest.raises(SingularSystemException) as info:
        steady_state(system_of(np.zeros((2, 2))))
    assert info.value.rank_deficiency == 2  # nosec


# ---------------------------------------------------------------------------#
#  Main
# ---------------------------------------------------------------------------#
if __name__ == "__main__":
    unittest.main()
