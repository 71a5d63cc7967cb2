#!/usr/bin/env python3
"""Test the model catalog."""
import math
import unittest

import numpy as np
import pytest

from hilange.assembler import check_stability
from hilange.exceptions import ConfigException, NotImplementedException, ParameterException
from hilange.models import (
    CATALOG,
    AssembledModel,
    Diode,
    ModelParams,
    bose_occupation,
    build_model,
    first_order_from_second,
    lookup,
    model_ids,
    photon_number_cubic,
    photon_number_linear,
    thermal_occupation,
)


class ModelParamsTest(unittest.TestCase):
    """Unittest for the hilange.models parameters."""

    def test_validation(self):
        """Test range checks."""
        self.assertRaises(ParameterException, ModelParams, kappa=-1.0)
        self.assertRaises(ParameterException, ModelParams, m_bar=-0.1)
        self.assertRaises(ParameterException, ModelParams, sign_a=2)
        self.assertRaises(ParameterException, ModelParams, order=0)

    def test_from_dict(self):
        """Test JSON parameters."""
        params = ModelParams.from_dict({"g": [0.1, 0.2], "kappa": 1})
        self.assertEqual(params.g, complex(0.1, 0.2))
        self.assertEqual(params.to_dict()["g"], [0.1, 0.2])
        with self.assertRaises(ConfigException) as context:
            ModelParams.from_dict({"kapa": 1}, path="config.params")
        self.assertEqual(context.exception.path, "config.params.kapa")
        self.assertRaises(ConfigException, ModelParams.from_dict, {"alpha": [1, 2, 3]})
        self.assertRaises(ConfigException, ModelParams.from_dict, {"gamma_m": -1})

    def test_rates(self):
        """Test derived channel rates."""
        params = ModelParams(kappa=0.5, gamma_m=0.1)
        self.assertEqual(params.rate1(), 1.0)
        self.assertEqual(params.rate2(), 0.2)
        self.assertEqual(params.rate_pair(), 2.0)
        self.assertEqual(params.replace(gamma1=3.0).rate1(), 3.0)
        self.assertRaises(ParameterException, ModelParams().rate1)

    def test_occupation(self):
        """Test the phonon occupation sources."""
        self.assertEqual(ModelParams(m_bar=2.0, temperature=1.0, omega_m=1.0).occupation_m(), 2.0)
        self.assertEqual(ModelParams(temperature=0.0, omega_m=1.0).occupation_m(), 0.0)
        self.assertRaises(ParameterException, ModelParams(omega_m=1.0).occupation_m)


def test_occupation_helpers():
    """Test Bose occupations."""
    assert bose_occupation(math.inf) == 0.0  # nosec
    assert bose_occupation(math.log(2.0)) == pytest.approx(1.0)  # nosec
    assert thermal_occupation(1.0, 0.0) == 0.0  # nosec
    assert thermal_occupation(1e9, 300.0) > 1000  # nosec
    with pytest.raises(ParameterException):
        bose_occupation(0.0)
    with pytest.raises(ParameterException):
        thermal_occupation(-1.0, 1.0)


def test_photon_number_linear():
    """Test the linear photon number."""
    assert photon_number_linear(1.0, 4.0) == pytest.approx(1.0)  # nosec
    assert photon_number_linear(1j, 2.0) == pytest.approx(2.0)  # nosec
    with pytest.raises(ParameterException):
        photon_number_linear(1.0, 0.0)


def test_catalog_ids():
    """Test the catalog lookup."""
    expected = {
        "quad_std_1",
        "quad_full_1",
        "quad_std_2",
        "anharmonic",
        "amplifier",
        "amplifier_kerr",
        "qnd",
        "om_std_1a",
        "om_std_1b",
        "om_std_2",
        "diode",
    }
    assert set(model_ids()) == expected  # nosec
    assert lookup("diode(3)").default_order == 3  # nosec
    assert lookup("qnd") is CATALOG["qnd"]  # nosec
    with pytest.raises(ParameterException):
        lookup("laser")


def test_missing_parameter():
    """Test builders name the missing parameter."""
    with pytest.raises(ParameterException) as info:
        build_model("quad_std_1", ModelParams())
    assert "gamma" in str(info.value)  # nosec
    with pytest.raises(ParameterException) as info:
        build_model("amplifier", ModelParams(omega=1.0, kappa=0.5))
    assert "'g'" in str(info.value)  # nosec


def test_required_parameters():
    """Test every catalog model declares the parameters it needs."""
    for model in CATALOG.values():
        assert model.required  # nosec
    assert CATALOG["quad_std_1"].required == ("gamma", "n_bar")  # nosec


def test_assembled_model_needs_hamiltonian(om_params):
    """Test a bare assembled model refuses to build."""
    model = AssembledModel()
    with pytest.raises(NotImplementedException):
        model.hamiltonian(om_params)
    with pytest.raises(NotImplementedException):
        model.channels(om_params)


def test_order_mismatch(om_params):
    """Test an explicit order must match the model."""
    with pytest.raises(ParameterException):
        build_model("om_std_2", om_params.replace(order=1))


def test_quad_std_1(quad_params):
    """Test the first-order quadratic system."""
    system = build_model("quad_std_1", quad_params)
    assert system.labels == ("a", "d", "dd", "m")  # nosec
    assert system.bindings["a"] == "vacuum"  # nosec
    assert system.bindings["d"] == "thermal"  # nosec
    # -3i gamma mbar - G1/2
    assert system.entry("a", "a") == pytest.approx(-0.5 - 0.03j)  # nosec
    assert system.entry("m", "m") == pytest.approx(-0.2)  # nosec
    assert system.noise_weights[0, 0] == pytest.approx(1.0)  # nosec


def test_quad_full_1_number_damping(quad_params):
    """Test number rows decay at the summed rate of their ladders."""
    system = build_model("quad_full_1", quad_params)
    assert system.entry("n", "n") == pytest.approx(-1.0)  # nosec
    assert system.entry("m", "m") == pytest.approx(-0.2)  # nosec


@pytest.mark.parametrize("n_bar,stable", [(0.01, True), (1e4, False)])
def test_quad_full_1_stability(quad_params, n_bar, stable):
    """Test the full quadratic system loses stability at large photon number."""
    params = quad_params.replace(delta=-1.0, self_energy=True, n_bar=n_bar)
    report = check_stability(build_model("quad_full_1", params))
    assert report.stable is stable  # nosec


def test_conjugate_rows(quad_params):
    """Test adjoint rows are the conjugates of their partners."""
    system = build_model("quad_full_1", quad_params.replace(delta=-1.0, self_energy=True))
    partner = {"c": "cd", "cd": "c", "n": "n", "d": "dd", "dd": "d", "m": "m"}
    for row in system.labels:
        for column in system.labels:
            mirrored = system.entry(partner[row], partner[column])
            assert mirrored == pytest.approx(np.conj(system.entry(row, column)))  # nosec
        mirrored = np.conj(system.drive[system.index(row)])
        assert system.drive[system.index(partner[row])] == pytest.approx(mirrored)  # nosec


def test_quad_std_2(quad_params):
    """Test the second-order quadratic system."""
    system = build_model("quad_std_2", quad_params)
    assert system.size == 15  # nosec
    assert system.bindings["c*d"] == "vacuum*thermal"  # nosec
    single = system.noise_weights[system.index("c"), system.index("c")]
    pair = system.noise_weights[system.index("d"), system.index("d")]
    combined = system.noise_weights[system.index("c*d"), system.index("c*d")]
    assert combined == pytest.approx(math.hypot(single, pair))  # nosec
    assert system.noise_weights[system.index("n*m"), system.index("n*m")] == 0  # nosec


def test_amplifier(amplifier_params):
    """Test the assembled amplifier rows."""
    system = build_model("amplifier", amplifier_params)
    pump = amplifier_params.g
    assert system.entry("n", "n") == pytest.approx(-2.0)  # nosec
    assert system.entry("n", "c") == pytest.approx(2j * pump)  # nosec
    assert system.entry("n", "cd") == pytest.approx(-2j * pump.conjugate())  # nosec
    assert system.entry("c", "c") == pytest.approx(-2j - 1.0)  # nosec
    assert system.drive[system.index("c")] == pytest.approx(-0.5j * pump.conjugate())  # nosec
    assert system.noise_weights[1, 1] == pytest.approx(math.sqrt(2.0))  # nosec
    assert system.bindings == {"c": "vacuum", "cd": "vacuum"}  # nosec
    assert check_stability(system).stable  # nosec
    assert CATALOG["amplifier"].closure(amplifier_params).closed  # nosec


def test_non_demolition():
    """Test the nondemolition readout system."""
    params = ModelParams(omega=1.0, chi=0.1, kappa=0.5, gamma_m=0.1, n_bar=1.0, m_bar=1.0)
    system = build_model("qnd", params)
    assert system.inputs == ("a_x", "a_y", "b_x")  # nosec
    np.testing.assert_allclose(system.drive, [0.5, 0.1, 0, 0])
    assert system.entry("C", "S") == pytest.approx(1.1)  # nosec
    assert system.entry("S", "C") == pytest.approx(-1.1)  # nosec
    report = CATALOG["qnd"].closure(params)
    assert report.closed  # nosec
    assert report.entry("C", "S").form.constant != 0  # nosec


def test_optomechanics_second_order(om_params):
    """Test the second-order optomechanical matrix."""
    system = build_model("om_std_2", om_params)
    assert system.entry("a", "a") == pytest.approx(-0.25)  # nosec
    assert system.entry("a", "a*b") == pytest.approx(0.5j)  # nosec
    assert system.entry("a", "a*bd") == pytest.approx(0.5j)  # nosec
    assert system.entry("b", "n") == pytest.approx(0.5j)  # nosec
    assert system.entry("n", "n") == pytest.approx(-0.5)  # nosec
    assert system.entry("c", "c") == pytest.approx(-0.5)  # nosec
    assert system.entry("a*b", "a*b").real == pytest.approx(-0.3)  # nosec
    assert system.entry("a*bd", "a*bd").real == pytest.approx(-0.3)  # nosec
    assert system.bindings["a_in^2"] == "vacuum_squared"  # nosec
    assert system.noise_weights[5, 2] == pytest.approx(2.0)  # nosec


def test_optomechanics_cross_rows(om_params):
    """Test the ab rows carry the reduced radiation pressure terms."""
    system = build_model("om_std_2", om_params)
    # g0 (nbar + 1 + mbar + mbar/4)
    assert system.entry("a*b", "a") == pytest.approx(1.625j)  # nosec
    # g0 (mbar - nbar)
    assert system.entry("a*bd", "a") == pytest.approx(0.0)  # nosec
    cold = build_model("om_std_2", om_params.replace(ultracold=True))
    assert cold.entry("a*b", "a") == pytest.approx(0.5j)  # nosec
    assert cold.entry("a*bd", "a") == pytest.approx(0.5j)  # nosec


def test_first_order_truncation(om_params):
    """Test the first-order rows follow from the second-order matrix."""
    matrix, drive = first_order_from_second(om_params)
    system = build_model("om_std_1a", om_params)
    np.testing.assert_allclose(matrix, system.matrix, atol=1e-12)
    np.testing.assert_allclose(drive, system.drive, atol=1e-12)


def test_field_replacement(om_params):
    """Test the field replacement variant couples b to a."""
    plain = build_model("om_std_1a", om_params)
    replaced = build_model("om_std_1b", om_params)
    assert plain.entry("b", "a") == 0  # nosec
    assert replaced.entry("b", "a") == pytest.approx(0.5j)  # nosec
    assert replaced.entry("bd", "a") == pytest.approx(-0.5j)  # nosec
    assert np.allclose(replaced.drive, 0)  # nosec
    assert plain.drive[1] == pytest.approx(0.5j)  # nosec
    assert plain.drive[2] == pytest.approx(-0.5j)  # nosec
    assert plain.bindings == {"a": "vacuum", "b": "thermal", "bd": "thermal"}  # nosec


def test_anharmonic_drive():
    """Test the coherent input enters as minus its moments."""
    params = ModelParams(omega=1.0, zeta=0.01, kappa=0.5, n_bar=0.5, beta=0.2)
    driven = build_model("anharmonic", params)
    free = build_model("anharmonic", params.replace(beta=None))
    difference = driven.drive - free.drive
    assert driven.size == 8  # nosec
    assert difference[driven.index("c")] == pytest.approx(-math.sqrt(2.0) * 0.2)  # nosec
    assert difference[driven.index("cd")] == pytest.approx(-math.sqrt(2.0) * 0.2)  # nosec
    assert difference[driven.index("n")] == pytest.approx(-math.sqrt(2.0) * 1.08)  # nosec
    assert difference[driven.index("n^2")] == 0  # nosec


def test_diode_chain(diode_params):
    """Test the truncated diode chain."""
    matrix, coupling, source = Diode(3).chain(diode_params)
    np.testing.assert_allclose(matrix, [[-2.0, -0.5, -1.0 / 6.0], [0.0, -4.0, -1.0], [0.0, 0.0, -6.0]])
    assert coupling[1, 0] == 2.0  # nosec
    assert coupling[2, 1] == 3.0  # nosec
    np.testing.assert_allclose(source, [1.0, 0.0, 0.0])
    system = build_model("diode(3)", diode_params)
    assert system.labels == ("u", "u^2", "u^3")  # nosec
    np.testing.assert_allclose(system.noise_weights[:, 0], [1.0, 0.0, 0.0])
    assert lookup("diode(3)").closure(diode_params).closed  # nosec
    with pytest.raises(ParameterException):
        Diode().build(diode_params)


def test_bistability_roots():
    """Test the lossless cubic has three imaginary roots inside the S curve."""
    params = ModelParams(g0=1.0, m_bar=1.0, omega_m=1.0, delta=1.0, alpha=1.0)
    cubic = photon_number_cubic(params)
    assert cubic.b_coefficient == pytest.approx(3.0)  # nosec
    for record in cubic.closed_form:
        assert not record.complex_branch  # nosec
        assert cubic.residual(record.x, 1.0) < 1e-8  # nosec
    photon_numbers = sorted(record.n_bar for record in cubic.companion)
    assert len(set(np.round(photon_numbers, 9))) == 3  # nosec


def test_cubic_without_drive():
    """Test the degenerate cubic."""
    params = ModelParams(g0=1.0, m_bar=1.0, omega_m=1.0, delta=1.0, alpha=0.0)
    cubic = photon_number_cubic(params)
    assert cubic.degenerate  # nosec
    assert min(record.n_bar for record in cubic.closed_form) == 0  # nosec


# ---------------------------------------------------------------------------#
#  Main
# ---------------------------------------------------------------------------#
if __name__ == "__main__":
    unittest.main()
