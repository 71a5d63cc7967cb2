#!/usr/bin/env python3
"""Test the frequency domain pipeline."""
import math
import unittest

import numpy as np
import pytest

from hilange.assembler import LinearLangevinSystem
from hilange.exceptions import ConfigException, ParameterException, SingularSystemException
from hilange.models import build_model
from hilange.spectral import (
    FrequencyGrid,
    GaussianNoise,
    NoiseCatalog,
    SquaredNoise,
    ThermalNoise,
    input_noise_spectrum,
    noise_from_dict,
    output_spectra,
    scattering_matrix,
    spectrum_integral,
    trapezoid_estimate,
)


def one_port(kappa=1.0, detuning=0.0):
    """Return a lossy mode with one input."""
    return LinearLangevinSystem(
        labels=("a",),
        matrix=np.array([[-1j * detuning - kappa / 2]]),
        drive=np.zeros(1),
        noise_weights=np.array([[math.sqrt(kappa)]]),
        inputs=("a_in",),
        bindings={"a_in": "thermal"},
    )


class FrequencyGridTest(unittest.TestCase):
    """Unittest for the hilange.spectral grid."""

    def test_grid(self):
        """Test points and spacing."""
        grid = FrequencyGrid.symmetric(3.0, 7)
        self.assertEqual(grid.step, 1.0)
        np.testing.assert_allclose(grid.values(), np.arange(-3.0, 4.0))
        self.assertEqual(grid.to_dict(), {"w_min": -3.0, "w_max": 3.0, "count": 7})

    def test_invalid(self):
        """Test grid validation."""
        self.assertRaises(ParameterException, FrequencyGrid, 1.0, 1.0, 10)
        self.assertRaises(ParameterException, FrequencyGrid, 0.0, 1.0, 1)
        self.assertRaises(ParameterException, FrequencyGrid, 0.0, math.inf, 10)


class NoiseCatalogTest(unittest.TestCase):
    """Unittest for the hilange.spectral noise catalog."""

    def setUp(self):
        """Initialize the test environment"""
        self.omega = np.linspace(0.0, 4.0, 4001)
        self.catalog = NoiseCatalog.default(n_th=2.0)

    def tearDown(self):
        """Clean up the test environment"""
        del self.catalog

    def test_flat_kinds(self):
        """Test vacuum, thermal and flat products."""
        np.testing.assert_allclose(self.catalog.density("vacuum", self.omega), 1.0)
        np.testing.assert_allclose(self.catalog.density("thermal", self.omega), 2.5)
        np.testing.assert_allclose(self.catalog.density("vacuum*thermal", self.omega), 2.5)
        self.assertIn("thermal*vacuum", self.catalog)
        self.assertNotIn("laser", self.catalog)

    def test_gaussian_line(self):
        """Test the Gaussian line has unit area."""
        line = GaussianNoise(0.1, 1.0)
        density = input_noise_spectrum(line, self.omega)
        self.assertAlmostEqual(trapezoid_estimate(self.omega, density).value, 1.0, places=6)
        self.assertAlmostEqual(float(self.omega[np.argmax(density)]), 1.0)

    def test_squared_line(self):
        """Test the closed form and the quadrature agree."""
        self.catalog.register("field", GaussianNoise(0.1, 1.0))
        self.catalog.register("closed", SquaredNoise("field", scale=1.0))
        self.catalog.register("numeric", SquaredNoise("field", scale=1.0, closed_form=False))
        closed = self.catalog.density("closed", self.omega)
        numeric = self.catalog.density("numeric", self.omega)
        self.assertAlmostEqual(trapezoid_estimate(self.omega, closed).value, 1.0, places=6)
        self.assertAlmostEqual(float(self.omega[np.argmax(closed)]), 2.0)
        self.assertLess(float(np.max(np.abs(closed - numeric))), 1e-4 * float(np.max(closed)))

    def test_default_squared_scale(self):
        """Test the squared coherent normalisation."""
        self.catalog.register("field", GaussianNoise(0.1, 1.0))
        squared = SquaredNoise("field")
        self.assertAlmostEqual(squared.effective_scale(self.catalog), 2.0 / math.pi * 0.01)

    def test_cycle(self):
        """Test reference cycles are reported."""
        self.catalog.register("x", SquaredNoise("y"))
        self.catalog.register("y", SquaredNoise("x"))
        with self.assertRaises(ParameterException) as context:
            self.catalog.density("x", self.omega)
        self.assertIn("cycle", str(context.exception))

    def test_invalid_models(self):
        """Test noise validation."""
        self.assertRaises(ParameterException, ThermalNoise, -1.0)
        self.assertRaises(ParameterException, GaussianNoise, 0.0, 1.0)
        self.assertRaises(ParameterException, GaussianNoise, 0.1, 0.0)
        self.assertRaises(ParameterException, self.catalog.resolve, "laser")


@pytest.mark.parametrize(
    "spec,kind",
    [
        ({"kind": "vacuum"}, "vacuum"),
        ({"kind": "thermal", "n_th": 0.5}, "thermal"),
        ({"kind": "coherent_gaussian", "chi": 0.1, "omega": 1.0}, "coherent_gaussian"),
        ({"kind": "squared", "base": "field"}, "squared"),
        ({"kind": "product", "bases": ["vacuum", "thermal"]}, "product"),
    ],
)
def test_noise_from_dict(spec, kind):
    """Test noise kinds from their JSON form."""
    model = noise_from_dict(spec)
    assert model.kind == kind  # nosec
    assert model.to_dict()["kind"] == kind  # nosec


def test_noise_from_dict_errors():
    """Test malformed noise documents name their path."""
    with pytest.raises(ConfigException) as info:
        noise_from_dict({"kind": "pink"}, path="config.noise.x")
    assert info.value.path == "config.noise.x.kind"  # nosec
    with pytest.raises(ConfigException):
        noise_from_dict({"kind": "squared"})
    with pytest.raises(ConfigException):
        noise_from_dict({"kind": "thermal", "n_th": -1})


def test_one_port_reflection():
    """Test a lossy mode reflects with S(0) = -1."""
    system = one_port()
    assert scattering_matrix(system, 0.0)[0, 0] == pytest.approx(-1.0)  # nosec
    for w in (-2.0, 0.3, 5.0):
        assert abs(scattering_matrix(system, w)[0, 0]) == pytest.approx(1.0)  # nosec


def test_uncoupled_scattering():
    """Test zero coupling gives the identity."""
    system = LinearLangevinSystem(
        labels=("a", "b"),
        matrix=np.diag([-1.0, -2.0]),
        drive=np.zeros(2),
        noise_weights=np.zeros((2, 2)),
        inputs=("a", "b"),
    )
    np.testing.assert_array_equal(scattering_matrix(system, 1.0), np.eye(2))


def test_singular_resolvent():
    """Test the singular frequency is reported."""
    system = LinearLangevinSystem(
        labels=("a", "b"),
        matrix=np.diag([-1j, -1.0]),
        drive=np.zeros(2),
        noise_weights=np.eye(2),
        inputs=("a", "b"),
    )
    with pytest.raises(SingularSystemException) as info:
        scattering_matrix(system, 1.0)
    assert info.value.frequency == 1.0  # nosec


def test_output_spectra_one_port():
    """Test a passive port keeps a flat input flat."""
    catalog = NoiseCatalog.default(n_th=1.0)
    grid = FrequencyGrid.symmetric(2.0, 101)
    result = output_spectra(one_port(), catalog, grid)
    np.testing.assert_allclose(result.density("a"), 1.5)
    assert result.metadata["grid"]["count"] == 101  # nosec
    assert spectrum_integral(result, "a").value == pytest.approx(6.0)  # nosec


def test_output_spectra_threads(om_params):
    """Test the sweep does not depend on the worker count."""
    system = build_model("om_std_1a", om_params)
    catalog = NoiseCatalog.default(n_th=1.0)
    grid = FrequencyGrid.symmetric(3.0, 61)
    serial = output_spectra(system, catalog, grid, threads=1)
    pooled = output_spectra(system, catalog, grid, threads=4)
    np.testing.assert_array_equal(serial.densities, pooled.densities)


def test_unbound_input(om_params):
    """Test inputs bound to unknown models are refused."""
    system = build_model("om_std_1a", om_params)
    catalog = NoiseCatalog()
    with pytest.raises(ParameterException):
        output_spectra(system, catalog, FrequencyGrid.symmetric(1.0, 11))


def test_spectrum_csv(tmp_path):
    """Test the CSV layout."""
    result = output_spectra(one_port(), NoiseCatalog.default(), FrequencyGrid(0.0, 1.0, 3))
    path = tmp_path / "spectrum.csv"
    result.to_csv(str(path))
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "omega_rad_s,a"  # nosec
    assert lines[1] == "0.000000000000e+00,5.000000000000e-01"  # nosec
    assert len(lines) == 4  # nosec


def test_trapezoid_error_estimate():
    """Test the grid resolution error estimate."""
    omega = np.linspace(0.0, 1.0, 101)
    estimate = trapezoid_estimate(omega, omega**2)
    assert estimate.value == pytest.approx(1.0 / 3.0, abs=1e-4)  # nosec
    assert estimate.error == pytest.approx(abs(estimate.value - 1.0 / 3.0), rel=1e-3)  # nosec
    assert math.isnan(trapezoid_estimate(omega[:4], omega[:4]).error)  # nosec


# ---------------------------------------------------------------------------#
#  Main
# ---------------------------------------------------------------------------#
if __name__ == "__main__":
    unittest.main()
