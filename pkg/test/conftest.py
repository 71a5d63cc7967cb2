"""Configure pytest."""
import pytest

from hilange.models import ModelParams


def pytest_configure():
    """Configure pytest."""
    pytest.SIDEBAND_GRID = (-3.0, 3.0, 4001)


@pytest.fixture
def om_params():
    """Second-order optomechanics at resonance."""
    return ModelParams(
        g0=0.5,
        delta=0.0,
        omega_m=1.0,
        kappa=0.5,
        gamma_m=0.1,
        n_bar=1.0,
        m_bar=1.0,
        alpha=1.0,
    )


@pytest.fixture
def quad_params():
    """Quadratic optomechanics with self energies."""
    return ModelParams(
        gamma=0.01,
        delta=0.0,
        omega_m=1.0,
        kappa=0.5,
        gamma_m=0.1,
        n_bar=1.0,
        m_bar=1.0,
    )


@pytest.fixture
def diode_params():
    """Diode circuit in units of tau."""
    return ModelParams(kappa=1.0, mu=1.0, tau=1.0)


@pytest.fixture
def amplifier_params():
    """Parametric amplifier below threshold."""
    return ModelParams(omega=1.0, g=0.1 + 0.05j, n_bar=0.5, kappa=0.5, gamma=0.02)
