"""Derived quantities.

Second order coherence and the laser threshold, photon number bistability,
sideband asymmetry of the second-order optomechanical system and
Q-function moments.
"""
# pylint: disable=missing-type-doc
import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np
import sympy

from hilange.algebra import antinormal_order
from hilange.constants import Defaults
from hilange.exceptions import ParameterException
from hilange.models import build_model, photon_number_cubic
from hilange.spectral import (
    FrequencyGrid,
    GaussianNoise,
    NoiseCatalog,
    SpectrumResult,
    SquaredNoise,
    output_spectra,
    spectrum_integral,
)

_logger = logging.getLogger(__name__)


# --------------------------------------------------------------------------- #
# Second order coherence
# --------------------------------------------------------------------------- #


def _check_occupation(n_bar):
    if n_bar is None or n_bar <= 0:
        raise ParameterException(f"mean photon number must be > 0, got {n_bar}")


def g2_zero(n_bar, psi0=1.0, upsilon0=1.0):
    """Return ``(2/n^2) Psi0 (Psi0 + Upsilon0) - (4n + 2)/n^2``."""
    _check_occupation(n_bar)
    return 2.0 * psi0 * (psi0 + upsilon0) / n_bar**2 - (4.0 * n_bar + 2.0) / n_bar**2


def g2_zero_from_spectrum(result, n_bar, element="c"):
    """Return ``(4/n^2) int S_CC dw - (4n + 2)/n^2``."""
    _check_occupation(n_bar)
    integral = spectrum_integral(result, element)
    return 4.0 * integral.value / n_bar**2 - (4.0 * n_bar + 2.0) / n_bar**2


def laser_threshold(psi0=1.0, upsilon0=1.0):
    """Return the photon number where g2(0) = 1.

    Solves ``n^2 + 4n + 2 - 2 Psi0 (Psi0 + Upsilon0) = 0`` for its
    positive root.
    """
    product = psi0 * (psi0 + upsilon0)
    root = math.sqrt(2.0 + 2.0 * product) - 2.0 if 2.0 + 2.0 * product >= 0 else -1.0
    if root <= 0:
        raise ParameterException(f"no positive threshold for Psi0 (Psi0 + Upsilon0) = {product}")
    return root


def gaussian_cc_spectrum(grid, chi, omega, psi0=1.0, upsilon0=1.0):
    """Return the pair operator density of a Gaussian coherent field.

    The squared line carries the weight ``Psi0 (Psi0 + Upsilon0) / 2``.
    """
    omega_grid = grid.values() if isinstance(grid, FrequencyGrid) else np.asarray(grid, dtype=float)
    catalog = NoiseCatalog(
        {
            "field": GaussianNoise(chi, omega),
            "pair": SquaredNoise("field", scale=0.5 * psi0 * (psi0 + upsilon0)),
        }
    )
    density = catalog.density("pair", omega_grid)
    return SpectrumResult(
        omega_grid,
        ("c",),
        density[None, :],
        density[None, :],
        {"chi": chi, "omega": omega, "psi0": psi0, "upsilon0": upsilon0},
    )


# --------------------------------------------------------------------------- #
# Bistability
# --------------------------------------------------------------------------- #


@dataclass(frozen=True, eq=False)
class BistabilityCurve:
    """Continued root branches over a sweep.

    ``n_bar[i, k]`` is NaN where branch k is complex at point i. Without
    loss only roots with real ``-i x`` count; a lossy cubic keeps all three.
    """

    sweep: str
    values: np.ndarray
    roots: np.ndarray
    n_bar: np.ndarray
    residuals: np.ndarray
    metadata: dict = field(default_factory=dict)

    @property
    def real_counts(self):
        """Return the number of real branches per point."""
        return np.sum(np.isfinite(self.n_bar), axis=1)

    def multistable_interval(self):
        """Return (low, high) of sweep values with three real branches, or None."""
        mask = self.real_counts == 3
        if not np.any(mask):
            return None
        chosen = self.values[mask]
        return float(chosen.min()), float(chosen.max())

    def to_csv(self, path):
        """Write the sweep value and one column per branch."""
        header = ",".join([self.sweep, "n_bar_0", "n_bar_1", "n_bar_2"])
        table = np.column_stack([self.values, self.n_bar])
        np.savetxt(path, table, fmt="%.12e", delimiter=",", header=header, comments="")


def _continue(previous, current):
    """Permute roots to follow the previous point."""
    best = min(
        itertools.permutations(range(3)),
        key=lambda perm: sum(abs(current[perm[k]] - previous[k]) for k in range(3)),
    )
    return [current[pos] for pos in best]


def bistability_curve(params, sweep, values):
    """Return the photon number branches over an alpha or delta sweep.

    :param params: ModelParams for the second-order optomechanical cubic
    :param sweep: "alpha" or "delta"
    :param values: sweep values
    :returns: BistabilityCurve
    """
    if sweep not in ("alpha", "delta"):
        raise ParameterException(f"sweep must be 'alpha' or 'delta', got {sweep!r}")
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or values.size == 0:
        raise ParameterException("sweep needs at least one value")
    roots = np.empty((values.size, 3), dtype=complex)
    n_bar = np.empty((values.size, 3))
    residuals = np.empty((values.size, 3))
    lossless = (params.kappa or 0.0) + (params.gamma_m or 0.0) == 0
    previous = None
    for pos, value in enumerate(values):
        point = params.replace(**{sweep: float(value)})
        cubic = photon_number_cubic(point)
        records = []
        for closed, oracle in zip(cubic.closed_form, cubic.companion):
            scale = max(abs(cubic.c_coefficient), 1e-300)
            chosen = closed
            if cubic.residual(closed.x, point.g0) > Defaults.ResidualTolerance * scale:
                chosen = oracle
            records.append(chosen)
        current = [record.x for record in records]
        if previous is None:
            current.sort(key=lambda x: (abs(x) ** 2, x.imag))
        else:
            current = _continue(previous, current)
        previous = current
        for branch, x in enumerate(current):
            roots[pos, branch] = x
            residuals[pos, branch] = cubic.residual(x, point.g0)
            on_axis = not lossless or abs(x.real) <= 1e-9 * max(1.0, abs(x))
            n_bar[pos, branch] = abs(x) ** 2 if on_axis else math.nan
    _logger.debug("bistability sweep over %d %s values", values.size, sweep)
    return BistabilityCurve(sweep, values, roots, n_bar, residuals, {"params": params.to_dict()})


# --------------------------------------------------------------------------- #
# Sideband asymmetry
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class AsymmetryReport:
    """Optical output densities at the two mechanical sidebands."""

    pump_detuning: float
    sidebands: tuple
    density_plus: float
    density_minus: float
    ratio: float

    def to_dict(self):
        """Return the JSON form."""
        return {
            "pump_detuning": self.pump_detuning,
            "sidebands": list(self.sidebands),
            "density_plus": self.density_plus,
            "density_minus": self.density_minus,
            "ratio": self.ratio,
        }


def read_density(omega, density, target):
    """Return the density at target by three point parabolic interpolation."""
    pos = int(np.argmin(np.abs(omega - target)))
    pos = min(max(pos, 1), omega.size - 2)
    xs = omega[pos - 1 : pos + 2]
    ys = density[pos - 1 : pos + 2]
    coefficients = np.polyfit(xs - xs[1], ys, 2)
    return float(np.polyval(coefficients, target - xs[1]))


def _check_symmetric(system, catalog, omega):
    if not np.allclose(omega, -omega[::-1], rtol=0, atol=1e-12 * max(1.0, float(np.max(np.abs(omega))))):
        raise ParameterException("sideband read out needs a grid symmetric about zero")
    for label in system.inputs:
        binding = system.bindings.get(label, "vacuum")
        values = catalog.density(binding, omega)
        if not np.allclose(values, values[::-1], rtol=1e-12, atol=1e-15):
            raise ParameterException(f"input {label} ({binding}) is not symmetric in frequency")


def sideband_asymmetry(params, grid, catalog=None, element="a"):
    """Return the ratio of the optical output at +Omega and -Omega.

    :param params: ModelParams of the second-order optomechanical system
    :param grid: FrequencyGrid symmetric about zero
    :param catalog: NoiseCatalog (default vacuum, thermal at m_bar)
    :param element: output element read out
    :returns: AsymmetryReport
    """
    (omega_m,) = params.require("omega_m")
    system = build_model("om_std_2", params)
    catalog = catalog or NoiseCatalog.default(n_th=params.occupation_m())
    omega = grid.values() if isinstance(grid, FrequencyGrid) else np.asarray(grid, dtype=float)
    _check_symmetric(system, catalog, omega)
    result = output_spectra(system, catalog, omega)
    density = result.density(element)
    plus = read_density(omega, density, omega_m)
    minus = read_density(omega, density, -omega_m)
    if minus > Defaults.AsymmetryFloor:
        ratio = plus / minus
    else:
        _logger.warning("sideband density %.3e is below the floor", minus)
        ratio = math.nan
    return AsymmetryReport(float(params.delta or 0.0), (omega_m, -omega_m), plus, minus, ratio)


# --------------------------------------------------------------------------- #
# Q-function moments
# --------------------------------------------------------------------------- #


def q_moment(expr, alpha):
    """Return the Q-function moment of an operator at a coherent amplitude.

    The operator is written in anti-normal order and ``a -> alpha``,
    ``ad -> conj(alpha)`` per mode.

    :param expr: OperatorExpr
    :param alpha: complex amplitude of mode ``a`` or a mapping mode -> amplitude
    :returns: exact sympy value when the inputs are exact
    """
    amplitudes = alpha if isinstance(alpha, dict) else {"a": alpha}
    total = sympy.S.Zero
    for key, coeff in antinormal_order(expr).items():
        term = coeff
        for mode, cre, ann in key.factors:
            if mode not in amplitudes:
                raise ParameterException(f"no amplitude for mode {mode!r}")
            value = sympy.sympify(amplitudes[mode])
            term *= value**ann * sympy.conjugate(value) ** cre
        total += term
    return sympy.expand(total)


def anharmonic_input_moments(beta, gamma1):
    """Return the coherent input moments of the anharmonic oscillator.

    Uses ``G2 = 2 G1`` and ``G3 = 4 G1``; keys are basis labels.
    """
    if gamma1 is None or gamma1 < 0:
        raise ParameterException(f"G1 must be >= 0, got {gamma1}")
    beta = complex(beta)
    occupation = abs(beta) ** 2
    gamma2, gamma3 = 2.0 * gamma1, 4.0 * gamma1
    return {
        "a": math.sqrt(2.0 * gamma1) * beta,
        "c": math.sqrt(gamma2) * beta,
        "n": math.sqrt(gamma2) * (2.0 * occupation + 1.0),
        "c^2": math.sqrt(gamma3) * beta**2,
        "n*c": math.sqrt(gamma3) * beta**2 * (2.0 * occupation + 3.0),
    }
