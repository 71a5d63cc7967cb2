"""Frequency domain pipeline.

Input noise densities, the scattering matrix of a linear Langevin system
and the output spectra ``out_i(w) = sum_j |S_ij(w)|^2 in_j(w)``.

The Fourier kernel is ``exp(-i w t)``, so a single lossy mode reflects
with ``S(0) = -1``:

    S(w) = I + D (i w I + M)^-1 D,    D = diag(|W_i|)

where ``|W_i|`` is the norm of the noise weight row i.
"""
# pylint: disable=missing-type-doc
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.integrate

from hilange.constants import Defaults
from hilange.exceptions import ConfigException, ParameterException, SingularSystemException
from hilange.interfaces import INoiseKind
from hilange.utilities import params_hash, thread_count

_logger = logging.getLogger(__name__)


# --------------------------------------------------------------------------- #
# Grids
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform angular frequency grid (rad/s)."""

    w_min: float
    w_max: float
    count: int = Defaults.GridCount

    def __post_init__(self):
        """Validate."""
        if not (math.isfinite(self.w_min) and math.isfinite(self.w_max)):
            raise ParameterException("grid bounds must be finite")
        if self.w_max <= self.w_min:
            raise ParameterException(f"grid needs w_max > w_min, got [{self.w_min}, {self.w_max}]")
        if int(self.count) < 2:
            raise ParameterException(f"grid needs at least 2 points, got {self.count}")

    @classmethod
    def symmetric(cls, half_width, count=Defaults.GridCount):
        """Return the grid over [-half_width, half_width]."""
        return cls(-half_width, half_width, count)

    @property
    def step(self):
        """Return the spacing."""
        return (self.w_max - self.w_min) / (int(self.count) - 1)

    def values(self):
        """Return the grid points."""
        return np.linspace(self.w_min, self.w_max, int(self.count))

    def to_dict(self):
        """Return the JSON form."""
        return {"w_min": self.w_min, "w_max": self.w_max, "count": int(self.count)}


# --------------------------------------------------------------------------- #
# Noise kinds
# --------------------------------------------------------------------------- #


class NoiseModel(INoiseKind):
    """Base of the noise kinds.

    ``analytic`` kinds evaluate at arbitrary points; composite kinds
    need quadrature nodes and are interpolated elsewhere.
    """

    analytic = True
    flat = False
    references = ()

    def level(self):
        """Return the constant density of a flat kind."""
        raise ParameterException(f"{self.kind} noise is not flat")

    def to_dict(self):
        """Return the JSON form."""
        return {"kind": self.kind}


class VacuumNoise(NoiseModel):
    """Unit white density."""

    kind = "vacuum"
    flat = True

    def level(self):
        """Return 1."""
        return 1.0

    def density(self, omega, catalog=None, trail=()):
        """Return ones."""
        return np.ones_like(np.asarray(omega, dtype=float))


class ThermalNoise(NoiseModel):
    """Symmetric thermal density ``n_th + 1/2``."""

    kind = "thermal"
    flat = True

    def __init__(self, n_th):
        """Initialize."""
        if n_th is None or n_th < 0:
            raise ParameterException(f"thermal occupation must be >= 0, got {n_th}")
        self.n_th = float(n_th)

    def level(self):
        """Return n_th + 1/2."""
        return self.n_th + 0.5

    def density(self, omega, catalog=None, trail=()):
        """Return the flat thermal density."""
        return np.full_like(np.asarray(omega, dtype=float), self.level())

    def to_dict(self):
        """Return the JSON form."""
        return {"kind": self.kind, "n_th": self.n_th}


class GaussianNoise(NoiseModel):
    """Coherent field with a Gaussian line.

    The density has unit integral times ``amplitude``, width ``chi |omega|``
    and centre ``omega``.
    """

    kind = "coherent_gaussian"

    def __init__(self, chi, omega, amplitude=1.0):
        """Initialize."""
        if chi is None or chi <= 0:
            raise ParameterException(f"linewidth ratio chi must be > 0, got {chi}")
        if omega is None or omega == 0:
            raise ParameterException("carrier frequency must be non zero")
        self.chi = float(chi)
        self.omega = float(omega)
        self.amplitude = float(amplitude)

    @property
    def width(self):
        """Return the standard deviation chi |omega|."""
        return self.chi * abs(self.omega)

    def density(self, omega, catalog=None, trail=()):
        """Return the normalised Gaussian."""
        points = np.asarray(omega, dtype=float)
        sigma = self.width
        return self.amplitude * np.exp(-((points - self.omega) ** 2) / (2 * sigma**2)) / (
            math.sqrt(2 * math.pi) * sigma
        )

    def squared_density(self, omega, scale):
        """Return the closed-form self convolution times scale."""
        points = np.asarray(omega, dtype=float)
        sigma = self.width
        return (
            scale
            * self.amplitude**2
            * np.exp(-((points - 2 * self.omega) ** 2) / (4 * sigma**2))
            / (2 * math.sqrt(math.pi) * sigma)
        )

    def to_dict(self):
        """Return the JSON form."""
        return {"kind": self.kind, "chi": self.chi, "omega": self.omega, "amplitude": self.amplitude}


class CompositeNoise(NoiseModel):
    """Convolution of two referenced densities."""

    analytic = False

    def __init__(self, first, second, scale=1.0):
        """Initialize."""
        self.references = (first, second)
        self.scale = float(scale)

    def density(self, omega, catalog, trail=()):
        """Return ``scale * (S1 * S2)(w)`` by quadrature on the nodes."""
        first, second = (catalog.resolve(ref, trail) for ref in self.references)
        trail = tuple(trail)
        if first.flat and second.flat and isinstance(self, ProductNoise):
            return np.full_like(np.asarray(omega, dtype=float), self.scale * first.level() * second.level())
        nodes = catalog.nodes(omega)
        left = catalog.evaluate(self.references[0], nodes, trail)
        _warn_window(left, self.references[0])
        return self.scale * _convolve(left, nodes, self.references[1], np.asarray(omega, dtype=float), catalog, trail)


class SquaredNoise(CompositeNoise):
    """Density of the squared field of a base input.

    ``scale`` defaults to ``(2/pi) chi^2`` for a Gaussian base, which is the
    normalisation of the squared coherent field, and to 1 otherwise.
    Gaussian bases use the closed form unless ``closed_form`` is unset.
    """

    kind = "squared"

    def __init__(self, base, scale=None, closed_form=True):
        """Initialize."""
        super().__init__(base, base, 1.0 if scale is None else scale)
        self.base = base
        self.explicit_scale = scale
        self.closed_form = closed_form

    def effective_scale(self, catalog, trail=()):
        """Return the scale used for a resolved base."""
        if self.explicit_scale is not None:
            return float(self.explicit_scale)
        base = catalog.resolve(self.base, trail)
        if isinstance(base, GaussianNoise):
            return 2.0 / math.pi * base.chi**2
        return 1.0

    def density(self, omega, catalog, trail=()):
        """Return the squared density."""
        base = catalog.resolve(self.base, trail)
        scale = self.effective_scale(catalog, trail)
        if isinstance(base, GaussianNoise) and self.closed_form:
            return base.squared_density(omega, scale)
        nodes = catalog.nodes(omega)
        left = catalog.evaluate(self.base, nodes, trail)
        _warn_window(left, self.base)
        return scale * _convolve(left, nodes, self.base, np.asarray(omega, dtype=float), catalog, trail)

    def to_dict(self):
        """Return the JSON form."""
        return {"kind": self.kind, "base": self.base, "scale": self.explicit_scale, "closed_form": self.closed_form}


class ProductNoise(CompositeNoise):
    """Density of the product of two independent inputs.

    Two white inputs give a white product at the product level.
    """

    kind = "product"

    def to_dict(self):
        """Return the JSON form."""
        return {"kind": self.kind, "bases": list(self.references), "scale": self.scale}


def _warn_window(values, name):
    peak = float(np.max(np.abs(values), initial=0.0))
    if peak and max(abs(values[0]), abs(values[-1])) > 1e-6 * peak:
        _logger.warning("convolution window truncates the density of %s", name)


def _convolve(left, nodes, right_id, omega, catalog, trail, chunk=256):
    """Trapezoidal ``int left(w') right(w - w') dw'`` over the nodes."""
    flat = omega.reshape(-1)
    result = np.empty(flat.shape, dtype=float)
    weights = np.full(nodes.shape, nodes[1] - nodes[0])
    weights[0] *= 0.5
    weights[-1] *= 0.5
    for start in range(0, flat.size, chunk):
        block = flat[start : start + chunk]
        shifted = block[:, None] - nodes[None, :]
        right = catalog.evaluate(right_id, shifted, trail)
        result[start : start + chunk] = (right * left[None, :]) @ weights
    return result.reshape(omega.shape)


KINDS = {
    "vacuum": lambda spec: VacuumNoise(),
    "thermal": lambda spec: ThermalNoise(spec.get("n_th")),
    "coherent_gaussian": lambda spec: GaussianNoise(spec.get("chi"), spec.get("omega"), spec.get("amplitude", 1.0)),
    "squared": lambda spec: SquaredNoise(spec["base"], spec.get("scale"), spec.get("closed_form", True)),
    "product": lambda spec: ProductNoise(*spec["bases"], scale=spec.get("scale", 1.0)),
}


def noise_from_dict(spec, path="noise"):
    """Build a noise kind from its JSON form.

    :raises ConfigException: for unknown kinds or missing fields
    """
    kind = spec.get("kind")
    if kind not in KINDS:
        raise ConfigException(f"unknown noise kind {kind!r}", path=f"{path}.kind")
    try:
        return KINDS[kind](spec)
    except (KeyError, TypeError) as exc:
        raise ConfigException(f"malformed {kind} noise: {exc}", path=path) from exc
    except ParameterException as exc:
        raise ConfigException(exc.string, path=path) from exc


# --------------------------------------------------------------------------- #
# Catalog
# --------------------------------------------------------------------------- #


class NoiseCatalog:
    """Registry of named noise models.

    Binding ids of the form ``x*y`` that are not registered resolve to
    the product of x and y.
    """

    def __init__(self, models=None, window=None):
        """Initialize.

        :param models: mapping id -> NoiseModel
        :param window: FrequencyGrid used as quadrature nodes for scalar
            evaluations of composite kinds
        """
        self._models = {"vacuum": VacuumNoise()}
        self._models.update(models or {})
        self.window = window

    @classmethod
    def default(cls, n_th=0.0, window=None):
        """Return vacuum, thermal and squared vacuum models."""
        return cls(
            {
                "thermal": ThermalNoise(n_th),
                "vacuum_squared": SquaredNoise("vacuum"),
            },
            window=window,
        )

    def register(self, name, model):
        """Add or replace a model."""
        self._models[name] = model
        return self

    def unregister(self, name):
        """Remove a model."""
        self._models.pop(name, None)

    def __contains__(self, name):
        """Return True for resolvable ids."""
        try:
            self.resolve(name)
        except ParameterException:
            return False
        return True

    @property
    def names(self):
        """Return the registered ids."""
        return sorted(self._models)

    def resolve(self, name, trail=()):
        """Return the model of an id.

        :raises ParameterException: for unknown ids and reference cycles
        """
        if name in trail:
            raise ParameterException("noise model cycle: " + " -> ".join(tuple(trail) + (name,)))
        if name in self._models:
            return self._models[name]
        if "*" in name:
            first, _, second = name.partition("*")
            return ProductNoise(first, second)
        raise ParameterException(f"unknown noise model {name!r}")

    def evaluate(self, name, omega, trail=()):
        """Return the density of an id at arbitrary points."""
        model = self.resolve(name, trail)
        trail = tuple(trail) + (name,)
        for reference in model.references:
            self.resolve(reference, trail)
        if model.analytic or model.flat:
            return model.density(omega, self, trail)
        nodes = self.nodes(None)
        values = model.density(nodes, self, trail)
        return np.interp(omega, nodes, values, left=0.0, right=0.0)

    def density(self, name, omega):
        """Return the density of an id on a grid."""
        omega = np.asarray(omega, dtype=float)
        if omega.ndim == 1 and omega.size >= 2 and self.window is None:
            saved, self.window = self.window, FrequencyGrid(float(omega[0]), float(omega[-1]), omega.size)
            try:
                return self.evaluate(name, omega)
            finally:
                self.window = saved
        return self.evaluate(name, omega)

    def nodes(self, omega):
        """Return the quadrature nodes."""
        if self.window is not None:
            return self.window.values()
        points = np.asarray(omega, dtype=float) if omega is not None else np.empty(0)
        if points.ndim == 1 and points.size >= 2:
            return points
        raise ParameterException("composite noise needs a frequency window")

    def to_dict(self):
        """Return the JSON form."""
        return {name: model.to_dict() for name, model in sorted(self._models.items())}


def input_noise_spectrum(model, omega, catalog=None):
    """Return the input density of a noise model on a grid.

    :param model: NoiseModel or registered id
    :param omega: frequency grid (rad/s)
    :param catalog: NoiseCatalog resolving references
    """
    catalog = catalog or NoiseCatalog()
    if isinstance(model, str):
        return catalog.density(model, omega)
    name = f"__{id(model)}"
    catalog.register(name, model)
    try:
        return catalog.density(name, omega)
    finally:
        catalog.unregister(name)


# --------------------------------------------------------------------------- #
# Scattering
# --------------------------------------------------------------------------- #


def coupling_vector(system):
    """Return the per row effective coupling ``|W_i|``."""
    return np.sqrt(np.sum(system.noise_weights**2, axis=1))


def scattering_matrix(system, w):
    """Return S(w) of a linear system.

    :param system: LinearLangevinSystem
    :param w: angular frequency (rad/s)
    :raises SingularSystemException: if ``i w I + M`` is singular
    """
    size = system.size
    coupling = coupling_vector(system)
    identity = np.eye(size, dtype=complex)
    if not np.any(coupling):
        return identity
    resolvent = 1j * w * identity + system.matrix
    if np.linalg.cond(resolvent) > Defaults.ConditionLimit:
        raise SingularSystemException(f"resolvent is singular at w = {w}", frequency=w)
    solved = np.linalg.solve(resolvent, np.diag(coupling).astype(complex))
    return identity + coupling[:, None] * solved


def input_densities(system, catalog, omega):
    """Return the per row input density (N x G).

    Row i sees ``sum_k W_ik^2 S_k / |W_i|^2``; rows without coupling use
    their own channel when inputs are indexed by row.
    """
    omega = np.asarray(omega, dtype=float)
    channels = np.array([catalog.density(system.bindings.get(label, "vacuum"), omega) for label in system.inputs])
    coupling = coupling_vector(system)
    result = np.empty((system.size, omega.size))
    for row in range(system.size):
        if coupling[row] > 0:
            result[row] = (system.noise_weights[row] ** 2) @ channels / coupling[row] ** 2
        elif len(system.inputs) == system.size:
            result[row] = channels[row]
        else:
            result[row] = 1.0
    return result


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    """Output spectral densities on a grid."""

    omega: np.ndarray
    labels: tuple
    densities: np.ndarray
    inputs: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        """Validate."""
        if np.any(np.diff(self.omega) <= 0):
            raise ParameterException("frequency grid must be strictly increasing")
        if self.densities.shape != (len(self.labels), self.omega.size):
            raise ParameterException("density array does not match labels and grid")

    def density(self, label):
        """Return the output density of one element."""
        try:
            return self.densities[self.labels.index(label)]
        except ValueError as exc:
            raise ParameterException(f"unknown element {label!r}") from exc

    def to_csv(self, path):
        """Write ``omega_rad_s`` and one column per element."""
        table = np.column_stack([self.omega, self.densities.T])
        header = ",".join(("omega_rad_s",) + tuple(self.labels))
        np.savetxt(path, table, fmt="%.12e", delimiter=",", header=header, comments="")

    def write_metadata(self, path):
        """Write the metadata sidecar."""
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(self.metadata, handle, sort_keys=True, indent=2, default=str)
            handle.write("\n")


def output_spectra(system, catalog, grid, threads=None):
    """Return the output spectra of a system.

    :param system: LinearLangevinSystem
    :param catalog: NoiseCatalog binding every input
    :param grid: FrequencyGrid or strictly increasing array (rad/s)
    :param threads: worker count (default from HILANGE_THREADS)
    :raises ParameterException: for unbound inputs
    :raises SingularSystemException: naming the offending frequency
    """
    omega = grid.values() if isinstance(grid, FrequencyGrid) else np.asarray(grid, dtype=float)
    for label in system.inputs:
        binding = system.bindings.get(label, "vacuum")
        if binding not in catalog:
            raise ParameterException(f"input {label} is bound to unknown noise {binding!r}")
    inputs = input_densities(system, catalog, omega)
    workers = threads or thread_count()

    def point(pos):
        matrix = scattering_matrix(system, float(omega[pos]))
        return (np.abs(matrix) ** 2) @ inputs[:, pos]

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            columns = list(pool.map(point, range(omega.size)))
    else:
        columns = [point(pos) for pos in range(omega.size)]
    densities = np.array(columns).T if columns else np.empty((system.size, 0))
    metadata = {
        "model": system.metadata.get("model"),
        "order": system.metadata.get("order"),
        "params_hash": params_hash(system.metadata.get("params", {})),
        "grid": {"w_min": float(omega[0]), "w_max": float(omega[-1]), "count": int(omega.size)},
        "bindings": dict(system.bindings),
        "noise": catalog.to_dict(),
    }
    _logger.debug("spectra of %s on %d points with %d worker(s)", metadata["model"], omega.size, workers)
    return SpectrumResult(omega, tuple(system.labels), densities, inputs, metadata)


@dataclass(frozen=True)
class IntegralEstimate:
    """Trapezoidal integral with a grid resolution error estimate."""

    value: float
    error: float

    def __float__(self):
        """Return the value."""
        return self.value


def trapezoid_estimate(omega, values):
    """Integrate by trapezoid and estimate the error from the half grid."""
    omega = np.asarray(omega, dtype=float)
    values = np.asarray(values, dtype=float)
    full = float(scipy.integrate.trapezoid(values, omega))
    if omega.size >= 5 and omega.size % 2 == 1:
        half = float(scipy.integrate.trapezoid(values[::2], omega[::2]))
        error = abs(full - half) / 3.0
    else:
        error = float("nan")
    return IntegralEstimate(full, error)


def spectrum_integral(result, element):
    """Return the integral of one output density over the grid."""
    return trapezoid_estimate(result.omega, result.density(element))
