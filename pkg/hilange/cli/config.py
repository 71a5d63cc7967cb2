"""Run configuration.

A run is described by one JSON document merged onto
:data:`hilange.cli.default_config.DEFAULT_CONFIG`. Every section is checked
for unknown keys; errors carry the dotted path of the offending field.
"""
# pylint: disable=missing-type-doc
import copy
import json
import logging
from dataclasses import dataclass, field

from hilange.cli.default_config import DEFAULT_CONFIG
from hilange.constants import DiodeCoupling
from hilange.exceptions import ConfigException, ParameterException
from hilange.models import ModelParams, lookup
from hilange.spectral import FrequencyGrid, NoiseCatalog, noise_from_dict
from hilange.timedomain import DriveWaveform

_logger = logging.getLogger(__name__)

TOLERANCE_KEYS = ("stability", "oracle", "integral", "convolution")
WAVEFORM_KEYS = ("v0", "omega", "decay")


def merge(base, update, path="config"):
    """Return base with update merged in, rejecting unknown keys."""
    result = copy.deepcopy(base)
    for key, value in update.items():
        where = f"{path}.{key}"
        if key not in result:
            raise ConfigException("unknown key", path=where)
        if isinstance(result[key], dict) and value is not None and key not in ("params", "noise"):
            if not isinstance(value, dict):
                raise ConfigException("expected an object", path=where)
            result[key] = merge(result[key], value, where)
        else:
            result[key] = copy.deepcopy(value)
    return result


def _number(value, path, minimum=None, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigException(f"expected a number, got {value!r}", path=path)
    if integer and int(value) != value:
        raise ConfigException(f"expected an integer, got {value!r}", path=path)
    if minimum is not None and value < minimum:
        raise ConfigException(f"must be >= {minimum}, got {value}", path=path)
    return int(value) if integer else float(value)


def _waveform(spec, path):
    if spec is None:
        return None
    if not isinstance(spec, dict):
        raise ConfigException("expected an object or null", path=path)
    for key in spec:
        if key not in WAVEFORM_KEYS:
            raise ConfigException("unknown key", path=f"{path}.{key}")
    values = {key: _number(value, f"{path}.{key}") for key, value in spec.items()}
    return DriveWaveform(**values)


@dataclass(frozen=True, eq=False)
class RunConfig:  # pylint: disable=too-many-instance-attributes
    """Validated run document."""

    model: str
    params: ModelParams
    grid: FrequencyGrid
    noise: dict = field(default_factory=dict)
    sde: dict = field(default_factory=dict)
    diode: dict = field(default_factory=dict)
    tolerance: dict = field(default_factory=dict)
    seed: int = 0
    out: str = "hilange_out"
    document: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data):
        """Validate a document merged onto the defaults.

        :raises ConfigException: naming the offending field
        """
        if not isinstance(data, dict):
            raise ConfigException("expected a JSON object", path="config")
        document = merge(DEFAULT_CONFIG, data)
        model = document["model"]
        if not isinstance(model, str):
            raise ConfigException("expected a model id", path="config.model")
        try:
            lookup(model)
        except ParameterException as exc:
            raise ConfigException(exc.string, path="config.model") from exc
        params = ModelParams.from_dict(document["params"], path="config.params")
        grid_spec = document["grid"]
        try:
            grid = FrequencyGrid(
                _number(grid_spec["w_min"], "config.grid.w_min"),
                _number(grid_spec["w_max"], "config.grid.w_max"),
                _number(grid_spec["count"], "config.grid.count", 2, integer=True),
            )
        except ParameterException as exc:
            raise ConfigException(exc.string, path="config.grid") from exc
        noise = {}
        for name, spec in document["noise"].items():
            if not isinstance(spec, dict):
                raise ConfigException("expected an object", path=f"config.noise.{name}")
            noise[name] = noise_from_dict(spec, path=f"config.noise.{name}")
        sde = dict(document["sde"])
        sde["dt"] = _number(sde["dt"], "config.sde.dt", 0)
        sde["horizon"] = _number(sde["horizon"], "config.sde.horizon", 0)
        sde["trajectories"] = _number(sde["trajectories"], "config.sde.trajectories", 1, integer=True)
        scale = sde["noise_scale"]
        if isinstance(scale, list):
            sde["noise_scale"] = [_number(value, f"config.sde.noise_scale.{pos}", 0) for pos, value in enumerate(scale)]
        else:
            sde["noise_scale"] = _number(scale, "config.sde.noise_scale", 0)
        sde["waveform"] = _waveform(sde["waveform"], "config.sde.waveform")
        diode = dict(document["diode"])
        if not isinstance(diode["orders"], list):
            raise ConfigException("expected a list", path="config.diode.orders")
        diode["orders"] = [
            _number(order, f"config.diode.orders.{pos}", 1, integer=True) for pos, order in enumerate(diode["orders"])
        ]
        diode["dt"] = _number(diode["dt"], "config.diode.dt", 0)
        diode["horizon"] = _number(diode["horizon"], "config.diode.horizon", 0)
        if diode["coupling"] not in DiodeCoupling.values():
            raise ConfigException(f"expected one of {DiodeCoupling.values()}", path="config.diode.coupling")
        diode["waveform"] = _waveform(diode["waveform"], "config.diode.waveform")
        tolerance = {
            key: _number(value, f"config.tolerance.{key}", 0) for key, value in document["tolerance"].items()
        }
        seed = _number(document["seed"], "config.seed", 0, integer=True)
        if not isinstance(document["out"], str) or not document["out"]:
            raise ConfigException("expected a directory name", path="config.out")
        return cls(model, params, grid, noise, sde, diode, tolerance, seed, document["out"], document)

    def catalog(self):
        """Return the noise catalog: vacuum, thermal at the phonon occupation, extras."""
        try:
            n_th = self.params.occupation_m()
        except ParameterException:
            n_th = 0.0
        catalog = NoiseCatalog.default(n_th=n_th, window=self.grid)
        for name, model in self.noise.items():
            catalog.register(name, model)
        return catalog

    def to_json(self):
        """Return the merged document with sorted keys."""
        return json.dumps(self.document, sort_keys=True, indent=2)


def load_config(path=None, seed=None, out=None, tolerances=()):
    """Read, merge and validate a run document.

    :param path: JSON file, or None for the defaults
    :param seed: command line seed override
    :param out: command line output directory override
    :param tolerances: (key, value) overrides of the tolerance section
    :returns: RunConfig
    :raises ConfigException: for unreadable or invalid documents
    """
    data = {}
    if path:
        try:
            with open(path, encoding="utf-8") as handle:
                data = json.load(handle)
        except OSError as exc:
            raise ConfigException(f"cannot read {path}: {exc}", path="config") from exc
        except json.JSONDecodeError as exc:
            raise ConfigException(f"{path} is not valid JSON: {exc}", path="config") from exc
        if not isinstance(data, dict):
            raise ConfigException("expected a JSON object", path="config")
    if seed is not None:
        data["seed"] = seed
    if out is not None:
        data["out"] = out
    for key, value in tolerances:
        if key not in TOLERANCE_KEYS:
            raise ConfigException("unknown key", path=f"config.tolerance.{key}")
        data.setdefault("tolerance", {})[key] = value
    _logger.debug("config from %s", path or "defaults")
    return RunConfig.from_dict(data)
