"""Default run configuration.

Every run document is merged onto this one, so a config file only needs
the keys it changes.
"""

DEFAULT_CONFIG = {  # pylint: disable=consider-using-namedtuple-or-dataclass
    "model": "quad_std_1",
    "params": {
        "gamma": 0.01,
        "delta": 0.0,
        "omega_m": 1.0,
        "kappa": 0.5,
        "gamma_m": 0.1,
        "n_bar": 1.0,
        "m_bar": 1.0,
    },
    "grid": {"w_min": -3.0, "w_max": 3.0, "count": 4001},
    "noise": {},
    "sde": {
        "dt": 1e-3,
        "horizon": 10.0,
        "trajectories": 64,
        "noise_scale": 1.0,
        "waveform": None,
    },
    "diode": {
        "orders": [],
        "dt": 1e-3,
        "horizon": 10.0,
        "coupling": "average",
        "waveform": {"v0": 1.0, "omega": 6.283185307179586, "decay": 1.0},
    },
    "tolerance": {
        "stability": 1e-9,
        "oracle": 1e-10,
        "integral": 1e-6,
        "convolution": 1e-4,
    },
    "seed": 0,
    "out": "hilange_out",
}
