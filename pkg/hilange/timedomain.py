"""Time domain integration.

Euler-Maruyama ensembles of linear Langevin systems, a classical RK4
integrator used as the deterministic reference, and the diode chain
convergence study against the exact nonlinear mean-field equation.

Diode time is measured in units of the circuit constant tau.
"""
# pylint: disable=missing-type-doc
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.integrate
import scipy.interpolate

from hilange.assembler import check_stability
from hilange.constants import Defaults, DiodeCoupling
from hilange.exceptions import DivergenceException, ParameterException
from hilange.models import Diode

_logger = logging.getLogger(__name__)


# --------------------------------------------------------------------------- #
# Drives
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class DriveWaveform:
    """Decaying sinusoid ``v0 exp(-decay t) sin(omega t)``."""

    v0: float = 1.0
    omega: float = 2 * math.pi
    decay: float = 1.0

    def __call__(self, t):
        """Evaluate at time t."""
        return self.v0 * math.exp(-self.decay * t) * math.sin(self.omega * t)

    def to_dict(self):
        """Return the JSON form."""
        return {"v0": self.v0, "omega": self.omega, "decay": self.decay}


def _steps(dt, horizon):
    if dt <= 0:
        raise ParameterException(f"dt must be > 0, got {dt}")
    if horizon < dt:
        raise ParameterException(f"horizon {horizon} is shorter than dt {dt}")
    return int(round(horizon / dt))


# --------------------------------------------------------------------------- #
# Stochastic ensembles
# --------------------------------------------------------------------------- #


@dataclass(frozen=True, eq=False)
class SdeRun:  # pylint: disable=too-many-instance-attributes
    """Description of an Euler-Maruyama ensemble.

    :param system: LinearLangevinSystem
    :param dt: step
    :param horizon: final time
    :param trajectories: ensemble size
    :param seed: Philox seed
    :param noise_scale: scalar or per input multiplier of the Wiener increments
    :param waveform: optional scalar function of time multiplying the drive
    :param initial: initial state (default zero)
    """

    system: object
    dt: float
    horizon: float
    trajectories: int = 1
    seed: int = 0
    noise_scale: object = 1.0
    waveform: Optional[Callable] = None
    initial: Optional[np.ndarray] = None

    def __post_init__(self):
        """Validate."""
        _steps(self.dt, self.horizon)
        if int(self.trajectories) < 1:
            raise ParameterException(f"trajectory count must be >= 1, got {self.trajectories}")

    @property
    def steps(self):
        """Return the number of steps."""
        return _steps(self.dt, self.horizon)


@dataclass(frozen=True, eq=False)
class EnsembleResult:
    """Per element ensemble mean and variance."""

    times: np.ndarray
    labels: tuple
    mean: np.ndarray
    variance: np.ndarray
    metadata: dict = field(default_factory=dict)

    def column(self, label):
        """Return the mean trajectory of one element."""
        return self.mean[:, self.labels.index(label)]

    def to_csv(self, path):
        """Write ``t_s`` then mean (re, im) and variance per element."""
        columns = [self.times]
        header = ["t_s"]
        for pos, label in enumerate(self.labels):
            columns += [self.mean[:, pos].real, self.mean[:, pos].imag, self.variance[:, pos]]
            header += [f"{label}_mean_re", f"{label}_mean_im", f"{label}_var"]
        np.savetxt(path, np.column_stack(columns), fmt="%.12e", delimiter=",", header=",".join(header), comments="")


def make_generator(seed):
    """Return the seeded counter based generator."""
    return np.random.Generator(np.random.Philox(seed))


def integrate_sde(run):
    """Integrate an ensemble with Euler-Maruyama.

    ``x += (M x + drive f(t)) dt - W dB`` with ``dB ~ N(0, dt)`` per input.

    :returns: EnsembleResult
    :raises DivergenceException: at the first non finite step
    """
    system = run.system
    report = check_stability(system)
    if not report.stable:
        _logger.warning("integrating an unstable system over %s", run.horizon)
    steps = run.steps
    count = int(run.trajectories)
    rng = make_generator(run.seed)
    inputs = len(system.inputs)
    scale = np.broadcast_to(np.asarray(run.noise_scale, dtype=float), (inputs,))
    weights = system.noise_weights * scale[None, :]
    state = np.zeros((count, system.size), dtype=complex)
    if run.initial is not None:
        state += np.asarray(run.initial, dtype=complex)[None, :]
    times = np.arange(steps + 1) * run.dt
    mean = np.empty((steps + 1, system.size), dtype=complex)
    variance = np.empty((steps + 1, system.size))
    mean[0] = state.mean(axis=0)
    variance[0] = np.mean(np.abs(state - mean[0]) ** 2, axis=0)
    root = math.sqrt(run.dt)
    transposed = system.matrix.T
    for step in range(steps):
        factor = run.waveform(times[step]) if run.waveform else 1.0
        increments = rng.standard_normal((count, inputs)) * root if inputs else np.zeros((count, 0))
        state = state + (state @ transposed + system.drive * factor) * run.dt - increments @ weights.T
        if not np.all(np.isfinite(state)):
            raise DivergenceException(f"state diverged at step {step + 1}", step=step + 1)
        mean[step + 1] = state.mean(axis=0)
        variance[step + 1] = np.mean(np.abs(state - mean[step + 1]) ** 2, axis=0)
    metadata = {
        "model": system.metadata.get("model"),
        "seed": run.seed,
        "dt": run.dt,
        "horizon": run.horizon,
        "trajectories": count,
        "generator": Defaults.Generator,
    }
    _logger.debug("sde ensemble of %d over %d steps", count, steps)
    return EnsembleResult(times, tuple(system.labels), mean, variance, metadata)


# --------------------------------------------------------------------------- #
# Deterministic integration
# --------------------------------------------------------------------------- #


def rk4(rhs, initial, dt, steps):
    """Classical fourth order Runge-Kutta.

    :param rhs: function (t, x) -> dx/dt
    :returns: (times, states)
    :raises DivergenceException: at the first non finite step
    """
    state = np.array(initial, dtype=complex if np.iscomplexobj(initial) else float)
    states = np.empty((steps + 1,) + state.shape, dtype=state.dtype)
    states[0] = state
    for step in range(steps):
        t = step * dt
        k1 = rhs(t, state)
        k2 = rhs(t + dt / 2, state + dt / 2 * k1)
        k3 = rhs(t + dt / 2, state + dt / 2 * k2)
        k4 = rhs(t + dt, state + dt * k3)
        state = state + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(state)):
            raise DivergenceException(f"state diverged at step {step + 1}", step=step + 1)
        states[step + 1] = state
    return np.arange(steps + 1) * dt, states


def integrate_linear(  # pylint: disable=too-many-arguments
    matrix, drive, dt, horizon, initial=None, waveform=None, coupling=None, source=None
):
    """Integrate ``x' = M x + (drive + coupling x + source) v(t)`` with RK4.

    Without a waveform ``v = 1``.

    :returns: (times, states)
    """
    matrix = np.asarray(matrix)
    size = matrix.shape[0]
    drive = np.zeros(size) if drive is None else np.asarray(drive)
    coupling = np.zeros((size, size)) if coupling is None else np.asarray(coupling)
    source = np.zeros(size) if source is None else np.asarray(source)
    complex_valued = any(np.iscomplexobj(item) for item in (matrix, drive, initial))
    if not complex_valued:
        matrix, drive = matrix.real, drive.real
    start = np.zeros(size, dtype=complex if complex_valued else float) if initial is None else initial

    def rhs(t, x):
        value = waveform(t) if waveform else 1.0
        return matrix @ x + (drive + coupling @ x + source) * value

    return rk4(rhs, start, dt, _steps(dt, horizon))


def integrate_ode_meanfield(params, waveform, dt, horizon, u0=0.0):
    """RK4 of ``tau du/dt = -mu u - kappa (exp(u) - 1) + v(t)``.

    :param params: ModelParams with kappa, mu and tau
    :returns: (times, u)
    """
    kappa, mu, tau = params.require("kappa", "mu", "tau")
    if tau <= 0:
        raise ParameterException(f"tau must be > 0, got {tau}")

    def rhs(t, u):
        return (-mu * u - kappa * math.expm1(u) + waveform(t)) / tau

    steps = _steps(dt, horizon)
    times = np.arange(steps + 1) * dt
    values = np.empty(steps + 1)
    u = float(u0)
    values[0] = u
    for step in range(steps):
        t = times[step]
        k1 = rhs(t, u)
        k2 = rhs(t + dt / 2, u + dt / 2 * k1)
        k3 = rhs(t + dt / 2, u + dt / 2 * k2)
        k4 = rhs(t + dt, u + dt * k3)
        u = u + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not math.isfinite(u):
            raise DivergenceException(f"mean field diverged at step {step + 1}", step=step + 1)
        values[step + 1] = u
    return times, values


# --------------------------------------------------------------------------- #
# Diode chain
# --------------------------------------------------------------------------- #


@dataclass(frozen=True, eq=False)
class FixedPoint:
    """Result of a mean input iteration.

    ``u_bar`` is a float for the constant time average and the sampled
    mean trajectory for the self-consistent average.
    """

    u_bar: object
    iterations: int
    converged: bool


def time_average(params, waveform, dt, horizon, order=None):
    """Iterate the time average of u through the averaged chain.

    Starts from 0 and stops once the update is below the fixed point
    tolerance.
    """
    order = order or params.order or 2
    u_bar = 0.0
    for iteration in range(1, Defaults.FixedPointIterations + 1):
        system = Diode(order).build(params.replace(u_bar=u_bar, order=order))
        times, states = integrate_linear(system.matrix.real, system.drive.real, dt, horizon, waveform=waveform)
        updated = float(scipy.integrate.trapezoid(states[:, 0], times) / times[-1])
        if abs(updated - u_bar) < Defaults.FixedPointTolerance:
            return FixedPoint(updated, iteration, True)
        u_bar = updated
    _logger.warning("time average did not converge after %d iterations", Defaults.FixedPointIterations)
    return FixedPoint(u_bar, Defaults.FixedPointIterations, False)


def mean_coupling(params, waveform, dt, horizon, order=None):
    """Iterate the mean trajectory that carries the input into the chain.

    Row k is driven by ``k ubar(t)^(k-1) v(t) / tau``. Each pass takes
    ``ubar`` from the first row of the previous pass, interpolated onto the
    Runge-Kutta stages, and integrates the chain again. The first pass
    starts from ``ubar = 0``.

    :returns: (times, states, FixedPoint)
    """
    order = int(order or params.order or 2)
    params = params.replace(order=order)
    matrix, _, _ = Diode(order).chain(params)
    steps = _steps(dt, horizon)
    times = np.arange(steps + 1) * dt
    stages = np.arange(2 * steps + 1) * (dt / 2)
    drive = np.array([waveform(t) for t in stages]) / params.tau
    powers = np.arange(order)
    u_bar = np.zeros(steps + 1)
    sampled = np.zeros(stages.size)
    for iteration in range(1, Defaults.MeanCouplingIterations + 1):
        inputs = (powers + 1)[None, :] * sampled[:, None] ** powers[None, :] * drive[:, None]

        def rhs(t, x, inputs=inputs):
            return matrix @ x + inputs[int(round(2 * t / dt))]

        _, states = rk4(rhs, np.zeros(order), dt, steps)
        change = float(np.max(np.abs(states[:, 0] - u_bar)))
        u_bar = states[:, 0]
        if change < Defaults.MeanCouplingTolerance:
            _logger.debug("order %d: mean input converged after %d passes", order, iteration)
            return times, states, FixedPoint(u_bar, iteration, True)
        sampled = scipy.interpolate.CubicSpline(times, u_bar)(stages) if steps > 1 else np.interp(stages, times, u_bar)
    _logger.warning("mean input did not converge after %d passes", Defaults.MeanCouplingIterations)
    return times, states, FixedPoint(u_bar, Defaults.MeanCouplingIterations, False)


def diode_trajectory(params, waveform, dt, horizon, order, coupling=DiodeCoupling.AVERAGE):
    """Return (times, u) of the truncated chain.

    ``coupling`` is one of :class:`hilange.constants.DiodeCoupling`.
    """
    model = Diode(order)
    params = params.replace(order=order)
    if coupling == DiodeCoupling.AVERAGE:
        times, states, _ = mean_coupling(params, waveform, dt, horizon, order)
    elif coupling == DiodeCoupling.STATE:
        matrix, chain_coupling, source = model.chain(params)
        times, states = integrate_linear(
            matrix, None, dt, horizon, waveform=waveform, coupling=chain_coupling, source=source
        )
    elif coupling == DiodeCoupling.TIME_AVERAGE:
        fixed = time_average(params, waveform, dt, horizon, order)
        system = model.build(params.replace(u_bar=fixed.u_bar))
        times, states = integrate_linear(system.matrix.real, system.drive.real, dt, horizon, waveform=waveform)
    else:
        raise ParameterException(f"unknown input coupling {coupling!r}")
    return times, states[:, 0]


@dataclass(frozen=True)
class ConvergenceTable:
    """Largest deviation of each truncation order from the mean-field oracle."""

    orders: tuple
    errors: tuple
    coupling: str
    metadata: dict = field(default_factory=dict)

    def error(self, order):
        """Return the error of one order."""
        return self.errors[self.orders.index(order)]

    def is_non_increasing(self, slack=1e-15):
        """Return True if errors do not grow with the order."""
        return all(later <= earlier + slack for earlier, later in zip(self.errors, self.errors[1:]))

    def to_csv(self, path):
        """Write ``order,max_abs_error``."""
        table = np.column_stack([np.asarray(self.orders, dtype=float), np.asarray(self.errors)])
        np.savetxt(path, table, fmt="%.12e", delimiter=",", header="order,max_abs_error", comments="")


def truncation_convergence(orders, params, waveform=None, dt=1e-3, horizon=10.0, coupling=DiodeCoupling.AVERAGE):
    """Compare diode chains of several orders against the mean-field oracle.

    :returns: ConvergenceTable
    """
    orders = tuple(int(order) for order in orders)
    if not orders or min(orders) < 1:
        raise ParameterException(f"orders must be >= 1, got {orders}")
    waveform = waveform or DriveWaveform()
    _, reference = integrate_ode_meanfield(params, waveform, dt, horizon)
    errors = []
    for order in orders:
        _, trajectory = diode_trajectory(params, waveform, dt, horizon, order, coupling)
        errors.append(float(np.max(np.abs(trajectory.real - reference))))
        _logger.debug("order %d: max error %.3e", order, errors[-1])
    shape = waveform.to_dict() if hasattr(waveform, "to_dict") else repr(waveform)
    metadata = {"dt": dt, "horizon": horizon, "waveform": shape, "params": params.to_dict()}
    return ConvergenceTable(orders, tuple(errors), coupling, metadata)
