"""Langevin equation assembly.

A Hamiltonian (in angular frequency units), a basis and a list of decay
channels give the exact Heisenberg-Langevin right hand side of every basis
element::

    dz/dt = -i[z, H] - [z, xd](G/2 x + sqrt(G) x_in) + (G/2 xd + sqrt(G) xd_in)[z, x]

Mean-field reduction maps each right hand side onto the basis and yields a
linear system ``dA/dt = M A + drive - W A_in``.
"""
# pylint: disable=missing-type-doc
import json
import logging
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

import numpy as np
import scipy.linalg
import sympy

from hilange.algebra import OperatorExpr, commute, mean_field_reduce, verify_closure
from hilange.constants import ChannelScope, Defaults
from hilange.exceptions import (
    ClosureException,
    NonHermitianException,
    NumericException,
    ParameterException,
    SingularSystemException,
)
from hilange.utilities import decode_complex, encode_complex, to_complex

_logger = logging.getLogger(__name__)

Half = sympy.Rational(1, 2)


# --------------------------------------------------------------------------- #
# Channels
# --------------------------------------------------------------------------- #


class DecayChannel:
    """Coupling of a system operator to a bath.

    :param anchor: the annihilation-type operator x
    :param rate: decay rate (>= 0), exact or float
    :param noise: noise model id bound to the input
    :param scope: ``ChannelScope.SELF`` applies the channel to the rows of
        x and xd only, ``ChannelScope.ALL`` to every row
    """

    def __init__(self, anchor, rate, noise="vacuum", scope=ChannelScope.SELF, label=None):
        """Initialize."""
        rate = sympy.sympify(rate)
        if rate.is_number and (not rate.is_real or rate < 0):
            raise ParameterException(f"decay rate must be >= 0, got {rate}")
        if anchor.is_zero:
            raise ParameterException("decay channel anchor must not be zero")
        if scope not in (ChannelScope.SELF, ChannelScope.ALL):
            raise ParameterException(f"unknown channel scope {scope!r}")
        self.anchor = anchor
        self.rate = rate
        self.noise = noise
        self.scope = scope
        self.label = label or str(anchor)

    def applies_to(self, row):
        """Return True if the channel enters the equation of row."""
        if self.scope == ChannelScope.ALL:
            return True
        return row == self.anchor or row == self.anchor.adjoint()

    def __repr__(self):
        """Return the debug representation."""
        return f"DecayChannel({self.label}, rate={self.rate}, noise={self.noise})"


@dataclass
class LangevinRhs:
    """Exact right hand side of one Langevin equation.

    ``noise`` maps ``(channel label, adjoint)`` to the operator multiplying
    the input x_in (adjoint False) or xd_in (adjoint True).
    """

    coherent: OperatorExpr
    damping: OperatorExpr
    noise: dict = field(default_factory=dict)

    @property
    def deterministic(self):
        """Return the drift part."""
        return self.coherent + self.damping

    def __iter__(self):
        """Unpack as (deterministic, noise)."""
        yield self.deterministic
        yield self.noise


def heisenberg_rhs(hamiltonian, row, channels=()):
    """Return the exact Langevin right hand side of one operator.

    :param hamiltonian: self-adjoint OperatorExpr
    :param row: the operator z whose equation is built
    :param channels: iterable of DecayChannel
    :returns: LangevinRhs
    :raises NonHermitianException: if the Hamiltonian is not self-adjoint
    """
    if not hamiltonian.is_hermitian():
        raise NonHermitianException(f"Hamiltonian {hamiltonian} is not self-adjoint")
    coherent = commute(row, hamiltonian) * (-sympy.I)
    damping = OperatorExpr()
    noise = {}
    for channel in channels:
        if not channel.applies_to(row):
            continue
        anchor, rate = channel.anchor, channel.rate
        dagger = anchor.adjoint()
        with_dagger = commute(row, dagger)
        with_anchor = commute(row, anchor)
        damping = damping - with_dagger * (anchor * (rate * Half)) + (dagger * (rate * Half)) * with_anchor
        if not with_dagger.is_zero:
            noise[(channel.label, False)] = with_dagger * (-sympy.sqrt(rate))
        if not with_anchor.is_zero:
            noise[(channel.label, True)] = with_anchor * sympy.sqrt(rate)
    return LangevinRhs(coherent, damping, noise)


# --------------------------------------------------------------------------- #
# Linear systems
# --------------------------------------------------------------------------- #


def _frozen(array, dtype):
    data = np.array(array, dtype=dtype)
    data.setflags(write=False)
    return data


@dataclass(frozen=True, eq=False)
class LinearLangevinSystem:  # pylint: disable=too-many-instance-attributes
    """Linear system ``dA/dt = M A + drive - W A_in``.

    :param labels: basis labels (N)
    :param matrix: N x N complex matrix M
    :param drive: length N complex vector
    :param noise_weights: N x K real matrix W
    :param inputs: K input channel labels
    :param bindings: input label -> noise model id
    :param metadata: provenance (model id, order, mean-field context)
    :param stable: set by :func:`check_stability` only
    """

    labels: Tuple[str, ...]
    matrix: np.ndarray
    drive: np.ndarray
    noise_weights: np.ndarray
    inputs: Tuple[str, ...]
    bindings: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)
    stable: Optional[bool] = None

    def __post_init__(self):
        """Validate dimensions and freeze arrays."""
        size = len(self.labels)
        matrix = _frozen(self.matrix, complex)
        drive = _frozen(self.drive, complex)
        weights = np.array(self.noise_weights)
        if weights.size and np.iscomplexobj(weights):
            if np.max(np.abs(weights.imag)) > 1e-12 * max(1.0, float(np.max(np.abs(weights)))):
                raise ParameterException("noise weights must be real")
            weights = weights.real
        weights = _frozen(weights.reshape(size, -1) if size else weights, float)
        if matrix.shape != (size, size):
            raise ParameterException(f"matrix shape {matrix.shape} does not match {size} labels")
        if drive.shape != (size,):
            raise ParameterException(f"drive shape {drive.shape} does not match {size} labels")
        if weights.shape != (size, len(self.inputs)):
            raise ParameterException(
                f"noise weights shape {weights.shape} does not match ({size}, {len(self.inputs)})"
            )
        if not (np.all(np.isfinite(matrix)) and np.all(np.isfinite(drive)) and np.all(np.isfinite(weights))):
            raise ParameterException("system entries must be finite")
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "drive", drive)
        object.__setattr__(self, "noise_weights", weights)

    @property
    def size(self):
        """Return N."""
        return len(self.labels)

    def index(self, label):
        """Return the row of a label."""
        try:
            return self.labels.index(label)
        except ValueError as exc:
            raise ParameterException(f"unknown label {label!r}") from exc

    def entry(self, row, column):
        """Return M[row, column] by label."""
        return self.matrix[self.index(row), self.index(column)]

    def to_json(self):
        """Serialise to a JSON string."""
        document = {
            "labels": list(self.labels),
            "matrix": encode_complex(self.matrix),
            "drive": encode_complex(self.drive),
            "noise_weights": self.noise_weights.tolist(),
            "inputs": list(self.inputs),
            "bindings": dict(self.bindings),
            "metadata": {key: _jsonable(value) for key, value in self.metadata.items()},
            "stable": self.stable,
        }
        return json.dumps(document, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        """Rebuild a system from :meth:`to_json` output."""
        document = json.loads(text)
        try:
            return cls(
                labels=tuple(document["labels"]),
                matrix=decode_complex(document["matrix"]),
                drive=decode_complex(document["drive"]),
                noise_weights=np.asarray(document["noise_weights"], dtype=float),
                inputs=tuple(document["inputs"]),
                bindings=document.get("bindings", {}),
                metadata=document.get("metadata", {}),
                stable=document.get("stable"),
            )
        except KeyError as exc:
            raise ParameterException(f"system document misses {exc}") from exc


def _jsonable(value):
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    if isinstance(value, dict):
        return {str(key): _jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    return str(value)


def _noise_weight(value, row, label):
    number = to_complex(value)
    if abs(number.imag) > 1e-12 * max(1.0, abs(number)):
        raise ParameterException(f"noise weight of {row} on {label} is not real: {number}")
    return number.real


@dataclass(frozen=True, eq=False)
class NoiseInputs:
    """Input columns given explicitly instead of derived from the channels.

    :param inputs: K input labels
    :param weights: N x K real weights
    :param bindings: input label -> noise model id
    """

    inputs: Tuple[str, ...]
    weights: np.ndarray
    bindings: dict = field(default_factory=dict)


def _channel_terms(element, channel, context):
    """Return the damping operator and the (mean prefactor, input) pairs of a channel.

    SELF channels use the mean prefactors ``<[z, xd]>`` and ``<[z, x]>``;
    ALL channels keep the exact damping operator.
    """
    anchor = channel.anchor
    dagger = anchor.adjoint()
    half_rate = channel.rate * Half
    with_dagger = commute(element, dagger)
    with_anchor = commute(element, anchor)
    mean_dagger = context.expectation(with_dagger)
    mean_anchor = context.expectation(with_anchor)
    if channel.scope == ChannelScope.ALL:
        damping = (dagger * half_rate) * with_anchor - with_dagger * (anchor * half_rate)
    else:
        damping = anchor * (-mean_dagger * half_rate) + dagger * (mean_anchor * half_rate)
    return damping, ((mean_dagger, anchor), (-mean_anchor, dagger))


def linearize_system(  # pylint: disable=too-many-arguments,too-many-locals,too-many-branches
    hamiltonian,
    basis,
    channels,
    context,
    composites=None,
    force=False,
    metadata=None,
    row_damping=None,
    noise=None,
):
    """Truncate the Langevin equations of a basis into a linear system.

    Each row is the mean-field reduction of the exact right hand side.
    For channels of scope SELF the damping and noise prefactors ``[z, xd]``
    and ``[z, x]`` are replaced by their means; channels of scope ALL keep
    the exact damping operator of every row. Rows listed in ``composites``
    are products of other basis elements; they receive the summed damping
    of their factors and a noise weight adding the factor weights in
    quadrature.
    Rows listed in ``row_damping`` take an extra linear damping rate; a
    number operator ``ad a`` decays at the summed rate of its two ladder
    factors.

    :param hamiltonian: self-adjoint OperatorExpr
    :param basis: BasisSet
    :param channels: iterable of DecayChannel
    :param context: MeanFieldContext
    :param composites: mapping label -> tuple of factor labels
    :param force: skip the closure scan; residuals still raise
    :param metadata: provenance merged into the system metadata
    :param row_damping: mapping label -> damping rate added to the diagonal
    :param noise: NoiseInputs replacing the channel derived inputs
    :returns: LinearLangevinSystem
    :raises ClosureException: if the basis is not closed and force is unset
    """
    channels = list(channels)
    composites = dict(composites or {})
    row_damping = dict(row_damping or {})
    for label in row_damping:
        basis.index(label)
    if not force:
        report = verify_closure(basis, context)
        if not report.closed:
            first = report.failures[0]
            raise ClosureException(
                f"[{first.left}, {first.right}] leaves the span: {first.error}", report=report
            )
    size = len(basis)
    matrix = np.zeros((size, size), dtype=complex)
    drive = np.zeros(size, dtype=complex)
    weights = np.zeros((size, size), dtype=float)
    damping = np.zeros(size, dtype=complex)
    bindings = {}
    for row, (label, element) in enumerate(basis):
        rhs = heisenberg_rhs(hamiltonian, element)
        linear_damping = OperatorExpr()
        for channel in channels:
            if label in composites or not channel.applies_to(element):
                continue
            term, prefactors = _channel_terms(element, channel, context)
            linear_damping = linear_damping + term
            if noise is not None:
                continue
            for value, operator in prefactors:
                if value == 0:
                    continue
                column = basis.find(operator)
                if column is None:
                    raise ParameterException(
                        f"input of {operator} enters row {label} but is not a basis element"
                    )
                weights[row, basis.index(column)] += _noise_weight(
                    value * sympy.sqrt(channel.rate), label, column
                )
                bindings[column] = channel.noise
        coherent = mean_field_reduce(rhs.coherent, context, basis)
        dissipative = mean_field_reduce(linear_damping, context, basis)
        coefficients, constant = coherent.to_complex()
        matrix[row, :] = coefficients
        drive[row] = constant
        loss, offset = dissipative.to_complex()
        matrix[row, :] += loss
        drive[row] += offset
        damping[row] = loss[row]
        rate = row_damping.get(label)
        if rate:
            matrix[row, row] -= to_complex(rate)
            damping[row] -= to_complex(rate)
        _logger.debug("row %s: %s + damping %s", label, coherent, dissipative)
    for label, factors in composites.items():
        row = basis.index(label)
        rows = [basis.index(factor) for factor in factors]
        matrix[row, row] += sum(damping[item] for item in rows)
        if noise is not None:
            continue
        weights[row, row] = float(np.sqrt(sum(np.sum(weights[item] ** 2) for item in rows)))
        bound = [bindings.get(factor) for factor in factors if bindings.get(factor)]
        if bound:
            bindings[label] = "*".join(bound)
    inputs = basis.labels
    if noise is not None:
        inputs, weights, bindings = noise.inputs, noise.weights, dict(noise.bindings)
    info = {
        "occupations": {mode: str(value) for mode, value in context.occupations.items()},
        "policy": context.policy,
    }
    info.update(metadata or {})
    return LinearLangevinSystem(
        labels=basis.labels,
        matrix=matrix,
        drive=drive,
        noise_weights=weights,
        inputs=inputs,
        bindings=bindings,
        metadata=info,
    )


# --------------------------------------------------------------------------- #
# Stability and steady state
# --------------------------------------------------------------------------- #


@dataclass(frozen=True, eq=False)
class StabilityReport:
    """Eigenvalues of M and the stability verdict."""

    eigenvalues: np.ndarray
    max_real: float
    tolerance: float
    stable: bool
    system: LinearLangevinSystem


def check_stability(system, tol=None):
    """Return the eigen report of M.

    :param system: LinearLangevinSystem
    :param tol: largest admissible real part (default Defaults.StabilityTolerance)
    :raises NumericException: if the eigen solver fails
    """
    tol = Defaults.StabilityTolerance if tol is None else tol
    try:
        values = scipy.linalg.eigvals(system.matrix)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericException(f"eigenvalue computation failed: {exc}") from exc
    if not np.all(np.isfinite(values)):
        raise NumericException("eigenvalue computation returned non finite values")
    max_real = float(np.max(values.real)) if values.size else 0.0
    stable = max_real <= tol
    if not stable:
        _logger.warning("system %s unstable: max Re(eig) = %.3e", system.metadata.get("model", "?"), max_real)
    return StabilityReport(values, max_real, tol, stable, replace(system, stable=stable))


def steady_state(system):
    """Solve ``M x = -drive``.

    :raises SingularSystemException: carrying the rank deficiency of M
    """
    rank = int(np.linalg.matrix_rank(system.matrix))
    if rank < system.size:
        raise SingularSystemException(
            f"M has rank {rank} of {system.size}", rank_deficiency=system.size - rank
        )
    if np.linalg.cond(system.matrix) > Defaults.ConditionLimit:
        raise SingularSystemException("M is numerically singular", rank_deficiency=0)
    return np.linalg.solve(system.matrix, -system.drive)
