"""Model catalog.

Ready-built linear Langevin systems. Polynomial models are assembled from
their Hamiltonians through :mod:`hilange.assembler`; models whose operators
are not polynomial in the ladder operators (the nondemolition quadratures,
the diode chain) are written out directly.

Rates follow the usual conventions ``G1 = 2 kappa`` for the photon channel
and ``G2 = 2 Gamma_m`` for the phonon pair channel unless given explicitly.
"""
# pylint: disable=missing-type-doc,too-many-instance-attributes
import dataclasses
import logging
import math
import re
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.constants
import sympy

from hilange.algebra import (
    AffineForm,
    BasisSet,
    ClosureReport,
    MeanFieldContext,
    parse_operator,
    verify_closure,
)
from hilange.assembler import DecayChannel, LinearLangevinSystem, NoiseInputs, linearize_system
from hilange.constants import ChannelScope, ReductionPolicy
from hilange.exceptions import ConfigException, NotImplementedException, ParameterException
from hilange.interfaces import TEXT_METHOD, IModel
from hilange.utilities import exact, to_complex

_logger = logging.getLogger(__name__)

Half = sympy.Rational(1, 2)
I = sympy.I


# --------------------------------------------------------------------------- #
# Parameters
# --------------------------------------------------------------------------- #

RATE_FIELDS = ("kappa", "gamma_m", "gamma1", "gamma2", "mu", "tau")
COMPLEX_FIELDS = ("g", "alpha", "beta")


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters shared by the catalog.

    Frequencies and rates are angular (rad/s). ``m_bar`` wins over
    ``temperature`` when both are given.
    """

    gamma: Optional[float] = None
    g0: Optional[float] = None
    g: Optional[complex] = None
    zeta: Optional[float] = None
    chi: Optional[float] = None
    delta: Optional[float] = None
    omega_m: Optional[float] = None
    omega: Optional[float] = None
    kappa: Optional[float] = None
    gamma_m: Optional[float] = None
    gamma1: Optional[float] = None
    gamma2: Optional[float] = None
    temperature: Optional[float] = None
    m_bar: Optional[float] = None
    n_bar: Optional[float] = None
    alpha: Optional[complex] = None
    beta: Optional[complex] = None
    order: Optional[int] = None
    sign_a: int = 1
    sign_b: int = 1
    self_energy: bool = False
    ultracold: bool = False
    mu: Optional[float] = None
    tau: Optional[float] = None
    u_bar: float = 0.0

    def __post_init__(self):
        """Validate ranges."""
        for name in RATE_FIELDS:
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ParameterException(f"{name} must be >= 0, got {value}")
        if self.temperature is not None and self.temperature < 0:
            raise ParameterException(f"temperature must be >= 0, got {self.temperature}")
        for name in ("m_bar", "n_bar"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ParameterException(f"{name} must be >= 0, got {value}")
        if self.sign_a not in (1, -1) or self.sign_b not in (1, -1):
            raise ParameterException("sign choices must be +1 or -1")
        if self.order is not None and self.order < 1:
            raise ParameterException(f"truncation order must be >= 1, got {self.order}")

    @classmethod
    def from_dict(cls, data, path="params"):
        """Build parameters from a JSON mapping.

        Complex values may be numbers or ``[re, im]`` pairs.

        :raises ConfigException: on unknown keys or malformed values
        """
        known = {item.name for item in dataclasses.fields(cls)}
        values = {}
        for key, value in data.items():
            if key not in known:
                raise ConfigException("unknown key", path=f"{path}.{key}")
            if key in COMPLEX_FIELDS and isinstance(value, (list, tuple)):
                if len(value) != 2:
                    raise ConfigException("expected [re, im]", path=f"{path}.{key}")
                value = complex(value[0], value[1])
            values[key] = value
        try:
            return cls(**values)
        except ParameterException as exc:
            raise ConfigException(exc.string, path=path) from exc

    def to_dict(self):
        """Return the non-empty fields as JSON friendly values."""
        result = {}
        for item in dataclasses.fields(self):
            value = getattr(self, item.name)
            if value is None:
                continue
            if isinstance(value, complex):
                value = [value.real, value.imag]
            result[item.name] = value
        return result

    def replace(self, **changes):
        """Return a copy with some fields changed."""
        return dataclasses.replace(self, **changes)

    def require(self, *names):
        """Return the named values.

        :raises ParameterException: naming the first missing parameter
        """
        values = []
        for name in names:
            value = getattr(self, name)
            if value is None:
                raise ParameterException(f"missing parameter {name!r}")
            values.append(value)
        return values

    def occupation_m(self):
        """Return the phonon occupation from m_bar or the temperature."""
        if self.m_bar is not None:
            return self.m_bar
        if self.temperature is not None and self.omega_m is not None:
            return thermal_occupation(self.omega_m, self.temperature)
        raise ParameterException("missing parameter 'm_bar' (or 'temperature' with 'omega_m')")

    def rate1(self):
        """Photon channel rate G1."""
        if self.gamma1 is not None:
            return self.gamma1
        (kappa,) = self.require("kappa")
        return 2 * kappa

    def rate2(self):
        """Phonon pair channel rate G2."""
        if self.gamma2 is not None:
            return self.gamma2
        (gamma_m,) = self.require("gamma_m")
        return 2 * gamma_m

    def rate_pair(self):
        """Photon pair channel rate, twice G1 unless gamma2 is given."""
        if self.gamma2 is not None:
            return self.gamma2
        return 2 * self.rate1()


# --------------------------------------------------------------------------- #
# Helpers
# --------------------------------------------------------------------------- #


def bose_occupation(ratio):
    """Return 1 / (exp(ratio) - 1), zero for an infinite ratio."""
    if math.isinf(ratio):
        return 0.0
    if ratio <= 0:
        raise ParameterException(f"energy ratio must be > 0, got {ratio}")
    return 1.0 / math.expm1(ratio)


def thermal_occupation(omega_m, temperature):
    """Return the Bose occupation of a mode of angular frequency omega_m.

    :param omega_m: angular frequency (rad/s), > 0
    :param temperature: temperature (K), >= 0
    """
    if omega_m <= 0:
        raise ParameterException(f"mechanical frequency must be > 0, got {omega_m}")
    if temperature < 0:
        raise ParameterException(f"temperature must be >= 0, got {temperature}")
    if temperature == 0:
        return 0.0
    ratio = scipy.constants.hbar * omega_m / (scipy.constants.k * temperature)
    return bose_occupation(ratio)


def photon_number_linear(alpha, gamma1):
    """Return the intracavity photon number 4|alpha|^2 / G1."""
    if gamma1 is None or gamma1 <= 0:
        raise ParameterException(f"G1 must be > 0, got {gamma1}")
    return 4.0 * abs(alpha) ** 2 / gamma1


@dataclass(frozen=True)
class RootRecord:
    """One root of the photon number cubic.

    ``x`` is the complex amplitude, ``n_bar = |x|^2``. ``complex_branch``
    is set when ``-i x`` is not real; in the lossless case only the other
    roots give distinct photon numbers.
    """

    branch: int
    x: complex
    n_bar: float
    complex_branch: bool


@dataclass(frozen=True)
class CubicRoots:
    """Closed form and companion matrix roots of ``i g0 x^3 + i B x = C``."""

    closed_form: tuple
    companion: tuple
    b_coefficient: complex
    c_coefficient: complex
    degenerate: bool

    def residual(self, x, g0):
        """Return |i g0 x^3 + i B x - C|."""
        return abs(1j * g0 * x**3 + 1j * self.b_coefficient * x - self.c_coefficient)


def _records(values, tol=1e-9):
    return tuple(
        RootRecord(
            branch=pos,
            x=complex(x),
            n_bar=float(abs(x) ** 2),
            complex_branch=abs(complex(x).real) > tol * max(1.0, abs(x)),
        )
        for pos, x in enumerate(values)
    )


def cubic_coefficients(params):
    """Return (g0, B, C) of the photon number cubic."""
    g0, omega_m, delta, alpha = params.require("g0", "omega_m", "delta", "alpha")
    if g0 <= 0:
        raise ParameterException(f"g0 must be > 0, got {g0}")
    m_bar = params.occupation_m()
    loss = (params.kappa or 0.0) + (params.gamma_m or 0.0)
    root_m = math.sqrt(m_bar)
    b_coeff = g0 * (m_bar + 1) * root_m + (g0 + omega_m - delta) + 0.5j * loss
    c_coeff = root_m * complex(alpha)
    return g0, complex(b_coeff), complex(c_coeff)


def _closed_form(g0, b_coeff, c_coeff):
    """Cardano roots written with the auxiliary Z."""
    unit = complex(-0.5, math.sqrt(3) / 2)
    if c_coeff == 0:
        root = np.sqrt(complex(-b_coeff / g0))
        return [0j, root, -root], True
    disc = np.sqrt(1 - 4 * b_coeff**3 / (27 * g0 * c_coeff**2))
    factor = 1 - disc if abs(1 - disc) >= abs(1 + disc) else 1 + disc
    z_aux = complex(9 * g0**2 * c_coeff * factor) ** (1.0 / 3.0)
    if z_aux == 0:
        base = complex(-1j * c_coeff / g0) ** (1.0 / 3.0)
        return [base * unit**k for k in range(3)], False
    lead = 1j * z_aux / (18 ** (1.0 / 3.0) * g0)
    slope = b_coeff / g0
    roots = []
    for k in range(3):
        u_k = lead * unit**k
        roots.append(u_k - slope / (3 * u_k))
    return roots, False


def photon_number_cubic(params):
    """Solve the steady state cubic of the second-order optomechanical system.

    The closed-form roots use ``Z = (9 g0^2 C (1 -+ sqrt(1 - 4B^3/(27 g0 C^2))))^(1/3)``
    on the non-cancelling branch; the companion-matrix roots are matched
    to them by distance.

    :returns: CubicRoots
    """
    g0, b_coeff, c_coeff = cubic_coefficients(params)
    closed, degenerate = _closed_form(g0, b_coeff, c_coeff)
    companion = list(np.roots([1j * g0, 0.0, 1j * b_coeff, -c_coeff]))
    ordered = []
    for root in closed:
        best = min(range(len(companion)), key=lambda pos: abs(companion[pos] - root))
        ordered.append(companion.pop(best))
    _logger.debug("cubic B=%s C=%s roots=%s", b_coeff, c_coeff, closed)
    return CubicRoots(_records(closed), _records(ordered), b_coeff, c_coeff, degenerate)


# --------------------------------------------------------------------------- #
# Building blocks
# --------------------------------------------------------------------------- #


def operator(text):
    """Parse an operator over modes a and b."""
    return parse_operator(text, modes=("a", "b"))


def basis_of(labels):
    """Return the basis whose elements are the parsed labels."""
    return BasisSet([(label, operator(label)) for label in labels])


def _context(params, policy, modes=("a", "b"), classical=()):
    occupations = {}
    if "a" in modes:
        (n_bar,) = params.require("n_bar")
        occupations["a"] = exact(n_bar)
    if "b" in modes:
        occupations["b"] = exact(params.occupation_m())
    return MeanFieldContext(occupations, policy=policy, classical=classical)


def quadratic_hamiltonian(params, full):
    """Return the quadratic optomechanical Hamiltonian.

    ``full`` selects ``gamma (b + s bd)^2 (a + s ad)^2`` over
    ``gamma n (b + s bd)^2``; trivial non-interacting parts are dropped.
    """
    (gamma,) = params.require("gamma")
    gamma = exact(gamma)
    s_a, s_b = params.sign_a, params.sign_b
    phonon = operator("d") + operator("dd") + operator("m") * s_b
    if full:
        photon = operator("c") + operator("cd") + operator("n") * s_a
        hamiltonian = phonon * photon * (4 * gamma)
    else:
        hamiltonian = operator("n") * phonon * (2 * gamma)
    if params.self_energy:
        delta, omega_m = params.require("delta", "omega_m")
        hamiltonian = hamiltonian + operator("n") * exact(delta) + operator("m") * exact(omega_m)
    return hamiltonian


def optomechanical_hamiltonian(params):
    """Return ``delta n - omega_m m - g0 n (b + bd)``.

    The mechanical mode is written in the frame where b rotates as
    ``exp(i omega_m t)``.
    """
    g0, delta, omega_m = params.require("g0", "delta", "omega_m")
    return (
        operator("n") * exact(delta)
        - operator("m") * exact(omega_m)
        - operator("n*b + n*bd") * exact(g0)
    )


def _check_order(model, params):
    if params.order is not None and model.order is not None and params.order != model.order:
        raise ParameterException(
            f"model {model.name} is truncated at order {model.order}, not {params.order}"
        )


# --------------------------------------------------------------------------- #
# Assembled models
# --------------------------------------------------------------------------- #


class AssembledModel(IModel):
    """Model built through the assembler."""

    order = 1
    labels = ()
    composites = {}
    policy = ReductionPolicy.NUMBER_FIRST
    modes = ("a", "b")
    classical = ()

    def hamiltonian(self, params):
        """Return the Hamiltonian.

        :raises NotImplementedException:
        """
        raise NotImplementedException(TEXT_METHOD)

    def channels(self, params):
        """Return the decay channels.

        :raises NotImplementedException:
        """
        raise NotImplementedException(TEXT_METHOD)

    def context(self, params):
        """Return the mean-field context."""
        return _context(params, self.policy, self.modes, self.classical)

    def row_damping(self, params):  # pylint: disable=unused-argument
        """Return extra diagonal damping per label, or None."""
        return None

    def noise(self, params):  # pylint: disable=unused-argument
        """Return NoiseInputs replacing the channel inputs, or None."""
        return None

    def drive(self, params, system):  # pylint: disable=unused-argument
        """Return an extra drive vector, or None."""
        return None

    def build(self, params):
        """Assemble the linear system."""
        _check_order(self, params)
        params.require(*self.required)
        basis = basis_of(self.labels)
        system = linearize_system(
            self.hamiltonian(params),
            basis,
            self.channels(params),
            self.context(params),
            composites=self.composites,
            metadata={"model": self.name, "order": self.order, "params": params.to_dict()},
            row_damping=self.row_damping(params),
            noise=self.noise(params),
        )
        extra = self.drive(params, system)
        if extra is not None:
            system = dataclasses.replace(system, drive=system.drive + extra)
        return system

    def closure(self, params):
        """Return the closure report of the basis."""
        return verify_closure(basis_of(self.labels), self.context(params))


class QuadStd1(AssembledModel):
    """First-order standard quadratic optomechanics, basis {a, d, dd, m}."""

    name = "quad_std_1"
    labels = ("a", "d", "dd", "m")
    required = ("gamma", "n_bar")

    def hamiltonian(self, params):
        """Return ``2 gamma n (d + dd + s m)`` plus self energies."""
        return quadratic_hamiltonian(params, full=False)

    def channels(self, params):
        """Photon channel on a, phonon pair channel on d."""
        return [
            DecayChannel(operator("a"), exact(params.rate1()), noise="vacuum", label="a"),
            DecayChannel(operator("d"), exact(params.rate2()), noise="thermal", label="d"),
        ]

    def row_damping(self, params):
        """The phonon number decays at the pair rate."""
        return {"m": exact(params.rate2())}


class QuadFull1(AssembledModel):
    """First-order full quadratic optomechanics on six operators."""

    name = "quad_full_1"
    labels = ("c", "cd", "n", "d", "dd", "m")
    policy = ReductionPolicy.SYMMETRIC
    required = ("gamma", "n_bar")

    def hamiltonian(self, params):
        """Return ``4 gamma (d + dd + s m)(c + cd + s n)`` plus self energies."""
        return quadratic_hamiltonian(params, full=True)

    def channels(self, params):
        """Pair channels on c and d."""
        return [
            DecayChannel(operator("c"), exact(params.rate1()), noise="vacuum", label="c"),
            DecayChannel(operator("d"), exact(params.rate2()), noise="thermal", label="d"),
        ]

    def row_damping(self, params):
        """Number operators decay at the summed rate of their ladder factors."""
        return {"n": exact(params.rate1()), "m": exact(params.rate2())}


class QuadStd2(QuadFull1):
    """Second-order quadratic optomechanics on the fifteen operator basis."""

    name = "quad_std_2"
    order = 2
    policy = ReductionPolicy.NUMBER_FIRST
    singles = ("c", "cd", "n", "d", "dd", "m")
    labels = singles + (
        "c*d",
        "c*dd",
        "cd*d",
        "cd*dd",
        "c*m",
        "cd*m",
        "n*d",
        "n*dd",
        "n*m",
    )
    composites = {label: tuple(label.split("*")) for label in labels[6:]}


class Anharmonic(AssembledModel):
    """Quartic anharmonic oscillator on eight operators.

    A coherent input of amplitude ``beta`` enters the drive vector as
    minus its Q-function input moments.
    """

    name = "anharmonic"
    modes = ("a",)
    labels = ("c", "cd", "n", "n^2", "c^2", "cd^2", "n*c", "cd*n")
    composites = {
        "n^2": ("n", "n"),
        "c^2": ("c", "c"),
        "cd^2": ("cd", "cd"),
        "n*c": ("n", "c"),
        "cd*n": ("cd", "n"),
    }
    required = ("omega", "zeta", "n_bar")

    def hamiltonian(self, params):
        """Return ``omega n - zeta/2 (a + ad)^4`` without its constant."""
        omega, zeta = params.require("omega", "zeta")
        quadrature = operator("a") + operator("ad")
        hamiltonian = operator("n") * exact(omega) - (quadrature**4) * (exact(zeta) * Half)
        return hamiltonian.without_constant()

    def channels(self, params):
        """Pair channel on c."""
        return [DecayChannel(operator("c"), exact(params.rate_pair()), noise="vacuum", label="c")]

    def row_damping(self, params):
        """The photon number decays at the pair rate."""
        return {"n": exact(params.rate_pair())}

    def drive(self, params, system):
        """Return minus the coherent input moments."""
        if params.beta is None:
            return None
        # local import: analysis builds on the catalog
        from hilange.analysis import (  # pylint: disable=import-outside-toplevel
            anharmonic_input_moments,
        )

        moments = anharmonic_input_moments(params.beta, params.rate1())
        extra = np.zeros(system.size, dtype=complex)
        for label in ("c", "n", "c^2", "n*c"):
            value = moments[label]
            extra[system.index(label)] -= value
            adjoint = {"c": "cd", "c^2": "cd^2", "n*c": "cd*n"}.get(label)
            if adjoint:
                extra[system.index(adjoint)] -= np.conj(value)
        return extra


class Amplifier(AssembledModel):
    """Degenerate parametric amplifier, basis {n, c, cd}.

    The coherent equations close exactly; the pair channel prefactor is
    replaced by ``nbar + 1/2`` and the number row decays at the pair rate.
    """

    name = "amplifier"
    modes = ("a",)
    labels = ("n", "c", "cd")
    policy = ReductionPolicy.SYMMETRIC
    required = ("omega", "g", "n_bar")

    def hamiltonian(self, params):
        """Return ``omega n + g c + g* cd``."""
        omega, pump = params.require("omega", "g")
        pump = exact(complex(pump))
        return operator("n") * exact(omega) + operator("c") * pump + operator("cd") * sympy.conjugate(pump)

    def channels(self, params):
        """Pair channel on c."""
        return [DecayChannel(operator("c"), exact(params.rate_pair()), noise="vacuum", label="c")]

    def row_damping(self, params):
        """The photon number decays at the pair rate."""
        return {"n": exact(params.rate_pair())}


class AmplifierKerr(Amplifier):
    """Degenerate parametric amplifier with a Kerr term, basis {n, n^2, c, cd}."""

    name = "amplifier_kerr"
    labels = ("n", "n^2", "c", "cd")
    policy = ReductionPolicy.NUMBER_FIRST
    required = ("omega", "g", "gamma", "n_bar")

    def hamiltonian(self, params):
        """Return ``omega n + g c + g* cd + gamma cd c``."""
        (kerr,) = params.require("gamma")
        return super().hamiltonian(params) + operator("cd*c") * exact(kerr)

    def row_damping(self, params):
        """Powers of the number operator decay at multiples of the pair rate."""
        rate = exact(params.rate_pair())
        return {"n": rate, "n^2": 2 * rate}


def _om_channels(params, scope):
    kappa, gamma_m = params.require("kappa", "gamma_m")
    return [
        DecayChannel(operator("a"), exact(kappa), noise="vacuum", scope=scope, label="a"),
        DecayChannel(operator("b"), exact(gamma_m), noise="thermal", scope=scope, label="b"),
    ]


class OptomechanicsSecondOrder(AssembledModel):
    """Second-order standard optomechanics on {a, b, ab, abd, n, c}.

    Both channels act on every row with their exact damping operator. A
    product ``a bd^2`` has no span divisor; the phonon mode is then taken
    as a classical field and one ``bd`` is replaced by its amplitude.
    The inputs are the optical and mechanical inputs and the squared
    optical input, weighted by their mean-field amplitudes.
    """

    name = "om_std_2"
    order = 2
    labels = ("a", "b", "a*b", "a*bd", "n", "c")
    inputs = ("a_in", "b_in", "a_in^2")
    classical = ("b",)
    required = ("g0", "delta", "omega_m", "kappa", "gamma_m", "n_bar", "alpha")

    def hamiltonian(self, params):
        """Return the radiation pressure Hamiltonian."""
        return optomechanical_hamiltonian(params)

    def channels(self, params):
        """Photon and phonon channels on every row."""
        return _om_channels(params, ChannelScope.ALL)

    def build(self, params):
        """Assemble the system; ``ultracold`` keeps only ``i g0 nbar`` in the a column of ab and abd."""
        system = super().build(params)
        if not params.ultracold:
            return system
        matrix = np.array(system.matrix)
        pumped = 1j * params.g0 * params.n_bar
        for label in ("a*b", "a*bd"):
            matrix[system.index(label), system.index("a")] = pumped
        return dataclasses.replace(system, matrix=matrix)

    def noise(self, params):
        """Return the three mean-field weighted inputs."""
        kappa, gamma_m, n_bar, alpha = params.require("kappa", "gamma_m", "n_bar", "alpha")
        m_bar = params.occupation_m()
        pumped = 4 * n_bar * kappa
        cross = [math.sqrt(kappa * m_bar), math.sqrt(gamma_m * abs(complex(alpha))), 0.0]
        weights = np.array(
            [
                [math.sqrt(kappa), 0.0, 0.0],
                [0.0, math.sqrt(gamma_m), 0.0],
                cross,
                cross,
                [math.sqrt(pumped), 0.0, 0.0],
                [math.sqrt(2 * pumped), 0.0, math.sqrt(8 * kappa)],
            ]
        )
        bindings = {"a_in": "vacuum", "b_in": "thermal", "a_in^2": "vacuum_squared"}
        return NoiseInputs(self.inputs, weights, bindings)


class OptomechanicsFirstOrder(AssembledModel):
    """First-order standard optomechanics on {a, b, bd}.

    The optical mode is a classical field. ``field_replacement`` replaces
    the fewest optical ladders (``g0 n -> F a``); otherwise every optical
    ladder outside {a} is replaced (``g0 n -> G``).
    """

    labels = ("a", "b", "bd")
    classical = ("a",)
    required = ("g0", "delta", "omega_m", "kappa", "gamma_m", "n_bar")

    def __init__(self, name, field_replacement):
        """Initialize."""
        self.name = name
        self.field_replacement = field_replacement
        self.policy = ReductionPolicy.FIELD_MINIMAL if field_replacement else ReductionPolicy.FIELD

    def hamiltonian(self, params):
        """Return the radiation pressure Hamiltonian."""
        return optomechanical_hamiltonian(params)

    def channels(self, params):
        """Photon channel on a, phonon channel on b."""
        return _om_channels(params, ChannelScope.SELF)


def first_order_from_second(params):
    """Truncate the second-order optomechanical rows to first order.

    Cross columns are folded back with ``ab -> abar b``, ``abd -> abar bd``
    and ``n -> nbar``; the bd row is the conjugate of the b row.

    :returns: (matrix, drive) over {a, b, bd}
    :raises ParameterException: if a kept row reaches an unfoldable column
    """
    (n_bar,) = params.require("n_bar")
    second = CATALOG["om_std_2"].build(params)
    amplitude = math.sqrt(n_bar)
    target = {"a": 0, "b": 1, "bd": 2}
    folds = {"a*b": ("b", amplitude), "a*bd": ("bd", amplitude), "n": (None, n_bar)}
    matrix = np.zeros((3, 3), dtype=complex)
    drive = np.zeros(3, dtype=complex)
    for row_label in ("a", "b"):
        row = target[row_label]
        drive[row] += second.drive[second.index(row_label)]
        for label, entry in zip(second.labels, second.matrix[second.index(row_label)]):
            if entry == 0:
                continue
            if label in target:
                matrix[row, target[label]] += entry
            elif label in folds:
                destination, factor = folds[label]
                if destination is None:
                    drive[row] += entry * factor
                else:
                    matrix[row, target[destination]] += entry * factor
            else:
                raise ParameterException(f"column {label} of row {row_label} cannot be folded")
    swap = (0, 2, 1)
    for column in range(3):
        matrix[2, swap[column]] = np.conj(matrix[1, column])
    drive[2] = np.conj(drive[1])
    return matrix, drive


# --------------------------------------------------------------------------- #
# Written out models
# --------------------------------------------------------------------------- #


class NonDemolition(IModel):
    """Cross-Kerr nondemolition readout on {n, m, C, S}.

    C and S are the cosine and sine quadratures of the signal phase,
    built on ``(n + 1)^(-1/2) a``. Their commutators are tabulated:
    ``[n, C] = -i S``, ``[n, S] = i C``, ``[C, S] ~ i/(2 (nbar + 2))``.
    The signal noise enters C and S through the input quadratures scaled
    by ``1/sqrt(nbar + 1)``.
    """

    name = "qnd"
    order = 1
    labels = ("n", "m", "C", "S")
    inputs = ("a_x", "a_y", "b_x")
    required = ("omega", "chi", "kappa", "gamma_m", "n_bar")

    def build(self, params):
        """Return the nondemolition system."""
        _check_order(self, params)
        omega, chi, kappa, gamma_m, n_bar = params.require(*self.required)
        m_bar = params.occupation_m()
        kappa, gamma_m = exact(kappa), exact(gamma_m)
        n_bar, m_bar = exact(n_bar), exact(m_bar)
        rotation = exact(omega) + exact(chi) * m_bar
        scale = sympy.sqrt(kappa) / sympy.sqrt(n_bar + 1)
        matrix = [
            [-kappa, 0, 0, 0],
            [0, -gamma_m, 0, 0],
            [0, 0, -kappa / 2, rotation],
            [0, 0, -rotation, -kappa / 2],
        ]
        drive = [kappa * n_bar, gamma_m * m_bar, 0, 0]
        weights = [
            [2 * sympy.sqrt(kappa * n_bar), 0, 0],
            [0, 0, 2 * sympy.sqrt(gamma_m * m_bar)],
            [scale, 0, 0],
            [0, scale, 0],
        ]
        size = len(self.labels)
        return LinearLangevinSystem(
            labels=self.labels,
            matrix=np.array([[to_complex(matrix[r][c]) for c in range(size)] for r in range(size)]),
            drive=np.array([to_complex(value) for value in drive]),
            noise_weights=np.array([[to_complex(value).real for value in row] for row in weights]),
            inputs=self.inputs,
            bindings={"a_x": "vacuum", "a_y": "vacuum", "b_x": "thermal"},
            metadata={"model": self.name, "order": 1, "params": params.to_dict()},
        )

    def commutator_table(self, params):
        """Return the tabulated commutators as affine forms."""
        (n_bar,) = params.require("n_bar")
        labels = self.labels
        zero = (0, 0, 0, 0)

        def form(coefficients, constant=0):
            return AffineForm(labels, tuple(sympy.sympify(c) for c in coefficients), sympy.sympify(constant))

        return {
            ("n", "m"): form(zero),
            ("n", "C"): form((0, 0, 0, -I)),
            ("n", "S"): form((0, 0, I, 0)),
            ("m", "C"): form(zero),
            ("m", "S"): form(zero),
            ("C", "S"): form(zero, I / (2 * (exact(n_bar) + 2))),
        }

    def closure(self, params):
        """Return the closure report built from the table."""
        return ClosureReport.from_table(self.labels, self.commutator_table(params))


class Diode(IModel):
    """Taylor chain of a diode RC circuit truncated at order N.

    ``tau du/dt = -mu u - kappa (exp(u) - 1) + v(t) - noise`` becomes a
    linear chain in ``u^k``. Row k has diagonal ``-k (kappa + mu)/tau`` and
    ``-k kappa / (j! tau)`` at column ``k + j - 1`` for j >= 2. The input
    terms ``k u^(k-1)`` are replaced by ``k ubar^(k-1)``; the drive vector
    holds the coefficients of v(t) and the single noise column the same
    weights.
    """

    name = "diode"
    order = None
    required = ("kappa", "mu", "tau")

    def __init__(self, order=None):
        """Initialize."""
        self.default_order = order

    def _order(self, params):
        order = params.order or self.default_order
        if order is None:
            raise ParameterException("diode model needs a truncation order")
        return int(order)

    def chain(self, params):
        """Return (M, coupling, source) of the chain.

        ``coupling`` holds ``k`` at ``(k, k-1)`` and ``source`` the unit
        entry of row 1, so that ``(coupling x + source) v(t) / tau`` is the
        state coupled input.
        """
        order = self._order(params)
        kappa, mu, tau = params.require(*self.required)
        if tau <= 0:
            raise ParameterException(f"tau must be > 0, got {tau}")
        matrix = np.zeros((order, order))
        for k in range(1, order + 1):
            matrix[k - 1, k - 1] = -k * (kappa + mu) / tau
            for j in range(2, order - k + 2):
                matrix[k - 1, k + j - 2] = -k * kappa / (math.factorial(j) * tau)
        coupling = np.zeros((order, order))
        for k in range(2, order + 1):
            coupling[k - 1, k - 2] = k / tau
        source = np.zeros(order)
        source[0] = 1.0 / tau
        return matrix, coupling, source

    def build(self, params):
        """Return the time-average coupled chain."""
        order = self._order(params)
        matrix, _, _ = self.chain(params)
        tau = params.tau
        u_bar = params.u_bar
        weights = np.array([k * u_bar ** (k - 1) / tau for k in range(1, order + 1)])
        labels = tuple("u" if k == 1 else f"u^{k}" for k in range(1, order + 1))
        return LinearLangevinSystem(
            labels=labels,
            matrix=matrix.astype(complex),
            drive=weights.astype(complex),
            noise_weights=weights.reshape(order, 1),
            inputs=("u_in",),
            bindings={"u_in": "vacuum"},
            metadata={"model": self.name, "order": order, "params": params.to_dict(), "drive": "v(t)"},
        )

    def closure(self, params):
        """Return an empty report: the chain is closed by truncation."""
        order = self._order(params)
        labels = tuple("u" if k == 1 else f"u^{k}" for k in range(1, order + 1))
        return ClosureReport(labels, ())


# --------------------------------------------------------------------------- #
# Catalog
# --------------------------------------------------------------------------- #

CATALOG = {
    model.name: model
    for model in (
        QuadStd1(),
        QuadFull1(),
        QuadStd2(),
        Anharmonic(),
        Amplifier(),
        AmplifierKerr(),
        NonDemolition(),
        OptomechanicsFirstOrder("om_std_1a", field_replacement=False),
        OptomechanicsFirstOrder("om_std_1b", field_replacement=True),
        OptomechanicsSecondOrder(),
        Diode(),
    )
}

_DIODE = re.compile(r"^diode\((\d+)\)$")


def model_ids():
    """Return the catalog identifiers."""
    return sorted(CATALOG)


def lookup(model_id):
    """Return the builder of a model id.

    ``diode(N)`` selects the diode chain of order N.

    :raises ParameterException: for unknown ids
    """
    match = _DIODE.match(model_id)
    if match:
        return Diode(int(match.group(1)))
    try:
        return CATALOG[model_id]
    except KeyError as exc:
        raise ParameterException(f"unknown model id {model_id!r}; known: {', '.join(model_ids())}") from exc


def build_model(model_id, params):
    """Build the linear system of a catalog model.

    :param model_id: catalog identifier
    :param params: ModelParams
    :returns: LinearLangevinSystem
    """
    model = lookup(model_id)
    _logger.debug("building %s", model_id)
    return model.build(params)
