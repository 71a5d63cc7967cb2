"""Golden table verification.

Each table lists published identities in operator text. An entry passes
when the engine reproduces the identity exactly. When it does not, the
engine result is replayed on truncated Fock matrices: a confirmed engine
result marks the printed identity as ``deviates``, anything else fails.
"""
# pylint: disable=missing-type-doc
import json
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
import sympy

from hilange.algebra import (
    MeanFieldContext,
    Reducer,
    antinormal_order,
    commutator_residual,
    commute,
    identity_residual,
)
from hilange.analysis import laser_threshold, q_moment
from hilange.assembler import LinearLangevinSystem, heisenberg_rhs
from hilange.constants import Defaults, ReductionPolicy, VerifyStatus
from hilange.exceptions import HilangeException, IrreducibleTermException
from hilange.models import CATALOG, ModelParams, basis_of, operator
from hilange.spectral import (
    FrequencyGrid,
    GaussianNoise,
    NoiseCatalog,
    SquaredNoise,
    input_noise_spectrum,
    scattering_matrix,
    trapezoid_estimate,
)

_logger = logging.getLogger(__name__)

NBAR = sympy.Symbol("nbar", positive=True)
MBAR = sympy.Symbol("mbar", positive=True)
ALPHA = sympy.Symbol("alpha")


# --------------------------------------------------------------------------- #
# Golden data
# --------------------------------------------------------------------------- #

PAIR_COMMUTATORS = (
    ("c", "cd", "n + 1/2"),
    ("c", "n", "2*c"),
    ("cd", "n", "-2*cd"),
    ("c", "ad", "a"),
    ("d", "dd", "m + 1/2"),
    ("d", "m", "2*d"),
    ("dd", "m", "-2*dd"),
    ("d", "bd", "b"),
)

CROSS_COMMUTATORS = (
    ("c*d", "cd*dd", "1/8*((2*n*m + 3)*(m + n + 2) + n^2 + m^2 - 4)"),
    ("c*d", "cd*m", "1/2*(n^2 + 2*n*m + 2*n + m + 2)*d"),
    ("c*d", "n*dd", "1/2*(m^2 + 3*m + 2*m*n + n + 2)*c"),
    ("c*d", "n*m", "(n + m + 4)*c*d"),
    ("c*dd", "cd*d", "1/8*(2*n*m + m + n - 1)*(m - n)"),
    ("c*dd", "cd*m", "1/2*((2*n + 1)*m - (n + 1)*(n + 2))*dd"),
    ("c*dd", "n*d", "1/2*(m*(m - 2*n) - (m + n))*c"),
    ("c*dd", "n*m", "2*(m - n - 2)*c*dd"),
    ("c*m", "n*d", "2*(m + n + 2)*c*d"),
    ("c*m", "n*dd", "2*(m + n)*c*dd"),
)

CROSS_MEAN_FIELD = (
    (
        "c*d",
        "cd*dd",
        "1/16*(mbar + nbar + 8)*n*m + 1/8*(mbar*(nbar + 1) + 1/2*nbar^2 + 3)*m"
        " + 1/8*(nbar*(mbar + 1) + 1/2*mbar^2 + 3)*n + 1/4",
    ),
    ("c*d", "cd*m", "1/2*(nbar + 2*mbar + 2)*n*d + 1/2*(mbar + 2)*d"),
    ("c*d", "n*dd", "1/2*(mbar + 3 + 2*nbar)*c*m + 1/2*(nbar + 2)*c"),
    ("c*d", "n*m", "(nbar + mbar + 4)*c*d"),
    (
        "c*dd",
        "cd*d",
        "1/16*(mbar - nbar)*n*m + 1/8*(mbar*(nbar + 1) - 1 - 1/2*nbar^2)*m"
        " - 1/8*(nbar*(mbar + 1) - 1 - 1/2*mbar^2)*n",
    ),
    ("c*dd", "cd*m", "1/2*(2*mbar - nbar - 3)*n*dd + 1/2*(mbar - 2)*dd"),
    ("c*dd", "n*d", "1/2*(mbar - 2*nbar - 1)*c*m - 1/2*nbar*c"),
    ("c*dd", "n*m", "2*(mbar - nbar - 2)*c*dd"),
    ("c*m", "n*d", "2*(mbar + nbar + 2)*c*d"),
    ("c*m", "n*dd", "2*(mbar + nbar)*c*dd"),
)

ANHARMONIC_COMMUTATORS = (
    ("n", "c^2", "-4*c^2"),
    ("n^2", "c", "-3*n*c - 7/2*c"),
    ("n^2", "c^2", "4*(n - 2)*n*c^2"),
    ("c^2", "cd", "2*n*c + 3*c"),
    ("c^2", "cd^2", "n^3 + 3/2*(n^2 + 1) + 1/4*n"),
    ("c^2", "cd*n", "3*(n + 2)*n*c + 6*c"),
    ("c", "cd*n", "3/2*n^2"),
    ("n*c", "cd*n", "1/2*(4*n^2 - 3*n + 2)*n"),
)

ANHARMONIC_MEAN_FIELD = (
    ("n", "c^2", "-4*c^2"),
    ("n^2", "c", "-3*n*c - 7/2*c"),
    ("n^2", "c^2", "4*(nbar - 2)*nbar*c^2"),
    ("c^2", "cd", "2*n*c + 3*c"),
    ("c^2", "cd^2", "1/2*(2*nbar + 3)*n^2 + 1/4*n + 3/2"),
    ("c^2", "cd*n", "3*(nbar + 2)*n*c + 6*c"),
    ("c", "cd*n", "3/2*n^2"),
    ("n*c", "cd*n", "1/2*(4*nbar - 3)*n^2 + n"),
)

ANTINORMAL_FORMS = (
    ("n", "a*ad - 1"),
    ("n^2", "a*a*ad*ad - 2*a*ad"),
    ("n*c", "1/2*a*a*a*ad - 3/2*a*a"),
    ("cd*n", "1/2*a*ad*ad*ad - 3/2*ad*ad"),
)

_MODULUS = ALPHA * sympy.conjugate(ALPHA)
_HALF = sympy.Rational(1, 2)
Q_MOMENTS = (
    ("n", _MODULUS - 1),
    ("n^2", _MODULUS**2 - 2 * _MODULUS),
    ("n*c", _HALF * ALPHA**2 * _MODULUS - 3 * _HALF * ALPHA**2),
    ("cd*n", _HALF * sympy.conjugate(ALPHA) ** 2 * _MODULUS - 3 * _HALF * sympy.conjugate(ALPHA) ** 2),
)

OPTOMECHANICAL_COMMUTATORS = (
    ("a", "n", "a"),
    ("a*bd", "b", "-a"),
    ("a*b", "n", "a*b"),
    ("a*bd", "n", "a*bd"),
    ("a*b", "a*bd", "2*c"),
    ("c", "n", "2*c"),
)

AMPLIFIER_LABELS = ("n", "c", "cd")
PRINTED_AMPLIFIER_ROW = (("c", "-2*I*g"), ("cd", "2*I*conjugate(g)"))

OPTOMECHANICAL_ROWS = (
    ("a", (("a", "-I*delta - kappa/2"), ("a*b", "I*g0"), ("a*bd", "I*g0"))),
    ("b", (("b", "I*omega_m - gamma_m/2"), ("n", "I*g0"))),
    (
        "a*b",
        (
            ("a", "I*g0*(nbar + mbar + 1)"),
            ("a*b", "I*(omega_m - delta) - (kappa + gamma_m)/2"),
            ("a*bd", "I*g0"),
        ),
    ),
    ("n", (("n", "-kappa"),)),
)

SAMPLE_PARAMS = ModelParams(
    gamma=0.1,
    g0=0.2,
    g=0.3 + 0.1j,
    zeta=0.05,
    chi=0.1,
    delta=0.5,
    omega_m=1.0,
    omega=1.0,
    kappa=0.2,
    gamma_m=0.05,
    m_bar=1.0,
    n_bar=1.0,
    alpha=1.0,
    mu=1.0,
    tau=1.0,
    order=None,
)


# --------------------------------------------------------------------------- #
# Report
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class VerifyEntry:
    """One checked identity."""

    table: str
    name: str
    status: str
    engine: str
    expected: str
    residual: Optional[float] = None
    detail: str = ""


@dataclass(frozen=True)
class VerifyReport:
    """Collection of verification entries."""

    entries: tuple = field(default_factory=tuple)

    def counts(self):
        """Return the number of entries per status."""
        result = {status: 0 for status in VerifyStatus.values()}
        for entry in self.entries:
            result[entry.status] += 1
        return result

    @property
    def failures(self):
        """Return failed entries."""
        return [entry for entry in self.entries if entry.status == VerifyStatus.FAIL]

    @property
    def deviations(self):
        """Return entries where the printed identity deviates."""
        return [entry for entry in self.entries if entry.status == VerifyStatus.DEVIATES]

    def table(self, name):
        """Return the entries of one table."""
        return [entry for entry in self.entries if entry.table == name]

    def to_json(self):
        """Return the JSON report."""
        document = {"counts": self.counts(), "entries": [asdict(entry) for entry in self.entries]}
        return json.dumps(document, sort_keys=True, indent=2, default=str)


def _status(confirmed, agrees):
    if not confirmed:
        return VerifyStatus.FAIL
    return VerifyStatus.PASS if agrees else VerifyStatus.DEVIATES


def _tolerance(tolerances, key, default):
    return float((tolerances or {}).get(key, default))


# --------------------------------------------------------------------------- #
# Checks
# --------------------------------------------------------------------------- #


def check_commutators(table, rows, tolerances=None):
    """Check exact commutator identities."""
    tol = _tolerance(tolerances, "oracle", Defaults.OracleTolerance)
    entries = []
    for left, right, text in rows:
        lexpr, rexpr = operator(left), operator(right)
        engine = commute(lexpr, rexpr)
        expected = operator(text)
        residual = commutator_residual(lexpr, rexpr, engine)
        entries.append(
            VerifyEntry(
                table,
                f"[{left}, {right}]",
                _status(residual <= tol, engine == expected),
                str(engine),
                str(expected),
                residual,
            )
        )
    return entries


def _symbols(expr):
    return expr.subs({sympy.Symbol("nbar"): NBAR, sympy.Symbol("mbar"): MBAR})


def check_mean_field(table, rows, labels, occupations, policy, tolerances=None):
    """Check reduced commutators against printed reductions."""
    tol = _tolerance(tolerances, "oracle", Defaults.OracleTolerance)
    basis = basis_of(labels)
    reducer = Reducer(MeanFieldContext(occupations, policy=policy), basis)
    entries = []
    for left, right, text in rows:
        lexpr, rexpr = operator(left), operator(right)
        exact = commute(lexpr, rexpr)
        residual = commutator_residual(lexpr, rexpr, exact)
        detail = ""
        try:
            engine = reducer.reduce(exact)
            engine_text = str(engine)
        except IrreducibleTermException as exc:
            engine, engine_text, detail = None, "irreducible", str(exc)
        try:
            expected = basis.express(_symbols(operator(text)))
            agrees = engine is not None and engine.equals(expected)
            expected_text = str(expected)
        except IrreducibleTermException as exc:
            agrees, expected_text, detail = False, text, str(exc)
        confirmed = residual <= tol and engine is not None
        entries.append(
            VerifyEntry(
                table, f"[{left}, {right}]", _status(confirmed, agrees), engine_text, expected_text, residual, detail
            )
        )
    return entries


def check_antinormal(tolerances=None):
    """Check anti-normal forms."""
    tol = _tolerance(tolerances, "oracle", Defaults.OracleTolerance)
    entries = []
    for label, text in ANTINORMAL_FORMS:
        expr = operator(label)
        engine = antinormal_order(expr)
        residual = identity_residual(engine.to_normal(), expr)
        entries.append(
            VerifyEntry(
                "antinormal_forms",
                label,
                _status(residual <= tol and engine.to_normal() == expr, operator(text) == expr),
                str(engine),
                text,
                residual,
            )
        )
    return entries


def check_q_moments(tolerances=None):
    """Check Q-function moments."""
    tol = _tolerance(tolerances, "oracle", Defaults.OracleTolerance)
    entries = []
    for label, expected in Q_MOMENTS:
        expr = operator(label)
        engine = q_moment(expr, ALPHA)
        residual = identity_residual(antinormal_order(expr).to_normal(), expr)
        agrees = sympy.expand(engine - expected) == 0
        entries.append(
            VerifyEntry(
                "q_moments", label, _status(residual <= tol, agrees), str(engine), str(sympy.expand(expected)), residual
            )
        )
    return entries


def _printed_row(labels, entries, values):
    """Evaluate printed row entries into a vector over labels."""
    row = np.zeros(len(labels), dtype=complex)
    for label, text in entries:
        row[labels.index(label)] = complex(sympy.sympify(text, locals=values))
    return row


def check_amplifier_row(tolerances=None):
    """Compare the engine number row of the amplifier with the printed one."""
    tol = _tolerance(tolerances, "oracle", Defaults.OracleTolerance)
    params = SAMPLE_PARAMS
    pump = sympy.Float(params.g.real) + sympy.I * sympy.Float(params.g.imag)
    hamiltonian = CATALOG["amplifier"].hamiltonian(params)
    basis = basis_of(AMPLIFIER_LABELS)
    rhs = heisenberg_rhs(hamiltonian, operator("n"))
    reduced = Reducer(MeanFieldContext({"a": sympy.Integer(1)}), basis).reduce(rhs.deterministic)
    engine_row, _ = reduced.to_complex()
    printed = _printed_row(AMPLIFIER_LABELS, PRINTED_AMPLIFIER_ROW, {"g": pump})
    residual = commutator_residual(operator("n"), operator("c"), operator("-2*c"))
    agrees = bool(np.allclose(engine_row, printed, atol=1e-12))
    return [
        VerifyEntry(
            "amplifier_number_row",
            "n",
            _status(residual <= tol, agrees),
            str(np.round(engine_row, 12).tolist()),
            str(np.round(printed, 12).tolist()),
            residual,
        )
    ]


def check_optomechanical_rows(tolerances=None):
    """Compare the engine rows of second-order optomechanics with the printed ones.

    The exact coupling brackets ``[z, n (b + bd)]`` are replayed on Fock
    matrices; the printed rows are evaluated at the sample parameters.
    """
    tol = _tolerance(tolerances, "oracle", Defaults.OracleTolerance)
    params = SAMPLE_PARAMS
    system = CATALOG["om_std_2"].build(params)
    values = {
        "g0": params.g0,
        "delta": params.delta,
        "omega_m": params.omega_m,
        "kappa": params.kappa,
        "gamma_m": params.gamma_m,
        "nbar": params.n_bar,
        "mbar": params.occupation_m(),
    }
    coupling = operator("n*b + n*bd")
    entries = []
    for label, printed_entries in OPTOMECHANICAL_ROWS:
        element = operator(label)
        residual = commutator_residual(element, coupling, commute(element, coupling))
        engine_row = system.matrix[system.index(label)]
        printed = _printed_row(system.labels, printed_entries, values)
        agrees = bool(np.allclose(engine_row, printed, atol=1e-12))
        entries.append(
            VerifyEntry(
                "optomechanical_rows",
                label,
                _status(residual <= tol, agrees),
                str(np.round(engine_row, 12).tolist()),
                str(np.round(printed, 12).tolist()),
                residual,
            )
        )
    return entries


def check_closure(params=SAMPLE_PARAMS):
    """Run the closure scan of every catalog basis."""
    entries = []
    for name, model in sorted(CATALOG.items()):
        if name == "diode":
            continue
        try:
            report = model.closure(params)
            status = VerifyStatus.PASS if report.closed else VerifyStatus.FAIL
            detail = "; ".join(item.error or "" for item in report.failures)
        except HilangeException as exc:
            status, detail = VerifyStatus.FAIL, str(exc)
        entries.append(VerifyEntry("closure", name, status, status, VerifyStatus.PASS, None, detail))
    return entries


def _identity(table, name, value, expected, tolerance, relative=False):
    deviation = abs(value - expected)
    if relative:
        deviation /= abs(expected)
    status = VerifyStatus.PASS if deviation <= tolerance else VerifyStatus.FAIL
    return VerifyEntry(table, name, status, repr(value), repr(expected), deviation)


def check_spectral(tolerances=None):
    """Check the integral and scattering identities."""
    tol = _tolerance(tolerances, "integral", 1e-6)
    chi, carrier = 0.1, 1.0
    grid = FrequencyGrid(0.0, 4.0, Defaults.GridCount)
    omega = grid.values()
    catalog = NoiseCatalog(
        {
            "field": GaussianNoise(chi, carrier),
            "field_squared": SquaredNoise("field"),
            "field_squared_numeric": SquaredNoise("field", closed_form=False),
        }
    )
    line = input_noise_spectrum("field", omega, catalog)
    squared = input_noise_spectrum("field_squared", omega, catalog)
    numeric = input_noise_spectrum("field_squared_numeric", omega, catalog)
    weight = 2.0 / math.pi * chi**2
    entries = [
        _identity("spectral", "gaussian line integral", trapezoid_estimate(omega, line).value, 1.0, tol),
        _identity("spectral", "squared line integral", trapezoid_estimate(omega, squared).value, weight, tol, True),
        _identity("spectral", "squared line peak", float(omega[np.argmax(squared)]), 2 * carrier, grid.step),
        _identity(
            "spectral",
            "numeric squared line",
            float(np.max(np.abs(numeric - squared)) / np.max(squared)),
            0.0,
            _tolerance(tolerances, "convolution", 1e-4),
        ),
    ]
    kappa = 1.0
    port = LinearLangevinSystem(("a",), [[-kappa / 2]], [0.0], [[math.sqrt(kappa)]], ("a",))
    reflection = complex(scattering_matrix(port, 0.0)[0, 0])
    entries.append(_identity("spectral", "one port reflection", reflection, -1.0, 1e-12))
    closed = LinearLangevinSystem(("a",), [[-1j]], [0.0], [[0.0]], ("a",))
    uncoupled = complex(scattering_matrix(closed, 0.3)[0, 0])
    entries.append(_identity("spectral", "uncoupled scattering", uncoupled, 1.0, 0.0))
    entries.append(_identity("spectral", "laser threshold", laser_threshold(), math.sqrt(6) - 2, 1e-9))
    return entries


def run_verification(tolerances=None):
    """Run every table.

    :param tolerances: optional overrides for "oracle", "integral" and "convolution"
    :returns: VerifyReport
    """
    entries = []
    entries += check_commutators("pair_commutators", PAIR_COMMUTATORS, tolerances)
    entries += check_commutators("optomechanical_commutators", OPTOMECHANICAL_COMMUTATORS, tolerances)
    entries += check_commutators("cross_commutators", CROSS_COMMUTATORS, tolerances)
    entries += check_commutators("anharmonic_commutators", ANHARMONIC_COMMUTATORS, tolerances)
    entries += check_mean_field(
        "cross_mean_field",
        CROSS_MEAN_FIELD,
        CATALOG["quad_std_2"].labels,
        {"a": NBAR, "b": MBAR},
        ReductionPolicy.NUMBER_FIRST,
        tolerances,
    )
    entries += check_mean_field(
        "anharmonic_mean_field",
        ANHARMONIC_MEAN_FIELD,
        CATALOG["anharmonic"].labels,
        {"a": NBAR},
        ReductionPolicy.NUMBER_FIRST,
        tolerances,
    )
    entries += check_antinormal(tolerances)
    entries += check_q_moments(tolerances)
    entries += check_amplifier_row(tolerances)
    entries += check_optomechanical_rows(tolerances)
    entries += check_closure()
    entries += check_spectral(tolerances)
    report = VerifyReport(tuple(entries))
    _logger.info("verification: %s", report.counts())
    return report
