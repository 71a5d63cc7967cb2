"""Constants For Hilange.

This is the single location for storing default
values for the solvers, the assembler and the command line.
"""
import logging

from hilange.interfaces import Singleton

FORMAT = "%(asctime)s %(levelname)-5s %(module)s:%(lineno)s %(message)s"
DATE_FORMAT = "%H:%M:%S"


class Defaults(Singleton):  # pylint: disable=too-few-public-methods
    """A collection of hilange default values.

    .. attribute:: StabilityTolerance

       Largest real part of an eigenvalue of M still considered
       stable (1e-9)

    .. attribute:: OracleTolerance

       Entry-wise tolerance when comparing an operator identity against
       truncated Fock matrices (1e-10)

    .. attribute:: GridCount

       Number of points of the default frequency grid (4001)

    .. attribute:: FockDimensionCap

       Largest total Hilbert space dimension the Fock oracle builds (4096)

    .. attribute:: FixedPointTolerance

       Convergence threshold of the constant time-average fixed point (1e-6)

    .. attribute:: FixedPointIterations

       Maximal number of fixed point iterations (20)

    .. attribute:: MeanCouplingTolerance

       Largest change of the mean input trajectory accepted as
       converged (1e-12)

    .. attribute:: MeanCouplingIterations

       Maximal number of passes over the mean input trajectory (60)

    .. attribute:: ConditionLimit

       Condition number beyond which a resolvent is treated as
       singular (1e12)

    .. attribute:: AsymmetryFloor

       Output density below which a sideband ratio is not formed (1e-15)

    .. attribute:: ResidualTolerance

       Relative residual accepted for a cubic root (1e-8)

    .. attribute:: Generator

       Name of the bit generator used for stochastic runs ("Philox")

    .. attribute:: Threads

       Default worker count of frequency sweeps (1). The environment
       variable HILANGE_THREADS overrides it.
    """

    StabilityTolerance = 1e-9
    OracleTolerance = 1e-10
    GridCount = 4001
    FockDimensionCap = 4096
    FixedPointTolerance = 1e-6
    FixedPointIterations = 20
    MeanCouplingTolerance = 1e-12
    MeanCouplingIterations = 60
    ConditionLimit = 1e12
    AsymmetryFloor = 1e-15
    ResidualTolerance = 1e-8
    Generator = "Philox"
    Threads = 1
    ThreadsVariable = "HILANGE_THREADS"


class ReductionPolicy:  # pylint: disable=too-few-public-methods
    """Order in which mean-field rules are tried.

    .. attribute:: SYMMETRIC

       triple rule, pair rule, then number-operator substitution

    .. attribute:: NUMBER_FIRST

       number-operator substitution before the triple and pair rules

    .. attribute:: FIELD

       every ladder of a classical mode is replaced by its amplitude first

    .. attribute:: FIELD_MINIMAL

       the fewest classical ladders that bring a product into the span are
       replaced first

    Under SYMMETRIC and NUMBER_FIRST, classical modes are replaced only when
    no other rule applies.
    """

    SYMMETRIC = "symmetric"
    NUMBER_FIRST = "number_first"
    FIELD = "field"
    FIELD_MINIMAL = "field_minimal"

    @classmethod
    def values(cls):
        """Return the known policy names."""
        return (cls.SYMMETRIC, cls.NUMBER_FIRST, cls.FIELD, cls.FIELD_MINIMAL)


class ChannelScope:  # pylint: disable=too-few-public-methods
    """Rows a decay channel contributes to."""

    SELF = "self"
    ALL = "all"


class DiodeCoupling:  # pylint: disable=too-few-public-methods
    """How the input terms ``k u^(k-1) v(t)`` enter the diode chain.

    .. attribute:: AVERAGE

       ``k ubar(t)^(k-1) v(t)`` with ``ubar`` the self-consistent mean of u

    .. attribute:: TIME_AVERAGE

       ``k ubar^(k-1) v(t)`` with ``ubar`` the constant average of u over
       the horizon

    .. attribute:: STATE

       ``k u^(k-1) v(t)`` taken from the chain state itself
    """

    AVERAGE = "average"
    TIME_AVERAGE = "time_average"
    STATE = "state"

    @classmethod
    def values(cls):
        """Return the known couplings."""
        return (cls.AVERAGE, cls.TIME_AVERAGE, cls.STATE)


class VerifyStatus:  # pylint: disable=too-few-public-methods
    """Outcome of one verification entry."""

    PASS = "pass"  # nosec
    FAIL = "fail"
    DEVIATES = "deviates"

    @classmethod
    def values(cls):
        """Return the statuses in report order."""
        return (cls.PASS, cls.DEVIATES, cls.FAIL)


def configure_logging(verbose=False):
    """Set up the hilange logger for command line use.

    :param verbose: Log at debug level when set
    """
    logging.basicConfig(format=FORMAT, datefmt=DATE_FORMAT)
    logging.getLogger("hilange").setLevel(
        logging.DEBUG if verbose else logging.WARNING
    )
