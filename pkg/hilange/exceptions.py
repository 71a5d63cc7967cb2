"""Hilange Exceptions.

Custom exceptions to be used in the hilange code.
"""


class HilangeException(Exception):
    """Base hilange exception."""

    def __init__(self, string):
        """Initialize the exception.

        :param string: The message to append to the error
        """
        self.string = string
        super().__init__()

    def __str__(self):
        """Return string representation."""
        return f"Hilange Error: {self.string}"

    def isError(self):  # pylint: disable=no-self-use,invalid-name
        """Error"""
        return True


class ParameterException(HilangeException):
    """Error resulting from invalid parameter."""

    def __init__(self, string=""):
        """Initialize the exception.

        :param string: The message to append to the error
        """
        message = f"[Invalid Parameter] {string}"
        HilangeException.__init__(self, message)


class IrreducibleTermException(HilangeException):
    """Error resulting from a product that cannot be brought into the span."""

    def __init__(self, string="", monomial=None):
        """Initialize the exception.

        :param string: The message to append to the error
        :param monomial: The offending normal-ordered monomial
        """
        self.monomial = monomial
        message = f"[Irreducible Term] {string}"
        HilangeException.__init__(self, message)


class ClosureException(HilangeException):
    """Error resulting from a basis that is not closed."""

    def __init__(self, string="", report=None):
        """Initialize the exception.

        :param string: The message to append to the error
        :param report: The failing closure report
        """
        self.report = report
        message = f"[Closure] {string}"
        HilangeException.__init__(self, message)


class NonHermitianException(HilangeException):
    """Error resulting from a Hamiltonian that is not self-adjoint."""

    def __init__(self, string=""):
        """Initialize the exception.

        :param string: The message to append to the error
        """
        message = f"[Non Hermitian] {string}"
        HilangeException.__init__(self, message)


class SingularSystemException(HilangeException):
    """Error resulting from a singular linear system."""

    def __init__(self, string="", frequency=None, rank_deficiency=None):
        """Initialize the exception.

        :param string: The message to append to the error
        :param frequency: The frequency at which the resolvent failed
        :param rank_deficiency: Missing rank of the matrix
        """
        self.frequency = frequency
        self.rank_deficiency = rank_deficiency
        message = f"[Singular System] {string}"
        HilangeException.__init__(self, message)


class NumericException(HilangeException):
    """Error resulting from a failed numerical routine."""

    def __init__(self, string=""):
        """Initialize the exception.

        :param string: The message to append to the error
        """
        message = f"[Numeric] {string}"
        HilangeException.__init__(self, message)


class DivergenceException(HilangeException):
    """Error resulting from a non finite state during integration."""

    def __init__(self, string="", step=None):
        """Initialize the exception.

        :param string: The message to append to the error
        :param step: Index of the first non finite step
        """
        self.step = step
        message = f"[Divergence] {string}"
        HilangeException.__init__(self, message)


class ConfigException(HilangeException):
    """Error resulting from an invalid run configuration."""

    def __init__(self, string="", path=None):
        """Initialize the exception.

        :param string: The message to append to the error
        :param path: Dotted path of the offending field
        """
        self.path = path
        message = f"[Invalid Config] {path}: {string}" if path else f"[Invalid Config] {string}"
        HilangeException.__init__(self, message)


class NotImplementedException(HilangeException):
    """Error resulting from not implemented function."""

    def __init__(self, string=""):
        """Initialize the exception.

        :param string: The message to append to the error
        """
        message = f"[Not Implemented] {string}"
        HilangeException.__init__(self, message)


# --------------------------------------------------------------------------- #
# Exported symbols
# --------------------------------------------------------------------------- #
__all__ = [
    "HilangeException",
    "ParameterException",
    "IrreducibleTermException",
    "ClosureException",
    "NonHermitianException",
    "SingularSystemException",
    "NumericException",
    "DivergenceException",
    "ConfigException",
    "NotImplementedException",
]
