"""Hilange Interfaces.

A collection of base classes that are used throughout
the hilange library.
"""
# pylint: disable=missing-type-doc
from hilange.exceptions import NotImplementedException

TEXT_METHOD = "Method not implemented by derived class"

# --------------------------------------------------------------------------- #
# Generic
# --------------------------------------------------------------------------- #


class Singleton:  # pylint: disable=too-few-public-methods
    """Singleton base class.

    http://mail.python.org/pipermail/python-list/2007-July/450681.html
    """

    def __new__(cls, *args, **kwargs):  # pylint: disable=unused-argument
        """Create a new instance."""
        if "_inst" not in vars(cls):
            cls._inst = object.__new__(cls)
        return cls._inst


# --------------------------------------------------------------------------- #
# Project Specific
# --------------------------------------------------------------------------- #
class IModel:
    """Model builder base class.

    A model turns a parameter set into a linear Langevin system. Each
    catalog entry is one subclass; the catalog looks builders up by
    ``name``. ``required`` lists the parameters a build cannot do
    without; builders check them before any algebra runs.
    """

    name = None
    required = ()

    def build(self, params):
        """Assemble the linear system for the given parameters.

        :param params: The model parameters
        :raises NotImplementedException:
        """
        raise NotImplementedException(TEXT_METHOD)

    def closure(self, params):
        """Return the closure report of the model basis.

        :param params: The model parameters
        :raises NotImplementedException:
        """
        raise NotImplementedException(TEXT_METHOD)


class INoiseKind:
    """Input noise density base class."""

    kind = None

    def density(self, omega, catalog, trail=()):
        """Evaluate the spectral density on a frequency grid.

        :param omega: Frequency grid (rad/s)
        :param catalog: The catalog used to resolve referenced bases
        :param trail: Identifiers already being resolved
        :raises NotImplementedException:
        """
        raise NotImplementedException(TEXT_METHOD)


# --------------------------------------------------------------------------- #
# Exported symbols
# --------------------------------------------------------------------------- #
__all__ = [
    "Singleton",
    "IModel",
    "INoiseKind",
]
