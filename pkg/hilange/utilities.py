"""Hilange Utilities.

A collection of utilities for converting exact coefficients, encoding
complex arrays for JSON and reading run time settings.
"""
# pylint: disable=missing-type-doc
import hashlib
import json
import os

import numpy as np
import sympy

from hilange.constants import Defaults
from hilange.exceptions import ConfigException, ParameterException

# --------------------------------------------------------------------------- #
# Coefficients
# --------------------------------------------------------------------------- #


def to_complex(value):
    """Convert an exact coefficient to a python complex.

    :param value: A sympy expression or a number
    :returns: The complex value
    :raises ParameterException: if the value still holds free symbols
    """
    if isinstance(value, (int, float, complex)):
        return complex(value)
    expr = sympy.sympify(value)
    if expr.free_symbols:
        names = ", ".join(sorted(str(sym) for sym in expr.free_symbols))
        raise ParameterException(f"unresolved symbol(s) {names} in {expr}")
    return complex(sympy.N(expr, 17))


def exact(value):
    """Return a sympy number for a numeric parameter.

    Integers and sympy objects stay exact, floats become sympy Floats.
    """
    if isinstance(value, complex):
        return sympy.Float(value.real) + sympy.I * sympy.Float(value.imag)
    return sympy.sympify(value)


# --------------------------------------------------------------------------- #
# JSON helpers
# --------------------------------------------------------------------------- #


def encode_complex(array):
    """Encode a complex array as nested [re, im] pairs."""
    data = np.asarray(array, dtype=complex)
    return np.stack([data.real, data.imag], axis=-1).tolist()


def decode_complex(pairs):
    """Decode nested [re, im] pairs into a complex array."""
    data = np.asarray(pairs, dtype=float)
    if data.size == 0:
        return np.zeros(data.shape[:-1] if data.ndim > 1 else (0,), dtype=complex)
    return data[..., 0] + 1j * data[..., 1]


def params_hash(payload):
    """Return a stable digest of a JSON serialisable payload."""
    text = json.dumps(payload, sort_keys=True, default=str)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


# --------------------------------------------------------------------------- #
# Run time settings
# --------------------------------------------------------------------------- #


def thread_count():
    """Return the worker count for sweeps.

    :raises ConfigException: if HILANGE_THREADS is not a positive integer
    """
    text = os.environ.get(Defaults.ThreadsVariable)
    if not text:
        return Defaults.Threads
    try:
        count = int(text)
    except ValueError as exc:
        raise ConfigException(
            f"expected an integer, got {text!r}", path=Defaults.ThreadsVariable
        ) from exc
    if count < 1:
        raise ConfigException("must be >= 1", path=Defaults.ThreadsVariable)
    return count


def parse_assignment(text):
    """Split a ``KEY=VALUE`` command line assignment.

    :returns: (key, float value)
    :raises ConfigException: on malformed input
    """
    key, sep, value = text.partition("=")
    if not sep or not key.strip():
        raise ConfigException(f"expected KEY=VALUE, got {text!r}", path="tolerance")
    try:
        return key.strip(), float(value)
    except ValueError as exc:
        raise ConfigException(
            f"not a number: {value!r}", path=f"tolerance.{key.strip()}"
        ) from exc
