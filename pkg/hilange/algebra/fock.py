"""Truncated Fock-space matrices used as an exact-algebra oracle.

Matrices of a truncated space agree with the infinite-dimensional operators
on states whose occupation leaves enough head room below the cutoff; the
comparisons here only look at those columns.
"""
# pylint: disable=missing-type-doc
import itertools
import logging
from functools import reduce

import numpy as np

from hilange.constants import Defaults
from hilange.exceptions import ParameterException
from hilange.utilities import to_complex

_logger = logging.getLogger(__name__)


def annihilator(dim):
    """Return the truncated annihilation matrix of dimension dim."""
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)


def _mode_matrix(dim, cre, ann):
    lower = annihilator(dim)
    raise_ = lower.conj().T
    return np.linalg.matrix_power(raise_, cre) @ np.linalg.matrix_power(lower, ann)


def _check_cutoffs(cutoffs, modes=()):
    if not cutoffs:
        raise ParameterException("at least one mode cutoff is required")
    for mode, dim in cutoffs.items():
        if int(dim) < 1:
            raise ParameterException(f"cutoff of mode {mode} must be >= 1")
    missing = set(modes) - set(cutoffs)
    if missing:
        raise ParameterException(f"no cutoff for mode(s) {sorted(missing)}")
    total = int(np.prod([int(dim) for dim in cutoffs.values()]))
    if total > Defaults.FockDimensionCap:
        raise ParameterException(
            f"Fock dimension {total} exceeds the cap of {Defaults.FockDimensionCap}"
        )
    return total


def fock_matrix(expr, cutoffs):
    """Return the matrix of an operator on a truncated Fock space.

    :param expr: OperatorExpr with numeric coefficients
    :param cutoffs: mapping mode -> dimension; Kronecker order is sorted mode order
    :returns: complex ndarray
    :raises ParameterException: for missing cutoffs or oversized spaces
    """
    total = _check_cutoffs(cutoffs, expr.modes)
    modes = sorted(cutoffs)
    result = np.zeros((total, total), dtype=complex)
    for key, coeff in expr.terms.items():
        blocks = []
        for mode in modes:
            cre, ann = key.powers(mode)
            blocks.append(_mode_matrix(int(cutoffs[mode]), cre, ann))
        result += to_complex(coeff) * reduce(np.kron, blocks)
    return result


def safe_indices(cutoffs, degree):
    """Return basis indices with at least ``degree`` quanta of head room per mode."""
    modes = sorted(cutoffs)
    ranges = [range(int(cutoffs[mode])) for mode in modes]
    indices = []
    for flat, occupation in enumerate(itertools.product(*ranges)):
        if all(count + degree <= int(cutoffs[mode]) - 1 for mode, count in zip(modes, occupation)):
            indices.append(flat)
    return np.asarray(indices, dtype=int)


def default_cutoffs(modes, degree, extra=3):
    """Return per-mode cutoffs leaving room for operators of a given degree."""
    return {mode: degree + extra + 1 for mode in modes}


def commutator_residual(left, right, result, cutoffs=None):
    """Compare an exact commutator against matrix commutators.

    :returns: largest absolute deviation on the safe columns
    """
    degree = left.degree + right.degree
    modes = sorted(set(left.modes) | set(right.modes) | set(result.modes))
    cutoffs = cutoffs or default_cutoffs(modes, degree)
    lmat, rmat = fock_matrix(left, cutoffs), fock_matrix(right, cutoffs)
    expected = lmat @ rmat - rmat @ lmat
    actual = fock_matrix(result, cutoffs)
    columns = safe_indices(cutoffs, degree)
    if columns.size == 0:
        raise ParameterException("cutoffs leave no state with enough head room")
    deviation = float(np.max(np.abs(expected[:, columns] - actual[:, columns]), initial=0.0))
    _logger.debug("commutator residual %.3e on %d columns", deviation, columns.size)
    return deviation


def identity_residual(left, right, cutoffs=None):
    """Compare two operators on the safe columns of a truncated space."""
    degree = max(left.degree, right.degree)
    modes = sorted(set(left.modes) | set(right.modes)) or ["a"]
    cutoffs = cutoffs or default_cutoffs(modes, degree)
    columns = safe_indices(cutoffs, degree)
    difference = fock_matrix(left, cutoffs) - fock_matrix(right, cutoffs)
    return float(np.max(np.abs(difference[:, columns]), initial=0.0))
