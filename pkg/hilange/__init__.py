"""Hilange: higher-order operator truncation of quantum Langevin equations.

Nonlinear Heisenberg-Langevin equations are closed on a finite basis of
normal-ordered operators (ladder operators, number operators and their
products). Mean-field reduction turns the closed set into a linear system
which is then analysed in the frequency domain (scattering, output spectra)
and the time domain (stochastic integration).

Released under the the BSD license
"""

import logging as __logging
from logging import NullHandler as __null

import hilange.version as __version

__version__ = __version.version.short()
__author__ = "Hilange developers"
__maintainer__ = "Hilange developers"

# ---------------------------------------------------------------------------#
#  Block unhandled logging
# ---------------------------------------------------------------------------#
__logging.getLogger(__name__).addHandler(__null())
