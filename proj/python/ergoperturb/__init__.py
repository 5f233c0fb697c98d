"""Drift certificates, ergodicity rates and perturbation bounds for AR(1)
chains discretized on a quadrature grid."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
