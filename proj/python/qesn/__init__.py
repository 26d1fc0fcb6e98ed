"""Ensemble quadratic echo state networks for spatio-temporal forecasting."""

from ._qesn import *  # noqa: F401,F403
from ._qesn import __doc__  # noqa: F401

__version__ = "0.1.0"
