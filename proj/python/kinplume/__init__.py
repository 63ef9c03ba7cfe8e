"""Kinetic sorption transport models (C++ core)."""

from ._kinplume import *  # noqa: F401,F403
from ._kinplume import __doc__  # noqa: F401

__version__ = "0.1.0"
