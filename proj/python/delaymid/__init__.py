"""Root assignment of maximal multiplicity for single-delay second-order systems."""

from ._delaymid import *  # noqa: F401,F403
from ._delaymid import __doc__  # noqa: F401

__version__ = "0.1.0"
