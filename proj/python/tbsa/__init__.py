"""Target-based sentiment analysis: joint span extraction and polarity tagging."""

from tbsa._core import *  # noqa: F401,F403
from tbsa._core import __doc__ as _core_doc  # noqa: F401

__version__ = "0.1.0"
