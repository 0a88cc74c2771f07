"""Audio-visual consistency scoring, fusion and evaluation.

Thin Python layer over the C++ core. See the README for the command-line
workflow; the same stages are available here as :func:`score`,
:func:`fuse_scores` and :func:`evaluate`.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401

__version__ = "0.1.0"
