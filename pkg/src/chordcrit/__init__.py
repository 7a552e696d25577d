"""Chord-length functionals of closed plane curves near the circle."""

__version__ = "0.1.0"

from .curvegeom import *  # noqa: E402,F401,F403
from .chordfun import *  # noqa: E402,F401,F403
from .variation import *  # noqa: E402,F401,F403
from .critical import *  # noqa: E402,F401,F403
from .search import *  # noqa: E402,F401,F403
from . import curvegeom, chordfun, variation, critical, search  # noqa: E402

__all__ = (
    ["__version__"]
    + curvegeom.__all__
    + chordfun.__all__
    + variation.__all__
    + critical.__all__
    + search.__all__
)
