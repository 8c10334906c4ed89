"""Exact simulation of STIT tessellations in a window, the renormalized
chain they generate, and a coupling-from-the-past factor map for it."""

from .geometry import ConvexPolytope, Direction, Hyperplane, Q
from .measure import DiscreteMeasure, IsotropicMeasure, LebesguePoints, axis_measure, lambda_of
from .stit import run, sample_final
from .tessellation import Tessellation

__version__ = "0.1.0"

__all__ = [
    "ConvexPolytope", "Direction", "Hyperplane", "Q", "DiscreteMeasure", "IsotropicMeasure", "LebesguePoints",
    "axis_measure", "lambda_of", "run", "sample_final", "Tessellation", "__version__",
]
