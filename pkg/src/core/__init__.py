"""
Core solver components.
"""

from .arrangement import ArrangementMatrix, AffinePoint, load_instance
from .chy import ChyInstance, build_chy, boundary_census
from .errors import ScatteringError
from .hilbert import eliminant, hilbert_function_RL, quotient_hilbert_function
from .homotopy import SolutionReport, track_all, verify_solution_set
from .matroid import LinearMatroid, ml_degree, reciprocal_degree

__all__ = [
    "ArrangementMatrix",
    "AffinePoint",
    "load_instance",
    "ChyInstance",
    "build_chy",
    "boundary_census",
    "ScatteringError",
    "eliminant",
    "hilbert_function_RL",
    "quotient_hilbert_function",
    "SolutionReport",
    "track_all",
    "verify_solution_set",
    "LinearMatroid",
    "ml_degree",
    "reciprocal_degree",
]
