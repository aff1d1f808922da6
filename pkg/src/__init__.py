"""
Scattering Equations Solver
Counts and computes the critical points of master functions of hyperplane
arrangements by a degeneration homotopy, with exact combinatorial cross-checks.
"""

__version__ = "1.0.0"
__license__ = "CC BY-SA 4.0"

from src.core import arrangement, chy, hilbert, homotopy, ideal, matroid

__all__ = [
    "arrangement",
    "matroid",
    "ideal",
    "homotopy",
    "chy",
    "hilbert",
]
