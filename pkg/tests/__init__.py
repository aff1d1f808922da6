"""
Test suite for the scattering equations solver.
"""

__all__ = []
