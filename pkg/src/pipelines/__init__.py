"""
Command-line pipeline tying the solver modules together.
"""

__all__ = []
