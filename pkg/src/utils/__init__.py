"""
Utility modules for exact linear algebra, configuration, serialization and report checking.
"""

__all__ = []
