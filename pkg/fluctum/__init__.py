# --- fluctum/__init__.py ---
"""Quantum channels, nonunitality and fluctuation relations for finite-dimensional systems"""

__version__ = "1.0.0"
