# --- fluctum/core/__init__.py ---
"""Numerical core: linear algebra, channels, thermal states and work statistics"""
