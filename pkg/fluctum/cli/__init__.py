# --- fluctum/cli/__init__.py ---
"""Batch front-end: verify, bounds and sweep commands"""
