# --- fluctum/utils/__init__.py ---
"""Errors, validation, logging and report helpers"""
