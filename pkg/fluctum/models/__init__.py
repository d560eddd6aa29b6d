# --- fluctum/models/__init__.py ---
"""Pydantic wire models for matrices, channel files and scenarios"""
