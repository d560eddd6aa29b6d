from .settings import Settings, Tolerances, settings

__all__ = ["Settings", "Tolerances", "settings"]
