"""splitnet (node-split citation clustering toolkit)."""

__all__ = ["__version__"]

__version__ = "0.1.0"
