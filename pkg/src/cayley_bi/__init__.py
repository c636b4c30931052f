"""BI and CI analysis of Cayley graphs of small finite groups."""

from __future__ import annotations

__all__ = ["__version__"]

__version__ = "0.1.0"
