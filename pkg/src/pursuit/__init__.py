"""Pursuit-evasion engine for planar domains with polygonal obstacles."""

__version__ = "0.1.0"
