"""Batch regeneration of the ifmsim figure set from CSV outputs."""

__version__ = "0.1.0"
