"""Comparison of sheaf and singular cohomology on finite spaces."""

__version__ = "0.1.0"
