"""Offline-reproducible harmful-comment classification and evaluation harness."""

__version__ = "0.1.0"
