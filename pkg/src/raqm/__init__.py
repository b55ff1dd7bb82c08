"""Exact-arithmetic toolkit and simulator for bit-string quantum states."""

__version__ = "0.1.0"
