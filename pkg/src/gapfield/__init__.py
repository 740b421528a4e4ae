"""Exact counting over generalized arithmetic progressions modulo primes."""

__version__ = "0.1.0"
