"""Exact verification of binomial-sum identities for Fibonacci, Lucas and
Horadam sequences."""

__version__ = "0.1.0"
