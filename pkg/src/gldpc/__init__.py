"""Generalized LDPC codes: ensembles, a bit-flipping decoder and error-radius bounds."""

__version__ = "0.1.0"
