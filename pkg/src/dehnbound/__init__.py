"""Interval verifier for bounds on exceptional Dehn surgeries on one-cusped hyperbolic 3-manifolds."""

from .interval import Interval

__all__ = ["Interval"]
