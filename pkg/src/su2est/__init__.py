"""Estimation theory toolkit for SU(2) unitary channel models."""

from . import bounds, boundary, collective, estimation, purification, strategies, su2_model
from .errors import Su2EstError

__all__ = [
    "bounds",
    "boundary",
    "collective",
    "estimation",
    "purification",
    "strategies",
    "su2_model",
    "Su2EstError",
]
