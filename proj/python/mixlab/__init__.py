"""Stochastic mixability toolkit."""

from ._mixlab import *  # noqa: F401,F403
from ._mixlab import (
    ConfigError,
    NonUniqueMinimizerError,
    PreconditionError,
    UnboundedBernsteinError,
)

__all__ = [name for name in dir() if not name.startswith("_")]
