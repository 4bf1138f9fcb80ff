"""Stochastic Kantorovich operators, fractional calculus and mollifier experiments."""

from ._fraclab import *  # noqa: F401,F403
from ._fraclab import ConfigError, KernelParams, run_experiment

__all__ = [name for name in dir() if not name.startswith("_")]
