"""Multi-level transversal injection: exact rotation-state channels,
surface-code cost models, Monte Carlo rate estimation, and protocol
search."""

from . import costs, injection, level1mc, noise, optimizer, pipeline, qstate, teleport
from .errors import InfeasibleError, InternalError, MltiError, ValidationError

__all__ = [
    "costs",
    "injection",
    "level1mc",
    "noise",
    "optimizer",
    "pipeline",
    "qstate",
    "teleport",
    "InfeasibleError",
    "InternalError",
    "MltiError",
    "ValidationError",
]

__version__ = "0.1.0"
