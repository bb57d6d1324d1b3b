"""
Core module for subspace-witness

Configuration, exceptions, logging, scenario validation and the scenario graph.
"""

from .config import Config, config
from .exceptions import WitnessException
from .logging_config import get_logger

__all__ = [
    "Config",
    "config",
    "WitnessException",
    "get_logger",
]
