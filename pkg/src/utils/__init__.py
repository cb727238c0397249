"""Utility modules."""
from .config_loader import ConfigLoader, get_config
from .logger import setup_logger
from .rng import child_rng, partial_fisher_yates

__all__ = ['ConfigLoader', 'get_config', 'setup_logger', 'child_rng', 'partial_fisher_yates']
