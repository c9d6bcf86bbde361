"""
工具函数模块
"""

from .logging import LogContext, get_logger, log_performance, setup_logging
from .validation import (
    validate_grid_spec,
    validate_scheme_options,
    validate_step_size,
    validate_tau_spec,
)

__all__ = [
    "setup_logging",
    "get_logger",
    "LogContext",
    "log_performance",
    "validate_step_size",
    "validate_grid_spec",
    "validate_tau_spec",
    "validate_scheme_options",
]
