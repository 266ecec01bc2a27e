from .focused_traceback import FocusedTracebackFormatter
from .logger import RUN_LOGGER_NAME, DevTracebackStyle, get_logger, get_run_logger, init_logger, run_context

__all__ = [
    "RUN_LOGGER_NAME",
    "DevTracebackStyle",
    "FocusedTracebackFormatter",
    "get_logger",
    "get_run_logger",
    "init_logger",
    "run_context",
]
