"""
Logger factory.

Every component owns a named logger with a single stream handler.
"""

import logging

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def create_logger(name: str) -> logging.Logger:
    """Create (or fetch) a named logger with the shared format."""
    from src.common.settings import get_settings

    logger = logging.getLogger(name)
    if not logger.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(handler)
        logger.setLevel(get_settings().log_level.upper())
        logger.propagate = False
    return logger
