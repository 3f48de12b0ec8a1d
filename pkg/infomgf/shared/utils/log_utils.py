import logging
import os
from typing import Optional

__all__ = ['LOG_FORMAT', 'get_logger', 'setup_logger']


LOG_FORMAT = '%(asctime)s [%(name)s:%(levelname)s] - %(message)s'


def setup_logger(
    logger_name: str,
    logging_level: Optional[str] = None,
) -> logging.Logger:
    logging_level = (
        logging_level or os.environ.get('INFOMGF_LOG_LEVEL') or 'INFO'
    ).upper()
    logger = logging.getLogger(logger_name)
    logger.setLevel(logging_level)
    if not any(
        isinstance(h, logging.StreamHandler) for h in logger.handlers
    ):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(handler)
    for handler in logger.handlers:
        handler.setLevel(logging_level)
    return logger


def get_logger(component: str) -> logging.Logger:
    """Package logger for a component, e.g. ``get_logger('trainer')``."""
    return setup_logger(f'infomgf.{component}')
