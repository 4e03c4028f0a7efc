import logging
import sys


def setup_logging(level=logging.INFO):
    """Configure package logging to stderr with a consistent format."""
    logger = logging.getLogger("torus_link")
    handler = logging.StreamHandler(sys.stderr)
    handler.setLevel(level)

    formatter = logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s")
    handler.setFormatter(formatter)

    # stdout carries the report, so never attach a second handler there
    if logger.handlers:
        logger.handlers.clear()

    logger.addHandler(handler)
    logger.setLevel(level)
    return logger
