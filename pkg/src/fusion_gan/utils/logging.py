"""
Logging setup for command-line entry points.

Library modules only call ``logging.getLogger(__name__)``; the CLI installs a
rich handler on the package logger once.
"""

from __future__ import annotations

import logging

from rich.console import Console
from rich.logging import RichHandler

PACKAGE_LOGGER = "fusion_gan"


def configure_logging(verbose: bool = False, *, console: Console | None = None) -> logging.Logger:
    """Attach a :class:`rich.logging.RichHandler` to the ``fusion_gan`` logger.

    Parameters
    ----------
    verbose : bool, default=False
        DEBUG level when true, INFO otherwise.
    console : rich.console.Console, optional
        Target console; defaults to stderr.

    Returns
    -------
    logging.Logger
        The configured package logger. Calling again replaces the handler.
    """
    logger = logging.getLogger(PACKAGE_LOGGER)
    for h in list(logger.handlers):
        if isinstance(h, RichHandler):
            logger.removeHandler(h)
    handler = RichHandler(
        console=console or Console(stderr=True),
        show_path=False,
        rich_tracebacks=False,
        markup=False,
    )
    handler.setFormatter(logging.Formatter("%(message)s", datefmt="[%X]"))
    logger.addHandler(handler)
    logger.setLevel(logging.DEBUG if verbose else logging.INFO)
    logger.propagate = False
    return logger
