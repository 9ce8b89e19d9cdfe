"""
Shared helpers: logging setup and PNG IO.
"""

from .imageio import compose_grid, list_pngs, load_png, save_png, to_bytes
from .logging import configure_logging

__all__ = ["configure_logging", "compose_grid", "list_pngs", "load_png", "save_png", "to_bytes"]
