"""CLI interface for tracesig."""

from .cli import main, run

__all__ = ["main", "run"]
