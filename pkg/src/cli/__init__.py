"""Command-line interface for Frontier Lab."""

from .app import build_parser, main

__all__ = ["build_parser", "main"]
