"""Frontier Lab - Matsuoka distribution and semiparametric production frontier estimation."""

__version__ = "0.1.0"
