"""Toolkit for checking hardness-of-approximation constructions."""
from __future__ import annotations

from pathlib import Path

__version__ = "0.1.0"

FIXTURES = Path(__file__).resolve().parent / "fixtures"
