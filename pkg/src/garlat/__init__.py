"""Lattices with ℤ-action, Garside germs and weak modularity checks."""

from __future__ import annotations

__version__ = "0.1.0"
