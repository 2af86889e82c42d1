"""Dimer quivers, cyclic contraction, monomial impressions and NCCR certification."""
from __future__ import annotations

__version__ = "0.1.0"
