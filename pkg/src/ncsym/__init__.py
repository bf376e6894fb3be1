"""Exact symmetry computations for Newton-Cartan spacetimes."""

from __future__ import annotations

from .expr import Context, Expr, chart
from .field import QI
from .geometry import (GeometryError, NCSpacetime, connection, flat_spacetime, make_spacetime,
                       make_vomega_spacetime, ricci, riemann, spacetime_from_config)
from .parse import ParseError

__all__ = [
    "Context", "Expr", "chart", "QI", "GeometryError", "NCSpacetime", "connection", "flat_spacetime",
    "make_spacetime", "make_vomega_spacetime", "ricci", "riemann", "spacetime_from_config", "ParseError",
]
__version__ = "0.1.0"
