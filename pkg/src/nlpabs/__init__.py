"""Abstract interpretation of normal logic programs over a program graph."""

from .fixpoint import solve
from .graph import build_graph
from .groundness import GroundnessDomain
from .semantics import DIAMOND, FLAT, build_system, query_thetas
from .syntax import parse_program

__all__ = [
    "DIAMOND", "FLAT", "GroundnessDomain", "build_graph", "build_system",
    "parse_program", "query_thetas", "solve",
]
__version__ = "0.1.0"
