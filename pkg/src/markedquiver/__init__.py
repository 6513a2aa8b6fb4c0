"""Computations with k-marked quivers over prime fields."""

from .exactlin import GF
from .quiver import Arrow, MarkedQuiver, Quiver
from .vectroid import (HalflinearSpec, Poset, Vectroid, disjoint_union, make_halflinear, make_linear,
                       make_nilpotent, make_poset_linearization, opposite)

__version__ = "0.1.0"

__all__ = [
    "GF", "Arrow", "MarkedQuiver", "Quiver", "HalflinearSpec", "Poset", "Vectroid",
    "disjoint_union", "make_halflinear", "make_linear", "make_nilpotent",
    "make_poset_linearization", "opposite",
]
