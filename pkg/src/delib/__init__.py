"""Deliberative coalition formation in metric spaces.

Agents and proposals live in a hypercube, a rational Euclidean space, or
the 2D grid; agents approve proposals strictly closer to them than the
status quo at the origin.  The package computes popular proposals by
several independent routes, simulates k-compromise coalition dynamics with
exact potential accounting, and generates the hard-instance families and
reductions that witness the model's worst cases.
"""

from .space import (
    Agent,
    DeliberationSpace,
    Kind,
    Point,
    approves,
    distance,
    distinct_positions,
    euclidean_point,
    grid_point,
    hypercube_point,
    score,
)

__all__ = [
    "Agent",
    "DeliberationSpace",
    "Kind",
    "Point",
    "approves",
    "distance",
    "distinct_positions",
    "euclidean_point",
    "grid_point",
    "hypercube_point",
    "score",
]

__version__ = "0.1.0"
