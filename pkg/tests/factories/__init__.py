"""Test factories for the hardness toolkit."""

from tests.factories.graphs import (
    RandomDigraphFactory,
    complete_graph,
    cycle_graph,
    path_graph,
    random_pairs,
)
from tests.factories.vectors import (
    NeighborListFactory,
    PlanarPointsFactory,
    VectorSetFactory,
    line_points,
)

__all__ = [
    # Vectors
    "VectorSetFactory",
    "PlanarPointsFactory",
    "NeighborListFactory",
    "line_points",
    # Graphs
    "RandomDigraphFactory",
    "path_graph",
    "cycle_graph",
    "complete_graph",
    "random_pairs",
]
