"""Embedding bounded-degree graded digraphs into tournaments.

Core objects live in :mod:`.digraph`; the embedding machinery is split into
:mod:`.median`, :mod:`.drc`, :mod:`.lll`, :mod:`.params` and
:mod:`.pipeline`; :mod:`.lower_bounds` and :mod:`.exact` provide the
constructions and ground-truth searches used to test it.
"""

from .digraph import (
    Digraph,
    GradedDigraph,
    Tournament,
    directed_path,
    infer_graded_partition,
    make_grid,
    make_hypercube,
    random_graded_digraph,
    random_tournament,
    transitive_digraph,
    transitive_tournament,
)
from .errors import GradedRamseyError

__version__ = "0.1.0"

__all__ = [
    "Digraph",
    "GradedDigraph",
    "GradedRamseyError",
    "Tournament",
    "directed_path",
    "infer_graded_partition",
    "make_grid",
    "make_hypercube",
    "random_graded_digraph",
    "random_tournament",
    "transitive_digraph",
    "transitive_tournament",
]
