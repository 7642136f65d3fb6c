"""Entanglement of random state vectors: exact bipartite measures, exact
moment-based predictions for mean tangle powers, and multifractal scaling
experiments."""

from . import ensembles, entanglement, experiments, oracle, partitions, statistics, theory

__all__ = [
    "ensembles",
    "entanglement",
    "experiments",
    "oracle",
    "partitions",
    "statistics",
    "theory",
]

__version__ = "0.1.0"
