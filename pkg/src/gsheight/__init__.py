"""Exact pm-graph invariants, Siegel theta numerics, superelliptic period
matrices, and height bookkeeping for canonical Gross-Schoen cycles."""

from .pmgraph import DeltaVector, Edge, PmGraph, Vertex, load_graph, validate

__all__ = [
    "DeltaVector",
    "Edge",
    "PmGraph",
    "Vertex",
    "load_graph",
    "validate",
]
