"""Exact tools for Kochen-Specker noncontextuality tests on hypergraphs."""
from .colorability import NormalizationMode, find_coloring, prove_uncolourable
from .document import bundled, load_document
from .hypergraph import KSHypergraph, ceg18, quotient_by_equivalences, single_context
from .polytope import bound_by_selection_oracle, enumerate_vertices, evaluate_A, noncontextual_bound

__all__ = [
    "KSHypergraph",
    "NormalizationMode",
    "bound_by_selection_oracle",
    "bundled",
    "ceg18",
    "enumerate_vertices",
    "evaluate_A",
    "find_coloring",
    "load_document",
    "noncontextual_bound",
    "prove_uncolourable",
    "quotient_by_equivalences",
    "single_context",
]
