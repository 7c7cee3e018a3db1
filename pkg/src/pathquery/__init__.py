"""Reconstruct hidden directed graphs from path queries.

A path query ``Q(u, v)`` answers whether the hidden graph has a directed
path from ``u`` to ``v``. This package provides counted query oracles,
learners for strongly connected components and for bounded-degree rooted
trees and almost-trees, generators for the hard instance families, and a
benchmark harness that records query counts per phase.
"""

from .almost_tree import (
    LayeredGraph,
    Reconstruction,
    SearchState,
    TopVertexWitness,
    find_cross_edge_specific,
    find_cross_edges,
    find_cross_edges_recursive,
    find_parent,
    find_root,
    reconstruct_layered_graph,
    reconstruct_rooted_graph,
    search,
    split_graph,
)
from .errors import AlmostTreeRejected, GenerationInfeasible, PromiseViolation
from .generators import (
    GenSpec,
    caterpillar,
    gen_almost_tree,
    gen_caterpillar,
    gen_hybrid,
    gen_kary,
    gen_scc,
    gen_tree,
    generate,
)
from .graph import (
    AlmostTreeCertificate,
    DirectedGraph,
    SccPartition,
    closure_matrix,
    reaches,
    strongly_connected_components,
    transitive_reduction,
    validate_almost_tree,
)
from .oracle import QueryOracle, RelativeView
from .scc import learn_condensation, learn_partition, learn_scc

__version__ = "0.1.0"
