"""Log-PageRank embeddings: PageRank-based approximations of Laplacian eigenvectors."""
__version__ = "0.1.0"

from .errors import DisconnectedGraphError, GraphError, NumericalError, ParseError
from .graph import Graph, WalkOperator, build_graph, read_edge_list
from .generators import GeneratorSpec, chain, generate_connected, knn_geometric, sbm
from .pagerank import (PageRankConfig, PageRankSolver, PageRankVector, chain_closed_form,
                       pagerank, prepare)
from .embedding import EmbeddingConfig, EmbeddingMatrix, log_pagerank_embedding
from .spectral import SpectralBasis, lazy_walk_eigenpairs, spectral_embedding
from .evaluation import (approximation_error, expectation_oracle_ar1, reproduce_table1,
                         subspace_angle, variance_study)
from .hypergraph import (Hypergraph, HypergraphDiffusionConfig, hypergraph_log_pr_embedding,
                         load_hypergraph)

__all__ = [
    "DisconnectedGraphError", "GraphError", "NumericalError", "ParseError",
    "Graph", "WalkOperator", "build_graph", "read_edge_list",
    "GeneratorSpec", "chain", "generate_connected", "knn_geometric", "sbm",
    "PageRankConfig", "PageRankSolver", "PageRankVector", "chain_closed_form", "pagerank",
    "prepare", "EmbeddingConfig", "EmbeddingMatrix", "log_pagerank_embedding",
    "SpectralBasis", "lazy_walk_eigenpairs", "spectral_embedding",
    "approximation_error", "expectation_oracle_ar1", "reproduce_table1", "subspace_angle",
    "variance_study", "Hypergraph", "HypergraphDiffusionConfig",
    "hypergraph_log_pr_embedding", "load_hypergraph",
]
