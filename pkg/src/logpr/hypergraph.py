"""Hypergraphs and log-PageRank embeddings built on a hypergraph diffusion.

The diffusion primitive maps a seed vertex to a probability vector over the
original vertices.  The shipped primitives run graph PageRank on the clique
or the star expansion.  ``kappa``, ``gamma`` and ``rho`` are carried in the
config for provenance only; the expansion primitives do not use them.

Star-expansion identity: with the standard walk on the star expansion of a
graph (every hyperedge of size 2), the restricted, renormalized PageRank
vector at ``alpha`` equals lazy-walk graph PageRank at ``alpha ** 2``,
because two star steps are one lazy step and only even-length walks end on
an original vertex.
"""
from __future__ import annotations

import csv
import logging
import re
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .embedding import EmbeddingConfig, EmbeddingMatrix, embed_from_primitive
from .errors import DisconnectedGraphError, GraphError, ParseError
from .generators import make_rng
from .graph import Graph
from .pagerank import PageRankConfig, PageRankVector, prepare

log = logging.getLogger(__name__)

PRIMITIVES = ("clique-expansion", "star-expansion")


class Hypergraph:
    """Vertices ``0..n-1`` and a list of hyperedges (each a sorted tuple)."""

    def __init__(self, n: int, hyperedges, labels=None):
        edges = []
        for e in hyperedges:
            e = tuple(sorted(set(int(v) for v in e)))
            if len(e) < 2:
                raise GraphError(f"hyperedge {e} has fewer than two distinct vertices")
            if e[0] < 0 or e[-1] >= n:
                raise GraphError(f"hyperedge {e} has a vertex outside [0, {n})")
            edges.append(e)
        self.n = int(n)
        self.hyperedges = edges
        self.labels = None if labels is None else np.asarray(labels)
        self.dropped = 0

    def __repr__(self):
        return f"Hypergraph(n={self.n}, hyperedges={len(self.hyperedges)})"

    def incidence(self):
        """``n x |E|`` vertex-hyperedge incidence matrix."""
        rows = [v for e in self.hyperedges for v in e]
        cols = [j for j, e in enumerate(self.hyperedges) for _ in e]
        return sp.csr_array((np.ones(len(rows)), (rows, cols)),
                            shape=(self.n, len(self.hyperedges)))


@dataclass(frozen=True)
class HypergraphDiffusionConfig:
    primitive: str = "clique-expansion"
    alpha: float = 0.99
    walk_kind: str = "lazy"
    kappa: float = 0.000025
    gamma: float = 1.0
    rho: float = 0.5

    def __post_init__(self):
        if self.primitive not in PRIMITIVES:
            raise ValueError(f"primitive must be one of {PRIMITIVES}")
        if self.kappa < 0 or self.gamma <= 0:
            raise ValueError("need kappa >= 0 and gamma > 0")


_SPLIT = re.compile(r"[,\s]+")


def load_hypergraph(path, index_base: int = 0, labels_path=None, n: int | None = None):
    """One hyperedge per line, vertex ids separated by whitespace or commas.

    Lines with a single distinct vertex are dropped; the count is stored in
    ``Hypergraph.dropped``.  An optional label file holds ``vertex,label``
    rows (same index base).
    """
    edges, dropped = [], 0
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                e = {int(t) - index_base for t in _SPLIT.split(line) if t}
            except ValueError as exc:
                raise ParseError(str(exc), path, lineno) from None
            if min(e) < 0:
                raise ParseError(f"vertex id below index base {index_base}", path, lineno)
            if len(e) < 2:
                dropped += 1
                continue
            edges.append(e)
    if dropped:
        log.warning("dropped %d singleton hyperedge(s) from %s", dropped, path)
    if not edges:
        raise ParseError("no hyperedges with two or more vertices", path)
    labels = None
    top = max(max(e) for e in edges) + 1
    if labels_path is not None:
        lab = {}
        with open(labels_path, newline="") as fh:
            for lineno, row in enumerate(csv.reader(fh), 1):
                if not row or row[0].startswith("#"):
                    continue
                if len(row) < 2:
                    raise ParseError("expected 'vertex,label'", labels_path, lineno)
                try:
                    lab[int(row[0]) - index_base] = row[1].strip()
                except ValueError:
                    if lineno == 1:
                        continue  # header
                    raise ParseError(f"bad vertex id {row[0]!r}", labels_path, lineno) from None
        top = max(top, max(lab) + 1)
    n = n if n is not None else top
    if labels_path is not None:
        labels = np.array([lab.get(v, "") for v in range(n)], dtype=object)
    H = Hypergraph(n, edges, labels)
    H.dropped = dropped
    return H


def clique_expand(H: Hypergraph) -> Graph:
    """Each hyperedge ``e`` adds weight ``1 / (|e| - 1)`` to every pair in ``e``."""
    rows, cols, wts = [], [], []
    for e in H.hyperedges:
        w = 1.0 / (len(e) - 1)
        for a in range(len(e)):
            for b in range(a + 1, len(e)):
                rows.append(e[a])
                cols.append(e[b])
                wts.append(w)
    r, c, w = np.array(rows), np.array(cols), np.array(wts)
    A = sp.coo_array((np.concatenate([w, w]), (np.concatenate([r, c]), np.concatenate([c, r]))),
                     shape=(H.n, H.n)).tocsr()
    return Graph(A, labels=H.labels)


def star_expand(H: Hypergraph) -> Graph:
    """Bipartite graph: vertices ``0..n-1`` then one hub per hyperedge."""
    B = H.incidence()
    m = B.shape[1]
    A = sp.block_array([[None, B], [B.T, None]], format="csr")
    A.resize((H.n + m, H.n + m))
    return Graph(A)


class ExpansionPageRank:
    """Seed -> PageRank vector on the original vertices, via an expansion.

    Prepares the expansion and its factorization once; calls are read-only.
    """

    def __init__(self, H: Hypergraph, config: HypergraphDiffusionConfig):
        self.H = H
        self.config = config
        self.graph = clique_expand(H) if config.primitive == "clique-expansion" else star_expand(H)
        if not self.graph.connected:
            raise DisconnectedGraphError(f"{config.primitive} of the hypergraph is disconnected")
        self.solver = prepare(self.graph, PageRankConfig(config.alpha, config.walk_kind))

    def __call__(self, seed: int) -> np.ndarray:
        return self.vector(seed).values

    def vector(self, seed: int) -> PageRankVector:
        if not 0 <= seed < self.H.n:
            raise GraphError(f"seed {seed} out of range")
        pr = self.solver.solve_seed(seed)
        x = pr.values[: self.H.n]
        if self.config.primitive == "star-expansion":
            x = x / x.sum()
        return PageRankVector(x, self.config.alpha, seed, pr.residual)


def hypergraph_pagerank(H: Hypergraph, config: HypergraphDiffusionConfig, seed: int):
    return ExpansionPageRank(H, config).vector(seed)


def hypergraph_log_pr_embedding(H: Hypergraph, config: EmbeddingConfig | None = None,
                                diffusion: HypergraphDiffusionConfig | None = None,
                                primitive=None) -> EmbeddingMatrix:
    """Log-PageRank embedding of a hypergraph; rows are original vertices.

    ``primitive`` overrides the expansion-based diffusion with any callable
    ``seed -> probability vector of length H.n``.
    """
    config = config or EmbeddingConfig()
    if diffusion is None:
        diffusion = HypergraphDiffusionConfig(alpha=config.alpha, walk_kind=config.walk_kind)
    column = primitive or ExpansionPageRank(H, diffusion)
    return embed_from_primitive(H.n, column, config)


def planted_hypergraph(blocks: int = 3, block_size: int = 30, edges_within: int = 50,
                       edges_across: int = 5, edge_size: int = 4, rng_seed: int = 0):
    """Hypergraph with dense hyperedge blocks and a few crossing hyperedges.

    ``edges_within`` hyperedges are drawn inside every block, plus
    ``edges_across`` hyperedges in total that each span at least two blocks.
    Vertex labels are block ids.
    """
    rng = make_rng(rng_seed)
    n = blocks * block_size
    labels = np.repeat(np.arange(blocks), block_size)
    edges = []
    for b in range(blocks):
        members = np.arange(b * block_size, (b + 1) * block_size)
        for _ in range(edges_within):
            edges.append(rng.choice(members, edge_size, replace=False).tolist())
    for _ in range(edges_across):
        while True:
            e = rng.choice(n, edge_size, replace=False)
            if len(set(labels[e].tolist())) > 1:
                break
        edges.append(e.tolist())
    return Hypergraph(n, edges, labels)
