"""Synthetic graph families and graph file loaders.

All random generators draw from numpy's PCG64 bit generator seeded with the
caller's ``rng_seed``, so outputs are reproducible byte for byte.
"""
from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass

import numpy as np
import scipy.sparse as sp
from scipy.spatial import cKDTree

from .errors import GraphError, ParseError
from .graph import Graph, build_graph, parse_edge_lines

log = logging.getLogger(__name__)

FAMILIES = ("chain", "knn-geometric", "sbm")


def make_rng(rng_seed):
    return np.random.Generator(np.random.PCG64(rng_seed))


@dataclass(frozen=True)
class GeneratorSpec:
    """Parameters of one synthetic graph.

    ``k`` is the neighbour count for ``knn-geometric`` and the number of
    blocks for ``sbm``; ``n`` is the vertex count, except for ``sbm`` where it
    is the block size.
    """

    family: str
    n: int
    k: int = 0
    p: float = 0.0
    q: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.n < 2:
            raise ValueError("n must be at least 2")
        for name in ("p", "q"):
            val = getattr(self, name)
            if not 0.0 <= val <= 1.0:
                raise ValueError(f"{name}={val} is not a probability")

    def build(self) -> Graph:
        if self.family == "chain":
            return chain(self.n)
        if self.family == "knn-geometric":
            return knn_geometric(self.n, self.k, self.rng_seed)
        return sbm(self.n, self.k, self.p, self.q, self.rng_seed)

    def to_dict(self):
        return asdict(self)


def chain(n: int) -> Graph:
    """Path graph ``0 - 1 - ... - n-1`` with unit weights."""
    if n <= 2:
        raise GraphError(f"chain needs n > 2, got {n}")
    i = np.arange(n - 1)
    return build_graph(zip(i.tolist(), (i + 1).tolist()), n=n)


def knn_geometric(n: int, k: int, rng_seed: int = 0) -> Graph:
    """``n`` uniform points in the unit square, each joined to its ``k``
    nearest neighbours; the union of those choices is the edge set.

    Distance ties are broken toward the lower vertex index.  Exactly
    coincident points get a tiny deterministic jitter.
    """
    if not n > k >= 1:
        raise GraphError(f"knn_geometric needs n > k >= 1, got n={n}, k={k}")
    rng = make_rng(rng_seed)
    pts = rng.random((n, 2))
    _, first = np.unique(pts, axis=0, return_index=True)
    if first.size < n:
        dup = np.setdiff1d(np.arange(n), first)
        pts[dup] += rng.uniform(-1e-12, 1e-12, size=(dup.size, 2))
    # two spare candidates so a tie at the k-th distance can still be resolved by index
    m = min(n, k + 3)
    dist, idx = cKDTree(pts).query(pts, m)
    rows, cols = [], []
    for v in range(n):
        cand = [(d, j) for d, j in zip(dist[v], idx[v]) if j != v]
        cand.sort()
        rows.extend([v] * k)
        cols.extend(j for _, j in cand[:k])
    A = sp.coo_array((np.ones(len(rows)), (rows, cols)), shape=(n, n)).tocsr()
    A = ((A + A.T) > 0).astype(float)
    return Graph(A, coords=pts)


def sbm(n_per_block: int, blocks: int, p_within: float, q_between: float,
        rng_seed: int = 0) -> Graph:
    """Planted-partition stochastic block model.

    ``blocks`` groups of ``n_per_block`` vertices; each pair inside a group is
    an edge with probability ``p_within`` and each pair across groups with
    probability ``q_between``.  The paper-style label ``sbm(50,60,p,q)`` means
    60 blocks of 50 vertices.  Disconnected outputs are returned as-is with
    ``connected`` False.
    """
    for val in (p_within, q_between):
        if not 0.0 <= val <= 1.0:
            raise GraphError(f"{val} is not a probability")
    if n_per_block < 1 or blocks < 1:
        raise GraphError("n_per_block and blocks must be positive")
    N = n_per_block * blocks
    labels = np.repeat(np.arange(blocks), n_per_block)
    rng = make_rng(rng_seed)
    rows, cols = [], []
    for i in range(N - 1):
        j = np.arange(i + 1, N)
        prob = np.where(labels[j] == labels[i], p_within, q_between)
        hit = j[rng.random(j.size) < prob]
        rows.append(np.full(hit.size, i))
        cols.append(hit)
    r = np.concatenate(rows) if rows else np.empty(0, int)
    c = np.concatenate(cols) if cols else np.empty(0, int)
    A = sp.coo_array((np.ones(2 * r.size), (np.concatenate([r, c]), np.concatenate([c, r]))),
                     shape=(N, N)).tocsr()
    g = Graph(A, labels=labels)
    if not g.connected:
        log.warning("sbm(%d,%d,%g,%g) seed %d is disconnected (%d components)",
                    n_per_block, blocks, p_within, q_between, rng_seed, g.n_components)
    return g


def generate_connected(spec: GeneratorSpec, max_retries: int = 20):
    """Build ``spec``, bumping the rng seed until the graph is connected.

    Returns ``(graph, spec_used)``.
    """
    cur = spec
    for _ in range(max_retries + 1):
        g = cur.build()
        if g.connected:
            return g, cur
        if cur.family == "chain":
            break
        cur = GeneratorSpec(cur.family, cur.n, cur.k, cur.p, cur.q, cur.rng_seed + 1)
    raise GraphError(f"no connected graph for {spec} after {max_retries} retries")


# --- loaders ----------------------------------------------------------------

def load_edge_list(path, index_base: int = 0) -> Graph:
    """Load a ``u v [w]`` edge-list file."""
    with open(path) as fh:
        edges = parse_edge_lines(fh, index_base=index_base, path=path)
    return build_graph(edges)


def load_point_graph(path, index_base: int = 0) -> Graph:
    """Load an edge list followed by a coordinates section.

    The file holds edge lines, then a line ``[coordinates]``, then one
    ``vertex x y`` line per vertex.
    """
    edge_lines, coord_rows = [], []
    section = "edges"
    with open(path) as fh:
        lines = fh.read().splitlines()
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if line.lower() in ("[coordinates]", "[edges]"):
            section = line.lower()[1:-1]
            edge_lines.append("")
            continue
        if section == "edges":
            edge_lines.append(raw)
            continue
        edge_lines.append("")
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(f"expected 'vertex x y', got {line!r}", path, lineno)
        try:
            coord_rows.append((int(parts[0]) - index_base, float(parts[1]), float(parts[2])))
        except ValueError as exc:
            raise ParseError(str(exc), path, lineno) from None
    edges = parse_edge_lines(edge_lines, index_base=index_base, path=path)
    n = max(max(u, v) for u, v, _ in edges) + 1
    coords = None
    if coord_rows:
        n = max(n, max(r[0] for r in coord_rows) + 1)
        coords = np.full((n, 2), np.nan)
        for v, x, y in coord_rows:
            coords[v] = (x, y)
        if np.isnan(coords).any():
            raise ParseError("coordinates section does not cover every vertex", path)
    return build_graph(edges, n=n, coords=coords)


def write_sidecar(path, spec: GeneratorSpec | None, graph: Graph, **extra):
    """JSON sidecar with generator parameters, coordinates and labels."""
    data = {"n": graph.n, "m": graph.m, "connected": graph.connected}
    if spec is not None:
        data["generator"] = spec.to_dict()
    if graph.coords is not None:
        data["coordinates"] = graph.coords.tolist()
    if graph.labels is not None:
        data["labels"] = graph.labels.tolist()
    data.update(extra)
    with open(path, "w") as fh:
        json.dump(data, fh, indent=1, sort_keys=True)
        fh.write("\n")
