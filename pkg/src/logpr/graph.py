"""Undirected weighted graphs and the linear operators built on them.

A :class:`Graph` stores a symmetric CSR adjacency matrix with strictly
positive weights and no self-loops.  Laziness is a property of the walk
operator, never of the stored data.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .errors import GraphError, ParseError

log = logging.getLogger(__name__)

WALK_KINDS = ("lazy", "standard", "normalized-adjacency")


def _frozen(a):
    a = np.asarray(a)
    a.flags.writeable = False
    return a


class Graph:
    """Immutable undirected weighted graph.

    Attributes
    ----------
    n : int
        Number of vertices.
    adjacency : scipy.sparse.csr_array
        Symmetric ``n x n`` adjacency with positive weights and empty diagonal.
    degrees : ndarray
        Weighted degree of every vertex.
    connected : bool
        Whether the graph has a single connected component.
    coords, labels : ndarray or None
        Optional per-vertex point coordinates and integer labels, kept for
        plotting and cluster checks.
    """

    def __init__(self, adjacency, *, coords=None, labels=None, dropped_self_loops=0):
        A = sp.csr_array(adjacency, dtype=float)
        A.sum_duplicates()
        A.sort_indices()
        n = A.shape[0]
        if A.shape != (n, n):
            raise GraphError(f"adjacency must be square, got {A.shape}")
        _frozen(A.data)
        _frozen(A.indices)
        _frozen(A.indptr)
        self._A = A
        self.n = n
        self.degrees = _frozen(np.asarray(A.sum(axis=0)).ravel())
        ncomp, comp = connected_components(A, directed=False)
        self.n_components = int(ncomp)
        self.components = _frozen(comp)
        self.connected = ncomp == 1
        self.coords = None if coords is None else _frozen(np.array(coords, dtype=float))
        self.labels = None if labels is None else _frozen(np.array(labels))
        self.dropped_self_loops = int(dropped_self_loops)

    @property
    def adjacency(self):
        return self._A

    @property
    def m(self):
        """Number of undirected edges."""
        return self._A.nnz // 2

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m}, connected={self.connected})"

    def edges(self):
        """Return ``(u, v, w)`` arrays for the edges with ``u < v``, sorted."""
        coo = sp.triu(self._A, k=1).tocoo()
        order = np.lexsort((coo.col, coo.row))
        return coo.row[order], coo.col[order], coo.data[order]

    def has_isolated_vertices(self):
        return bool(np.any(self.degrees <= 0))

    def is_regular(self, rtol=1e-12):
        return bool(np.allclose(self.degrees, self.degrees[0], rtol=rtol, atol=0))

    def check_symmetric(self):
        """Exact structural and numerical symmetry test."""
        diff = self._A - self._A.T
        return diff.nnz == 0 or not np.any(diff.data)

    def _require_degrees(self):
        if self.has_isolated_vertices():
            bad = int(np.flatnonzero(self.degrees <= 0)[0])
            raise GraphError(f"vertex {bad} is isolated (zero degree)")

    def walk_matrix(self, kind="lazy"):
        """Sparse matrix of the walk operator of the given kind."""
        self._require_degrees()
        A = self._A
        if kind == "standard":
            return sp.csr_array(A @ sp.diags_array(1.0 / self.degrees))
        if kind == "lazy":
            P = A @ sp.diags_array(1.0 / self.degrees)
            return sp.csr_array((sp.eye_array(self.n) + P) * 0.5)
        if kind == "normalized-adjacency":
            s = sp.diags_array(1.0 / np.sqrt(self.degrees))
            return sp.csr_array(s @ A @ s)
        raise ValueError(f"unknown walk kind {kind!r}; expected one of {WALK_KINDS}")

    def normalized_adjacency(self):
        return self.walk_matrix("normalized-adjacency")

    def laplacian(self, normalized=True):
        """``I - D^-1/2 A D^-1/2`` if normalized, else ``D - A``."""
        if normalized:
            return sp.csr_array(sp.eye_array(self.n) - self.normalized_adjacency())
        return sp.csr_array(sp.diags_array(self.degrees) - self._A)


@dataclass(frozen=True)
class WalkOperator:
    """A walk operator bound to a graph.

    ``lazy`` applies ``x -> (x + A D^-1 x) / 2``, ``standard`` applies
    ``x -> A D^-1 x`` and ``normalized-adjacency`` applies
    ``x -> D^-1/2 A D^-1/2 x``.
    """

    graph: Graph
    kind: str = "lazy"

    def __post_init__(self):
        if self.kind not in WALK_KINDS:
            raise ValueError(f"unknown walk kind {self.kind!r}")

    def matrix(self):
        return self.graph.walk_matrix(self.kind)

    def __call__(self, x):
        return apply_walk(self, x)


def build_graph(edge_list: Iterable[Sequence], n: int | None = None, *,
                coords=None, labels=None) -> Graph:
    """Build a :class:`Graph` from ``(u, v)`` or ``(u, v, w)`` tuples.

    Duplicate edges are merged by summing weights, so ``(0, 1)`` and
    ``(1, 0)`` together give one edge of weight 2.  Self-loops are dropped
    and counted in ``Graph.dropped_self_loops``.  Zero-weight entries are
    ignored.  When ``n`` is omitted it is one more than the largest id.
    """
    rows, cols, wts = [], [], []
    for e in edge_list:
        if len(e) == 2:
            u, v = e
            w = 1.0
        elif len(e) == 3:
            u, v, w = e
        else:
            raise GraphError(f"edge {e!r} must be (u, v) or (u, v, w)")
        rows.append(u)
        cols.append(v)
        wts.append(w)
    if not rows:
        raise GraphError("empty edge list")
    rows = np.asarray(rows)
    cols = np.asarray(cols)
    wts = np.asarray(wts, dtype=float)
    if not (np.issubdtype(rows.dtype, np.integer) and np.issubdtype(cols.dtype, np.integer)):
        raise GraphError("vertex ids must be integers")
    if n is None:
        n = int(max(rows.max(), cols.max())) + 1
    lo = min(rows.min(), cols.min())
    hi = max(rows.max(), cols.max())
    if lo < 0 or hi >= n:
        bad = lo if lo < 0 else hi
        raise GraphError(f"vertex id {bad} out of range [0, {n})")
    if np.any(wts < 0) or not np.all(np.isfinite(wts)):
        raise GraphError("edge weights must be finite and nonnegative")
    loops = rows == cols
    n_loops = int(loops.sum())
    if n_loops:
        log.warning("dropped %d self-loop(s)", n_loops)
    keep = ~loops & (wts > 0)
    r, c, w = rows[keep], cols[keep], wts[keep]
    A = sp.coo_array((np.concatenate([w, w]), (np.concatenate([r, c]), np.concatenate([c, r]))),
                     shape=(n, n)).tocsr()
    return Graph(A, coords=coords, labels=labels, dropped_self_loops=n_loops)


def apply_walk(op: WalkOperator, x) -> np.ndarray:
    """Apply a walk operator to a vector (or to each column of a matrix)."""
    g = op.graph
    x = np.asarray(x, dtype=float)
    if x.shape[0] != g.n:
        raise ValueError(f"vector has length {x.shape[0]}, graph has {g.n} vertices")
    g._require_degrees()
    d = g.degrees if x.ndim == 1 else g.degrees[:, None]
    if op.kind == "standard":
        return g.adjacency @ (x / d)
    if op.kind == "lazy":
        return 0.5 * (x + g.adjacency @ (x / d))
    if op.kind == "normalized-adjacency":
        s = np.sqrt(d)
        return (g.adjacency @ (x / s)) / s
    raise ValueError(f"unknown walk kind {op.kind!r}")


def normalized_adjacency_power(graph: Graph, seed: int, p: int) -> np.ndarray:
    """``(D^-1/2 A D^-1/2)^p e_seed`` by repeated application."""
    if p < 0:
        raise ValueError("p must be nonnegative")
    if not 0 <= seed < graph.n:
        raise GraphError(f"seed {seed} out of range")
    graph._require_degrees()
    x = np.zeros(graph.n)
    x[seed] = 1.0
    op = WalkOperator(graph, "normalized-adjacency")
    for _ in range(p):
        x = apply_walk(op, x)
    return x


def laplacian_quadratic_form(graph: Graph, x) -> float:
    """``x^T (I - D^-1/2 A D^-1/2) x``, clamped at zero against roundoff.

    Computed as the edge sum ``sum_{uv} w_uv (x_u/sqrt(d_u) - x_v/sqrt(d_v))^2``
    so the result is nonnegative by construction up to rounding.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (graph.n,):
        raise ValueError(f"vector has shape {x.shape}, expected ({graph.n},)")
    graph._require_degrees()
    y = x / np.sqrt(graph.degrees)
    u, v, w = graph.edges()
    val = float(np.sum(w * (y[u] - y[v]) ** 2))
    return max(val, 0.0)


def rayleigh_quotient(graph: Graph, x) -> float:
    x = np.asarray(x, dtype=float)
    return laplacian_quadratic_form(graph, x) / float(x @ x)


# --- edge-list text format -------------------------------------------------

def parse_edge_lines(lines: Iterable[str], index_base: int = 0, path=None):
    """Parse ``u v [w]`` lines into a list of 0-based ``(u, v, w)`` tuples."""
    if index_base not in (0, 1):
        raise ValueError("index_base must be 0 or 1")
    edges = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise ParseError(f"expected 'u v [w]', got {line!r}", path, lineno)
        try:
            u = int(parts[0]) - index_base
            v = int(parts[1]) - index_base
            w = float(parts[2]) if len(parts) == 3 else 1.0
        except ValueError as exc:
            raise ParseError(str(exc), path, lineno) from None
        if u < 0 or v < 0:
            raise ParseError(f"vertex id below index base {index_base}", path, lineno)
        edges.append((u, v, w))
    return edges


def read_edge_list(path, index_base: int = 0, n: int | None = None) -> Graph:
    with open(path) as fh:
        edges = parse_edge_lines(fh, index_base=index_base, path=path)
    return build_graph(edges, n=n)


def format_edge_list(graph: Graph, index_base: int = 0) -> str:
    """Edge-list text for ``graph``; weights always written, ``repr`` precision."""
    u, v, w = graph.edges()
    out = [f"# n={graph.n} m={graph.m}"]
    out.extend(f"{a + index_base} {b + index_base} {c!r}"
               for a, b, c in zip(u.tolist(), v.tolist(), w.tolist()))
    return "\n".join(out) + "\n"
