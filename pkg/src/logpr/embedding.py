"""Log-PageRank embeddings.

Pipeline: sample seed vertices, solve one seeded PageRank vector per seed,
take the elementwise natural log (after replacing numerical zeros), and keep
left singular vectors 2..k+1 of the resulting matrix.  Natural log is used
throughout; any other base only rescales the matrix, which leaves the left
singular vectors unchanged.
"""
from __future__ import annotations

import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
import scipy.linalg as la

from .errors import NumericalError
from .graph import Graph
from .pagerank import PageRankConfig, PageRankSolver, prepare

log = logging.getLogger(__name__)


class DegenerateSpectrumWarning(RuntimeWarning):
    pass


class ZeroReplacementWarning(RuntimeWarning):
    pass


def default_samples(n: int, k: int) -> int:
    """``ceil((10 + k) ln n)``, capped at ``n``."""
    return min(n, max(k + 1, int(math.ceil((10 + k) * math.log(n)))))


@dataclass(frozen=True)
class EmbeddingConfig:
    k: int = 2
    s: int | None = None
    alpha: float = 0.99
    transform: str = "log"
    rng_seed: int = 0
    zero_replacement_factor: float = 0.1
    walk_kind: str = "lazy"
    solver: str = "direct"
    replace: bool = False
    normalize_columns: bool = False
    svd: str = "dense"
    workers: int = 1

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.s is not None and self.s < self.k + 1:
            raise ValueError(f"need s >= k + 1, got s={self.s}, k={self.k}")
        if self.transform not in ("log", "identity"):
            raise ValueError(f"transform must be 'log' or 'identity', got {self.transform!r}")
        if not 0.0 < self.zero_replacement_factor < 1.0:
            raise ValueError("zero_replacement_factor must lie in (0, 1)")
        if self.svd not in ("dense", "randomized"):
            raise ValueError(f"svd must be 'dense' or 'randomized', got {self.svd!r}")

    def samples_for(self, n):
        return self.s if self.s is not None else default_samples(n, self.k)

    def pagerank_config(self):
        return PageRankConfig(alpha=self.alpha, walk_kind=self.walk_kind, solver=self.solver)

    def with_(self, **kw):
        return replace(self, **kw)


@dataclass
class SampleMatrix:
    """``n x s`` matrix of PageRank columns (or their logs) plus seed ids."""

    columns: np.ndarray
    seeds: np.ndarray
    replacements: int = 0

    @property
    def shape(self):
        return self.columns.shape


@dataclass
class EmbeddingMatrix:
    Z: np.ndarray
    singular_values: np.ndarray
    seeds: np.ndarray
    config: EmbeddingConfig | None = None
    replacements: int = 0
    rank: int | None = None
    U: np.ndarray | None = field(default=None, repr=False)

    @property
    def k(self):
        return self.Z.shape[1]

    def vector(self, j):
        """``u_j`` in 1-based singular-vector numbering (``u_2`` is ``Z[:, 0]``)."""
        if j == 1 and self.U is not None:
            return self.U[:, 0]
        return self.Z[:, j - 2]


def normalize_signs(M):
    """Flip columns so each column's largest-magnitude entry is positive.

    Ties go to the lowest index.  Returns a new array.
    """
    M = np.array(M, dtype=float, copy=True)
    if M.ndim == 1:
        return M if M[np.argmax(np.abs(M))] >= 0 else -M
    idx = np.argmax(np.abs(M), axis=0)
    signs = np.where(M[idx, np.arange(M.shape[1])] < 0, -1.0, 1.0)
    return M * signs


def sample_seeds(n: int, s: int, rng_seed: int = 0, replace: bool = False) -> np.ndarray:
    """``s`` vertices drawn uniformly, without replacement unless ``replace``."""
    if s < 1:
        raise ValueError("s must be positive")
    if s > n and not replace:
        raise ValueError(f"cannot draw {s} distinct seeds from {n} vertices")
    rng = np.random.Generator(np.random.PCG64(rng_seed))
    return rng.choice(n, size=s, replace=replace)


def build_sample_matrix(graph_or_n, solver, seeds, workers: int = 1) -> SampleMatrix:
    """Stack seeded PageRank vectors as columns, in seed order.

    ``solver`` is a :class:`PageRankSolver` or any callable mapping a seed to
    a stochastic vector (the hypergraph module plugs in here).  With
    ``workers > 1`` columns are solved on a thread pool; placement is by
    index so the result does not depend on completion order.
    """
    seeds = np.asarray(seeds, dtype=int)
    n = graph_or_n.n if isinstance(graph_or_n, Graph) else int(graph_or_n)
    if isinstance(solver, PageRankSolver) and workers <= 1:
        X = solver.solve_seeds(seeds)
    else:
        column: Callable = (lambda u: solver.solve_seed(u).values) \
            if isinstance(solver, PageRankSolver) else solver
        X = np.empty((n, seeds.size))
        if workers > 1:
            with ThreadPoolExecutor(workers) as pool:
                for j, col in enumerate(pool.map(column, seeds.tolist())):
                    X[:, j] = col
        else:
            for j, u in enumerate(seeds.tolist()):
                X[:, j] = column(u)
    return SampleMatrix(X, seeds)


def log_transform(X: SampleMatrix, zero_replacement_factor: float = 0.1) -> SampleMatrix:
    """Elementwise natural log, replacing zeros by ``factor * smallest positive``."""
    cols = np.asarray(X.columns, dtype=float)
    if np.any(cols < 0):
        raise ValueError("sample matrix has negative entries")
    dead = ~np.any(cols > 0, axis=0)
    if np.any(dead):
        j = int(np.flatnonzero(dead)[0])
        raise NumericalError(f"column {j} (seed {int(X.seeds[j])}) is all zero; "
                             "disconnected graph or solver failure")
    zeros = cols <= 0
    n_zero = int(zeros.sum())
    if n_zero:
        floor = zero_replacement_factor * cols[~zeros].min()
        cols = np.where(zeros, floor, cols)
        warnings.warn(f"replaced {n_zero} zero PageRank entries before the log",
                      ZeroReplacementWarning, stacklevel=2)
    return SampleMatrix(np.log(cols), X.seeds, X.replacements + n_zero)


def _randomized_svd(Y, rank, rng_seed):
    from sklearn.utils.extmath import randomized_svd
    return randomized_svd(Y, n_components=rank, n_oversamples=20, n_iter=7,
                          random_state=rng_seed)


def svd_embedding(Y, k: int, method: str = "dense", rng_seed: int = 0) -> EmbeddingMatrix:
    """Left singular vectors ``2..k+1`` of ``Y``, sign-normalized."""
    seeds = np.empty(0, int)
    replacements = 0
    if isinstance(Y, SampleMatrix):
        seeds, replacements, Y = Y.seeds, Y.replacements, Y.columns
    Y = np.asarray(Y, dtype=float)
    n, s = Y.shape
    if k + 1 > min(n, s):
        raise ValueError(f"need k + 1 <= min(n, s); got k={k}, shape={Y.shape}")
    if method == "dense":
        U, S, _ = la.svd(Y, full_matrices=False)
    elif method == "randomized":
        U, S, _ = _randomized_svd(Y, k + 1, rng_seed)
    else:
        raise ValueError(f"unknown svd method {method!r}")
    tol = max(n, s) * np.finfo(float).eps * (S[0] if S.size else 0.0)
    rank = int(np.sum(S > tol))
    if rank < k + 1:
        warnings.warn(f"sample matrix has numerical rank {rank} < k + 1 = {k + 1}; "
                      f"embedding columns {rank}..{k} are not determined",
                      DegenerateSpectrumWarning, stacklevel=2)
    U = normalize_signs(U[:, : k + 1])
    return EmbeddingMatrix(U[:, 1: k + 1], S, seeds, replacements=replacements,
                           rank=rank, U=U)


def embed_from_primitive(n: int, column, config: EmbeddingConfig) -> EmbeddingMatrix:
    """Run the embedding pipeline with an arbitrary seed -> vector primitive."""
    s = config.samples_for(n)
    seeds = sample_seeds(n, s, config.rng_seed, config.replace)
    X = build_sample_matrix(n, column, seeds, workers=config.workers)
    return _finish(X, config)


def _finish(X: SampleMatrix, config: EmbeddingConfig) -> EmbeddingMatrix:
    Y = log_transform(X, config.zero_replacement_factor) if config.transform == "log" else X
    if config.normalize_columns:
        Y = SampleMatrix(Y.columns / np.linalg.norm(Y.columns, axis=0), Y.seeds, Y.replacements)
    emb = svd_embedding(Y, config.k, config.svd, config.rng_seed)
    emb.config = config
    if emb.replacements and config.alpha >= 0.999:
        log.warning("%d zero entries replaced at alpha=%g", emb.replacements, config.alpha)
    return emb


def log_pagerank_embedding(graph: Graph, config: EmbeddingConfig | None = None,
                           solver: PageRankSolver | None = None) -> EmbeddingMatrix:
    """Full log-PageRank embedding of a connected graph.

    A prepared ``solver`` may be passed to amortize the factorization across
    repeated runs; it must match ``config.alpha`` and ``config.walk_kind``.
    """
    config = config or EmbeddingConfig()
    if solver is None:
        solver = prepare(graph, config.pagerank_config())
    elif solver.config.alpha != config.alpha or solver.config.walk_kind != config.walk_kind:
        raise ValueError("prepared solver does not match the embedding config")
    s = config.samples_for(graph.n)
    seeds = sample_seeds(graph.n, s, config.rng_seed, config.replace)
    X = build_sample_matrix(graph, solver, seeds, workers=config.workers)
    return _finish(X, config)
