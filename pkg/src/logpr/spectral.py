"""Spectral embedding baseline from Laplacian eigenvectors."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
import scipy.sparse.linalg as sla

from .embedding import normalize_signs
from .errors import DisconnectedGraphError, NumericalError
from .graph import Graph

log = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-6
DENSE_LIMIT = 2000
DEGENERATE_GAP = 1e-10


@dataclass
class SpectralBasis:
    """Eigenpairs in ascending order, trivial pair first.

    ``eigenvectors`` has ``k + 1`` columns.  For ``which="lazy-walk"`` the
    eigenvalues are descending instead (top of the walk spectrum first).
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    which: str
    degenerate: np.ndarray
    residuals: np.ndarray

    @property
    def embedding(self):
        """The nontrivial vectors ``z_2 .. z_{k+1}``."""
        return self.eigenvectors[:, 1:]

    def vector(self, j):
        """``z_j`` with 1-based numbering."""
        return self.eigenvectors[:, j - 1]

    def coordinates(self, graph: Graph):
        """Nontrivial vectors mapped to vertex coordinates.

        For the normalized Laplacian this is ``D^-1/2 z`` scaled to unit norm,
        i.e. the generalized eigenvectors of ``L y = lambda D y``; for the
        other kinds the vectors are returned unchanged.
        """
        Z = self.embedding
        if self.which != "normalized-laplacian":
            return Z
        Y = Z / np.sqrt(graph.degrees)[:, None]
        return normalize_signs(Y / np.linalg.norm(Y, axis=0))


def _matrix(graph: Graph, laplacian: str):
    if laplacian == "normalized":
        return graph.laplacian(normalized=True), "normalized-laplacian"
    if laplacian == "combinatorial":
        return graph.laplacian(normalized=False), "combinatorial-laplacian"
    raise ValueError(f"laplacian must be 'normalized' or 'combinatorial', got {laplacian!r}")


def _flag_degenerate(w):
    gaps = np.abs(np.diff(w))
    flags = np.zeros(w.size, dtype=bool)
    close = gaps < DEGENERATE_GAP
    flags[:-1] |= close
    flags[1:] |= close
    return flags


def smallest_eigenpairs(M, count, method="auto", scale=1.0, maxiter=None):
    """``count`` smallest eigenpairs of a symmetric PSD sparse matrix."""
    n = M.shape[0]
    if method == "auto":
        method = "dense" if n <= DENSE_LIMIT else "sparse"
    if method == "dense" or count >= n - 1:
        w, V = la.eigh(M.toarray(), subset_by_index=[0, count - 1])
        return w, V
    if method != "sparse":
        raise ValueError(f"unknown eigensolver method {method!r}")
    # shift-invert just below zero: the trivial eigenvalue sits at 0 and the
    # next ones can be as small as 1e-7 on long chains
    sigma = -1e-8 * scale
    v0 = np.ones(n) / np.sqrt(n)
    try:
        w, V = sla.eigsh(M.tocsc(), k=count, sigma=sigma, which="LM", v0=v0,
                         maxiter=maxiter or 20 * n, tol=0)
    except sla.ArpackNoConvergence as exc:
        raise NumericalError(f"eigensolver did not converge: {exc}") from exc
    order = np.argsort(w)
    return w[order], V[:, order]


def spectral_embedding(graph: Graph, k: int = 2, laplacian: str = "normalized",
                       method: str = "auto") -> SpectralBasis:
    """Eigenvectors ``z_1 .. z_{k+1}`` of the (normalized) Laplacian.

    ``z_1`` is the trivial vector (``D^1/2 e`` normalized, or ``e/sqrt(n)``
    for the combinatorial Laplacian) and is checked before being kept as the
    first column.  Columns are sign-normalized so the largest-magnitude
    entry is positive.
    """
    if not graph.connected:
        raise DisconnectedGraphError("spectral embedding needs a connected graph")
    if k + 1 > graph.n:
        raise ValueError(f"need k + 1 <= n, got k={k}, n={graph.n}")
    M, which = _matrix(graph, laplacian)
    scale = 2.0 if laplacian == "normalized" else 2.0 * graph.degrees.max()
    w, V = smallest_eigenpairs(M, k + 1, method, scale)

    trivial = np.sqrt(graph.degrees) if laplacian == "normalized" else np.ones(graph.n)
    trivial /= np.linalg.norm(trivial)
    if abs(w[0]) > 1e-8 * scale or abs(abs(trivial @ V[:, 0]) - 1) > 1e-6:
        raise NumericalError("lowest eigenpair is not the trivial one")
    V[:, 0] = trivial
    V = normalize_signs(V)
    w[0] = 0.0
    res = np.linalg.norm(M @ V - V * w, axis=0)
    if np.any(res > RESIDUAL_TOL):
        raise NumericalError(f"eigenpair residual {res.max():.2e} exceeds {RESIDUAL_TOL}")
    deg = _flag_degenerate(w)
    if np.any(deg[1:]):
        log.info("near-degenerate eigenvalues among the first %d", k + 1)
    return SpectralBasis(w, V, which, deg, res)


def lazy_walk_eigenpairs(graph: Graph, k: int = 2, method: str = "auto") -> SpectralBasis:
    """Top ``k + 1`` eigenpairs of ``W = (I + A D^-1) / 2``.

    ``W = D^1/2 S D^-1/2`` with ``S = I - (normalized Laplacian) / 2``, so the
    eigenvalues are ``1 - lambda / 2`` and the (right) eigenvectors are
    ``D^1/2 z``, scaled to unit 2-norm.  They are orthonormal only when the
    graph is regular; in general they are orthogonal in the ``D^-1`` inner
    product.
    """
    if not graph.connected:
        raise DisconnectedGraphError("walk eigenpairs need a connected graph")
    M, _ = _matrix(graph, "normalized")
    lam, Zs = smallest_eigenpairs(M, k + 1, method, 2.0)
    mu = 1.0 - lam / 2.0
    V = Zs * np.sqrt(graph.degrees)[:, None]
    V = normalize_signs(V / np.linalg.norm(V, axis=0))
    W = graph.walk_matrix("lazy")
    res = np.linalg.norm(W @ V - V * mu, axis=0)
    if np.any(res > RESIDUAL_TOL):
        raise NumericalError(f"walk eigenpair residual {res.max():.2e} exceeds {RESIDUAL_TOL}")
    return SpectralBasis(mu, V, "lazy-walk", _flag_degenerate(mu), res)
