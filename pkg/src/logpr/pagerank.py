"""Seeded PageRank: ``(I - alpha P) x = (1 - alpha) v``.

``prepare`` factors ``I - alpha P`` once; ``solve`` reuses the factorization
for any number of teleportation vectors.  The chain-graph closed form and its
log-linear approximation live here too.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as sla

from .errors import DisconnectedGraphError, NumericalError
from .graph import Graph

RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class PageRankConfig:
    alpha: float = 0.99
    walk_kind: str = "lazy"
    solver: str = "direct"
    tol: float = 1e-10
    maxiter: int | None = None

    def __post_init__(self):
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError(f"alpha must lie in [0, 1), got {self.alpha}")
        if self.walk_kind not in ("lazy", "standard"):
            raise ValueError(f"walk_kind must be 'lazy' or 'standard', got {self.walk_kind!r}")
        if self.solver not in ("direct", "iterative"):
            raise ValueError(f"solver must be 'direct' or 'iterative', got {self.solver!r}")


@dataclass(frozen=True)
class PageRankVector:
    values: np.ndarray
    alpha: float
    seed: int | None = None
    residual: float = 0.0

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)


class PageRankSolver:
    """Prepared solver for ``(I - alpha P)`` on one graph at one ``alpha``.

    Read-only after construction; concurrent ``solve`` calls are safe.
    """

    def __init__(self, graph: Graph, config: PageRankConfig):
        if not graph.connected:
            raise DisconnectedGraphError(
                f"PageRank needs a connected graph ({graph.n_components} components)")
        self.graph = graph
        self.config = config
        self.P = graph.walk_matrix(config.walk_kind)
        self.M = sp.csc_array(sp.eye_array(graph.n) - config.alpha * self.P)
        self._lu = None
        if config.solver == "direct" and config.alpha > 0:
            try:
                self._lu = sla.splu(self.M)
            except RuntimeError as exc:
                raise NumericalError(f"LU factorization failed: {exc}") from exc

    @property
    def n(self):
        return self.graph.n

    @property
    def alpha(self):
        return self.config.alpha

    def residual(self, x, v):
        """``||(I - alpha P) x - (1 - alpha) v||_1`` per column."""
        r = self.M @ x - (1.0 - self.alpha) * v
        return np.abs(r).sum(axis=0)

    def _richardson(self, b):
        a = self.alpha
        x = b.copy()
        maxiter = self.config.maxiter
        if maxiter is None:
            # geometric convergence at rate alpha
            maxiter = int(math.ceil(math.log(self.config.tol) / math.log(max(a, 1e-300)))) + 10
        for _ in range(maxiter):
            x_new = a * (self.P @ x) + b
            delta = np.abs(x_new - x).sum(axis=0).max()
            x = x_new
            if delta <= self.config.tol:
                return x
        raise NumericalError(f"Richardson iteration did not reach tol={self.config.tol} "
                             f"in {maxiter} steps")

    def solve_matrix(self, V):
        """Solve for every column of ``V`` at once; returns ``(X, residuals)``."""
        V = np.asarray(V, dtype=float)
        b = (1.0 - self.alpha) * V
        if self.alpha == 0:
            X = b.copy()
        elif self._lu is not None:
            X = self._lu.solve(b)
        else:
            X = self._richardson(b)
        X = np.maximum(X, 0.0)
        res = self.residual(X, V)
        scale = np.abs(V).sum(axis=0)
        bad = res > max(RESIDUAL_TOL, 10 * self.config.tol) * np.maximum(scale, 1.0)
        if np.any(bad):
            raise NumericalError(f"PageRank residual {res.max():.3e} exceeds tolerance")
        return X, res

    def solve(self, v) -> PageRankVector:
        v = np.asarray(v, dtype=float)
        if v.shape != (self.n,):
            raise ValueError(f"teleportation vector has shape {v.shape}, expected ({self.n},)")
        if np.any(v < 0) or not math.isclose(v.sum(), 1.0, rel_tol=0, abs_tol=1e-10):
            raise ValueError("teleportation vector must be nonnegative and sum to 1")
        X, res = self.solve_matrix(v[:, None])
        seed = int(np.flatnonzero(v)[0]) if np.count_nonzero(v) == 1 else None
        return PageRankVector(X[:, 0], self.alpha, seed, float(res[0]))

    def solve_seed(self, seed: int) -> PageRankVector:
        v = np.zeros(self.n)
        v[seed] = 1.0
        return self.solve(v)

    def solve_seeds(self, seeds):
        """Matrix whose column ``j`` is the PageRank vector seeded at ``seeds[j]``."""
        seeds = np.asarray(seeds, dtype=int)
        V = np.zeros((self.n, seeds.size))
        V[seeds, np.arange(seeds.size)] = 1.0
        X, _ = self.solve_matrix(V)
        return X


def prepare(graph: Graph, config: PageRankConfig | None = None) -> PageRankSolver:
    return PageRankSolver(graph, config or PageRankConfig())


def solve(solver: PageRankSolver, v) -> PageRankVector:
    return solver.solve(v)


def pagerank(graph: Graph, seed: int, alpha: float = 0.99, walk_kind: str = "lazy"):
    """One-off seeded PageRank vector as an array."""
    return prepare(graph, PageRankConfig(alpha, walk_kind)).solve_seed(seed).values


# --- chain graph -------------------------------------------------------------

def lazy_to_standard_alpha(alpha):
    """PageRank with the lazy walk at ``alpha`` equals PageRank with the
    standard walk at ``alpha / (2 - alpha)``."""
    return alpha / (2.0 - alpha)


def _chain_roots(alpha):
    r = math.sqrt(1.0 - alpha * alpha)
    return (1.0 + r) / alpha, (1.0 - r) / alpha


def chain_closed_form(n: int, k: int, alpha: float, walk_kind: str = "standard",
                      form: str = "exact") -> np.ndarray:
    """Seeded PageRank on the ``n``-vertex chain, seed ``k`` (1-indexed).

    The returned array is 0-indexed: entry ``i - 1`` holds ``x_i``.

    Both forms share the profiles::

        f(i) = ((+)^(i-1) + (-)^(i-1)) / ((+)^(k-1) + (-)^(k-1))
        g(i) = ((+)^(n-i) + (-)^(n-i)) / ((+)^(n-k) + (-)^(n-k))

    with ``(+), (-) = (1 +- sqrt(1 - alpha^2)) / alpha``; ``f(k) = g(k) = 1``.

    ``form="printed"`` returns the expression with ``c = sqrt((1-alpha)/(1+alpha))``,
    ``x_i = c f(i)`` left of the seed, ``c g(i)`` right of it and
    ``x_k = (c alpha / 2)(f(k-1) + g(k+1))``.  That is the infinite-chain
    limit; it is not an exact solution of the finite system.

    ``form="exact"`` solves the standard walk exactly: ``x_i = d_i C f(i)``
    (or ``g``) with ``d_i`` the chain degree and
    ``C = (1 - alpha) / (d_k - alpha (f(k-1) + g(k+1)))``.  The lazy walk is
    handled through :func:`lazy_to_standard_alpha`.
    """
    if n <= 2:
        raise ValueError("chain needs n > 2")
    if not 1 <= k <= n:
        raise ValueError(f"seed k={k} must be in 1..{n}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if walk_kind == "lazy":
        alpha = lazy_to_standard_alpha(alpha)
    elif walk_kind != "standard":
        raise ValueError(f"unknown walk kind {walk_kind!r}")
    plus, minus = _chain_roots(alpha)
    i = np.arange(1, n + 1, dtype=float)
    # ratios of (r^a + r^-a) computed in log space to avoid overflow for long chains
    lp = math.log(plus)

    @np.errstate(over="ignore")
    def prof(a, b):
        # (r^a + r^-a) / (r^b + r^-b) with r = (+); note (-) = 1/(+)
        return np.exp((a - b) * lp) * (1 + np.exp(-2 * a * lp)) / (1 + np.exp(-2 * b * lp))

    f = prof(i - 1, k - 1)
    g = prof(n - i, n - k)
    left = i < k
    prof_all = np.where(left, f, g)
    fkm1 = prof(np.float64(k - 2), k - 1) if k > 1 else 0.0
    gkp1 = prof(np.float64(n - k - 1), n - k) if k < n else 0.0
    if form == "printed":
        c = math.sqrt((1 - alpha) / (1 + alpha))
        x = c * prof_all
        x[k - 1] = c * alpha / 2 * (fkm1 + gkp1)
        return x
    if form != "exact":
        raise ValueError(f"unknown form {form!r}")
    deg = np.full(n, 2.0)
    deg[0] = deg[-1] = 1.0
    C = (1 - alpha) / (deg[k - 1] - alpha * (fkm1 + gkp1))
    return deg * C * prof_all


def chain_log_approx(n: int, k: int, alpha: float, i) -> np.ndarray | float:
    """``-|k - i| log((+)) + log(sqrt((1 - alpha) / (1 + alpha)))``."""
    if n <= 2 or not 1 <= k <= n or not 0.0 < alpha < 1.0:
        raise ValueError("need n > 2, 1 <= k <= n, 0 < alpha < 1")
    plus, _ = _chain_roots(alpha)
    i = np.asarray(i, dtype=float)
    out = -np.abs(k - i) * math.log(plus) + 0.5 * math.log((1 - alpha) / (1 + alpha))
    return float(out) if out.ndim == 0 else out
