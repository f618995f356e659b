"""Quantitative comparisons between log-PageRank and spectral embeddings."""
from __future__ import annotations

import itertools
import logging
import math
import re
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la

from .embedding import EmbeddingConfig, log_pagerank_embedding
from .errors import GraphError
from .generators import GeneratorSpec, generate_connected, load_edge_list, load_point_graph
from .graph import Graph, laplacian_quadratic_form
from .pagerank import PageRankConfig, prepare
from .spectral import spectral_embedding

log = logging.getLogger(__name__)

METRICS = ("random-walk", "normalized", "combinatorial")


# --- Rayleigh-quotient error --------------------------------------------------

def rayleigh_quotient(graph: Graph, x, metric: str = "random-walk") -> float:
    """Laplacian Rayleigh quotient of ``x`` under one of three conventions.

    ``normalized``: ``x' N x / x' x`` with ``N = I - D^-1/2 A D^-1/2``.
    ``random-walk``: ``x' (D - A) x / x' D x``, which is the ``normalized``
    quotient of ``D^1/2 x``; use it for vectors in vertex coordinates.
    ``combinatorial``: ``x' (D - A) x / x' x``.
    """
    x = np.asarray(x, dtype=float)
    if metric == "normalized":
        return laplacian_quadratic_form(graph, x) / float(x @ x)
    if metric == "random-walk":
        y = np.sqrt(graph.degrees) * x
        return laplacian_quadratic_form(graph, y) / float(y @ y)
    if metric == "combinatorial":
        u, v, w = graph.edges()
        return float(np.sum(w * (x[u] - x[v]) ** 2)) / float(x @ x)
    raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")


def laplacian_for_metric(metric):
    return "combinatorial" if metric == "combinatorial" else "normalized"


def baseline_vectors(graph: Graph, basis, metric: str = "random-walk"):
    """Spectral vectors ``z_2..z_{k+1}`` expressed in the frame ``metric`` uses."""
    if metric == "random-walk":
        return basis.coordinates(graph)
    return basis.embedding


@dataclass
class ApproxErrorReport:
    s: float
    p: float
    error: float
    metric: str = "random-walk"
    graph: str = ""
    alpha: float | None = None
    transform: str | None = None
    meta: dict = field(default_factory=dict)

    @property
    def magnitude(self):
        return abs(self.error)


def approximation_error(graph: Graph, u2, z2, metric: str = "random-walk",
                        **meta) -> ApproxErrorReport:
    """``(s - p) / s`` with ``s``, ``p`` the Rayleigh quotients of ``z2``, ``u2``.

    The value is signed; ``p > s`` gives a negative error.
    """
    u2 = np.asarray(u2, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    if u2.shape != (graph.n,) or z2.shape != (graph.n,):
        raise ValueError("vectors must have one entry per vertex")
    if not np.any(u2) or not np.any(z2):
        raise ValueError("vectors must be nonzero")
    s = rayleigh_quotient(graph, z2, metric)
    p = rayleigh_quotient(graph, u2, metric)
    if s == 0:
        raise ValueError("baseline vector has zero Rayleigh quotient (it is the trivial vector)")
    return ApproxErrorReport(s, p, (s - p) / s, metric, **meta)


def joint_correlation(u, z):
    """``|corr(u, z)|`` and the ``(z_i, u_i)`` scatter for a joint plot."""
    u = np.asarray(u, dtype=float)
    z = np.asarray(z, dtype=float)
    if u.shape != z.shape:
        raise ValueError("vectors must have the same length")
    if np.std(u) == 0 or np.std(z) == 0:
        raise ValueError("zero-variance vector")
    r = float(np.corrcoef(u, z)[0, 1])
    sign = 1.0 if r >= 0 else -1.0
    return abs(r), np.column_stack([z, sign * u])


def subspace_angle(U, Z) -> float:
    """Largest principal angle (radians) between ``span(U)`` and ``span(Z)``."""
    U = np.atleast_2d(np.asarray(U, dtype=float))
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    if U.shape[0] != Z.shape[0]:
        raise ValueError("bases must have the same number of rows")
    for M in (U, Z):
        if np.linalg.matrix_rank(M) < M.shape[1]:
            raise ValueError("rank-deficient basis")
    return float(np.max(la.subspace_angles(U, Z)))


def lemma1_cosine(graph: Graph, seed: int, alpha: float, walk_kind: str = "lazy") -> float:
    """Cosine between ``log x(seed, alpha)`` and the all-ones direction."""
    x = prepare(graph, PageRankConfig(alpha, walk_kind)).solve_seed(seed).values
    y = np.log(x)
    return float(abs(y.sum()) / (math.sqrt(graph.n) * np.linalg.norm(y)))


# --- variance study -------------------------------------------------------------

def trial_seed(master: int, trial: int) -> int:
    """Independent per-trial rng seed derived from ``(master, trial)``."""
    return int(np.random.SeedSequence([master, trial]).generate_state(1, np.uint64)[0] >> 1)


@dataclass
class VarianceRow:
    fraction: float
    samples: int
    errors: np.ndarray

    @property
    def variance(self):
        return float(np.var(self.errors))

    @property
    def max(self):
        return float(np.max(self.errors))

    @property
    def min(self):
        return float(np.min(self.errors))

    @property
    def median(self):
        return float(np.median(self.errors))

    @property
    def spread(self):
        return self.max - self.min


def variance_study(graph: Graph, config: EmbeddingConfig, trials: int = 50,
                   sample_fractions=(0.01, 0.05, 0.1), metric: str = "random-walk",
                   trial_seeds=None) -> list[VarianceRow]:
    """Spread of the approximation error over repeated seed draws.

    For each fraction ``f`` the embedding uses ``max(k + 1, round(f n))``
    seeds; trial ``t`` draws them with :func:`trial_seed` of
    ``(config.rng_seed, t)`` unless ``trial_seeds`` overrides that.
    """
    if trials < 2:
        raise ValueError("need at least two trials")
    seeds = list(trial_seeds) if trial_seeds is not None else \
        [trial_seed(config.rng_seed, t) for t in range(trials)]
    if len(seeds) != trials:
        raise ValueError("trial_seeds must have one entry per trial")
    basis = spectral_embedding(graph, 1, laplacian_for_metric(metric))
    z2 = baseline_vectors(graph, basis, metric)[:, 0]
    solver = prepare(graph, config.pagerank_config())
    rows = []
    for f in sample_fractions:
        s = min(graph.n, max(config.k + 1, int(round(f * graph.n))))
        errs = []
        for t in range(trials):
            cfg = config.with_(s=s, rng_seed=seeds[t])
            emb = log_pagerank_embedding(graph, cfg, solver)
            errs.append(approximation_error(graph, emb.Z[:, 0], z2, metric).error)
        rows.append(VarianceRow(f, s, np.array(errs)))
    return rows


# --- expectation oracle ------------------------------------------------------

@dataclass
class EigenspaceCheck:
    walk_eigenvalue: float
    dimension: int
    expected_value: float
    resolvable: bool
    angle: float | None


@dataclass
class AR1Report:
    explicit: np.ndarray
    closed_form: np.ndarray
    agreement: float
    eigenspaces: list
    degenerate: bool

    @property
    def max_angle(self):
        angles = [e.angle for e in self.eigenspaces if e.resolvable]
        return max(angles) if angles else 0.0


def _walk_eigensystem(graph: Graph):
    W = graph.walk_matrix("lazy").toarray()
    if not np.allclose(W, W.T, atol=1e-14):
        raise GraphError("the expectation oracle needs a regular graph (symmetric W)")
    lam, Q = la.eigh(W)
    return W, lam[::-1], Q[:, ::-1]


def expected_bbt_explicit(graph: Graph, powers, max_terms: int = 2_000_000):
    """``E[B B^T]`` by averaging over every seed tuple ``(i_1..i_m)``.

    ``B`` has columns ``W^{k_j} e_{i_j}``.  Cost grows as ``n^m``.
    """
    W, _, _ = _walk_eigensystem(graph)
    n = graph.n
    m = len(powers)
    if n ** m > max_terms:
        raise ValueError(f"{n}^{m} seed tuples exceed the enumeration budget")
    cols = [np.linalg.matrix_power(W, int(kj)) for kj in powers]
    # outer products of every candidate column, one stack per position j
    outer = [np.einsum("ai,bi->iab", C, C) for C in cols]
    acc = np.zeros((n, n))
    for tup in itertools.product(range(n), repeat=m):
        for j, i in enumerate(tup):
            acc += outer[j][i]
    return acc / n ** m


def expected_bbt_closed_form(graph: Graph, powers):
    """``(1/n) Q (sum_j Lambda^{2 k_j}) Q^T`` from ``E[e_i e_i^T] = I / n``."""
    _, lam, Q = _walk_eigensystem(graph)
    d = sum(lam ** (2 * int(kj)) for kj in powers)
    return (Q * d) @ Q.T / graph.n


def _clusters(values, tol):
    groups = [[0]]
    for i in range(1, values.size):
        if abs(values[i] - values[groups[-1][-1]]) <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def expectation_oracle_ar1(graph: Graph, powers, cluster_tol: float = 1e-9,
                           gap_tol: float = 1e-6) -> AR1Report:
    """Check that eigenspaces of ``E[B B^T]`` coincide with those of ``W``.

    Walk eigenvalues within ``cluster_tol`` form one eigenspace.  An
    eigenspace is resolvable when its value in ``E[B B^T]`` is separated from
    every other eigenspace's value by ``gap_tol`` times the largest value;
    only resolvable ones get an angle, since eigenspaces of ``E[B B^T]``
    that merge numerically carry no direction information.
    """
    explicit = expected_bbt_explicit(graph, powers)
    closed = expected_bbt_closed_form(graph, powers)
    agreement = float(np.abs(explicit - closed).max())
    _, lam, Q = _walk_eigensystem(graph)
    groups = _clusters(lam, cluster_tol)
    mu = np.array([sum(lam[g[0]] ** (2 * int(kj)) for kj in powers) / graph.n for g in groups])
    ev, V = la.eigh(explicit)
    ev, V = ev[::-1], V[:, ::-1]
    order = np.argsort(-mu, kind="stable")
    mu_max = mu.max() if mu.size else 0.0
    checks = [None] * len(groups)
    start = 0
    for gi in order:
        g = groups[gi]
        block = V[:, start: start + len(g)]
        start += len(g)
        others = np.delete(mu, gi)
        gap = np.min(np.abs(others - mu[gi])) if others.size else np.inf
        ok = gap >= gap_tol * mu_max
        angle = float(np.max(la.subspace_angles(Q[:, g], block))) if ok else None
        checks[gi] = EigenspaceCheck(float(lam[g[0]]), len(g), float(mu[gi]), bool(ok), angle)
    # every orthonormal basis diagonalizes a multiple of the identity
    degenerate = bool(mu_max - mu.min() <= 1e-12 * mu_max)
    return AR1Report(explicit, closed, agreement, checks, degenerate)


# --- Table 1 ------------------------------------------------------------------

PAPER_TABLE1 = {
    # row: (raw 0.99, log 0.99, raw 0.9999, log 0.9999), in percent
    "30-6 nearest neighbour": (3.27, 0.06, 2.89, 0.05),
    "3000-6 nearest neighbour": (47.6, 0.37, 5.06, 2.88),
    "10000-6 nearest neighbour": (170.75, 2.13, 13.5, 1.76),
    "30 chain": (26.88, 0.47, 28.42, 6.02),
    "3000 chain": (2858.82, 1.06, 30.38, 0.75),
    "Minnesota n=2640": (16.07, 1.97, 11.15, 0.44),
    "Tapir n=1024": (10.17, 1.13, 15.41, 0.66),
    "LogPR n=5000": (19.95, 0.15, 4.76, 0.34),
    "sbm(50,60,0.001,0.005)": (51.77, 15.22, 51.32, 67.25),
    "sbm(1000,3,0.001,0.005)": (47.35, 16.93, 45.78, 89.39),
    "sbm(50,60,0.25,0.005)": (17.88, 15.22, 90.13, 402.27),
    "sbm(1000,3,0.25,0.001)": (53.7, 1.04, 16.21, 15.73),
}
PAPER_ALPHAS = (0.99, 0.9999)


def paper_value(row_label, alpha, transform):
    """Published percentage for a Table 1 cell, or None."""
    vals = PAPER_TABLE1.get(row_label)
    if vals is None:
        return None
    col = {(0.99, "identity"): 0, (0.99, "log"): 1,
           (0.9999, "identity"): 2, (0.9999, "log"): 3}.get((alpha, transform))
    # the table caption also names 0.99999 for the second column pair
    if col is None and alpha == 0.99999:
        col = 2 if transform == "identity" else 3
    return None if col is None else vals[col]


_SBM = re.compile(r"sbm\(\s*(\d+)\s*,\s*(\d+)\s*,\s*([\d.eE-]+)\s*,\s*([\d.eE-]+)\s*\)")


@dataclass
class RowSpec:
    label: str
    spec: GeneratorSpec | None = None
    path: str | None = None
    kind: str = "generated"

    def build(self):
        if self.spec is not None:
            g, used = generate_connected(self.spec)
            if used.rng_seed != self.spec.rng_seed:
                log.info("%s: used rng seed %d for a connected graph", self.label, used.rng_seed)
            return g
        if self.kind == "points":
            return load_point_graph(self.path)
        return load_edge_list(self.path)


def parse_row(text: str, graph_seed: int = 0) -> RowSpec:
    """Row names: ``chain<n>``, ``knn<n>`` (6 neighbours), ``knn<n>-<k>``,
    ``sbm(n,k,p,q)`` (``k`` groups of ``n``), ``file:<label>=<path>``,
    ``points:<label>=<path>``."""
    t = text.strip()
    m = re.fullmatch(r"chain(\d+)", t)
    if m:
        n = int(m.group(1))
        return RowSpec(f"{n} chain", GeneratorSpec("chain", n))
    m = re.fullmatch(r"knn(\d+)(?:-(\d+))?", t)
    if m:
        n, k = int(m.group(1)), int(m.group(2) or 6)
        return RowSpec(f"{n}-{k} nearest neighbour",
                       GeneratorSpec("knn-geometric", n, k, rng_seed=graph_seed))
    m = _SBM.fullmatch(t)
    if m:
        nb, B = int(m.group(1)), int(m.group(2))
        p, q = float(m.group(3)), float(m.group(4))
        return RowSpec(f"sbm({m.group(1)},{m.group(2)},{m.group(3)},{m.group(4)})",
                       GeneratorSpec("sbm", nb, B, p, q, rng_seed=graph_seed))
    m = re.fullmatch(r"(file|points):(.+?)=(.+)", t)
    if m:
        return RowSpec(m.group(2), path=m.group(3),
                       kind="points" if m.group(1) == "points" else "edges")
    raise ValueError(f"cannot parse table row {text!r}")


@dataclass
class Table1Cell:
    row: str
    alpha: float
    transform: str
    errors: np.ndarray
    paper: float | None

    @property
    def median(self):
        """Median of ``|error|`` over repetitions, as a fraction."""
        return float(np.median(np.abs(self.errors)))

    @property
    def median_signed(self):
        return float(np.median(self.errors))


def table1_cells(graph: Graph, label: str, alphas, reps: int = 5, rng_seed: int = 0,
                 metric: str = "random-walk", transforms=("identity", "log"),
                 walk_kind: str = "lazy", k: int = 2):
    basis = spectral_embedding(graph, 1, laplacian_for_metric(metric))
    z2 = baseline_vectors(graph, basis, metric)[:, 0]
    cells = []
    for a in alphas:
        solver = prepare(graph, PageRankConfig(a, walk_kind))
        for tr in transforms:
            errs = []
            for r in range(reps):
                cfg = EmbeddingConfig(k=k, alpha=a, transform=tr, rng_seed=rng_seed + r,
                                      walk_kind=walk_kind)
                emb = log_pagerank_embedding(graph, cfg, solver)
                errs.append(approximation_error(graph, emb.Z[:, 0], z2, metric).error)
            cells.append(Table1Cell(label, a, tr, np.array(errs), paper_value(label, a, tr)))
    return cells


def reproduce_table1(rows, alphas=PAPER_ALPHAS, reps: int = 5, rng_seed: int = 0,
                     metric: str = "random-walk", graph_seed: int = 0,
                     walk_kind: str = "lazy") -> list[Table1Cell]:
    """Approximation error for every (row, alpha, transform) cell.

    Each cell is ``reps`` embeddings with rng seeds ``rng_seed + r``; cells
    report the median magnitude next to the published value.
    """
    cells = []
    for row in rows:
        spec = parse_row(row, graph_seed) if isinstance(row, str) else row
        g = spec.build()
        cells.extend(table1_cells(g, spec.label, alphas, reps, rng_seed, metric,
                                  walk_kind=walk_kind))
    return cells


def table1_csv(cells) -> str:
    lines = ["graph,alpha,transform,median_error_pct,median_signed_pct,paper_pct,errors_pct"]
    for c in cells:
        paper = "" if c.paper is None else f"{c.paper:.2f}"
        errs = ";".join(f"{100 * e:.6f}" for e in c.errors)
        lines.append(f"\"{c.row}\",{c.alpha!r},{c.transform},{100 * c.median:.6f},"
                     f"{100 * c.median_signed:.6f},{paper},{errs}")
    return "\n".join(lines) + "\n"


def format_table1(cells) -> str:
    """Plain-text table in the published layout (raw/log per alpha)."""
    alphas = sorted({c.alpha for c in cells})
    rows = list(dict.fromkeys(c.row for c in cells))
    look = {(c.row, c.alpha, c.transform): c for c in cells}
    head = f"{'Graph':<28}" + "".join(f"{'a=' + repr(a) + ' raw':>24}{'log':>24}" for a in alphas)
    out = [head]
    for r in rows:
        line = f"{r:<28}"
        for a in alphas:
            for tr in ("identity", "log"):
                c = look.get((r, a, tr))
                if c is None:
                    line += f"{'-':>24}"
                    continue
                paper = "" if c.paper is None else f" ({c.paper:.2f}%)"
                line += f"{100 * c.median:>13.2f}%{paper:>10}"
        out.append(line)
    return "\n".join(out) + "\n"


def caption_alpha_check(cells_9999, cells_99999):
    """Which of 0.9999 / 0.99999 reproduces the published second column better.

    Score is the mean absolute log10 ratio to the published values.
    """
    def score(cells):
        vals = [abs(math.log10(max(c.median * 100, 1e-12) / c.paper))
                for c in cells if c.paper]
        return float(np.mean(vals)) if vals else float("nan")
    s4, s5 = score(cells_9999), score(cells_99999)
    return {"0.9999": s4, "0.99999": s5, "better": "0.9999" if s4 <= s5 else "0.99999"}
