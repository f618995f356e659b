"""Command line front end: ``logpr <command> ...``.

Every command writes into ``--out`` (a directory) and leaves a
``manifest.json`` there with the full argument set, rng seeds, tool version
and timings.  Exit codes: 0 success, 2 usage error, 3 data error,
4 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
import warnings

import numpy as np

from . import __version__
from .embedding import EmbeddingConfig, log_pagerank_embedding
from .errors import NumericalError, ParseError
from .evaluation import (METRICS, approximation_error, caption_alpha_check, format_table1,
                         joint_correlation, laplacian_for_metric, reproduce_table1,
                         subspace_angle, table1_csv, variance_study)
from .generators import GeneratorSpec, generate_connected, load_edge_list, write_sidecar
from .graph import format_edge_list
from .hypergraph import (HypergraphDiffusionConfig, hypergraph_log_pr_embedding,
                         load_hypergraph, planted_hypergraph)
from .io import (atomic_write, embedding_csv, read_embedding_csv, scatter_csv, scatter_svg,
                 vector_csv, write_json)
from .pagerank import PageRankConfig, prepare
from .spectral import spectral_embedding

log = logging.getLogger("logpr")

EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 2, 3, 4


def _floats(text):
    return [float(t) for t in text.split(",") if t.strip()]


def _add_embedding_flags(p):
    p.add_argument("--alpha", type=float, default=0.99, help="teleportation parameter (default 0.99)")
    p.add_argument("--k", type=int, default=2, help="embedding dimension (default 2)")
    p.add_argument("--samples", type=int, default=None,
                   help="number of seeds (default ceil((10+k) ln n), capped at n)")
    p.add_argument("--transform", choices=("log", "identity"), default="log")
    p.add_argument("--walk", choices=("lazy", "standard"), default="lazy")
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("--solver", choices=("direct", "iterative"), default="direct")
    p.add_argument("--zero-factor", type=float, default=0.1,
                   help="zeros become this factor times the smallest positive entry")
    p.add_argument("--normalize-columns", action="store_true",
                   help="scale each (log) column to unit norm before the SVD")
    p.add_argument("--with-replacement", action="store_true", help="sample seeds with replacement")
    p.add_argument("--svd", choices=("dense", "randomized"), default="dense")
    p.add_argument("--workers", type=int, default=1)


def _embedding_config(a):
    return EmbeddingConfig(k=a.k, s=a.samples, alpha=a.alpha, transform=a.transform,
                           rng_seed=a.rng_seed, zero_replacement_factor=a.zero_factor,
                           walk_kind=a.walk, solver=a.solver, replace=a.with_replacement,
                           normalize_columns=a.normalize_columns, svd=a.svd, workers=a.workers)


def _load_graph(a):
    return load_edge_list(a.graph, index_base=a.index_base)


def _sidecar(path):
    """Coordinates/labels JSON next to an edge-list file, if any."""
    for cand in (os.path.splitext(path)[0] + ".json", path + ".json"):
        if os.path.exists(cand):
            with open(cand) as fh:
                return json.load(fh)
    return {}


# --- commands ----------------------------------------------------------------

def cmd_generate(a, out):
    spec = GeneratorSpec(a.family, a.n, a.k, a.p, a.q, a.rng_seed)
    if a.require_connected:
        g, spec = generate_connected(spec, a.retries)
    else:
        g = spec.build()
    atomic_write(os.path.join(out, "graph.edges"), format_edge_list(g, a.index_base))
    side = os.path.join(out, "graph.json")
    write_sidecar(side + ".tmp", spec, g, index_base=a.index_base)
    os.replace(side + ".tmp", side)
    return {"graph.edges": {"n": g.n, "m": g.m, "connected": g.connected},
            "rng_seed_used": spec.rng_seed}


def cmd_embed(a, out):
    g = _load_graph(a)
    cfg = _embedding_config(a)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        emb = log_pagerank_embedding(g, cfg)
    atomic_write(os.path.join(out, "embedding.csv"), embedding_csv(emb.Z))
    info = {"singular_values": emb.singular_values, "seeds": emb.seeds, "alpha": cfg.alpha,
            "replacements": emb.replacements, "rng_seed": cfg.rng_seed, "rank": emb.rank,
            "transform": cfg.transform, "walk": cfg.walk_kind, "k": cfg.k,
            "warnings": [str(w.message) for w in caught]}
    write_json(os.path.join(out, "embedding.json"), info)
    if a.pagerank_seed is not None:
        solver = prepare(g, PageRankConfig(cfg.alpha, cfg.walk_kind, cfg.solver))
        x = solver.solve_seed(a.pagerank_seed).values
        atomic_write(os.path.join(out, "pagerank.csv"), vector_csv(x))
    return {"n": g.n, "samples": int(emb.seeds.size), "replacements": emb.replacements}


def cmd_spectral(a, out):
    g = _load_graph(a)
    basis = spectral_embedding(g, a.k, a.laplacian)
    Z = basis.coordinates(g) if a.frame == "vertex" else basis.embedding
    atomic_write(os.path.join(out, "embedding.csv"), embedding_csv(Z))
    write_json(os.path.join(out, "embedding.json"),
               {"eigenvalues": basis.eigenvalues, "laplacian": a.laplacian, "frame": a.frame,
                "residuals": basis.residuals, "degenerate": basis.degenerate, "k": a.k})
    return {"n": g.n, "eigenvalues": basis.eigenvalues}


def compare_embeddings(g, U, Z, metric):
    """Per-column approximation errors, joint correlations, subspace angle."""
    k = min(U.shape[1], Z.shape[1])
    rows, scatters = [], []
    for j in range(k):
        rep = approximation_error(g, U[:, j], Z[:, j], metric)
        corr, pts = joint_correlation(U[:, j], Z[:, j])
        rows.append({"vector": j + 2, "s": rep.s, "p": rep.p, "error": rep.error,
                     "correlation": corr})
        scatters.append(pts)
    angle = subspace_angle(U[:, :k], Z[:, :k])
    return rows, angle, scatters


def cmd_compare(a, out):
    g = _load_graph(a)
    U = read_embedding_csv(a.embedding)
    Z = read_embedding_csv(a.baseline)
    if U.shape[0] != g.n or Z.shape[0] != g.n:
        raise ValueError("embedding row counts do not match the graph")
    rows, angle, scatters = compare_embeddings(g, U, Z, a.metric)
    lines = ["vector,s,p,error,error_pct,correlation"]
    for r in rows:
        lines.append(f"{r['vector']},{r['s']!r},{r['p']!r},{r['error']!r},"
                     f"{100 * r['error']:.6f},{r['correlation']!r}")
    atomic_write(os.path.join(out, "report.csv"), "\n".join(lines) + "\n")
    for r, pts in zip(rows, scatters):
        atomic_write(os.path.join(out, f"joint_u{r['vector']}_z{r['vector']}.csv"),
                     scatter_csv(pts, ("z", "u")))
    text = [f"metric: {a.metric}", f"largest principal angle: {angle:.6f} rad"]
    text += [f"u{r['vector']} vs z{r['vector']}: error {100 * r['error']:.4f}%  "
             f"|error| {100 * abs(r['error']):.4f}%  corr {r['correlation']:.6f}" for r in rows]
    atomic_write(os.path.join(out, "report.txt"), "\n".join(text) + "\n")
    print("\n".join(text))
    return {"errors": [r["error"] for r in rows], "angle": angle}


def cmd_table1(a, out):
    rows = [r for r in a.rows.split(";" if ";" in a.rows else ",") if r]
    cells = reproduce_table1(rows, _floats(a.alphas), a.reps, a.rng_seed, a.metric,
                             a.graph_seed, a.walk)
    atomic_write(os.path.join(out, "table1.csv"), table1_csv(cells))
    text = format_table1(cells)
    result = {}
    if a.caption_check:
        hi = [c for c in cells if c.alpha == 0.9999] or \
            reproduce_table1(rows, [0.9999], a.reps, a.rng_seed, a.metric, a.graph_seed, a.walk)
        alt = reproduce_table1(rows, [0.99999], a.reps, a.rng_seed, a.metric, a.graph_seed,
                               a.walk)
        result["caption_check"] = caption_alpha_check(hi, alt)
        atomic_write(os.path.join(out, "table1_alpha_0.99999.csv"), table1_csv(alt))
        text += f"caption alpha check: {result['caption_check']}\n"
    atomic_write(os.path.join(out, "table1.txt"), text)
    print(text, end="")
    return result


def cmd_variance(a, out):
    g = _load_graph(a)
    cfg = _embedding_config(a)
    rows = variance_study(g, cfg, a.trials, _floats(a.fractions), a.metric)
    lines = ["fraction,samples,variance,max,min,median,spread,errors"]
    for r in rows:
        errs = ";".join(repr(float(e)) for e in r.errors)
        lines.append(f"{r.fraction!r},{r.samples},{r.variance!r},{r.max!r},{r.min!r},"
                     f"{r.median!r},{r.spread!r},{errs}")
    atomic_write(os.path.join(out, "variance.csv"), "\n".join(lines) + "\n")
    text = [f"{100 * r.fraction:g}% ({r.samples} seeds): median {100 * r.median:.3f}%  "
            f"min {100 * r.min:.3f}%  max {100 * r.max:.3f}%  var {r.variance:.3e}" for r in rows]
    print("\n".join(text))
    return {}


def cmd_hypergraph(a, out):
    if a.planted:
        H = planted_hypergraph(rng_seed=a.planted_seed)
    else:
        if not a.path:
            raise ValueError("give a hyperedge file or --planted")
        H = load_hypergraph(a.path, a.index_base, a.labels)
    cfg = _embedding_config(a)
    diff = HypergraphDiffusionConfig(a.primitive, cfg.alpha, cfg.walk_kind, a.kappa, a.gamma,
                                     a.rho)
    emb = hypergraph_log_pr_embedding(H, cfg, diff)
    atomic_write(os.path.join(out, "embedding.csv"), embedding_csv(emb.Z))
    write_json(os.path.join(out, "embedding.json"),
               {"singular_values": emb.singular_values, "seeds": emb.seeds,
                "alpha": cfg.alpha, "replacements": emb.replacements,
                "rng_seed": cfg.rng_seed, "primitive": diff.primitive, "kappa": diff.kappa,
                "gamma": diff.gamma, "rho": diff.rho, "dropped_singletons": H.dropped})
    if H.labels is not None and emb.k >= 2:
        labels = [str(x) for x in H.labels]
        atomic_write(os.path.join(out, "embedding.svg"),
                     scatter_svg(emb.Z[:, :2], labels=labels))
    return {"n": H.n, "hyperedges": len(H.hyperedges)}


def cmd_plot(a, out):
    E = read_embedding_csv(a.embedding)
    if a.positions:
        side = _sidecar(a.positions) if not a.positions.endswith(".json") else \
            json.load(open(a.positions))
        if "coordinates" not in side:
            raise ValueError(f"no coordinates found for {a.positions}")
        xy = np.asarray(side["coordinates"], dtype=float)
        values = E[:, a.color_column - 1]
    else:
        if E.shape[1] < 2:
            raise ValueError("need a 2-column embedding or --positions")
        xy = E[:, :2]
        values = E[:, a.color_column - 1] if a.color_by_embedding else None
    labels = None
    if a.labels:
        with open(a.labels) as fh:
            labels = [ln.strip().split(",")[-1] for ln in fh if ln.strip()]
        if labels and not labels[0].lstrip("-").isdigit() and len(labels) == xy.shape[0] + 1:
            labels = labels[1:]
    if values is None and labels is None:
        values = np.arange(xy.shape[0], dtype=float)
    if xy.shape[0] != E.shape[0]:
        raise ValueError("positions and embedding have different vertex counts")
    atomic_write(os.path.join(out, a.name), scatter_svg(xy, values, labels, title=a.title))
    return {}


COMMANDS = {"generate": cmd_generate, "embed": cmd_embed, "spectral": cmd_spectral,
            "compare": cmd_compare, "table1": cmd_table1, "variance": cmd_variance,
            "hypergraph": cmd_hypergraph, "plot": cmd_plot}


def build_parser():
    p = argparse.ArgumentParser(prog="logpr", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"logpr {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, graph=True):
        sp.add_argument("--out", required=True, help="output directory")
        sp.add_argument("--index-base", type=int, choices=(0, 1), default=0,
                        help="vertex ids in input/output files start at this value")
        if graph:
            sp.add_argument("graph", help="edge-list file ('u v [w]' per line)")

    g = sub.add_parser("generate", help="write a synthetic graph")
    common(g, graph=False)
    g.add_argument("--family", choices=("chain", "knn-geometric", "sbm"), required=True)
    g.add_argument("--n", type=int, required=True, help="vertices (block size for sbm)")
    g.add_argument("--k", type=int, default=6, help="neighbours (knn) or blocks (sbm)")
    g.add_argument("--p", type=float, default=0.0, help="sbm within-block probability")
    g.add_argument("--q", type=float, default=0.0, help="sbm between-block probability")
    g.add_argument("--rng-seed", type=int, default=0)
    g.add_argument("--require-connected", action="store_true",
                   help="retry with the next rng seed until the graph is connected")
    g.add_argument("--retries", type=int, default=20)

    e = sub.add_parser("embed", help="log-PageRank embedding of a graph")
    common(e)
    _add_embedding_flags(e)
    e.add_argument("--pagerank-seed", type=int, default=None,
                   help="also export the PageRank vector seeded here as pagerank.csv")

    s = sub.add_parser("spectral", help="Laplacian eigenvector embedding")
    common(s)
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--laplacian", choices=("normalized", "combinatorial"), default="normalized")
    s.add_argument("--frame", choices=("vertex", "laplacian"), default="vertex",
                   help="'vertex' writes D^-1/2 z (generalized eigenvectors), "
                        "'laplacian' writes the eigenvectors themselves")

    c = sub.add_parser("compare", help="approximation error between two embeddings")
    common(c)
    c.add_argument("embedding", help="log-PageRank embedding CSV (u2, u3, ...)")
    c.add_argument("baseline", help="spectral embedding CSV (z2, z3, ...)")
    c.add_argument("--metric", choices=METRICS, default="random-walk")

    t = sub.add_parser("table1", help="approximation-error table over graph families")
    common(t, graph=False)
    t.add_argument("--rows", default="chain30,chain3000,knn30,knn3000",
                   help="comma- or semicolon-separated rows: chainN, knnN[-k], sbm(n,k,p,q), "
                        "file:label=path, points:label=path (use ';' when rows contain commas)")
    t.add_argument("--alphas", default="0.99,0.9999")
    t.add_argument("--reps", type=int, default=5)
    t.add_argument("--rng-seed", type=int, default=0)
    t.add_argument("--graph-seed", type=int, default=0)
    t.add_argument("--metric", choices=METRICS, default="random-walk")
    t.add_argument("--walk", choices=("lazy", "standard"), default="lazy")
    t.add_argument("--caption-check", action="store_true",
                   help="also run alpha=0.99999 and report which alpha fits the paper column")

    v = sub.add_parser("variance", help="error spread over repeated seed draws")
    common(v)
    _add_embedding_flags(v)
    v.add_argument("--trials", type=int, default=50)
    v.add_argument("--fractions", default="0.01,0.05,0.1")
    v.add_argument("--metric", choices=METRICS, default="random-walk")

    h = sub.add_parser("hypergraph", help="log-PageRank embedding of a hypergraph")
    common(h, graph=False)
    h.add_argument("path", nargs="?", help="hyperedge file, one hyperedge per line")
    h.add_argument("--labels", help="vertex,label CSV")
    h.add_argument("--planted", action="store_true", help="use the synthetic 3-block hypergraph")
    h.add_argument("--planted-seed", type=int, default=0)
    h.add_argument("--primitive", choices=("clique-expansion", "star-expansion"),
                   default="clique-expansion")
    h.add_argument("--kappa", type=float, default=0.000025)
    h.add_argument("--gamma", type=float, default=1.0)
    h.add_argument("--rho", type=float, default=0.5)
    _add_embedding_flags(h)

    pl = sub.add_parser("plot", help="SVG scatter of an embedding")
    common(pl, graph=False)
    pl.add_argument("embedding")
    pl.add_argument("--positions", help="graph.json sidecar (or edge file with one) for layout")
    pl.add_argument("--labels", help="vertex,label CSV for categorical colors")
    pl.add_argument("--color-column", type=int, default=1,
                    help="embedding column (1-based) used as the scalar color field")
    pl.add_argument("--color-by-embedding", action="store_true")
    pl.add_argument("--name", default="plot.svg")
    pl.add_argument("--title", default=None)
    return p


def main(argv=None):
    parser = build_parser()
    a = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    out = a.out
    t0 = time.perf_counter()
    try:
        os.makedirs(out, exist_ok=True)
        result = COMMANDS[a.command](a, out)
    except NumericalError as exc:
        print(f"error: numerical: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, ParseError, OSError, KeyError) as exc:
        print(f"error: data: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA
    manifest = {"command": a.command, "argv": list(sys.argv[1:] if argv is None else argv),
                "args": {k: v for k, v in vars(a).items()}, "version": __version__,
                "result": result, "timings": {"wall_seconds": time.perf_counter() - t0}}
    write_json(os.path.join(out, "manifest.json"), manifest)
    return 0


if __name__ == "__main__":
    sys.exit(main())
