"""CSV/JSON/SVG outputs shared by the command line tools."""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile

import numpy as np


def fmt(x) -> str:
    """Shortest round-tripping decimal form of a float."""
    return repr(float(x))


def atomic_write(path, text: str):
    """Write ``text`` to ``path`` through a temp file and rename."""
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path, data):
    atomic_write(path, json.dumps(data, indent=1, sort_keys=True, default=_jsonable) + "\n")


def _jsonable(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(f"not JSON serializable: {type(o)}")


def embedding_csv(Z) -> str:
    """``vertex,z1,...,zk`` rows."""
    Z = np.asarray(Z, dtype=float)
    if Z.ndim == 1:
        Z = Z[:, None]
    lines = ["vertex," + ",".join(f"z{j + 1}" for j in range(Z.shape[1]))]
    for v, row in enumerate(Z):
        lines.append(f"{v}," + ",".join(fmt(x) for x in row))
    return "\n".join(lines) + "\n"


def read_embedding_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][0] != "vertex":
        raise ValueError(f"{path}: missing 'vertex,z1,...' header")
    data = np.array([[float(x) for x in r[1:]] for r in rows[1:]], dtype=float)
    verts = [int(r[0]) for r in rows[1:]]
    if verts != list(range(len(verts))):
        raise ValueError(f"{path}: vertex column must be 0..n-1 in order")
    return data


def vector_csv(values, header=("vertex", "value")) -> str:
    lines = [",".join(header)]
    lines.extend(f"{v},{fmt(x)}" for v, x in enumerate(np.asarray(values, dtype=float)))
    return "\n".join(lines) + "\n"


def scatter_csv(points, header=("z", "u")) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(fmt(x) for x in row) for row in np.asarray(points, dtype=float))
    return "\n".join(lines) + "\n"


# --- SVG ---------------------------------------------------------------------

_PALETTE = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
            "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#637939",
            "#8c6d31", "#843c39", "#7b4173"]

# viridis-like ramp, sampled at 5 stops
_RAMP = np.array([[68, 1, 84], [59, 82, 139], [33, 145, 140], [94, 201, 98], [253, 231, 37]],
                 dtype=float)


def _ramp(t):
    t = float(np.clip(t, 0.0, 1.0)) * (len(_RAMP) - 1)
    i = min(int(t), len(_RAMP) - 2)
    c = _RAMP[i] + (t - i) * (_RAMP[i + 1] - _RAMP[i])
    return "#%02x%02x%02x" % tuple(int(round(x)) for x in c)


def scatter_svg(xy, values=None, labels=None, size=600, radius=2.0, title=None) -> str:
    """Points at ``xy`` colored by a scalar field or by categorical labels."""
    xy = np.asarray(xy, dtype=float)
    pad = 20
    lo = xy.min(axis=0)
    span = np.maximum(xy.max(axis=0) - lo, 1e-300)
    pts = pad + (xy - lo) / span * (size - 2 * pad)
    pts[:, 1] = size - pts[:, 1]
    if labels is not None:
        cats = {c: i for i, c in enumerate(dict.fromkeys(labels))}
        colors = [_PALETTE[cats[c] % len(_PALETTE)] for c in labels]
    elif values is not None:
        v = np.asarray(values, dtype=float)
        vmin, vmax = float(v.min()), float(v.max())
        scale = vmax - vmin if vmax > vmin else 1.0
        colors = [_ramp((x - vmin) / scale) for x in v]
    else:
        colors = ["#1f77b4"] * len(pts)
    out = io.StringIO()
    out.write(f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
              f'viewBox="0 0 {size} {size}">\n')
    out.write(f'<rect width="{size}" height="{size}" fill="white"/>\n')
    if title:
        out.write(f'<text x="{pad}" y="{pad - 6}" font-size="12">{title}</text>\n')
    for (x, y), c in zip(pts, colors):
        out.write(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{radius}" fill="{c}"/>\n')
    out.write("</svg>\n")
    return out.getvalue()
