"""Static outputs: per-window network drawings, index plots, JSON reports.

Everything is written as plain text with fixed number formatting so
that reruns on the same inputs are byte-identical. Every file goes
through a :class:`Sink`, which records a SHA-256 digest for the
manifest.
"""
from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path
from typing import Optional, Sequence, Union
from xml.sax.saxutils import escape

import numpy as np

from .embed import ClusterLabels, Embedding2D
from .errors import ConsistencyError, ReportIOError
from .graph import SpanningTree
from .indices import IndexPanel, write_index_csv
from .segment import Segmentation, standardize

PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)
SERIES_COLORS = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd")


class Sink:
    """Directory that remembers what was written into it."""

    def __init__(self, root: Union[str, os.PathLike]):
        self.root = Path(root)
        self.files: dict = {}
        try:
            self.root.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ReportIOError(f"cannot create output directory {self.root}: {exc}") from exc

    def write_text(self, relpath: str, text: str) -> Path:
        data = text.encode("utf-8")
        path = self.root / relpath
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_bytes(data)
        except OSError as exc:
            raise ReportIOError(f"cannot write {path}: {exc}") from exc
        self.files[relpath] = hashlib.sha256(data).hexdigest()
        return path

    def adopt(self, relpath: str) -> None:
        """Record a file some other writer put under the root."""
        self.files[relpath] = hashlib.sha256((self.root / relpath).read_bytes()).hexdigest()

    def manifest(self) -> list:
        return [{"path": p, "sha256": self.files[p]} for p in sorted(self.files)]

    def write_manifest(self, name: str = "manifest.json") -> list:
        entries = self.manifest()
        text = json.dumps({"files": entries}, indent=2) + "\n"
        try:
            (self.root / name).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise ReportIOError(f"cannot write manifest: {exc}") from exc
        return entries


def _as_sink(sink) -> Sink:
    return sink if isinstance(sink, Sink) else Sink(sink)


def _f(x: float) -> str:
    return f"{x:.3f}"


# -- per-window network drawings -------------------------------------------

def _svg(width: int, height: int, body: list) -> str:
    head = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" viewBox="0 0 {width} {height}">\n'
        f'<rect width="{width}" height="{height}" fill="white"/>\n'
    )
    return head + "\n".join(body) + "\n</svg>\n"


def tree_root(tree: SpanningTree) -> str:
    """Highest-degree node, alphabetically first among ties."""
    deg = tree.degrees()
    return min(tree.nodes, key=lambda v: (-deg[v], v))


def hierarchical_layout(tree: SpanningTree) -> dict:
    """(x slot, depth) per node for a top-down drawing rooted at the hub.

    Leaves take consecutive x slots in depth-first order with children
    visited alphabetically; parents are centred over their children.
    """
    adj = tree.adjacency()
    root = tree_root(tree)
    pos = {}
    slot = [0]

    def place(v, parent, depth):
        children = [u for u, _ in adj[v] if u != parent]
        if not children:
            pos[v] = (float(slot[0]), depth)
            slot[0] += 1
            return
        for u in children:
            place(u, v, depth + 1)
        xs = [pos[u][0] for u in children]
        pos[v] = ((min(xs) + max(xs)) / 2, depth)

    place(root, None, 0)
    return pos


def _check_consistent(tree, emb, labels):
    ref = set(tree.nodes)
    for other, what in ((emb.countries, "embedding"), (labels.countries, "cluster labels")):
        if set(other) != ref or len(other) != len(ref):
            raise ConsistencyError(f"{what} countries do not match the tree nodes")


def _mds_svg(tree, emb, labels, width_scale, size=520, margin=40):
    coords = {c: emb.coordinates[i] for i, c in enumerate(emb.countries)}
    xy = emb.coordinates
    span = max(float(np.ptp(xy[:, 0])), float(np.ptp(xy[:, 1])), 1e-12)
    center = (xy.max(axis=0) + xy.min(axis=0)) / 2
    k = (size - 2 * margin) / span

    def px(c):
        x, y = coords[c]
        return size / 2 + k * (x - center[0]), size / 2 - k * (y - center[1])

    body = ['<g class="edges" stroke="#555555" stroke-linecap="round">']
    for e in tree.edges:
        (x1, y1), (x2, y2) = px(e.i), px(e.j)
        body.append(
            f'<line class="edge" data-i="{escape(e.i)}" data-j="{escape(e.j)}" '
            f'x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" y2="{_f(y2)}" '
            f'stroke-width="{e.abs_rho * width_scale:.4f}"/>'
        )
    body.append("</g>")
    body.append('<g class="nodes">')
    for c in sorted(tree.nodes):
        x, y = px(c)
        color = PALETTE[labels.label_of(c) % len(PALETTE)]
        body.append(f'<circle class="node" data-id="{escape(c)}" cx="{_f(x)}" cy="{_f(y)}" r="7" fill="{color}"/>')
        body.append(f'<text x="{_f(x + 9)}" y="{_f(y - 9)}" font-size="11">{escape(c)}</text>')
    body.append("</g>")
    return _svg(size, size, body)


def _tree_svg(tree, labels, width_scale, dx=40, dy=60, margin=30):
    pos = hierarchical_layout(tree)
    n_slots = max(x for x, _ in pos.values()) + 1
    depth = max(d for _, d in pos.values())
    width = int(2 * margin + dx * max(n_slots - 1, 1))
    height = int(2 * margin + dy * max(depth, 1))

    def px(c):
        x, d = pos[c]
        return margin + dx * x, margin + dy * d

    body = ['<g class="edges" stroke="#555555" stroke-linecap="round">']
    for e in tree.edges:
        (x1, y1), (x2, y2) = px(e.i), px(e.j)
        body.append(
            f'<line class="edge" data-i="{escape(e.i)}" data-j="{escape(e.j)}" '
            f'x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" y2="{_f(y2)}" '
            f'stroke-width="{e.abs_rho * width_scale:.4f}"/>'
        )
    body.append("</g>")
    body.append('<g class="nodes">')
    for c in sorted(tree.nodes):
        x, y = px(c)
        color = PALETTE[labels.label_of(c) % len(PALETTE)]
        body.append(f'<circle class="node" data-id="{escape(c)}" cx="{_f(x)}" cy="{_f(y)}" r="7" fill="{color}"/>')
        body.append(f'<text x="{_f(x)}" y="{_f(y + 20)}" font-size="10" text-anchor="middle">{escape(c)}</text>')
    body.append("</g>")
    return _svg(width, height, body)


def _dot(tree, labels, width_scale):
    lines = ["graph mst {", "  node [shape=circle, style=filled];"]
    for c in sorted(tree.nodes):
        color = PALETTE[labels.label_of(c) % len(PALETTE)]
        lines.append(f'  "{c}" [label="{c}", fillcolor="{color}"];')
    for e in tree.edges:
        lines.append(f'  "{e.i}" -- "{e.j}" [penwidth={e.abs_rho * width_scale:.4f}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def render_window_graph(
    tree: SpanningTree,
    emb: Embedding2D,
    labels: ClusterLabels,
    sink,
    width_scale: float = 6.0,
    stem: Optional[str] = None,
) -> dict:
    """Write the MDS view, the hierarchical view and a DOT file of ``tree``.

    Edge widths are ``width_scale * |rho|``. Returns the written paths
    keyed by ``"mds"``, ``"tree"`` and ``"dot"``.
    """
    _check_consistent(tree, emb, labels)
    sink = _as_sink(sink)
    if stem is None:
        stem = f"window_{tree.window_index:03d}"
        if tree.label_year is not None:
            stem += f"_{tree.label_year}"
    return {
        "mds": sink.write_text(f"{stem}_mds.svg", _mds_svg(tree, emb, labels, width_scale)),
        "tree": sink.write_text(f"{stem}_tree.svg", _tree_svg(tree, labels, width_scale)),
        "dot": sink.write_text(f"{stem}.dot", _dot(tree, labels, width_scale)),
    }


# -- index plot and report -------------------------------------------------

def plot_segmentations(panel: IndexPanel, segs: Sequence[Segmentation], width=900, row_height=260) -> str:
    """One stacked subplot per segmentation: standardized series, era
    levels and a vertical line at each break."""
    X, _ = standardize(panel)
    T = panel.T
    margin_l, margin_r, margin_t = 60, 170, 30
    plot_w = width - margin_l - margin_r
    inner_h = row_height - 2 * margin_t
    lo = float(min(X.min(), *(e.levels.min() for s in segs for e in s.eras))) if segs else float(X.min())
    hi = float(max(X.max(), *(e.levels.max() for s in segs for e in s.eras))) if segs else float(X.max())
    if hi - lo < 1e-12:
        hi, lo = lo + 1, lo - 1
    n_rows = max(len(segs), 1)
    height = n_rows * row_height

    def sx(t):
        return margin_l + plot_w * (t / (T - 1))

    body = []
    for r in range(n_rows):
        top = r * row_height + margin_t

        def sy(v, top=top):
            return top + inner_h * (hi - v) / (hi - lo)

        seg = segs[r] if segs else None
        title = "standardized indices" if seg is None else (
            f"lambda = {seg.lam:.6g}, {seg.n_eras} eras ({seg.penalty})"
        )
        body.append(f'<g class="subplot" data-row="{r}">')
        body.append(
            f'<rect class="frame" x="{margin_l}" y="{top}" width="{plot_w}" height="{inner_h}" '
            f'fill="none" stroke="#999999"/>'
        )
        body.append(f'<text x="{margin_l}" y="{top - 8}" font-size="12">{escape(title)}</text>')
        for k in range(panel.K):
            pts = " ".join(f"{_f(sx(t))},{_f(sy(X[k, t]))}" for t in range(T))
            body.append(
                f'<polyline class="series" data-index="{panel.names[k]}" points="{pts}" '
                f'fill="none" stroke="{SERIES_COLORS[k % 5]}" stroke-opacity="0.45" stroke-width="1"/>'
            )
        if seg is not None:
            for k in range(panel.K):
                pts = []
                for e in seg.eras:
                    y = sy(e.levels[k])
                    pts.append(f"{_f(sx(e.start_window - 0.5 if e.start_window else 0))},{_f(y)}")
                    end = e.end_window + 0.5 if e.end_window < T - 1 else T - 1
                    pts.append(f"{_f(sx(end))},{_f(y)}")
                body.append(
                    f'<polyline class="level" data-index="{panel.names[k]}" points="{" ".join(pts)}" '
                    f'fill="none" stroke="{SERIES_COLORS[k % 5]}" stroke-width="2.5"/>'
                )
            for t in seg.change_points:
                x = sx(t + 0.5)
                body.append(
                    f'<line class="break" data-window="{t}" x1="{_f(x)}" y1="{top}" '
                    f'x2="{_f(x)}" y2="{top + inner_h}" stroke="black" stroke-dasharray="4,3"/>'
                )
        for t in range(0, T, max(1, T // 10)):
            body.append(
                f'<text x="{_f(sx(t))}" y="{top + inner_h + 14}" font-size="10" '
                f'text-anchor="middle">{panel.label_years[t]}</text>'
            )
        for k, name in enumerate(panel.names):
            y = top + 14 * (k + 1)
            body.append(
                f'<text x="{width - margin_r + 10}" y="{y}" font-size="11" '
                f'fill="{SERIES_COLORS[k % 5]}">{escape(name)}</text>'
            )
        body.append("</g>")
    return _svg(width, height, body)


def segmentation_json(seg: Segmentation) -> str:
    return json.dumps(seg.to_dict(), indent=2) + "\n"


def write_report(panel: IndexPanel, segs: Sequence[Segmentation], sink_dir) -> list:
    """Write the index CSV, one JSON per segmentation and the index plot.

    Returns the manifest entries (``{"path", "sha256"}``) for every file
    in the sink, which is also written to ``manifest.json``.
    """
    for s in segs:
        if s.eras[-1].end_window + 1 != panel.T:
            raise ConsistencyError("segmentation length does not match the index panel")
    sink = _as_sink(sink_dir)
    try:
        write_index_csv(panel, sink.root / "indices.csv")
    except OSError as exc:
        raise ReportIOError(f"cannot write indices.csv: {exc}") from exc
    sink.adopt("indices.csv")
    for i, s in enumerate(segs):
        sink.write_text(f"segmentation_{i:02d}.json", segmentation_json(s))
    sink.write_text("indices.svg", plot_segmentations(panel, segs))
    return sink.write_manifest()
