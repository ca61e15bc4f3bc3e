"""End-to-end orchestration: price panel -> trees -> indices -> eras -> files."""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

from .embed import complete_linkage_clusters, mds_embed
from .errors import WindowTooSparse
from .graph import window_tree, write_distance_csv, write_edges_csv
from .indices import IndexPanel, build_index_panel, read_index_csv
from .panel import PricePanel, WindowSpec, load_panel, slice_windows
from .report import Sink, render_window_graph, write_report
from .segment import (
    SegmenterConfig,
    lambda_for_era_count,
    nested_change_points,
    segment,
    standardize,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PipelineConfig:
    input: str = ""
    outdir: str = "out"
    window_months: int = 72
    step_months: int = 12
    min_coverage: float = 0.5
    min_pair_overlap: float = 0.5
    lambdas: tuple = ()
    target_eras: tuple = ()
    penalty: str = "group_l2"
    tol: float = 1e-9
    max_iter: int = 100_000
    changepoint_eps: float = 1e-3
    clusters: int = 5
    render: bool = True
    dump_windows: bool = False
    eccentricity: str = "diameter"
    edge_width: float = 6.0
    seed: int = 0

    def window_spec(self) -> WindowSpec:
        return WindowSpec(self.window_months, self.step_months)

    def segmenter(self, lam: float = 0.0) -> SegmenterConfig:
        return SegmenterConfig(
            lam=lam,
            penalty=self.penalty,
            tol=self.tol,
            max_iterations=self.max_iter,
            changepoint_eps=self.changepoint_eps,
        )

    def validate(self, need_segmentation: bool = True) -> None:
        if need_segmentation and not (self.lambdas or self.target_eras):
            raise ValueError("give at least one --lambda or --target-eras")
        if not self.input:
            raise ValueError("--input is required")
        self.window_spec()
        self.segmenter()


# -- config file -----------------------------------------------------------

_LIST_KEYS = {"lambda": "lambdas", "target-eras": "target_eras"}
_FLAG_KEYS = {"no-render": "render"}


def _key_to_field(key: str) -> str:
    key = key.strip().lstrip("-")
    if key in _LIST_KEYS:
        return _LIST_KEYS[key]
    if key in _FLAG_KEYS:
        return _FLAG_KEYS[key]
    return key.replace("-", "_")


def _coerce(name: str, raw: str, current):
    raw = raw.strip()
    if name == "penalty":
        return raw.replace("-", "_")
    if name == "render":
        return not _truthy(raw)
    if name == "dump_windows":
        return _truthy(raw)
    if name == "lambdas":
        return current + tuple(float(x) for x in raw.split(",") if x.strip())
    if name == "target_eras":
        return current + tuple(int(x) for x in raw.split(",") if x.strip())
    kind = type(getattr(PipelineConfig(), name))
    return kind(raw)


def _truthy(raw: str) -> bool:
    return raw.strip().lower() in ("1", "true", "yes", "on")


def parse_config_text(text: str, base: PipelineConfig = PipelineConfig()) -> PipelineConfig:
    """Flat ``key = value`` lines; keys are the command-line flag names.

    ``lambda`` and ``target-eras`` may repeat or hold comma-separated
    values; ``#`` starts a comment.
    """
    known = {f.name for f in fields(PipelineConfig)}
    updates = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key = value")
        key, value = line.split("=", 1)
        name = _key_to_field(key)
        if name not in known:
            raise ValueError(f"config line {lineno}: unknown key {key.strip()!r}")
        current = updates.get(name, () if name in ("lambdas", "target_eras") else None)
        updates[name] = _coerce(name, value, current)
    return replace(base, **updates)


def load_config(path) -> PipelineConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config_text(fh.read())


def format_config(cfg: PipelineConfig) -> str:
    """Inverse of :func:`parse_config_text`."""
    lines = []
    for f in fields(PipelineConfig):
        v = getattr(cfg, f.name)
        if f.name == "lambdas":
            lines += [f"lambda = {x!r}" for x in v]
        elif f.name == "target_eras":
            lines += [f"target-eras = {x}" for x in v]
        elif f.name == "render":
            lines.append(f"no-render = {str(not v).lower()}")
        elif f.name == "dump_windows":
            lines.append(f"dump-windows = {str(v).lower()}")
        elif f.name == "penalty":
            lines.append(f"penalty = {v.replace('_', '-')}")
        else:
            lines.append(f"{f.name.replace('_', '-')} = {v!r}" if isinstance(v, float) else f"{f.name.replace('_', '-')} = {v}")
    return "\n".join(lines) + "\n"


# -- stages ----------------------------------------------------------------

@dataclass
class WindowResult:
    window: object
    corr: object
    dist: object
    tree: object


@dataclass
class PipelineResult:
    config: PipelineConfig
    manifest: list = field(default_factory=list)
    panel: Optional[PricePanel] = None
    windows: list = field(default_factory=list)
    index_panel: Optional[IndexPanel] = None
    segmentations: list = field(default_factory=list)
    nesting: list = field(default_factory=list)


def build_windows(panel: PricePanel, cfg: PipelineConfig) -> list:
    out = []
    for w in slice_windows(panel, cfg.window_spec()):
        try:
            corr, dist, tree = window_tree(w, cfg.min_coverage, cfg.min_pair_overlap)
        except WindowTooSparse as exc:
            exc.args = (f"{exc} (window {w.start}..{w.end}, label year {w.label_year})",)
            raise
        logger.info(
            "window %d (%s..%s): %d countries%s",
            w.window_index, w.start, w.end, len(corr.countries),
            "; dropped " + ", ".join(f"{c} ({why})" for c, why in corr.dropped) if corr.dropped else "",
        )
        out.append(WindowResult(w, corr, dist, tree))
    return out


def segment_index_panel(ip: IndexPanel, cfg: PipelineConfig) -> list:
    X, std = standardize(ip)
    kw = dict(standardization=std, label_years=ip.label_years, names=ip.names)
    segs = []
    for lam in cfg.lambdas:
        seg = segment(X, cfg.segmenter(lam), **kw)
        logger.info("lambda %g: %d eras, change points %s", lam, seg.n_eras, seg.change_points)
        segs.append(seg)
    for target in cfg.target_eras:
        found = lambda_for_era_count(X, target, config=cfg.segmenter(), **kw)
        logger.info(
            "target %d eras: lambda %.6g gives %d eras%s", target, found.lam,
            found.segmentation.n_eras, "" if found.exact else " (not exact)",
        )
        segs.append(found.segmentation)
    return segs


def render_windows(windows: list, sink: Sink, cfg: PipelineConfig) -> None:
    for wr in windows:
        emb = mds_embed(wr.dist)
        labels = complete_linkage_clusters(wr.dist, min(cfg.clusters, wr.dist.n))
        stem = f"windows/window_{wr.tree.window_index:03d}_{wr.tree.label_year}"
        render_window_graph(wr.tree, emb, labels, sink, width_scale=cfg.edge_width, stem=stem)


def dump_windows(windows: list, sink: Sink) -> None:
    for wr in windows:
        stem = f"windows/window_{wr.tree.window_index:03d}_{wr.tree.label_year}"
        (sink.root / "windows").mkdir(parents=True, exist_ok=True)
        write_distance_csv(wr.dist, sink.root / f"{stem}_distance.csv")
        write_edges_csv(wr.tree, sink.root / f"{stem}_edges.csv")
        sink.adopt(f"{stem}_distance.csv")
        sink.adopt(f"{stem}_edges.csv")


def _summary(windows: list, nesting: list) -> str:
    doc = {
        "windows": [
            {
                "window": wr.window.window_index,
                "label_year": wr.window.label_year,
                "node_count": len(wr.corr.countries),
                "dropped": [{"country": c, "reason": why} for c, why in wr.corr.dropped],
            }
            for wr in windows
        ],
        "nested_change_points": [
            {"coarse_lambda": a, "fine_lambda": b, "nested": ok} for a, b, ok in nesting
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def compute_indices(cfg: PipelineConfig) -> PipelineResult:
    res = PipelineResult(cfg)
    res.panel = load_panel(cfg.input)
    res.windows = build_windows(res.panel, cfg)
    res.index_panel = build_index_panel([wr.tree for wr in res.windows], cfg.eccentricity)
    return res


def run_pipeline(cfg: PipelineConfig) -> PipelineResult:
    """load -> windows -> correlations -> MSTs -> indices -> eras -> files."""
    cfg.validate()
    res = compute_indices(cfg)
    res.segmentations = segment_index_panel(res.index_panel, cfg)
    res.nesting = nested_change_points(res.segmentations)
    for a, b, ok in res.nesting:
        logger.info("change points at lambda %.6g %s those at %.6g", a, "nest in" if ok else "do not nest in", b)

    sink = Sink(cfg.outdir)
    if cfg.render:
        render_windows(res.windows, sink, cfg)
    if cfg.dump_windows:
        dump_windows(res.windows, sink)
    sink.write_text("summary.json", _summary(res.windows, res.nesting))
    write_config(cfg, sink.root)
    res.manifest = write_report(res.index_panel, res.segmentations, sink)
    return res


def run_indices(cfg: PipelineConfig) -> PipelineResult:
    cfg.validate(need_segmentation=False)
    res = compute_indices(cfg)
    sink = Sink(cfg.outdir)
    if cfg.dump_windows:
        dump_windows(res.windows, sink)
    sink.write_text("summary.json", _summary(res.windows, []))
    res.manifest = write_report(res.index_panel, [], sink)
    return res


def run_segment(cfg: PipelineConfig) -> PipelineResult:
    """Segment a previously written index CSV (``cfg.input``)."""
    cfg.validate()
    res = PipelineResult(cfg)
    res.index_panel = read_index_csv(cfg.input)
    res.segmentations = segment_index_panel(res.index_panel, cfg)
    res.nesting = nested_change_points(res.segmentations)
    res.manifest = write_report(res.index_panel, res.segmentations, Sink(cfg.outdir))
    return res


def run_render(cfg: PipelineConfig) -> PipelineResult:
    cfg.validate(need_segmentation=False)
    res = PipelineResult(cfg)
    res.panel = load_panel(cfg.input)
    res.windows = build_windows(res.panel, cfg)
    sink = Sink(cfg.outdir)
    render_windows(res.windows, sink, cfg)
    res.manifest = sink.write_manifest()
    return res


def write_config(cfg: PipelineConfig, outdir) -> Path:
    """Effective configuration, kept out of the manifest because it names
    the output directory."""
    path = Path(outdir) / "config.txt"
    path.write_text(format_config(cfg), encoding="utf-8")
    return path
