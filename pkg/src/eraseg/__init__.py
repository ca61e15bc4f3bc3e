"""Era segmentation of multi-country price panels.

Sliding-window correlation-distance minimum spanning trees are reduced
to five topology indices, which are jointly denoised into piecewise
constant levels by a mixed-norm total-variation program.
"""
import logging

from .embed import complete_linkage_clusters, mds_embed
from .errors import EraSegError
from .graph import minimum_spanning_tree, to_distance, window_correlations
from .indices import INDEX_NAMES, IndexPanel, build_index_panel, compute_indices
from .panel import PricePanel, WindowSpec, load_panel, slice_windows, write_panel
from .pipeline import PipelineConfig, run_pipeline
from .segment import (
    SegmenterConfig,
    extract_change_points,
    group_tv_denoise,
    lambda_for_era_count,
    objective,
    standardize,
)

__version__ = "0.1.0"

__all__ = [
    "EraSegError",
    "INDEX_NAMES",
    "IndexPanel",
    "PipelineConfig",
    "PricePanel",
    "SegmenterConfig",
    "WindowSpec",
    "build_index_panel",
    "complete_linkage_clusters",
    "compute_indices",
    "extract_change_points",
    "group_tv_denoise",
    "lambda_for_era_count",
    "load_panel",
    "mds_embed",
    "minimum_spanning_tree",
    "objective",
    "run_pipeline",
    "slice_windows",
    "standardize",
    "to_distance",
    "window_correlations",
    "write_panel",
]

logging.getLogger(__name__).addHandler(logging.NullHandler())
