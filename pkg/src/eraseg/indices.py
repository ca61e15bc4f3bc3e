"""Scalar topology indices of spanning trees and their time-series panel.

Three distance indices (in units of the edge weights) and two
connectivity indices (dimensionless) are extracted per tree:

=====================  ==================================================
mean_nn_distance       mean over nodes of the lightest incident edge
mean_path_length       mean weighted tree-path length over node pairs
eccentricity           tree diameter (max weighted path length)
degree_std             population standard deviation of node degrees
mean_neighbor_degree   mean over nodes of the average neighbour degree
=====================  ==================================================

Both connectivity indices grow as a tree goes from a chain to a star.
"""
from __future__ import annotations

import csv
import math
import os
from collections import deque
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NonContiguousWindows
from .graph import SpanningTree

INDEX_NAMES = (
    "mean_nn_distance",
    "mean_path_length",
    "eccentricity",
    "degree_std",
    "mean_neighbor_degree",
)
DISTANCE_INDICES = INDEX_NAMES[:3]
CONNECTIVITY_INDICES = INDEX_NAMES[3:]


@dataclass(frozen=True)
class TopologyIndexVector:
    mean_nn_distance: float
    mean_path_length: float
    eccentricity: float
    degree_std: float
    mean_neighbor_degree: float
    window_index: int
    node_count: int

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in INDEX_NAMES])


def path_length_matrix(tree: SpanningTree) -> np.ndarray:
    """Weighted path lengths between all node pairs, in ``tree.nodes`` order."""
    pos = {v: k for k, v in enumerate(tree.nodes)}
    adj = tree.adjacency()
    n = tree.n
    out = np.zeros((n, n))
    for src in tree.nodes:
        dist = {src: 0.0}
        queue = deque([src])
        while queue:
            u = queue.popleft()
            for v, w in adj[u]:
                if v not in dist:
                    dist[v] = dist[u] + w
                    queue.append(v)
        if len(dist) != n:
            raise ValueError("tree is not connected")
        row = out[pos[src]]
        for v, dv in dist.items():
            row[pos[v]] = dv
    return out


def compute_indices(tree: SpanningTree, eccentricity: str = "diameter") -> TopologyIndexVector:
    """Reduce ``tree`` to its five topology indices.

    ``eccentricity="mean"`` replaces the diameter by the node-averaged
    maximum path length.
    """
    n = tree.n
    if n < 2 or len(tree.edges) != n - 1:
        raise ValueError("need a spanning tree with n >= 2 nodes and n - 1 edges")
    adj = tree.adjacency()
    nodes = tree.nodes

    nn = math.fsum(min(w for _, w in adj[v]) for v in nodes) / n

    paths = path_length_matrix(tree)
    iu = np.triu_indices(n, k=1)
    mean_path = math.fsum(paths[iu]) / len(iu[0])
    if eccentricity == "diameter":
        ecc = float(paths.max())
    elif eccentricity == "mean":
        ecc = math.fsum(paths.max(axis=1)) / n
    else:
        raise ValueError(f"unknown eccentricity mode {eccentricity!r}")

    deg = np.array([len(adj[v]) for v in nodes], dtype=float)
    degree_std = float(np.sqrt(np.mean((deg - deg.mean()) ** 2)))
    degree_of = dict(zip(nodes, deg))
    nbr = math.fsum(
        math.fsum(degree_of[u] for u, _ in adj[v]) / len(adj[v]) for v in nodes
    ) / n

    return TopologyIndexVector(
        mean_nn_distance=nn,
        mean_path_length=mean_path,
        eccentricity=ecc,
        degree_std=degree_std,
        mean_neighbor_degree=nbr,
        window_index=tree.window_index,
        node_count=n,
    )


@dataclass(frozen=True, eq=False)
class IndexPanel:
    """K x T matrix of index series, one column per window."""

    values: np.ndarray
    label_years: tuple
    node_counts: tuple
    names: tuple = INDEX_NAMES

    def __post_init__(self):
        values = np.array(self.values, dtype=float, order="C")
        object.__setattr__(self, "values", values)
        if values.ndim != 2 or values.shape[0] != len(self.names):
            raise ValueError(f"expected {len(self.names)} index rows, got shape {values.shape}")
        if not (values.shape[1] == len(self.label_years) == len(self.node_counts)):
            raise ValueError("labels and node counts must have one entry per window")
        if not np.all(np.isfinite(values)):
            raise ValueError("index panel has missing or non-finite entries")

    @property
    def T(self) -> int:
        return self.values.shape[1]

    @property
    def K(self) -> int:
        return self.values.shape[0]

    def row(self, name: str) -> np.ndarray:
        return self.values[self.names.index(name)]


def build_index_panel(trees: Sequence[SpanningTree], eccentricity: str = "diameter") -> IndexPanel:
    if len(trees) < 2:
        raise NonContiguousWindows(f"need at least 2 windows, got {len(trees)}")
    idx = [t.window_index for t in trees]
    if idx != list(range(idx[0], idx[0] + len(idx))):
        raise NonContiguousWindows(f"window indices are not consecutive: {idx}")
    vecs = [compute_indices(t, eccentricity) for t in trees]
    return IndexPanel(
        values=np.column_stack([v.as_array() for v in vecs]),
        label_years=tuple(t.label_year for t in trees),
        node_counts=tuple(v.node_count for v in vecs),
    )


def write_index_csv(panel: IndexPanel, path: "str | os.PathLike") -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["label_year", "node_count", *panel.names])
        for t in range(panel.T):
            w.writerow(
                [panel.label_years[t], panel.node_counts[t], *(repr(float(v)) for v in panel.values[:, t])]
            )


def read_index_csv(path: "str | os.PathLike") -> IndexPanel:
    with open(path, newline="", encoding="utf-8-sig") as fh:
        rows = list(csv.reader(fh))
    header = rows[0]
    expected = ["label_year", "node_count", *INDEX_NAMES]
    if [h.strip() for h in header] != expected:
        raise ValueError(f"index CSV header must be {','.join(expected)}")
    body = [r for r in rows[1:] if r]
    years = tuple(int(r[0]) for r in body)
    counts = tuple(int(r[1]) for r in body)
    values = np.array([[float(x) for x in r[2:]] for r in body]).T
    return IndexPanel(values=values, label_years=years, node_counts=counts)
