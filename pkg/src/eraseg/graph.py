"""Per-window dependence graphs: correlations, correlation distance, MST.

Correlations are computed on price *levels* over the months where both
countries are observed. The distance used for the tree is
``d = 1 - rho**2``, so strongly anti-correlated markets are as close as
strongly correlated ones.
"""
from __future__ import annotations

import csv
import logging
import math
import os
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import WindowTooSparse
from .panel import WindowView

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    countries: tuple
    rho: np.ndarray
    window_index: int = 0
    label_year: Optional[int] = None
    dropped: tuple = ()  # (country, reason) pairs removed from this window

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=float)
        n = len(self.countries)
        if rho.shape != (n, n) or n < 2:
            raise ValueError(f"correlation matrix must be n x n with n >= 2, got {rho.shape}")
        if not np.array_equal(rho, rho.T):
            raise ValueError("correlation matrix is not symmetric")
        if np.any(np.abs(rho) > 1) or np.any(np.diag(rho) != 1):
            raise ValueError("correlations must lie in [-1, 1] with unit diagonal")
        object.__setattr__(self, "rho", rho)


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    countries: tuple
    d: np.ndarray
    abs_rho: Optional[np.ndarray] = None
    window_index: int = 0
    label_year: Optional[int] = None

    def __post_init__(self):
        d = np.asarray(self.d, dtype=float)
        n = len(self.countries)
        if d.shape != (n, n):
            raise ValueError(f"distance matrix shape {d.shape} does not match {n} countries")
        if not np.array_equal(d, d.T) or np.any(np.diag(d) != 0):
            raise ValueError("distance matrix must be symmetric with zero diagonal")
        if not np.all(np.isfinite(d)):
            raise ValueError("distance matrix has non-finite entries")
        object.__setattr__(self, "d", d)
        if self.abs_rho is None:
            object.__setattr__(self, "abs_rho", np.sqrt(np.clip(1.0 - d, 0.0, 1.0)))

    @property
    def n(self) -> int:
        return len(self.countries)

    def index(self, country: str) -> int:
        return self.countries.index(country)


@dataclass(frozen=True)
class Edge:
    i: str
    j: str
    weight: float
    abs_rho: float


@dataclass(frozen=True, eq=False)
class SpanningTree:
    nodes: tuple
    edges: tuple
    window_index: int = 0
    label_year: Optional[int] = None

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def total_weight(self) -> float:
        return math.fsum(e.weight for e in self.edges)

    def edge_set(self) -> frozenset:
        return frozenset(frozenset((e.i, e.j)) for e in self.edges)

    def adjacency(self) -> dict:
        """Map node -> list of (neighbor, weight), neighbors sorted by code."""
        adj = {v: [] for v in self.nodes}
        for e in self.edges:
            adj[e.i].append((e.j, e.weight))
            adj[e.j].append((e.i, e.weight))
        for v in adj:
            adj[v].sort()
        return adj

    def degrees(self) -> dict:
        deg = {v: 0 for v in self.nodes}
        for e in self.edges:
            deg[e.i] += 1
            deg[e.j] += 1
        return deg


# -- correlations ----------------------------------------------------------

def pearson(x: np.ndarray, y: np.ndarray) -> float:
    """Pearson correlation of two equal-length, non-constant samples."""
    xc = x - x.mean()
    yc = y - y.mean()
    # sqrt(a*b) rather than sqrt(a)*sqrt(b): identical inputs give exactly 1
    r = float(np.dot(xc, yc) / math.sqrt(float(np.dot(xc, xc)) * float(np.dot(yc, yc))))
    return min(1.0, max(-1.0, r))


def _is_constant(x: np.ndarray) -> bool:
    return x.size == 0 or bool(np.all(x == x[0]))


def window_correlations(
    window: WindowView,
    min_coverage_fraction: float = 0.5,
    min_pair_overlap_fraction: float = 0.5,
) -> CorrelationMatrix:
    """Signed Pearson correlations among the countries usable in ``window``.

    A country is usable if it is observed on at least
    ``min_coverage_fraction`` of the window. Every retained pair must also
    overlap on at least ``min_pair_overlap_fraction`` of the window with
    neither series constant on the overlap; offending countries are
    dropped one at a time (constant series first, then lowest coverage,
    ties dropping the larger code) until the matrix is complete.
    """
    for frac in (min_coverage_fraction, min_pair_overlap_fraction):
        if not 0 < frac <= 1:
            raise ValueError("coverage fractions must lie in (0, 1]")
    L = window.length
    vals = window.values
    obs = ~np.isnan(vals)
    coverage = obs.sum(axis=0)
    dropped = []

    keep = []
    for j, code in enumerate(window.countries):
        if coverage[j] == 0:
            continue
        if coverage[j] < min_coverage_fraction * L:
            dropped.append((code, "coverage"))
        elif _is_constant(vals[obs[:, j], j]):
            dropped.append((code, "constant"))
        else:
            keep.append(j)

    def bad_pairs(cols):
        bad = []
        for a in range(len(cols)):
            for b in range(a + 1, len(cols)):
                i, j = cols[a], cols[b]
                both = obs[:, i] & obs[:, j]
                if (
                    both.sum() < min_pair_overlap_fraction * L
                    or _is_constant(vals[both, i])
                    or _is_constant(vals[both, j])
                ):
                    bad.append((i, j))
        return bad

    while len(keep) >= 2:
        bad = bad_pairs(keep)
        if not bad:
            break
        involved = sorted({c for pair in bad for c in pair})
        victim = max(involved, key=lambda c: (-coverage[c], window.countries[c]))
        keep.remove(victim)
        dropped.append((window.countries[victim], "pair"))

    if len(keep) < 2:
        raise WindowTooSparse(window.window_index, len(keep))

    n = len(keep)
    rho = np.eye(n)
    for a in range(n):
        for b in range(a + 1, n):
            i, j = keep[a], keep[b]
            both = obs[:, i] & obs[:, j]
            rho[a, b] = rho[b, a] = pearson(vals[both, i], vals[both, j])
    if dropped:
        logger.debug("window %d dropped %s", window.window_index, dropped)
    return CorrelationMatrix(
        countries=tuple(window.countries[j] for j in keep),
        rho=rho,
        window_index=window.window_index,
        label_year=window.label_year,
        dropped=tuple(dropped),
    )


def to_distance(corr: CorrelationMatrix) -> DistanceMatrix:
    d = 1.0 - corr.rho**2
    np.fill_diagonal(d, 0.0)
    return DistanceMatrix(
        countries=corr.countries,
        d=d,
        abs_rho=np.abs(corr.rho),
        window_index=corr.window_index,
        label_year=corr.label_year,
    )


# -- minimum spanning tree -------------------------------------------------

class _DisjointSet:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, a):
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True


def edge_order(dist: DistanceMatrix) -> list:
    """All candidate edges as ``(d, lo_code, hi_code, i, j)`` in Kruskal order."""
    c = dist.countries
    out = []
    for i in range(dist.n):
        for j in range(i + 1, dist.n):
            lo, hi = sorted((c[i], c[j]))
            out.append((float(dist.d[i, j]), lo, hi, i, j))
    out.sort(key=lambda e: e[:3])
    return out


def minimum_spanning_tree(dist: DistanceMatrix) -> SpanningTree:
    """Kruskal's algorithm with edges ordered by (weight, code pair).

    The secondary key makes the result unique and independent of the
    input country ordering when weights tie.
    """
    if dist.n < 2:
        raise ValueError("need at least 2 nodes")
    ds = _DisjointSet(dist.n)
    edges = []
    for w, lo, hi, i, j in edge_order(dist):
        if ds.union(i, j):
            edges.append(Edge(lo, hi, w, float(dist.abs_rho[i, j])))
            if len(edges) == dist.n - 1:
                break
    return SpanningTree(
        nodes=dist.countries,
        edges=tuple(edges),
        window_index=dist.window_index,
        label_year=dist.label_year,
    )


def window_tree(
    window: WindowView,
    min_coverage_fraction: float = 0.5,
    min_pair_overlap_fraction: float = 0.5,
) -> tuple[CorrelationMatrix, DistanceMatrix, SpanningTree]:
    corr = window_correlations(window, min_coverage_fraction, min_pair_overlap_fraction)
    dist = to_distance(corr)
    return corr, dist, minimum_spanning_tree(dist)


# -- dumps -----------------------------------------------------------------

def write_distance_csv(dist: DistanceMatrix, path: "str | os.PathLike") -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["", *dist.countries])
        for code, row in zip(dist.countries, dist.d):
            w.writerow([code, *(repr(float(v)) for v in row)])


def write_edges_csv(tree: SpanningTree, path: "str | os.PathLike") -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["i", "j", "d", "abs_rho"])
        for e in tree.edges:
            w.writerow([e.i, e.j, repr(e.weight), repr(e.abs_rho)])


def tree_from_edges(nodes: Sequence[str], edges: Sequence[tuple], window_index: int = 0) -> SpanningTree:
    """Build a :class:`SpanningTree` from ``(i, j, weight)`` triples.

    Convenience for hand-made trees; ``abs_rho`` is derived from the
    weight as if it were a correlation distance.
    """
    out = []
    for i, j, w in edges:
        lo, hi = sorted((i, j))
        out.append(Edge(lo, hi, float(w), math.sqrt(min(1.0, max(0.0, 1.0 - w)))))
    return SpanningTree(nodes=tuple(nodes), edges=tuple(out), window_index=window_index)
