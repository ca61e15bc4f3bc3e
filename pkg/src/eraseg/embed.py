"""Planar embedding and clustering of a window's distance matrix.

Both are only used for drawing: classical (Torgerson) MDS places the
nodes, complete-linkage clusters colour them.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadK, TooFewNodes
from .graph import DistanceMatrix


@dataclass(frozen=True, eq=False)
class Embedding2D:
    countries: tuple
    coordinates: np.ndarray
    eigenvalues: np.ndarray  # all eigenvalues of the centred Gram matrix, descending
    n_clamped: int  # negative eigenvalues among the two retained

    @property
    def n_negative(self) -> int:
        tol = 1e-12 * max(1.0, float(np.abs(self.eigenvalues).max()))
        return int((self.eigenvalues < -tol).sum())

    def pairwise_distances(self) -> np.ndarray:
        diff = self.coordinates[:, None, :] - self.coordinates[None, :, :]
        return np.sqrt((diff**2).sum(axis=-1))


def mds_embed(dist: DistanceMatrix) -> Embedding2D:
    """Classical MDS into two dimensions.

    Double-centres the squared distances, keeps the two largest
    eigenpairs (negative eigenvalues clamped to zero) and fixes the sign
    of each axis so the alphabetically first country with a non-zero
    coordinate sits on the positive side.
    """
    n = dist.n
    if n < 2:
        raise TooFewNodes(f"need at least 2 nodes to embed, got {n}")
    D2 = dist.d**2
    J = np.eye(n) - 1.0 / n
    B = -0.5 * J @ D2 @ J
    B = 0.5 * (B + B.T)
    evals, evecs = np.linalg.eigh(B)
    order = np.argsort(evals)[::-1]
    evals, evecs = evals[order], evecs[:, order]

    top = evals[:2]
    coords = evecs[:, :2] * np.sqrt(np.clip(top, 0.0, None))
    coords = coords - coords.mean(axis=0)

    ranked = sorted(range(n), key=lambda i: dist.countries[i])
    for c in range(2):
        col = coords[:, c]
        cutoff = 1e-12 * max(np.abs(col).max(), 1e-300)
        for i in ranked:
            if abs(col[i]) > cutoff:
                if col[i] < 0:
                    coords[:, c] = -col
                break
    return Embedding2D(
        countries=dist.countries,
        coordinates=coords,
        eigenvalues=evals,
        n_clamped=int((top < 0).sum()),
    )


@dataclass(frozen=True, eq=False)
class ClusterLabels:
    countries: tuple
    labels: np.ndarray
    k: int
    merge_heights: tuple = ()

    def label_of(self, country: str) -> int:
        return int(self.labels[self.countries.index(country)])

    def groups(self) -> list:
        return [
            tuple(sorted(c for c, l in zip(self.countries, self.labels) if l == g))
            for g in range(self.k)
        ]


def complete_linkage_clusters(dist: DistanceMatrix, k: int) -> ClusterLabels:
    """Agglomerative clustering with complete linkage, cut at ``k`` clusters.

    Ties between equally distant cluster pairs go to the pair whose
    (alphabetically first member, ...) keys are smallest. Labels are
    numbered by the alphabetically first member of each cluster.
    """
    n = dist.n
    if not 1 <= k <= n:
        raise BadK(f"k must be in [1, {n}], got {k}")
    codes = dist.countries
    clusters = {i: [i] for i in range(n)}
    first = {i: codes[i] for i in range(n)}
    link = dist.d.astype(float).copy()
    heights = []

    while len(clusters) > k:
        best = None
        alive = sorted(clusters)
        for ai, a in enumerate(alive):
            for b in alive[ai + 1:]:
                pair = tuple(sorted((first[a], first[b])))
                key = (link[a, b], pair)
                if best is None or key < best[0]:
                    best = (key, a, b)
        (h, _), a, b = best
        # complete linkage: distance to the union is the larger of the two
        merged = np.maximum(link[a], link[b])
        link[a, :] = merged
        link[:, a] = merged
        link[a, a] = 0.0
        clusters[a].extend(clusters.pop(b))
        first[a] = min(first[a], first[b])
        heights.append(float(h))

    labels = np.empty(n, dtype=int)
    for lab, root in enumerate(sorted(clusters, key=lambda r: first[r])):
        labels[clusters[root]] = lab
    return ClusterLabels(countries=codes, labels=labels, k=k, merge_heights=tuple(heights))
