import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import codes, random_distance
from eraseg.embed import complete_linkage_clusters, mds_embed
from eraseg.errors import BadK, TooFewNodes
from eraseg.graph import DistanceMatrix


def planar_distance(points, names=None):
    diff = points[:, None, :] - points[None, :, :]
    d = np.sqrt((diff**2).sum(axis=-1))
    return DistanceMatrix(names or codes(len(points)), d)


def test_two_points():
    emb = mds_embed(DistanceMatrix(("A", "B"), np.array([[0, 0.8], [0.8, 0]])))
    assert emb.coordinates == pytest.approx(np.array([[0.4, 0.0], [-0.4, 0.0]]), abs=1e-12)
    assert emb.pairwise_distances()[0, 1] == pytest.approx(0.8, abs=1e-12)


def test_equilateral_triangle():
    d = np.ones((3, 3)) - np.eye(3)
    emb = mds_embed(DistanceMatrix(("A", "B", "C"), d))
    assert emb.pairwise_distances() == pytest.approx(d, abs=1e-9)
    assert emb.n_clamped == 0


@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 32))
def test_planar_round_trip(seed, n):
    pts = np.random.default_rng(seed).uniform(-1, 1, size=(n, 2))
    dist = planar_distance(pts)
    emb = mds_embed(dist)
    assert np.max(np.abs(emb.pairwise_distances() - dist.d)) <= 1e-9
    assert np.allclose(emb.coordinates.mean(axis=0), 0, atol=1e-12)


def test_sign_convention():
    pts = np.array([[3.0, -1.0], [-1.0, 2.0], [0.0, 0.5], [-2.0, -1.5]])
    for flip in ([1, 1], [-1, 1], [1, -1], [-1, -1]):
        emb = mds_embed(planar_distance(pts * flip, names=("A", "B", "C", "D")))
        assert np.all(emb.coordinates[0] >= 0)


@given(seed=st.integers(0, 2**32 - 1), n=st.integers(3, 15))
def test_retained_eigenvalues_are_the_largest(seed, n):
    dist = random_distance(np.random.default_rng(seed), n)
    emb = mds_embed(dist)
    ev = emb.eigenvalues
    assert np.all(np.diff(ev) <= 1e-12)
    J = np.eye(n) - 1.0 / n
    ref = np.sort(np.linalg.eigvalsh(-0.5 * J @ (dist.d**2) @ J))[::-1]
    assert ev == pytest.approx(ref, abs=1e-10)
    assert ev[0] + ev[1] == pytest.approx(max(ref[i] + ref[j] for i in range(n) for j in range(i + 1, n)))


def test_non_euclidean_counts_negatives():
    # violates the triangle inequality badly: not embeddable
    d = np.array([[0, 1, 5], [1, 0, 1], [5, 1, 0]], dtype=float)
    emb = mds_embed(DistanceMatrix(("A", "B", "C"), d))
    assert emb.n_negative >= 1
    assert np.all(np.isfinite(emb.coordinates))


@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 12))
def test_embedding_permutation_invariant(seed, n):
    rng = np.random.default_rng(seed)
    dist = random_distance(rng, n)
    perm = rng.permutation(n)
    shuffled = DistanceMatrix(tuple(dist.countries[p] for p in perm), dist.d[np.ix_(perm, perm)])
    a = mds_embed(dist).pairwise_distances()
    b = mds_embed(shuffled).pairwise_distances()
    assert b == pytest.approx(a[np.ix_(perm, perm)], abs=1e-9)


def test_too_few_nodes():
    with pytest.raises(TooFewNodes):
        mds_embed(DistanceMatrix(("A",), np.zeros((1, 1))))


# -- clustering ----------------------------------------------------------------

def test_extreme_k(rng):
    dist = random_distance(rng, 6)
    assert sorted(complete_linkage_clusters(dist, 6).labels) == list(range(6))
    assert set(complete_linkage_clusters(dist, 1).labels) == {0}
    for k in (0, 7):
        with pytest.raises(BadK):
            complete_linkage_clusters(dist, k)


def test_two_blobs(rng):
    n = 10
    blob = np.array([0] * 4 + [1] * 6)
    rng.shuffle(blob)
    d = np.where(blob[:, None] == blob[None, :], rng.uniform(0, 0.1, (n, n)), rng.uniform(0.9, 1, (n, n)))
    d = np.triu(d, 1)
    d = d + d.T
    labels = complete_linkage_clusters(DistanceMatrix(codes(n), d), 2)
    assert len({(a, b) for a, b in zip(blob, labels.labels)}) == 2


def test_labels_follow_first_member():
    d = np.array([[0, 0.9, 0.1], [0.9, 0, 0.8], [0.1, 0.8, 0]])
    lab = complete_linkage_clusters(DistanceMatrix(("B", "A", "C"), d), 2)
    assert lab.label_of("A") == 0 and lab.label_of("B") == lab.label_of("C") == 1
    assert lab.groups() == [("A",), ("B", "C")]


@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 20), k=st.integers(1, 20))
def test_matches_scipy(seed, n, k):
    from scipy.cluster.hierarchy import fcluster, linkage
    from scipy.spatial.distance import squareform

    k = min(k, n)
    dist = random_distance(np.random.default_rng(seed), n)
    ours = complete_linkage_clusters(dist, k)
    if n == 1 or k == n:
        ref = np.arange(n)
    else:
        ref = fcluster(linkage(squareform(dist.d), method="complete"), k, criterion="maxclust")
    assert len({(a, b) for a, b in zip(ours.labels, ref)}) == k
    assert list(ours.merge_heights) == sorted(ours.merge_heights)


@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 12), k=st.integers(1, 12))
def test_clusters_permutation_invariant(seed, n, k):
    rng = np.random.default_rng(seed)
    k = min(k, n)
    dist = random_distance(rng, n, ties=True)
    perm = rng.permutation(n)
    shuffled = DistanceMatrix(tuple(dist.countries[p] for p in perm), dist.d[np.ix_(perm, perm)])
    a = complete_linkage_clusters(dist, k)
    b = complete_linkage_clusters(shuffled, k)
    assert sorted(a.groups()) == sorted(b.groups())
    for c in dist.countries:
        assert a.label_of(c) == b.label_of(c)
