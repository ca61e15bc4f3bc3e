"""Star versus path: how the five topology indices tell them apart.

Run with ``python3 demos/01_trees_and_indices.py``.
"""
import numpy as np

from eraseg.graph import DistanceMatrix, minimum_spanning_tree, tree_from_edges
from eraseg.indices import INDEX_NAMES, compute_indices

nodes = ("A", "B", "C", "D", "E")
star = tree_from_edges(nodes, [("A", x, 1.0) for x in nodes[1:]])
path = tree_from_edges(nodes, list(zip(nodes, nodes[1:], [1.0] * 4)))
for label, tree in (("star", star), ("path", path)):
    vec = compute_indices(tree)
    print(label, dict(zip(INDEX_NAMES, vec.as_array().round(4).tolist())))

# a distance matrix with ties: Kruskal breaks them by country code
d = np.array([
    [0.0, 0.5, 0.5, 0.9],
    [0.5, 0.0, 0.5, 0.9],
    [0.5, 0.5, 0.0, 0.2],
    [0.9, 0.9, 0.2, 0.0],
])
tree = minimum_spanning_tree(DistanceMatrix(("AU", "BE", "CA", "DE"), d))
print("MST edges:", [(e.i, e.j, e.weight) for e in tree.edges])
