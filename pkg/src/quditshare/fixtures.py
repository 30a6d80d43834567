"""Graph fixtures for the worked figure examples, plus a random-graph generator."""

from __future__ import annotations

import numpy as np

from .graphstate import LabelledGraph, from_adjacency, from_edges, parse_graph

# 5 vertices over F_7, a stand-in with a mix of edge weights.
FIG1_TEXT = """\
# 5-qudit example graph, d = 7
d 7
n 5
edge 1 2 3
edge 1 5 6
edge 2 3 1
edge 2 4 4
edge 3 4 5
edge 4 5 2
"""

# encoded square, weight-2 edges, d = 5; vertex 1 neighbours 2 and 3
FIG2_TEXT = """\
d 5
n 4
edge 1 2 2
edge 1 3 2
edge 2 4 2
edge 3 4 2
label 1 1 0 1
label 2 1 0 1
label 3 1 0 1
label 4 1 0 1
"""

# square 1-2-3-4-1, weight-2 edges, d = 5, z_1 = 3
FIG3_TEXT = """\
d 5
n 4
edge 1 2 2
edge 2 3 2
edge 3 4 2
edge 4 1 2
label 1 3 0 0
"""

# Measuring X^2 Z on vertex 1 of the Fig. 2 square with outcome omega^2,
# decided once by the dense oracle (state-level inference of A, z, m)
FIG2_MEASURE = {"vertex": 1, "m": 2, "outcome": 2}
FIG2_GOLDEN = {
    "vertex_ids": (2, 3, 4),
    "edges": {(2, 3): 2, (2, 4): 2, (3, 4): 2},
    "z": (4, 4, 1),
    "x": (0, 0, 0),
    "m": (3, 3, 1),
}
FIG2_CAPTION = {"edge23": 1, "z": 0, "m": 3}


def fig1() -> LabelledGraph:
    return parse_graph(FIG1_TEXT)


def fig2() -> LabelledGraph:
    return parse_graph(FIG2_TEXT)


def fig3() -> LabelledGraph:
    return parse_graph(FIG3_TEXT)


def fig2_golden() -> LabelledGraph:
    g = FIG2_GOLDEN
    ids = g["vertex_ids"]
    edges = [(ids.index(a) + 1, ids.index(b) + 1, w) for (a, b), w in g["edges"].items()]
    return from_edges(5, 3, edges, z=g["z"], m=g["m"], vertex_ids=ids)


def random_graph(
    d: int,
    n: int,
    rng,
    labels: bool = True,
    encoded: bool = True,
    connected_vertex: int | None = None,
) -> LabelledGraph:
    """Random weighted graph with random labels.

    ``connected_vertex`` (0-based) is guaranteed at least one neighbour when
    n > 1.  Encoded graphs have x = 0.
    """
    A = np.triu(rng.integers(0, d, size=(n, n)), 1)
    A = A + A.T
    if connected_vertex is not None and n > 1 and not A[connected_vertex].any():
        j = (connected_vertex + 1 + int(rng.integers(n - 1))) % n
        w = int(rng.integers(1, d))
        A[connected_vertex, j] = A[j, connected_vertex] = w
    if labels:
        z = rng.integers(0, d, size=n)
        x = np.zeros(n, dtype=np.int64) if encoded else rng.integers(0, d, size=n)
        m = rng.integers(0, d, size=n)
    else:
        z = x = m = np.zeros(n, dtype=np.int64)
    return from_adjacency(d, A, list(zip(z, x, m)))
