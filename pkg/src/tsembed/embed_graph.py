"""Natural and horizontal visibility graphs and their summary features.

A sample i of a 1-D signal x becomes node i. The natural visibility graph
(NVG) joins i < j when every interior sample lies strictly below the straight
chord between (i, x_i) and (j, x_j):

    x_k < x_j + (x_i - x_j) * (j - k) / (j - i)   for all i < k < j

with edge weight |x_j - x_i| / (j - i), the absolute chord slope. The
horizontal visibility graph (HVG) joins i < j when every interior sample is
strictly below min(x_i, x_j); all HVG edges have weight 1. Adjacent samples
are always mutually visible, so both graphs contain the path 0-1-...-(n-1)
and are connected.

Construction runs one pass per left endpoint keeping a running maximum
(of chord slopes for NVG, of interior heights for HVG), which gives the
O(tau^2) bound with vectorized inner work.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError
from .preprocess import Window


@dataclass(frozen=True)
class VisibilityGraph:
    """Undirected weighted graph; edges hold (i, j, weight) with i < j."""

    n_nodes: int
    edges: tuple[tuple[int, int, float], ...]

    def degree_array(self) -> np.ndarray:
        deg = np.zeros(self.n_nodes, dtype=np.int64)
        for i, j, _ in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def adjacency_sets(self) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in range(self.n_nodes)]
        for i, j, _ in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        return adj


def _check_signal(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] < 2:
        raise ShapeError(f"visibility graph needs a 1-D signal of length >= 2, "
                         f"got shape {x.shape}")
    return x


def nvg_build(x: np.ndarray) -> VisibilityGraph:
    """Natural visibility graph with |slope| edge weights."""
    x = _check_signal(x)
    n = x.shape[0]
    edges = []
    for i in range(n - 1):
        # slope from i to every later sample; j is visible iff its slope
        # strictly exceeds every interior slope, i.e. the running max so far
        gaps = np.arange(1, n - i, dtype=float)
        slopes = (x[i + 1:] - x[i]) / gaps
        edges.append((i, i + 1, abs(slopes[0])))
        if slopes.shape[0] > 1:
            running = np.maximum.accumulate(slopes[:-1])
            visible = np.nonzero(slopes[1:] > running)[0]
            for m in visible:
                j = i + 2 + int(m)
                edges.append((i, j, abs(slopes[m + 1])))
    return VisibilityGraph(n, tuple(edges))


def hvg_build(x: np.ndarray) -> VisibilityGraph:
    """Horizontal visibility graph; every edge has weight 1."""
    x = _check_signal(x)
    n = x.shape[0]
    edges = []
    for i in range(n - 1):
        edges.append((i, i + 1, 1.0))
        if i + 2 < n:
            # interior running max; j > i+1 is visible iff both endpoints
            # strictly exceed every sample strictly between them
            interior_max = np.maximum.accumulate(x[i + 1:n - 1])
            heights = x[i + 2:]
            visible = np.nonzero((interior_max < x[i]) & (interior_max < heights))[0]
            for m in visible:
                edges.append((i, i + 2 + int(m), 1.0))
    return VisibilityGraph(n, tuple(edges))


def graph_features(g: VisibilityGraph) -> np.ndarray:
    """Seven summary statistics of a visibility graph.

    [edge density, mean degree, degree std (population), max degree,
     transitivity, degree assortativity, mean edge weight]

    Transitivity is 3 * triangles / open-or-closed triads and assortativity
    is the Pearson correlation of endpoint degrees over directed edge pairs;
    both fall back to 0 when their denominator vanishes.
    """
    n = g.n_nodes
    m = len(g.edges)
    deg = g.degree_array()

    density = 2.0 * m / (n * (n - 1)) if n > 1 else 0.0
    mean_deg = deg.mean() if n else 0.0
    std_deg = deg.std() if n else 0.0
    max_deg = float(deg.max()) if n else 0.0

    adj = g.adjacency_sets()
    closed = 0
    for i, j, _ in g.edges:
        closed += len(adj[i] & adj[j])  # each triangle counted once per edge
    triads = float(np.sum(deg * (deg - 1) / 2))
    transitivity = closed / triads if triads > 0 else 0.0

    if m == 0:
        assortativity = 0.0
        mean_weight = 0.0
    else:
        ends_a = np.array([deg[i] for i, _, _ in g.edges] +
                          [deg[j] for _, j, _ in g.edges], dtype=float)
        ends_b = np.array([deg[j] for _, j, _ in g.edges] +
                          [deg[i] for i, _, _ in g.edges], dtype=float)
        var_a = np.var(ends_a)
        var_b = np.var(ends_b)
        if var_a == 0.0 or var_b == 0.0:
            assortativity = 0.0
        else:
            cov = np.mean((ends_a - ends_a.mean()) * (ends_b - ends_b.mean()))
            assortativity = cov / np.sqrt(var_a * var_b)
        mean_weight = float(np.mean([w for _, _, w in g.edges]))

    return np.array([density, mean_deg, std_deg, max_deg,
                     transitivity, assortativity, mean_weight])


GRAPH_FEATURE_COUNT = 7


def graph_embed(window: Window) -> np.ndarray:
    """NVG features per channel, channel-major concatenation (7 per channel)."""
    values = window.values
    parts = [graph_features(nvg_build(values[:, c])) for c in range(values.shape[1])]
    return np.concatenate(parts)


def write_edgelist(g: VisibilityGraph, path: str) -> None:
    """Debug dump: one ``i,j,weight`` row per edge."""
    with open(path, "w") as fh:
        fh.write("i,j,weight\n")
        for i, j, w in g.edges:
            fh.write(f"{i},{j},{float(w)!r}\n")
