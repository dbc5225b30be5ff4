"""Zero-dimensional sublevel-set persistence and diagram-based features.

Sweeping the threshold upward over a 1-D signal, connected components of the
sublevel set appear at local minima and merge at local maxima. The union-find
pass processes samples in ascending (value, index) order; when two components
merge, the younger one (larger (min value, min index)) dies, emitting the
pair (its birth value, current value). Pairs with zero persistence are
dropped. The component that never dies is closed off as the essential pair
(global min, global max), so every diagram from a signal has at least one
pair and all coordinates are finite.

On top of diagrams: persistence entropy, Betti curves (half-open [b, d)
convention), exact p-norms of persistence landscapes via piecewise
integration, and Wasserstein / bottleneck distances through an augmented
assignment problem that lets unmatched points pay their distance to the
diagonal (capped at 64 total points).

tda_embed concatenates, per channel: 4 diagram scalars, a Betti curve on
grid_size points spanning the channel's range, 5 more scalars (two landscape
norms, W1/W2/bottleneck against the empty diagram), and the 7 horizontal
visibility graph features, giving C * (9 + grid_size + 7) dimensions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .embed_graph import graph_features, hvg_build
from .errors import CapacityError, ConfigError, DataError, ShapeError
from .preprocess import Window

WASSERSTEIN_MAX_POINTS = 64
DEFAULT_GRID_SIZE = 8


@dataclass(frozen=True)
class PersistenceDiagram:
    """Birth/death pairs; ``essential`` flags the pair closed at the global max."""

    births: np.ndarray
    deaths: np.ndarray
    essential: np.ndarray

    def __post_init__(self):
        if not (self.births.shape == self.deaths.shape == self.essential.shape):
            raise ShapeError("diagram arrays must share one shape")
        if np.any(self.deaths < self.births):
            raise DataError("diagram has a pair dying before its birth")

    @property
    def n_pairs(self) -> int:
        return self.births.shape[0]

    def persistences(self) -> np.ndarray:
        return self.deaths - self.births

    @staticmethod
    def empty() -> "PersistenceDiagram":
        z = np.zeros(0)
        return PersistenceDiagram(z, z.copy(), np.zeros(0, dtype=bool))


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root


def sublevel_persistence(x: np.ndarray) -> PersistenceDiagram:
    """0-dimensional sublevel-set persistence of a 1-D signal."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] < 1:
        raise ShapeError(f"persistence needs a nonempty 1-D signal, got shape {x.shape}")
    n = x.shape[0]
    order = np.lexsort((np.arange(n), x))
    uf = _UnionFind(n)
    active = np.zeros(n, dtype=bool)
    # per-root birth key (value, index) of the component's minimum
    birth: dict[int, tuple[float, int]] = {}
    births, deaths = [], []

    for idx in order:
        idx = int(idx)
        active[idx] = True
        birth[idx] = (x[idx], idx)
        for nb in (idx - 1, idx + 1):
            if 0 <= nb < n and active[nb]:
                ra = uf.find(idx)
                rb = uf.find(nb)
                if ra == rb:
                    continue
                elder, younger = (ra, rb) if birth[ra] <= birth[rb] else (rb, ra)
                y_birth = birth[younger][0]
                if x[idx] > y_birth:  # zero-persistence merges are dropped
                    births.append(y_birth)
                    deaths.append(x[idx])
                uf.parent[younger] = elder
                del birth[younger]

    births.append(float(x.min()))
    deaths.append(float(x.max()))
    essential = np.zeros(len(births), dtype=bool)
    essential[-1] = True
    return PersistenceDiagram(np.array(births), np.array(deaths), essential)


def persistence_entropy(dgm: PersistenceDiagram) -> float:
    """Shannon entropy of the persistence distribution; 0 when total is 0."""
    pers = dgm.persistences()
    total = pers.sum()
    if dgm.n_pairs == 0 or total == 0.0:
        return 0.0
    p = pers / total
    p = p[p > 0]
    return float(-(p * np.log(p)).sum())


def betti_curve(dgm: PersistenceDiagram, grid: np.ndarray) -> np.ndarray:
    """Number of pairs alive at each grid value, alive meaning b <= x < d."""
    grid = np.asarray(grid, dtype=float)
    alive = (dgm.births[None, :] <= grid[:, None]) & (grid[:, None] < dgm.deaths[None, :])
    return alive.sum(axis=1).astype(float)


def _tent_values(pairs: np.ndarray, x: float) -> np.ndarray:
    return np.maximum(0.0, np.minimum(x - pairs[:, 0], pairs[:, 1] - x))


def landscape_norm(dgm: PersistenceDiagram, k: int, p: int) -> float:
    """Exact L^p norm of the k-th persistence landscape (k >= 1, p in {1, 2}).

    The landscape is piecewise linear with kinks only at tent endpoints,
    tent apexes, and crossings of one tent's rising edge with another's
    falling edge; integrating with Simpson's rule between consecutive
    candidate points is exact for p = 1 (linear) and p = 2 (quadratic).
    """
    if k < 1:
        raise ConfigError(f"landscape level k must be >= 1, got {k}")
    if p not in (1, 2):
        raise ConfigError(f"landscape norm supports p in {{1, 2}}, got {p}")
    mask = dgm.persistences() > 0
    if int(mask.sum()) < k:
        # fewer than k tents means the k-th landscape is identically zero
        return 0.0
    pairs = np.stack([dgm.births[mask], dgm.deaths[mask]], axis=1)

    candidates = set()
    for b, d in pairs:
        candidates.update((b, (b + d) / 2.0, d))
    for i in range(pairs.shape[0]):
        for j in range(pairs.shape[0]):
            if i != j:
                candidates.add((pairs[i, 0] + pairs[j, 1]) / 2.0)
    lo = pairs[:, 0].min()
    hi = pairs[:, 1].max()
    xs = np.array(sorted(c for c in candidates if lo <= c <= hi))

    def lam(x: float) -> float:
        vals = _tent_values(pairs, x)
        if vals.shape[0] < k:
            return 0.0
        return float(np.partition(vals, -k)[-k])

    total = 0.0
    for x0, x1 in zip(xs[:-1], xs[1:]):
        h = x1 - x0
        if h == 0.0:
            continue
        f0, fm, f1 = lam(x0), lam((x0 + x1) / 2.0), lam(x1)
        if p == 1:
            total += h * (f0 + 4.0 * fm + f1) / 6.0
        else:
            total += h * (f0 * f0 + 4.0 * fm * fm + f1 * f1) / 6.0
    return total if p == 1 else float(np.sqrt(total))


def _as_points(dgm: PersistenceDiagram) -> np.ndarray:
    return np.stack([dgm.births, dgm.deaths], axis=1) if dgm.n_pairs else np.zeros((0, 2))


def _check_capacity(d1: PersistenceDiagram, d2: PersistenceDiagram) -> None:
    total = d1.n_pairs + d2.n_pairs
    if total > WASSERSTEIN_MAX_POINTS:
        raise CapacityError(
            f"{total} diagram points exceed the matching cap of {WASSERSTEIN_MAX_POINTS}")


def _augmented_costs(a: np.ndarray, b: np.ndarray, power: int | None) -> np.ndarray:
    """(n+m, n+m) assignment costs with diagonal-projection slots.

    Row i < n is point a_i; rows n.. are copies of the diagonal that can only
    absorb the matching b_j. Columns mirror this for b. power=None keeps raw
    L-infinity values (bottleneck); otherwise entries are cost**power.
    """
    n, m = a.shape[0], b.shape[0]
    if n + m == 0:
        return np.zeros((0, 0))
    cross = np.max(np.abs(a[:, None, :] - b[None, :, :]), axis=2) if n and m \
        else np.zeros((n, m))
    da = (a[:, 1] - a[:, 0]) / 2.0
    db = (b[:, 1] - b[:, 0]) / 2.0
    if power is not None:
        cross = cross ** power
        da = da ** power
        db = db ** power
    big = float(cross.sum() + da.sum() + db.sum()) + 1.0
    top_right = np.full((n, n), big)
    np.fill_diagonal(top_right, da)
    bottom_left = np.full((m, m), big)
    np.fill_diagonal(bottom_left, db)
    upper = np.concatenate([cross, top_right], axis=1)
    lower = np.concatenate([bottom_left, np.zeros((m, n))], axis=1)
    return np.concatenate([upper, lower], axis=0)


def wasserstein(d1: PersistenceDiagram, d2: PersistenceDiagram, p: int = 1) -> float:
    """p-Wasserstein distance with L-infinity ground metric."""
    if p < 1:
        raise ConfigError(f"Wasserstein order must be >= 1, got {p}")
    _check_capacity(d1, d2)
    a, b = _as_points(d1), _as_points(d2)
    if a.shape[0] + b.shape[0] == 0:
        return 0.0
    costs = _augmented_costs(a, b, power=p)
    rows, cols = linear_sum_assignment(costs)
    return float(costs[rows, cols].sum() ** (1.0 / p))


def bottleneck(d1: PersistenceDiagram, d2: PersistenceDiagram) -> float:
    """Bottleneck distance via binary search over candidate matching costs."""
    _check_capacity(d1, d2)
    a, b = _as_points(d1), _as_points(d2)
    if a.shape[0] + b.shape[0] == 0:
        return 0.0
    costs = _augmented_costs(a, b, power=None)
    n, m = a.shape[0], b.shape[0]
    candidates = {0.0}
    if n and m:
        candidates.update(np.max(np.abs(a[:, None, :] - b[None, :, :]), axis=2).ravel())
    candidates.update(((a[:, 1] - a[:, 0]) / 2.0).ravel())
    candidates.update(((b[:, 1] - b[:, 0]) / 2.0).ravel())
    levels = sorted(candidates)

    def feasible(t: float) -> bool:
        blocked = (costs > t).astype(float)
        rows, cols = linear_sum_assignment(blocked)
        return blocked[rows, cols].sum() == 0.0

    lo, hi = 0, len(levels) - 1
    if feasible(levels[lo]):
        return float(levels[lo])
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if feasible(levels[mid]):
            hi = mid
        else:
            lo = mid
    return float(levels[hi])


def tda_embed(window: Window, grid_size: int = DEFAULT_GRID_SIZE) -> np.ndarray:
    """Per-channel persistence + HVG feature vector of length 9 + grid_size + 7."""
    if grid_size < 2:
        raise ConfigError(f"grid_size must be >= 2, got {grid_size}")
    values = window.values
    parts = []
    for c in range(values.shape[1]):
        x = values[:, c]
        dgm = sublevel_persistence(x)
        pers = dgm.persistences()
        scalars_front = np.array([
            persistence_entropy(dgm),
            float(pers.sum()),
            float(pers.max()) if dgm.n_pairs else 0.0,
            float(dgm.n_pairs),
        ])
        grid = np.linspace(float(x.min()), float(x.max()), grid_size)
        betti = betti_curve(dgm, grid)
        empty = PersistenceDiagram.empty()
        scalars_back = np.array([
            landscape_norm(dgm, 1, 1),
            landscape_norm(dgm, 1, 2),
            wasserstein(dgm, empty, 1),
            wasserstein(dgm, empty, 2),
            bottleneck(dgm, empty),
        ])
        hvg = graph_features(hvg_build(x))
        parts.append(np.concatenate([scalars_front, betti, scalars_back, hvg]))
    return np.concatenate(parts)


def tda_dim(n_channels: int, grid_size: int = DEFAULT_GRID_SIZE) -> int:
    return n_channels * (9 + grid_size + 7)


def write_diagram(dgm: PersistenceDiagram, path: str) -> None:
    """Debug dump: one ``birth,death,essential`` row per pair."""
    with open(path, "w") as fh:
        fh.write("birth,death,essential\n")
        for b, d, e in zip(dgm.births, dgm.deaths, dgm.essential):
            fh.write(f"{float(b)!r},{float(d)!r},{int(e)}\n")
