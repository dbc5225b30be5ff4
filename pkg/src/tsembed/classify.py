"""Six classifiers over embedded windows, with pinned tie-breaking.

Determinism is part of every contract here: distance ties in KNN go to the
lower training index and vote ties to the smallest class id; decision-tree
split ties go to the lowest feature index, then the lowest threshold; forest
vote ties go to the smallest class id; Gaussian naive Bayes floors variances
at 1e-9; logistic regression is full-batch gradient descent with a fixed
deterministic step schedule. The MLP rides on the seeded feedforward engine.

fit(kind, data, params) dispatches on kind in {"knn", "gnb", "logreg",
"tree", "forest", "mlp"}; unknown kinds and unknown or out-of-range
parameters raise ConfigError. predict(model, X) accepts any fitted model.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .embed_neural import (NetworkSpec, AdamState, adam_step, init_network,
                           net_backward, net_forward, softmax)
from .errors import ConfigError, ShapeError
from .rng import Xoshiro256StarStar, derive_seed

GNB_VAR_FLOOR = 1e-9
LOGREG_L2 = 1e-4
LOGREG_MAX_ITER = 500
LOGREG_TOL = 1e-6
LOGREG_LR = 0.5
TREE_MAX_DEPTH = 12
TREE_MIN_LEAF = 1
FOREST_TREES = 100
MLP_HIDDEN = 64
MLP_EPOCHS = 200
MLP_BATCH = 64


@dataclass(frozen=True)
class LabeledMatrix:
    """Feature rows with integer labels >= 0."""

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        if self.X.ndim != 2 or self.y.ndim != 1:
            raise ShapeError(f"expected (n, d) features and (n,) labels, got "
                             f"{self.X.shape} and {self.y.shape}")
        if self.X.shape[0] != self.y.shape[0]:
            raise ShapeError("feature and label counts differ")
        if self.X.shape[0] < 1:
            raise ShapeError("need at least one sample")
        if not np.all(np.isfinite(self.X)):
            raise ShapeError("features contain NaN or Inf")
        if not np.issubdtype(self.y.dtype, np.integer) or self.y.min() < 0:
            raise ShapeError("labels must be nonnegative integers")


def _check_features(X: np.ndarray, d: int) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != d:
        raise ShapeError(f"input shape {X.shape} does not match model dimension {d}")
    return X


@dataclass
class KnnModel:
    train_X: np.ndarray
    train_y: np.ndarray
    k: int


@dataclass
class GnbModel:
    classes: np.ndarray
    means: np.ndarray
    variances: np.ndarray
    log_priors: np.ndarray


@dataclass
class LogRegModel:
    classes: np.ndarray
    W: np.ndarray
    b: np.ndarray
    n_iters: int


@dataclass
class TreeNode:
    feature: int = -1           # -1 marks a leaf
    threshold: float = 0.0
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    label: int = 0


@dataclass
class TreeModel:
    root: TreeNode
    n_features: int


@dataclass
class ForestModel:
    trees: list[TreeModel] = field(default_factory=list)
    n_features: int = 0
    n_classes: int = 0


@dataclass
class MlpModel:
    classes: np.ndarray
    spec: NetworkSpec
    params: list


# ---------------------------------------------------------------- knn

def fit_knn(data: LabeledMatrix, k: int = 5) -> KnnModel:
    if k < 1:
        raise ConfigError(f"knn needs k >= 1, got {k}")
    if k > data.X.shape[0]:
        raise ConfigError(f"knn k={k} exceeds training size {data.X.shape[0]}")
    return KnnModel(data.X.astype(float).copy(), data.y.copy(), k)


def _predict_knn(model: KnnModel, X: np.ndarray) -> np.ndarray:
    X = _check_features(X, model.train_X.shape[1])
    n_train = model.train_X.shape[0]
    out = np.empty(X.shape[0], dtype=np.int64)
    train_index = np.arange(n_train)
    for r in range(X.shape[0]):
        dists = np.linalg.norm(model.train_X - X[r], axis=1)
        order = np.lexsort((train_index, dists))  # distance, then train index
        votes = np.bincount(model.train_y[order[:model.k]])
        out[r] = int(np.argmax(votes))  # first max = smallest class id
    return out


# ---------------------------------------------------------------- gnb

def fit_gnb(data: LabeledMatrix, var_floor: float = GNB_VAR_FLOOR) -> GnbModel:
    if var_floor <= 0:
        raise ConfigError(f"variance floor must be positive, got {var_floor}")
    classes = np.unique(data.y)
    means = np.stack([data.X[data.y == c].mean(axis=0) for c in classes])
    variances = np.stack([
        np.maximum(data.X[data.y == c].var(axis=0), var_floor) for c in classes])
    priors = np.array([(data.y == c).sum() for c in classes], dtype=float)
    priors /= priors.sum()
    return GnbModel(classes, means, variances, np.log(priors))


def _gnb_log_joint(model: GnbModel, X: np.ndarray) -> np.ndarray:
    X = _check_features(X, model.means.shape[1])
    diff = X[:, None, :] - model.means[None, :, :]
    log_like = -0.5 * np.sum(
        np.log(2.0 * np.pi * model.variances)[None, :, :]
        + diff * diff / model.variances[None, :, :], axis=2)
    return log_like + model.log_priors[None, :]


def _predict_gnb(model: GnbModel, X: np.ndarray) -> np.ndarray:
    joint = _gnb_log_joint(model, X)
    return model.classes[np.argmax(joint, axis=1)]


def gnb_posteriors(model: GnbModel, X: np.ndarray) -> np.ndarray:
    """Class posterior rows (summing to 1), columns ordered like model.classes."""
    return softmax(_gnb_log_joint(model, X))


# ---------------------------------------------------------------- logreg

def fit_logreg(data: LabeledMatrix, l2: float = LOGREG_L2,
               max_iter: int = LOGREG_MAX_ITER, tol: float = LOGREG_TOL,
               lr: float = LOGREG_LR) -> LogRegModel:
    """Softmax regression by full-batch gradient descent.

    The loss is mean cross-entropy plus l2 * ||W||^2 (bias unregularized).
    The step starts at lr and halves whenever a step would increase the loss,
    which keeps the trajectory deterministic without tuning.
    """
    if l2 < 0 or max_iter < 1 or tol <= 0 or lr <= 0:
        raise ConfigError("logreg params out of range")
    classes = np.unique(data.y)
    n, d = data.X.shape
    C = classes.shape[0]
    class_index = np.searchsorted(classes, data.y)
    onehot = np.zeros((n, C))
    onehot[np.arange(n), class_index] = 1.0

    W = np.zeros((C, d))
    b = np.zeros(C)

    def loss_of(W_, b_):
        probs = softmax(data.X @ W_.T + b_)
        ce = -np.mean(np.log(probs[np.arange(n), class_index] + 1e-300))
        return ce + l2 * np.sum(W_ * W_)

    current = loss_of(W, b)
    iters = 0
    while iters < max_iter:
        probs = softmax(data.X @ W.T + b)
        delta = (probs - onehot) / n
        gW = delta.T @ data.X + 2.0 * l2 * W
        gb = delta.sum(axis=0)
        grad_inf = max(np.max(np.abs(gW)), np.max(np.abs(gb)))
        if grad_inf < tol:
            break
        while True:
            W_new = W - lr * gW
            b_new = b - lr * gb
            new_loss = loss_of(W_new, b_new)
            if new_loss <= current or lr < 1e-12:
                break
            lr *= 0.5
        W, b, current = W_new, b_new, new_loss
        iters += 1
    return LogRegModel(classes, W, b, iters)


def _predict_logreg(model: LogRegModel, X: np.ndarray) -> np.ndarray:
    X = _check_features(X, model.W.shape[1])
    scores = X @ model.W.T + model.b
    return model.classes[np.argmax(scores, axis=1)]


# ---------------------------------------------------------------- tree

def _gini_from_counts(counts: np.ndarray, total: float) -> float:
    if total <= 0:
        return 0.0
    p = counts / total
    return 1.0 - float(np.sum(p * p))


def best_split(X: np.ndarray, y: np.ndarray, features: np.ndarray,
               min_leaf: int) -> tuple[int, float, float]:
    """Best (feature, threshold, gain) by Gini gain over midpoint candidates.

    Features are scanned in the given order and thresholds ascending; only a
    strictly larger gain replaces the incumbent, so exact ties resolve to the
    lowest feature index, then the lowest threshold. Zero-gain splits are
    reported (gain is never negative for Gini); the caller decides whether to
    take them.
    """
    n = y.shape[0]
    n_classes = int(y.max()) + 1
    parent_counts = np.bincount(y, minlength=n_classes).astype(float)
    parent_gini = _gini_from_counts(parent_counts, n)
    best = (-1, 0.0, -1.0)
    for f in features:
        order = np.argsort(X[:, f], kind="stable")
        vals = X[order, f]
        labels = y[order]
        onehot = np.zeros((n, n_classes))
        onehot[np.arange(n), labels] = 1.0
        left_counts = np.cumsum(onehot, axis=0)
        cut_ok = vals[:-1] < vals[1:]
        for i in np.nonzero(cut_ok)[0]:
            nL = i + 1
            nR = n - nL
            if nL < min_leaf or nR < min_leaf:
                continue
            cl = left_counts[i]
            cr = parent_counts - cl
            gain = parent_gini - (nL / n) * _gini_from_counts(cl, nL) \
                - (nR / n) * _gini_from_counts(cr, nR)
            if gain > best[2]:
                best = (int(f), float((vals[i] + vals[i + 1]) / 2.0), float(gain))
    return best


def _majority(y: np.ndarray) -> int:
    return int(np.argmax(np.bincount(y)))


def _grow_tree(X: np.ndarray, y: np.ndarray, depth: int, max_depth: int,
               min_leaf: int, rng: Xoshiro256StarStar | None,
               max_features: int | None) -> TreeNode:
    if depth >= max_depth or np.unique(y).shape[0] == 1:
        return TreeNode(label=_majority(y))
    d = X.shape[1]
    if max_features is not None and max_features < d:
        features = np.array(sorted(rng.sample_indices(d, max_features)))
    else:
        features = np.arange(d)
    f, thr, _ = best_split(X, y, features, min_leaf)
    if f < 0:
        return TreeNode(label=_majority(y))
    # zero-gain splits are taken on impure nodes: parity-style interactions
    # (e.g. XOR) only pay off a level deeper
    mask = X[:, f] <= thr
    left = _grow_tree(X[mask], y[mask], depth + 1, max_depth, min_leaf,
                      rng, max_features)
    right = _grow_tree(X[~mask], y[~mask], depth + 1, max_depth, min_leaf,
                       rng, max_features)
    return TreeNode(feature=f, threshold=thr, left=left, right=right)


def fit_tree(data: LabeledMatrix, max_depth: int = TREE_MAX_DEPTH,
             min_leaf: int = TREE_MIN_LEAF) -> TreeModel:
    if max_depth < 1 or min_leaf < 1:
        raise ConfigError("tree params out of range")
    root = _grow_tree(data.X.astype(float), data.y, 0, max_depth, min_leaf,
                      None, None)
    return TreeModel(root, data.X.shape[1])


def _tree_predict_one(node: TreeNode, x: np.ndarray) -> int:
    while node.feature >= 0:
        node = node.left if x[node.feature] <= node.threshold else node.right
    return node.label


def _predict_tree(model: TreeModel, X: np.ndarray) -> np.ndarray:
    X = _check_features(X, model.n_features)
    return np.array([_tree_predict_one(model.root, x) for x in X], dtype=np.int64)


# ---------------------------------------------------------------- forest

def fit_forest(data: LabeledMatrix, n_trees: int = FOREST_TREES,
               max_depth: int = TREE_MAX_DEPTH, min_leaf: int = TREE_MIN_LEAF,
               bootstrap: bool = True, max_features: int | str | None = None,
               seed: int = 0) -> ForestModel:
    """Bagged trees with per-split feature subsets (default ceil(sqrt(d)))."""
    if n_trees < 1:
        raise ConfigError(f"forest needs n_trees >= 1, got {n_trees}")
    n, d = data.X.shape
    if max_features is None:
        m_feats = int(np.ceil(np.sqrt(d)))
    elif max_features == "all":
        m_feats = d
    elif isinstance(max_features, int) and 1 <= max_features <= d:
        m_feats = max_features
    else:
        raise ConfigError(f"bad max_features {max_features!r}")

    X = data.X.astype(float)
    trees = []
    for b in range(n_trees):
        rng = Xoshiro256StarStar(derive_seed(seed, "tree", b))
        if bootstrap:
            idx = np.array([rng.randbelow(n) for _ in range(n)])
            Xb, yb = X[idx], data.y[idx]
        else:
            Xb, yb = X, data.y
        root = _grow_tree(Xb, yb, 0, max_depth, min_leaf, rng, m_feats)
        trees.append(TreeModel(root, d))
    n_classes = int(data.y.max()) + 1
    return ForestModel(trees, d, n_classes)


def _predict_forest(model: ForestModel, X: np.ndarray) -> np.ndarray:
    X = _check_features(X, model.n_features)
    votes = np.zeros((X.shape[0], model.n_classes), dtype=np.int64)
    for tree in model.trees:
        preds = _predict_tree(tree, X)
        votes[np.arange(X.shape[0]), preds] += 1
    return np.argmax(votes, axis=1)  # first max = smallest class id


# ---------------------------------------------------------------- mlp

def fit_mlp(data: LabeledMatrix, hidden: int = MLP_HIDDEN,
            epochs: int = MLP_EPOCHS, batch: int = MLP_BATCH,
            seed: int = 0) -> MlpModel:
    """One-hidden-layer softmax network trained with Adam on cross-entropy."""
    if hidden < 1 or epochs < 0 or batch < 1:
        raise ConfigError("mlp params out of range")
    classes = np.unique(data.y)
    n, d = data.X.shape
    C = classes.shape[0]
    class_index = np.searchsorted(classes, data.y)
    onehot = np.zeros((n, C))
    onehot[np.arange(n), class_index] = 1.0

    spec = NetworkSpec((d, hidden, C), hidden="relu", output="softmax")
    rng = Xoshiro256StarStar(seed)
    params = init_network(spec, rng)
    state = AdamState.zeros_like(params)
    X = data.X.astype(float)
    indices = list(range(n))
    for _ in range(epochs):
        rng.shuffle(indices)
        for lo in range(0, n, batch):
            chunk = indices[lo:lo + batch]
            probs, cache = net_forward(spec, params, X[chunk])
            loss_grad = (probs - onehot[chunk]) / len(chunk)
            grads, _ = net_backward(spec, params, cache, loss_grad)
            adam_step(params, grads, state)
    return MlpModel(classes, spec, params)


def _predict_mlp(model: MlpModel, X: np.ndarray) -> np.ndarray:
    X = _check_features(X, model.spec.layer_sizes[0])
    probs, _ = net_forward(model.spec, model.params, X)
    return model.classes[np.argmax(probs, axis=1)]


# ---------------------------------------------------------------- facade

_DEFAULTS: dict[str, dict] = {
    "knn": {"k": 5},
    "gnb": {"var_floor": GNB_VAR_FLOOR},
    "logreg": {"l2": LOGREG_L2, "max_iter": LOGREG_MAX_ITER,
               "tol": LOGREG_TOL, "lr": LOGREG_LR},
    "tree": {"max_depth": TREE_MAX_DEPTH, "min_leaf": TREE_MIN_LEAF},
    "forest": {"n_trees": FOREST_TREES, "max_depth": TREE_MAX_DEPTH,
               "min_leaf": TREE_MIN_LEAF, "bootstrap": True,
               "max_features": None, "seed": 0},
    "mlp": {"hidden": MLP_HIDDEN, "epochs": MLP_EPOCHS, "batch": MLP_BATCH,
            "seed": 0},
}

_FITTERS = {
    "knn": fit_knn,
    "gnb": fit_gnb,
    "logreg": fit_logreg,
    "tree": fit_tree,
    "forest": fit_forest,
    "mlp": fit_mlp,
}

CLASSIFIER_KINDS = tuple(sorted(_FITTERS))


def fit(kind: str, data: LabeledMatrix, params: dict | None = None):
    """Fit a classifier by kind; unknown kinds or parameters raise ConfigError."""
    if kind not in _FITTERS:
        raise ConfigError(f"unknown classifier kind {kind!r}")
    merged = dict(_DEFAULTS[kind])
    for key, value in (params or {}).items():
        if key not in merged:
            raise ConfigError(f"unknown parameter {key!r} for classifier {kind!r}")
        merged[key] = value
    return _FITTERS[kind](data, **merged)


_PREDICTORS = {
    KnnModel: _predict_knn,
    GnbModel: _predict_gnb,
    LogRegModel: _predict_logreg,
    TreeModel: _predict_tree,
    ForestModel: _predict_forest,
    MlpModel: _predict_mlp,
}


def predict(model, X: np.ndarray) -> np.ndarray:
    fn = _PREDICTORS.get(type(model))
    if fn is None:
        raise ConfigError(f"not a fitted classifier model: {type(model).__name__}")
    return fn(model, X)


def accuracy(predicted: np.ndarray, truth: np.ndarray) -> float:
    predicted = np.asarray(predicted)
    truth = np.asarray(truth)
    if predicted.shape != truth.shape or predicted.ndim != 1:
        raise ShapeError(f"prediction/truth shapes differ: {predicted.shape} "
                         f"vs {truth.shape}")
    if predicted.shape[0] == 0:
        raise ShapeError("cannot score zero predictions")
    return float(np.mean(predicted == truth))
