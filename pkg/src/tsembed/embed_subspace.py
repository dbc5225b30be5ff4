"""Linear and locally linear subspace embeddings over flattened windows.

PCA centers the training matrix, eigendecomposes the sample covariance
(divisor n_s - 1), and projects onto the top-d eigenvectors. The component
sign convention comes from the shared eigensolver, so repeated fits are
bit-identical.

LLE follows the classic three steps: K nearest neighbors per point (self
excluded, distance ties to the lower index), reconstruction weights from the
local Gram system G w = 1 regularized as G + reg * trace(G) * I and rescaled
to sum 1, then the bottom eigenvectors (skipping the constant one) of
M = (I - W)^T (I - W), scaled by sqrt(n_s). Out-of-sample points reuse the
weight construction against the stored training points; a query that equals a
training point exactly gets weight 1 on that point, which is the exact
minimizer of the constrained reconstruction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ShapeError
from .numcore import linear_solve, symmetric_eig


@dataclass(frozen=True)
class PcaModel:
    mean: np.ndarray
    components: np.ndarray  # (d, n_features) rows are components
    explained_variances: np.ndarray


def pca_fit(X: np.ndarray, d: int) -> PcaModel:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got shape {X.shape}")
    n_s, n_f = X.shape
    if n_s < 2:
        raise ConfigError(f"PCA needs at least 2 samples, got {n_s}")
    if not 1 <= d <= min(n_s - 1, n_f):
        raise ConfigError(
            f"PCA dimension must satisfy 1 <= d <= min(n_samples-1, n_features) "
            f"= {min(n_s - 1, n_f)}, got {d}")
    mean = X.mean(axis=0)
    Xc = X - mean
    cov = (Xc.T @ Xc) / (n_s - 1)
    eig = symmetric_eig(cov)
    components = eig.eigenvectors[:, :d].T
    variances = np.maximum(eig.eigenvalues[:d], 0.0)
    return PcaModel(mean, components, variances)


def pca_transform(model: PcaModel, X: np.ndarray) -> np.ndarray:
    """Project one vector or a stack of row vectors."""
    X = np.asarray(X, dtype=float)
    single = X.ndim == 1
    rows = X.reshape(1, -1) if single else X
    if rows.shape[1] != model.mean.shape[0]:
        raise ShapeError(
            f"input has {rows.shape[1]} features, model expects {model.mean.shape[0]}")
    out = (rows - model.mean) @ model.components.T
    return out[0] if single else out


@dataclass(frozen=True)
class LleModel:
    train_points: np.ndarray
    K: int
    reg: float
    weights: np.ndarray      # (n_s, n_s) reconstruction weight rows
    embedding: np.ndarray    # (n_s, d)
    eigenvalues: np.ndarray  # the d eigenvalues matching the embedding columns


def _neighbor_indices(point: np.ndarray, candidates: np.ndarray, K: int,
                      exclude: int | None = None) -> np.ndarray:
    """Indices of the K nearest candidates; ties broken by lower index."""
    dists = np.linalg.norm(candidates - point, axis=1)
    order = np.argsort(dists, kind="stable")
    if exclude is not None:
        order = order[order != exclude]
    return order[:K]


def _reconstruction_weights(point: np.ndarray, neighbors: np.ndarray,
                            reg: float) -> np.ndarray:
    """Solve the constrained least-squares weights over given neighbors."""
    diffs = neighbors - point
    G = diffs @ diffs.T
    trace = np.trace(G)
    G = G + reg * trace * np.eye(G.shape[0])
    w = linear_solve(G, np.ones(G.shape[0]))
    return w / w.sum()


def lle_fit(X: np.ndarray, K: int, d: int, reg: float = 1e-3) -> LleModel:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got shape {X.shape}")
    n_s = X.shape[0]
    if K < 1:
        raise ConfigError(f"LLE needs K >= 1, got {K}")
    if n_s < K + 2:
        raise ConfigError(f"LLE needs at least K + 2 = {K + 2} samples, got {n_s}")
    if not 1 <= d <= K:
        raise ConfigError(f"LLE dimension must satisfy 1 <= d <= K = {K}, got {d}")

    W = np.zeros((n_s, n_s))
    for i in range(n_s):
        nbrs = _neighbor_indices(X[i], X, K, exclude=i)
        w = _reconstruction_weights(X[i], X[nbrs], reg)
        W[i, nbrs] = w

    I = np.eye(n_s)
    M = (I - W).T @ (I - W)
    eig = symmetric_eig(M)
    # symmetric_eig sorts descending; the bottom of the spectrum is at the end.
    ascending_vals = eig.eigenvalues[::-1]
    ascending_vecs = eig.eigenvectors[:, ::-1]
    embedding = ascending_vecs[:, 1:d + 1] * np.sqrt(n_s)
    return LleModel(X.copy(), K, reg, W, embedding, ascending_vals[1:d + 1].copy())


def lle_transform(model: LleModel, x: np.ndarray) -> np.ndarray:
    """Embed one vector or a stack of rows via reconstruction weights."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    rows = x.reshape(1, -1) if single else x
    if rows.shape[1] != model.train_points.shape[1]:
        raise ShapeError(
            f"input has {rows.shape[1]} features, model expects "
            f"{model.train_points.shape[1]}")
    out = np.empty((rows.shape[0], model.embedding.shape[1]))
    for r in range(rows.shape[0]):
        point = rows[r]
        nbrs = _neighbor_indices(point, model.train_points, model.K)
        dists = np.linalg.norm(model.train_points[nbrs] - point, axis=1)
        if dists[0] == 0.0:
            # exact hit: the constrained problem's minimizer is weight 1 here
            out[r] = model.embedding[nbrs[0]]
            continue
        w = _reconstruction_weights(point, model.train_points[nbrs], model.reg)
        out[r] = w @ model.embedding[nbrs]
    return out[0] if single else out
