"""Shared numerical kernels: symmetric eigendecomposition, linear solve, DFT.

The eigendecomposition and DFT delegate to numpy's LAPACK/FFT bindings and
add the contractual ordering and sign conventions on top. The linear solver
is a plain LU factorization with partial pivoting so failures can report the
exact pivot that collapsed, which library solvers do not surface.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError, NumericError, ShapeError

# Entrywise symmetry slack for accepting a matrix as symmetric.
_SYMMETRY_TOL = 1e-10
# Diagonal-ratio condition estimate above which a solve is refused.
_CONDITION_LIMIT = 1e12


@dataclass(frozen=True)
class EigenResult:
    """Eigenvalues descending; eigenvectors as matching columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


@dataclass(frozen=True)
class SpectrumCoeffs:
    """Complex DFT coefficients, index k = 0..N-1."""

    coeffs: np.ndarray


def symmetric_eig(A: np.ndarray) -> EigenResult:
    """Full eigendecomposition of a symmetric matrix.

    Output order is deterministic: eigenvalues descending, and each vector is
    oriented so its largest-magnitude entry (first such index on ties) is
    positive.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {A.shape}")
    if A.size and np.max(np.abs(A - A.T)) > _SYMMETRY_TOL:
        raise ContractError("matrix is not symmetric within 1e-10")
    sym = (A + A.T) / 2.0
    values, vectors = np.linalg.eigh(sym)
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = vectors[:, order]
    for j in range(vectors.shape[1]):
        k = int(np.argmax(np.abs(vectors[:, j])))
        if vectors[k, j] < 0:
            vectors[:, j] = -vectors[:, j]
    return EigenResult(values, vectors)


def linear_solve(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve A x = b by LU with partial pivoting.

    Raises NumericError naming the pivot column when the matrix is singular
    or the diagonal-ratio condition estimate max|u_kk|/min|u_kk| exceeds 1e12.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {A.shape}")
    n = A.shape[0]
    if b.shape[0] != n:
        raise ShapeError(f"right-hand side length {b.shape[0]} != {n}")

    squeeze = b.ndim == 1
    U = A.copy()
    rhs = b.reshape(n, -1).astype(float).copy()
    scale = max(1.0, float(np.max(np.abs(A)))) if A.size else 1.0
    tiny = np.finfo(float).eps * n * scale

    for k in range(n):
        p = k + int(np.argmax(np.abs(U[k:, k])))
        pivot = U[p, k]
        if abs(pivot) <= tiny:
            raise NumericError(
                f"singular system: pivot {pivot:.3e} at column {k} below threshold")
        if p != k:
            U[[k, p]] = U[[p, k]]
            rhs[[k, p]] = rhs[[p, k]]
        factors = U[k + 1:, k] / pivot
        U[k + 1:, k:] -= np.outer(factors, U[k, k:])
        rhs[k + 1:] -= np.outer(factors, rhs[k])

    diag = np.abs(np.diag(U))
    worst = int(np.argmin(diag))
    if diag.max() / diag[worst] > _CONDITION_LIMIT:
        raise NumericError(
            f"ill-conditioned system: pivot {U[worst, worst]:.3e} at column {worst} "
            f"gives condition estimate above 1e12")

    x = np.zeros_like(rhs)
    for k in range(n - 1, -1, -1):
        x[k] = (rhs[k] - U[k, k + 1:] @ x[k + 1:]) / U[k, k]
    return x[:, 0] if squeeze else x


def dft(x: np.ndarray) -> SpectrumCoeffs:
    """Forward DFT, X_k = sum_n x_n exp(-2*pi*i*k*n/N)."""
    x = np.asarray(x)
    if x.ndim != 1 or x.shape[0] < 1:
        raise ShapeError(f"expected a nonempty 1-D signal, got shape {x.shape}")
    return SpectrumCoeffs(np.fft.fft(x))


def idft(spectrum: SpectrumCoeffs) -> np.ndarray:
    """Inverse DFT; reconstructs the signal the coefficients came from."""
    return np.fft.ifft(spectrum.coeffs)
