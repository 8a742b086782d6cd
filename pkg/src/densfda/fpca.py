"""Functional PCA on grid functions: mean, covariance, eigensystem, scores.

All inner products are trapezoidal, so eigenfunctions come out
orthonormal in L2 of the grid rather than in Euclidean coordinates.  The
covariance operator is discretized by symmetrizing with the square roots
of the quadrature weights, which keeps the eigenproblem symmetric and
the recovered eigenfunctions orthonormal.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .density import DEFAULT_FLOOR, DensityFn, Grid, normalize
from .errors import (
    EmptySampleError,
    GridMismatchError,
    KTooLargeError,
    NotSymmetricError,
)

EIGENVALUE_DROP = 1e-12  # relative to the leading eigenvalue


@dataclass
class EigenSystem:
    """Mean, eigenvalues, orthonormal eigenfunctions and per-subject scores."""

    grid: Grid
    mean: np.ndarray
    eigenvalues: np.ndarray  # descending, >= 0
    eigenfunctions: np.ndarray  # (K, m), orthonormal in L2(grid)
    scores: np.ndarray = field(default=None)  # (n, K)

    @property
    def n_components(self) -> int:
        return len(self.eigenvalues)

    def validate(self, tol: float = 1e-8):
        """Assert orthonormality, eigenvalue ordering and centered scores."""
        w = self.grid.trapezoid_weights()
        gram = (self.eigenfunctions * w) @ self.eigenfunctions.T
        if np.abs(gram - np.eye(self.n_components)).max() > tol:
            raise ValueError("eigenfunctions are not orthonormal on the grid")
        if np.any(np.diff(self.eigenvalues) > 0) or np.any(self.eigenvalues < 0):
            raise ValueError("eigenvalues must be nonincreasing and nonnegative")
        if self.scores is not None and self.scores.size:
            if np.abs(self.scores.mean(axis=0)).max() > tol:
                raise ValueError("score columns are not centered")
        return self


def _stack(sample, grid: Grid | None = None) -> tuple[np.ndarray, Grid]:
    """Stack grid functions (or a 2-D array) into an (n, m) matrix."""
    if isinstance(sample, np.ndarray) and sample.ndim == 2:
        if grid is None:
            raise ValueError("a grid is required with a plain array sample")
        if sample.shape[1] != grid.m:
            raise GridMismatchError("array columns do not match the grid")
        return np.asarray(sample, dtype=float), grid
    rows = list(sample)
    if not rows:
        raise EmptySampleError("sample is empty")
    grids = [getattr(f, "grid", None) or getattr(f, "tgrid") for f in rows]
    if any(g != grids[0] for g in grids):
        raise GridMismatchError("sample members live on different grids")
    if grid is not None and grid != grids[0]:
        raise GridMismatchError("sample grid differs from the requested grid")
    return np.stack([f.values for f in rows]), grids[0]


def cross_sectional_mean(sample, grid: Grid | None = None) -> np.ndarray:
    """Pointwise average of the sample functions (n >= 2)."""
    data, _ = _stack(sample, grid)
    if data.shape[0] < 2:
        raise EmptySampleError("mean requires at least two functions")
    return data.mean(axis=0)


def covariance(sample, mean, grid: Grid | None = None) -> np.ndarray:
    """Empirical covariance surface (1/n convention), symmetrized."""
    data, _ = _stack(sample, grid)
    if data.shape[0] < 2:
        raise EmptySampleError("covariance requires at least two functions")
    centered = data - np.asarray(mean, dtype=float)
    cov = centered.T @ centered / data.shape[0]
    return 0.5 * (cov + cov.T)


def eigendecompose(cov: np.ndarray, grid: Grid, k: int | None = None):
    """Eigenvalues and L2-orthonormal eigenfunctions of the covariance operator.

    Parameters
    ----------
    cov : ndarray (m, m)
        Symmetric covariance surface on the grid.
    grid : Grid
        Grid carrying the quadrature weights.
    k : int, optional
        Keep at most this many leading components.

    Returns
    -------
    eigenvalues : ndarray, descending, clipped at zero; components below
        ``EIGENVALUE_DROP`` times the leading eigenvalue are dropped.
    eigenfunctions : ndarray (K, m) with unit L2 norm and the sign fixed
        so each function's largest-magnitude value is positive.
    """
    cov = np.asarray(cov, dtype=float)
    if cov.shape != (grid.m, grid.m):
        raise GridMismatchError("covariance surface does not match the grid")
    if np.abs(cov - cov.T).max() > 1e-10 * max(np.abs(cov).max(), 1e-300):
        raise NotSymmetricError("covariance surface is not symmetric")
    w = grid.trapezoid_weights()
    sw = np.sqrt(w)
    b = sw[:, None] * cov * sw[None, :]
    b = 0.5 * (b + b.T)
    vals, vecs = np.linalg.eigh(b)
    order = np.argsort(vals)[::-1]
    vals = np.clip(vals[order], 0.0, None)
    funcs = vecs[:, order].T / sw[None, :]
    keep = vals > EIGENVALUE_DROP * (vals[0] if vals.size and vals[0] > 0 else 1.0)
    vals, funcs = vals[keep], funcs[keep]
    if k is not None:
        vals, funcs = vals[:k], funcs[:k]
    norms = np.sqrt(np.einsum("km,m,km->k", funcs, w, funcs))
    funcs = funcs / norms[:, None]
    flip = funcs[np.arange(len(funcs)), np.abs(funcs).argmax(axis=1)] < 0
    funcs[flip] *= -1.0
    return vals, funcs


def scores(sample, mean, eigenfunctions: np.ndarray, grid: Grid | None = None) -> np.ndarray:
    """Projections of centered sample functions onto the eigenfunctions."""
    data, g = _stack(sample, grid)
    centered = data - np.asarray(mean, dtype=float)
    return centered @ (eigenfunctions * g.trapezoid_weights()).T


def fit(sample, grid: Grid | None = None, k: int | None = None) -> EigenSystem:
    """Mean, eigendecomposition and scores in one pass."""
    data, g = _stack(sample, grid)
    mean = cross_sectional_mean(data, g)
    vals, funcs = eigendecompose(covariance(data, mean, g), g, k)
    sc = scores(data, mean, funcs, g)
    return EigenSystem(g, mean, vals, funcs, sc)


def truncate(system: EigenSystem, k: int) -> np.ndarray:
    """Reconstructions using the first k components; k = 0 gives the mean."""
    if k < 0 or k > system.n_components:
        raise KTooLargeError(
            f"k = {k} not in [0, {system.n_components}] available components"
        )
    n = system.scores.shape[0]
    if k == 0:
        return np.tile(system.mean, (n, 1))
    return system.mean + system.scores[:, :k] @ system.eigenfunctions[:k]


def mode_of_variation(system: EigenSystem, k: int, alpha: float) -> np.ndarray:
    """Mean plus alpha standard deviations along component k (1-based)."""
    if not 1 <= k <= system.n_components:
        raise KTooLargeError(f"component {k} of {system.n_components} requested")
    return system.mean + alpha * np.sqrt(system.eigenvalues[k - 1]) * system.eigenfunctions[k - 1]


def project_to_density(values, grid: Grid, floor: float = DEFAULT_FLOOR) -> DensityFn:
    """Positive part, floored and renormalized, of an arbitrary grid function.

    Raises ``AllZeroError`` when the positive part carries no mass.
    """
    return normalize(np.maximum(np.asarray(values, dtype=float), 0.0), grid, floor)
