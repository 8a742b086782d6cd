"""Square-root density embedding on the unit sphere of L2.

Densities map to their pointwise square roots, which have unit L2 norm.
Distances are arc lengths (arccos of inner products), means are Karcher
means found by tangent-space averaging, and PCA happens in the tangent
space at the mean (linearized principal geodesic analysis).  Strictly
positive densities share an orthant, so all pairwise angles stay below
pi/2 and the iteration is well behaved.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import fpca
from .density import DEFAULT_FLOOR, DensityFn, Grid, inner_product, normalize
from .errors import EmptySampleError, GridMismatchError, NoConvergenceError

KARCHER_TOL = 1e-9
KARCHER_MAX_ITER = 200


@dataclass(frozen=True)
class SpherePoint:
    """Grid function with unit L2 norm.

    Embedded square-root densities are nonnegative; geodesic operations
    (exp maps with large tangents, modes at large parameters) may leave
    the nonnegative orthant, and squaring back to a density folds the
    sign away again.
    """

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=float)
        v.flags.writeable = False
        object.__setattr__(self, "values", v)
        if abs(inner_product(v, v, self.grid) - 1.0) > 1e-9:
            raise ValueError("sphere points must have unit L2 norm")


def sqrt_embed(f: DensityFn) -> SpherePoint:
    v = np.sqrt(f.values)
    v /= np.sqrt(inner_product(v, v, f.grid))
    return SpherePoint(f.grid, v)


def square_back(p: SpherePoint, floor: float = DEFAULT_FLOOR) -> DensityFn:
    return normalize(p.values**2, p.grid, floor)


def geodesic_distance(p: SpherePoint, q: SpherePoint) -> float:
    """Arc length between two points, in [0, pi]."""
    if p.grid != q.grid:
        raise GridMismatchError("sphere points live on different grids")
    c = np.clip(inner_product(p.values, q.values, p.grid), -1.0, 1.0)
    return float(np.arccos(c))


def log_map(base: SpherePoint, p: SpherePoint) -> np.ndarray:
    """Tangent vector at `base` pointing to `p` with norm = geodesic distance."""
    theta = geodesic_distance(base, p)
    if theta < 1e-15:
        return np.zeros(base.grid.m)
    return (theta / np.sin(theta)) * (p.values - np.cos(theta) * base.values)


def exp_map(base: SpherePoint, v: np.ndarray) -> SpherePoint:
    """Geodesic from `base` with initial velocity v, evaluated at time 1."""
    norm = np.sqrt(max(inner_product(v, v, base.grid), 0.0))
    if norm < 1e-15:
        return base
    out = np.cos(norm) * base.values + np.sin(norm) * v / norm
    out /= np.sqrt(inner_product(out, out, base.grid))
    return SpherePoint(base.grid, out)


def karcher_mean(
    sample,
    tol: float = KARCHER_TOL,
    max_iter: int = KARCHER_MAX_ITER,
) -> SpherePoint:
    """Intrinsic mean by iterated tangent averaging with unit steps.

    Stops when the mean of the log-mapped sample has L2 norm <= tol.
    """
    points = list(sample)
    if not points:
        raise EmptySampleError("karcher_mean of an empty sample")
    grid = points[0].grid
    data = np.stack([p.values for p in points])
    init = data.mean(axis=0)
    init /= np.sqrt(inner_product(init, init, grid))
    mu = SpherePoint(grid, init)
    for _ in range(max_iter):
        tangents = np.stack([log_map(mu, p) for p in points])
        v = tangents.mean(axis=0)
        if np.sqrt(max(inner_product(v, v, grid), 0.0)) <= tol:
            return mu
        mu = exp_map(mu, v)
    raise NoConvergenceError(f"karcher_mean did not converge in {max_iter} iterations")


def pga(sample, k: int | None = None) -> tuple[SpherePoint, fpca.EigenSystem]:
    """Tangent-space PCA at the Karcher mean.

    Returns the mean point and an eigensystem of the log-mapped sample
    (mean function, eigenvalues, tangent eigenfunctions, scores).
    """
    points = list(sample)
    mu = karcher_mean(points)
    tangents = np.stack([log_map(mu, p) for p in points])
    return mu, fpca.fit(tangents, mu.grid, k)


class FittedSphere:
    """Karcher mean + tangent eigensystem, reusable across truncation levels."""

    def __init__(self, densities, floor: float = DEFAULT_FLOOR):
        densities = list(densities)
        self.floor = floor
        points = [sqrt_embed(f) for f in densities]
        self.grid = points[0].grid
        if len(points) == 1:
            self.mean = points[0]
            self.system = fpca.EigenSystem(
                self.grid,
                np.zeros(self.grid.m),
                np.zeros(0),
                np.zeros((0, self.grid.m)),
                np.zeros((1, 0)),
            )
        else:
            self.mean, self.system = pga(points)

    @property
    def n_components(self) -> int:
        return self.system.n_components

    def reconstruct(self, k: int) -> list[DensityFn]:
        k = min(k, self.n_components)
        tangents = fpca.truncate(self.system, k)
        return [
            square_back(exp_map(self.mean, v), self.floor) for v in tangents
        ]

    def mode(self, k: int, alpha: float) -> DensityFn:
        v = alpha * np.sqrt(self.system.eigenvalues[k - 1]) * self.system.eigenfunctions[k - 1]
        return square_back(exp_map(self.mean, v), self.floor)


def hs_represent(densities, k: int, floor: float = DEFAULT_FLOOR) -> list[DensityFn]:
    """Truncated sphere representations of a density sample."""
    return FittedSphere(densities, floor).reconstruct(k)


def hs_mode(densities, k: int, alpha: float, floor: float = DEFAULT_FLOOR) -> DensityFn:
    """Mode of variation along tangent component k (1-based)."""
    return FittedSphere(densities, floor).mode(k, alpha)


def fisher_rao_mean(densities, floor: float = DEFAULT_FLOOR) -> DensityFn:
    """Fréchet mean under the geodesic metric, squared back to a density."""
    return square_back(karcher_mean([sqrt_embed(f) for f in densities]), floor)
