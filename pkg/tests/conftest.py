import numpy as np
import pytest

from densfda import DensityFn, Grid, normalize, unit_grid
from densfda.density import integrate


@pytest.fixture
def unit512() -> Grid:
    return Grid(0.0, 1.0, 512)


def smooth_density(rng, grid: Grid, floor: float = 1e-6, amplitude: float = 0.5) -> DensityFn:
    """Random strictly positive smooth density: exp of a low-order trig poly."""
    u = (grid.points - grid.lo) / grid.width
    log_f = np.zeros(grid.m)
    for k in range(1, 4):
        a, b = rng.normal(size=2) * amplitude / k
        log_f += a * np.cos(np.pi * k * u) + b * np.sin(np.pi * k * u)
    return normalize(np.exp(log_f), grid, floor)


def lqd_rank2_basis(grid_m: int = 512):
    """Two orthonormal directions for synthetic log-quantile-density families.

    Both integrate to zero (the inverse transform is invariant to additive
    constants, so components along 1 would be invisible in density space),
    have a unique dominant peak, and carry the package sign convention
    (largest-magnitude value positive) so estimated eigenfunctions line up
    with them without post-hoc alignment.
    """
    tgrid = unit_grid(grid_m)
    t = tgrid.points
    raw1 = np.cos(np.pi * t) + 0.25 * np.cos(2 * np.pi * t)
    rho1 = raw1 / np.sqrt(integrate(raw1**2, tgrid))
    raw2 = np.cos(2 * np.pi * t) + 0.3 * np.cos(3 * np.pi * t)
    raw2 -= integrate(raw2 * rho1, tgrid) * rho1
    rho2 = raw2 / np.sqrt(integrate(raw2**2, tgrid))
    for rho in (rho1, rho2):
        if rho[np.abs(rho).argmax()] < 0:
            rho *= -1.0
    return tgrid, rho1, rho2


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
