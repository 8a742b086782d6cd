"""Grid-based densities, their equivalent forms, and metrics between them.

A density sample lives on a uniform grid over a compact support [lo, hi].
All integrals use the trapezoidal rule on that grid, so every quantity in
the package is reproducible from the grid alone.  Densities convert
losslessly (up to quadrature) to CDFs, quantile functions, quantile
densities and hazards; three metrics are provided: L2 (`dist_l2`),
uniform (`dist_sup`) and the quantile-based Wasserstein distance
(`dist_wasserstein`).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import (
    AllZeroError,
    GridMismatchError,
    NonFiniteError,
    NotInvertibleError,
    SupportMismatchError,
)

DEFAULT_FLOOR = 1e-6
DEFAULT_GRID_SIZE = 512
DISPLAY_GRID_SIZE = 101

_UNIT_MASS_TOL = 1e-10


@dataclass(frozen=True)
class Grid:
    """Uniform grid of ``m`` points on [lo, hi]."""

    lo: float
    hi: float
    m: int

    def __post_init__(self):
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)):
            raise NonFiniteError("grid endpoints must be finite")
        if self.hi <= self.lo:
            raise ValueError(f"grid needs hi > lo, got [{self.lo}, {self.hi}]")
        if self.m < 3:
            raise ValueError(f"grid needs m >= 3 points, got {self.m}")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def spacing(self) -> float:
        return (self.hi - self.lo) / (self.m - 1)

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.m)

    def trapezoid_weights(self) -> np.ndarray:
        """Quadrature weights w with sum(w * v) = trapezoidal integral of v."""
        w = np.full(self.m, self.spacing)
        w[0] *= 0.5
        w[-1] *= 0.5
        return w


def unit_grid(m: int = DEFAULT_GRID_SIZE) -> Grid:
    return Grid(0.0, 1.0, m)


def integrate(values: np.ndarray, grid: Grid) -> float:
    """Trapezoidal integral of grid samples."""
    v = np.asarray(values, dtype=float)
    return float((v[0] + v[-1]) * 0.5 * grid.spacing + v[1:-1].sum() * grid.spacing)


def cumulative_integral(values: np.ndarray, grid: Grid) -> np.ndarray:
    """Running trapezoidal integral, starting at 0."""
    return cumulative_trapezoid(np.asarray(values, dtype=float), dx=grid.spacing, initial=0.0)


def inner_product(u: np.ndarray, v: np.ndarray, grid: Grid) -> float:
    """L2 inner product on the grid."""
    return integrate(np.asarray(u) * np.asarray(v), grid)


def _freeze(values) -> np.ndarray:
    out = np.ascontiguousarray(values, dtype=float)
    out.flags.writeable = False
    return out


# ---------------------------------------------------------------------------
# Value types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DensityFn:
    """Strictly positive density on a grid with unit trapezoidal integral."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "values", _freeze(self.values))
        if self.values.shape != (self.grid.m,):
            raise ValueError("values must match the grid size")
        if not np.all(np.isfinite(self.values)):
            raise NonFiniteError("density values must be finite")
        if self.values.min() <= 0.0:
            raise ValueError(
                "density values must be strictly positive; "
                "use normalize() with a positive floor"
            )
        mass = integrate(self.values, self.grid)
        if abs(mass - 1.0) > _UNIT_MASS_TOL:
            raise ValueError(f"density integral is {mass!r}, not 1 within {_UNIT_MASS_TOL}")

    @property
    def support(self) -> tuple[float, float]:
        return (self.grid.lo, self.grid.hi)


@dataclass(frozen=True)
class CdfFn:
    """CDF values on a grid: nondecreasing, 0 at lo and 1 at hi."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "values", _freeze(self.values))
        if self.values.shape != (self.grid.m,):
            raise ValueError("values must match the grid size")
        if np.any(np.diff(self.values) < 0):
            raise ValueError("CDF values must be nondecreasing")
        if abs(self.values[0]) > _UNIT_MASS_TOL or abs(self.values[-1] - 1.0) > _UNIT_MASS_TOL:
            raise ValueError("CDF must run from 0 to 1 over the support")


@dataclass(frozen=True)
class QuantileFn:
    """Quantile function on a probability grid over [0, 1]."""

    tgrid: Grid
    values: np.ndarray = field(repr=False)
    support: tuple[float, float] = (0.0, 1.0)

    def __post_init__(self):
        object.__setattr__(self, "values", _freeze(self.values))
        if (self.tgrid.lo, self.tgrid.hi) != (0.0, 1.0):
            raise ValueError("quantile functions live on the probability grid [0, 1]")
        if self.values.shape != (self.tgrid.m,):
            raise ValueError("values must match the grid size")
        if np.any(np.diff(self.values) < 0):
            raise ValueError("quantile values must be nondecreasing")
        lo, hi = self.support
        if self.values[0] < lo - 1e-12 or self.values[-1] > hi + 1e-12:
            raise ValueError("quantile values must stay inside the support")


@dataclass(frozen=True)
class QuantileDensityFn:
    """Derivative of the quantile function, q(t) = 1 / f(Q(t))."""

    tgrid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "values", _freeze(self.values))
        if self.values.min() <= 0.0:
            raise ValueError("quantile density must be strictly positive")


@dataclass(frozen=True)
class HazardFn:
    """Hazard h = f / (1 - F) on the truncated domain where F < 1."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "values", _freeze(self.values))
        if self.values.min() <= 0.0:
            raise ValueError("hazard must be strictly positive")


# ---------------------------------------------------------------------------
# Construction and conversions
# ---------------------------------------------------------------------------


def normalize(values, grid: Grid, floor: float = DEFAULT_FLOOR) -> DensityFn:
    """Turn a nonnegative grid function into a valid density.

    Values are clamped below at ``floor`` and rescaled to unit trapezoidal
    integral.  Idempotent: normalizing a density returns it unchanged.

    Parameters
    ----------
    values : array-like
        Raw nonnegative function sampled on ``grid``.
    grid : Grid
        Support grid.
    floor : float
        Lower clamp applied before rescaling; must be > 0 whenever the raw
        input touches zero, since densities are strictly positive.

    Raises
    ------
    AllZeroError
        If the raw input has no positive value.
    NonFiniteError
        If the raw input contains NaN or infinities.
    """
    raw = np.asarray(values, dtype=float)
    if raw.shape != (grid.m,):
        raise GridMismatchError("raw values must match the grid size")
    if not np.all(np.isfinite(raw)):
        raise NonFiniteError("raw values contain NaN or infinities")
    if floor < 0:
        raise ValueError("floor must be >= 0")
    if raw.max() <= 0.0:
        raise AllZeroError("raw function has no positive mass")
    clamped = np.maximum(raw, floor)
    mass = integrate(clamped, grid)
    if abs(mass - 1.0) < 1e-14:
        return DensityFn(grid, clamped)  # keeps normalize exactly idempotent
    return DensityFn(grid, clamped / mass)


def to_cdf(f: DensityFn) -> CdfFn:
    """Cumulative trapezoidal integral of a density, pinned to [0, 1]."""
    cum = cumulative_integral(f.values, f.grid)
    cum /= cum[-1]
    cum[0] = 0.0
    cum[-1] = 1.0
    return CdfFn(f.grid, cum)


def to_quantile(F: CdfFn, tgrid: Grid) -> QuantileFn:
    """Invert a CDF by monotone piecewise-linear interpolation.

    Flat spans at most one grid cell wide are resolved to their left
    endpoint; wider flats cannot be inverted and raise
    ``NotInvertibleError``.
    """
    if (tgrid.lo, tgrid.hi) != (0.0, 1.0):
        raise ValueError("quantiles are evaluated on a probability grid over [0, 1]")
    diffs = np.diff(F.values)
    flat = diffs == 0.0
    if np.any(flat[:-1] & flat[1:]):
        raise NotInvertibleError("CDF has a flat span wider than one grid cell")
    # keep the first occurrence of each CDF level -> left-endpoint ties
    levels, first = np.unique(F.values, return_index=True)
    q = np.interp(tgrid.points, levels, F.grid.points[first])
    q[0] = F.grid.lo
    q[-1] = F.grid.hi
    return QuantileFn(tgrid, q, support=(F.grid.lo, F.grid.hi))


def to_quantile_density(f: DensityFn, tgrid: Grid | None = None) -> QuantileDensityFn:
    """q(t) = 1 / f(Q(t)); integrates to the support width."""
    if tgrid is None:
        tgrid = unit_grid(f.grid.m)
    Q = to_quantile(to_cdf(f), tgrid)
    f_at_q = np.interp(Q.values, f.grid.points, f.values)
    return QuantileDensityFn(tgrid, 1.0 / f_at_q)


def to_hazard(f: DensityFn, upper: float) -> HazardFn:
    """Hazard f/(1-F) on [lo, upper] with upper strictly below hi."""
    if not (f.grid.lo < upper < f.grid.hi):
        raise ValueError("hazard domain must end strictly inside the support")
    hgrid = Grid(f.grid.lo, upper, f.grid.m)
    F = to_cdf(f)
    x = hgrid.points
    fx = np.interp(x, f.grid.points, f.values)
    Fx = np.interp(x, f.grid.points, F.values)
    return HazardFn(hgrid, fx / (1.0 - Fx))


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------


def _grid_and_values(obj) -> tuple[Grid, np.ndarray]:
    grid = getattr(obj, "grid", None) or getattr(obj, "tgrid", None)
    if grid is None:
        raise TypeError(f"{type(obj).__name__} is not a grid function")
    return grid, obj.values


def dist_l2(f, g) -> float:
    """L2 distance between two functions sharing one grid."""
    grid_f, vf = _grid_and_values(f)
    grid_g, vg = _grid_and_values(g)
    if grid_f != grid_g:
        raise GridMismatchError("L2 distance requires identical grids")
    return float(np.sqrt(max(integrate((vf - vg) ** 2, grid_f), 0.0)))


def dist_sup(f, g) -> float:
    """Uniform (sup) distance between two functions sharing one grid."""
    grid_f, vf = _grid_and_values(f)
    grid_g, vg = _grid_and_values(g)
    if grid_f != grid_g:
        raise GridMismatchError("sup distance requires identical grids")
    return float(np.abs(vf - vg).max())


def dist_wasserstein(f: DensityFn, g: DensityFn) -> float:
    """Wasserstein-2 distance via the L2 distance of quantile functions.

    Requires both densities to share the support interval; grids may
    differ in resolution, in which case the finer one sets the shared
    probability grid.
    """
    if f.support != g.support:
        raise SupportMismatchError(
            f"supports differ: {f.support} vs {g.support}"
        )
    tgrid = unit_grid(max(f.grid.m, g.grid.m))
    qf = to_quantile(to_cdf(f), tgrid)
    qg = to_quantile(to_cdf(g), tgrid)
    return float(np.sqrt(max(integrate((qf.values - qg.values) ** 2, tgrid), 0.0)))


# ---------------------------------------------------------------------------
# Support mapping
# ---------------------------------------------------------------------------


def to_unit_support(f: DensityFn) -> DensityFn:
    """Affinely map a density on [lo, hi] to the unit interval."""
    if f.support == (0.0, 1.0):
        return f
    return DensityFn(unit_grid(f.grid.m), f.values * f.grid.width)


def from_unit_support(f01: DensityFn, lo: float, hi: float) -> DensityFn:
    """Inverse of :func:`to_unit_support` onto the target support [lo, hi]."""
    if f01.support != (0.0, 1.0):
        raise SupportMismatchError("input must live on [0, 1]")
    if (lo, hi) == (0.0, 1.0):
        return f01
    grid = Grid(lo, hi, f01.grid.m)
    return DensityFn(grid, f01.values / grid.width)
