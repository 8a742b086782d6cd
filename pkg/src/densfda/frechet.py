"""Fréchet means and variance, FVE curves, truncation choice and modes.

Total variation of a density sample is measured by the Fréchet variance
under a chosen metric (L2 or Wasserstein), and the quality of a
K-component representation by the fraction of that variance it explains
(FVE).  Three representation methods are supported: ordinary FPCA on the
densities followed by projection back onto density space, FPCA of an
unconstrained transform mapped back through its inverse, and the
Hilbert-sphere method.  Transformation representations and modes are
valid densities for every truncation level and mode parameter.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import NamedTuple

import numpy as np
from scipy.interpolate import PchipInterpolator

from . import fpca
from .density import (
    DEFAULT_FLOOR,
    DensityFn,
    Grid,
    dist_l2,
    dist_wasserstein,
    normalize,
    to_cdf,
    to_quantile,
    unit_grid,
)
from .errors import EmptySampleError, SupportMismatchError
from .sphere import FittedSphere
from .transforms import LQD, TransformedFn, TransformSpec, forward, inverse, log_hazard_spec

K_MAX_CAP = 20
EXPLAINED_TAIL = 1e-8  # eigenvalue mass allowed beyond the default K_max


class Metric(Enum):
    L2 = "l2"
    WASSERSTEIN = "wasserstein"

    def distance(self, f: DensityFn, g: DensityFn) -> float:
        return dist_l2(f, g) if self is Metric.L2 else dist_wasserstein(f, g)


@dataclass(frozen=True)
class MethodKind:
    """Representation method: ordinary FPCA, a transform, or the sphere.

    ``blend`` mixes each density with the uniform density on its support
    before the forward transform and removes the mixture exactly after
    inversion.  It bounds the transformed functions when densities run
    very close to zero near the support boundary (where the inverse map
    amplifies errors exponentially) and leaves the method unchanged at 0.
    """

    kind: str  # "fpca" | "transform" | "hs"
    transform: TransformSpec | None = None
    blend: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.blend < 1.0):
            raise ValueError(f"blend must be in [0, 1), got {self.blend}")
        if self.blend > 0 and self.kind != "transform":
            raise ValueError("blend only applies to transform methods")

    @staticmethod
    def ordinary_fpca() -> "MethodKind":
        return MethodKind("fpca")

    @staticmethod
    def lqd(blend: float = 0.0) -> "MethodKind":
        return MethodKind("transform", LQD, blend)

    @staticmethod
    def log_hazard(delta: float = 0.1, blend: float = 0.0) -> "MethodKind":
        return MethodKind("transform", log_hazard_spec(delta), blend)

    @staticmethod
    def hilbert_sphere() -> "MethodKind":
        return MethodKind("hs")

    @property
    def label(self) -> str:
        if self.kind == "fpca":
            return "FPCA"
        if self.kind == "hs":
            return "HS"
        return "LQD" if self.transform == LQD else f"LH({self.transform.delta:g})"


class KSelection(NamedTuple):
    k: int
    reached: bool


@dataclass
class FrechetReport:
    """Fréchet variance, per-K explained variance and the chosen truncation."""

    metric: Metric
    v_infinity: float
    v_k: np.ndarray
    fve: np.ndarray
    selected_k: int
    threshold_reached: bool
    p: float
    method: MethodKind | None = None


def _check_shared_support(sample) -> tuple[float, float]:
    supports = {f.support for f in sample}
    if len(supports) != 1:
        raise SupportMismatchError(f"sample mixes supports: {sorted(supports)}")
    return supports.pop()


def _quantile_samples(f: DensityFn, tgrid: Grid) -> np.ndarray:
    """Quantile values by monotone cubic CDF inversion.

    Differentiation downstream amplifies interpolation scallops by one
    power of the spacing, so the piecewise-linear inversion used by the
    metric code is not accurate enough here.
    """
    cdf = to_cdf(f)
    if np.any(np.diff(cdf.values) <= 0):
        return to_quantile(cdf, tgrid).values
    q = PchipInterpolator(cdf.values, f.grid.points)(tgrid.points)
    q[0], q[-1] = f.grid.lo, f.grid.hi
    return q


def wasserstein_frechet_mean(sample, floor: float = DEFAULT_FLOOR) -> DensityFn:
    """Fréchet mean under the Wasserstein metric (quantile synchronization).

    The sample quantile functions are averaged pointwise on a shared
    probability grid; the average is inverted back to a CDF (monotone
    cubic interpolation) and differentiated by central differences with
    one-sided stencils at the endpoints, then floored and renormalized.
    """
    sample = list(sample)
    if not sample:
        raise EmptySampleError("mean of an empty sample")
    _check_shared_support(sample)
    if len(sample) == 1:
        return sample[0]
    m = max(f.grid.m for f in sample)
    tgrid = unit_grid(m)
    qbar = np.mean([_quantile_samples(f, tgrid) for f in sample], axis=0)
    grid = Grid(*sample[0].support, m)
    cdf = PchipInterpolator(qbar, tgrid.points)(grid.points)
    return normalize(np.gradient(cdf, grid.spacing, edge_order=2), grid, floor)


def frechet_mean(sample, metric: Metric, floor: float = DEFAULT_FLOOR) -> DensityFn:
    """Fréchet mean under the chosen metric.

    L2 gives the cross-sectional mean (densities are convex, so no
    projection is needed); Wasserstein gives the quantile-synchronized
    mean.
    """
    sample = list(sample)
    if not sample:
        raise EmptySampleError("mean of an empty sample")
    if len(sample) == 1:
        return sample[0]
    if metric is Metric.WASSERSTEIN:
        return wasserstein_frechet_mean(sample, floor)
    values = fpca.cross_sectional_mean(sample)
    return DensityFn(sample[0].grid, values)


def frechet_variance(sample, mean: DensityFn, metric: Metric) -> float:
    """Average squared metric distance to the given mean."""
    sample = list(sample)
    if not sample:
        raise EmptySampleError("variance of an empty sample")
    return float(np.mean([metric.distance(f, mean) ** 2 for f in sample]))


# ---------------------------------------------------------------------------
# Fitted representation methods
# ---------------------------------------------------------------------------


def blend_uniform(f: DensityFn, weight: float) -> DensityFn:
    """Mixture (1 - weight) * f + weight * uniform on the same support."""
    if weight == 0.0:
        return f
    return DensityFn(f.grid, (1.0 - weight) * f.values + weight / f.grid.width)


def unblend_uniform(f: DensityFn, weight: float, floor: float) -> DensityFn:
    """Exact inverse of :func:`blend_uniform`, clipped and renormalized."""
    if weight == 0.0:
        return f
    raw = (f.values - weight / f.grid.width) / (1.0 - weight)
    return normalize(np.maximum(raw, 0.0), f.grid, floor)


class FittedMethod:
    """One method fitted to a sample, reusable across truncation levels K.

    ``reconstruct(K)`` silently uses all available components when K
    exceeds them (trailing components carry no variance), which also
    covers the degenerate single-subject sample, where every method
    returns its mean.
    """

    def __init__(self, sample, method: MethodKind, floor: float = DEFAULT_FLOOR):
        self.sample = list(sample)
        if not self.sample:
            raise EmptySampleError("cannot fit a method to an empty sample")
        self.method = method
        self.floor = floor
        self.grid = self.sample[0].grid
        self.support = _check_shared_support(self.sample)
        self._sphere = None
        self.system = None
        if method.kind == "hs":
            self._sphere = FittedSphere(self.sample, floor)
            self.system = self._sphere.system
        elif method.kind == "transform":
            blended = [blend_uniform(f, method.blend) for f in self.sample]
            self._xs = [forward(f, method.transform) for f in blended]
            self.system = _fit_possibly_singleton(self._xs)
            self._tgrid = self._xs[0].tgrid
        elif method.kind == "fpca":
            self.system = _fit_possibly_singleton(self.sample)
        else:
            raise ValueError(f"unknown method kind {method.kind!r}")

    @property
    def n_components(self) -> int:
        return self.system.n_components

    def reconstruct(self, k: int) -> list[DensityFn]:
        if k < 0:
            raise ValueError("k must be >= 0")
        k = min(k, self.n_components)
        if self.method.kind == "hs":
            return self._sphere.reconstruct(k)
        rows = fpca.truncate(self.system, k)
        if self.method.kind == "fpca":
            return [fpca.project_to_density(r, self.grid, self.floor) for r in rows]
        return [self._invert(r) for r in rows]

    def mode(self, k: int, alpha: float) -> DensityFn:
        """Mode of variation along component k (1-based) at parameter alpha."""
        if self.method.kind == "hs":
            return self._sphere.mode(k, alpha)
        values = fpca.mode_of_variation(self.system, k, alpha)
        if self.method.kind == "fpca":
            return fpca.project_to_density(values, self.grid, self.floor)
        return self._invert(values)

    def _invert(self, values: np.ndarray) -> DensityFn:
        x = TransformedFn(self._tgrid, values, self.method.transform, self.support)
        return unblend_uniform(inverse(x), self.method.blend, self.floor)


def _fit_possibly_singleton(sample) -> fpca.EigenSystem:
    if len(sample) >= 2:
        return fpca.fit(sample)
    f = sample[0]
    grid = getattr(f, "grid", None) or getattr(f, "tgrid")
    return fpca.EigenSystem(
        grid,
        np.array(f.values, dtype=float),
        np.zeros(0),
        np.zeros((0, grid.m)),
        np.zeros((1, 0)),
    )


def transformation_modes(
    sample,
    spec: TransformSpec,
    k: int,
    alpha: float,
    floor: float = DEFAULT_FLOOR,
    blend: float = 0.0,
) -> DensityFn:
    """Density-valued mode: the inverse transform of mean + alpha*sd along
    the k-th component of the transformed sample."""
    fitted = FittedMethod(sample, MethodKind("transform", spec, blend), floor)
    return fitted.mode(k, alpha)


def represent(sample, method: MethodKind, k: int, floor: float = DEFAULT_FLOOR) -> list[DensityFn]:
    """K-component density representations of every sample member."""
    if k < 1:
        raise ValueError("representations need k >= 1")
    return FittedMethod(sample, method, floor).reconstruct(k)


def default_k_max(eigenvalues: np.ndarray, n: int) -> int:
    """Smallest K explaining all but a 1e-8 tail of score variance,
    capped at min(n - 1, 20)."""
    cap = max(1, min(n - 1, K_MAX_CAP, len(eigenvalues)))
    total = eigenvalues.sum()
    if total <= 0:
        return 1
    cum = np.cumsum(eigenvalues)
    enough = np.nonzero(cum >= (1.0 - EXPLAINED_TAIL) * total)[0]
    k = int(enough[0]) + 1 if enough.size else len(eigenvalues)
    return max(1, min(k, cap))


def fve_curve(
    sample,
    method: MethodKind,
    metric: Metric,
    k_max: int | None = None,
    p: float = 0.9,
    floor: float = DEFAULT_FLOOR,
) -> FrechetReport:
    """Fréchet variance explained by K = 1..k_max components.

    V_K = V_inf - mean_i d(f_i, reconstruction_i(K))^2, reported as the
    curve of ratios V_K / V_inf together with the smallest K exceeding
    the threshold p.
    """
    sample = list(sample)
    fitted = FittedMethod(sample, method, floor)
    mean = frechet_mean(sample, metric, floor)
    v_inf = frechet_variance(sample, mean, metric)
    if k_max is None:
        k_max = default_k_max(fitted.system.eigenvalues, len(sample))
    k_max = max(1, k_max)
    v_k = np.empty(k_max)
    for k in range(1, k_max + 1):
        recon = fitted.reconstruct(k)
        err = float(np.mean([metric.distance(f, r) ** 2 for f, r in zip(sample, recon)]))
        v_k[k - 1] = v_inf - err
    fve = v_k / v_inf if v_inf > 0 else np.ones(k_max)
    selected, reached = _select(fve, p)
    return FrechetReport(metric, v_inf, v_k, fve, selected, reached, p, method)


def _select(fve: np.ndarray, p: float) -> KSelection:
    hit = np.nonzero(fve > p)[0]
    if hit.size:
        return KSelection(int(hit[0]) + 1, True)
    return KSelection(len(fve), False)


def select_k(report: FrechetReport, p: float) -> KSelection:
    """Smallest K whose FVE exceeds p; falls back to K_max with
    ``reached=False`` when the threshold is never met."""
    if not (0.0 < p < 1.0):
        raise ValueError("p must be in (0, 1)")
    return _select(report.fve, p)


def with_threshold(report: FrechetReport, p: float) -> FrechetReport:
    """Copy of a report re-thresholded at a different p."""
    sel = select_k(report, p)
    return replace(report, selected_k=sel.k, threshold_reached=sel.reached, p=p)
