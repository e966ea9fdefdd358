"""Intrinsic-dimension estimation from pairwise-distance scaling.

Two estimators over a point cloud:

* correlation dimension -- slope of ln C(n, r) against ln r, where C(n, r)
  is the fraction of point pairs within Euclidean distance r;
* box-counting dimension -- slope of ln nu(r) against ln(1/r), where nu(r)
  counts occupied axis-aligned boxes of side r on a grid anchored at the
  cloud minimum.

Both fit an ordinary-least-squares line over an automatically selected
linear region of the log-log curve: every contiguous window of at least
five grid points is scanned, the window with the highest R^2 wins, ties go
to the longer window and then to smaller radii.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .embedding import PointCloud
from .errors import DegenerateCloudError, NoScalingRegionError

DEFAULT_N_RADII = 24
DEFAULT_LO_PERCENTILE = 1.0
DEFAULT_HI_PERCENTILE = 90.0
PAIR_SUBSAMPLE_THRESHOLD = 20_000
MIN_FIT_WINDOW = 5


@dataclass(frozen=True)
class CorrelationCurve:
    """C(n, r) sampled on a strictly increasing radius grid."""

    radii: np.ndarray
    values: np.ndarray
    n_points: int
    ambient_dim: int | None = None

    def __post_init__(self):
        radii = np.asarray(self.radii, dtype=np.float64)
        values = np.asarray(self.values, dtype=np.float64)
        if radii.ndim != 1 or radii.shape != values.shape:
            raise ValueError("radii and values must be 1-D and aligned")
        if len(radii) < 1:
            raise ValueError("need at least 1 radius")
        if not (radii > 0).all() or not (np.diff(radii) > 0).all():
            raise ValueError("radii must be positive and strictly increasing")
        if (values < 0).any() or (values > 1).any():
            raise ValueError("correlation values must lie in [0, 1]")
        if (np.diff(values) < 0).any():
            raise ValueError("correlation values must be non-decreasing in r")
        radii.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class DimensionEstimate:
    """Fitted log-log slope with diagnostics of the chosen linear region.

    ``fit_lo``/``fit_hi`` are inclusive indices into the radius (or box
    size) grid the curve was sampled on. ``suspect`` marks estimates above
    ambient dimension + 0.5.
    """

    value: float
    fit_lo: int
    fit_hi: int
    r_squared: float
    stderr: float
    method: str
    n_points: int
    suspect: bool = False


def _pair_distance_sample(points: np.ndarray, max_pairs: int, seed: int) -> np.ndarray:
    """Distances of up to max_pairs unordered pairs (exact when small enough)."""
    n = len(points)
    total = n * (n - 1) // 2
    if total <= max_pairs:
        out = np.empty(total, dtype=np.float64)
        pos = 0
        block = max(1, int(4_000_000 // max(n, 1)))
        for i0 in range(0, n - 1, block):
            i1 = min(i0 + block, n - 1)
            rect = cdist(points[i0:i1], points[i0:])
            iu = np.triu_indices(i1 - i0, 1, rect.shape[1])
            d = rect[iu]
            out[pos : pos + len(d)] = d
            pos += len(d)
        return out[:pos]
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    i = rng.integers(0, n, max_pairs)
    j = rng.integers(0, n - 1, max_pairs)
    j = j + (j >= i)
    out = np.empty(max_pairs, dtype=np.float64)
    for k0 in range(0, max_pairs, 1_000_000):
        k1 = min(k0 + 1_000_000, max_pairs)
        diff = points[i[k0:k1]] - points[j[k0:k1]]
        out[k0:k1] = np.sqrt((diff * diff).sum(axis=1))
    return out


def default_radii(
    cloud: PointCloud,
    n_radii: int = DEFAULT_N_RADII,
    lo_percentile: float = DEFAULT_LO_PERCENTILE,
    hi_percentile: float = DEFAULT_HI_PERCENTILE,
    max_pairs: int = 1_000_000,
    seed: int = 0,
) -> np.ndarray:
    """Log-spaced radius grid between distance percentiles of the cloud.

    Distances are subsampled to at most ``max_pairs`` pairs for large
    clouds (seeded, reproducible). A zero lower percentile falls back to
    the smallest positive distance.
    """
    if cloud.count < 2:
        raise DegenerateCloudError(f"need at least 2 points, got {cloud.count}")
    d = _pair_distance_sample(cloud.points, max_pairs, seed)
    p_lo, p_hi = np.percentile(d, [lo_percentile, hi_percentile])
    if p_lo <= 0:
        positive = d[d > 0]
        if positive.size == 0:
            raise NoScalingRegionError("all pairwise distances are zero")
        p_lo = float(positive.min())
    if not p_lo < p_hi:
        raise NoScalingRegionError(
            f"degenerate distance range [{p_lo}, {p_hi}]; no scaling region"
        )
    return np.geomspace(p_lo, p_hi, n_radii)


def correlation_integral(
    cloud: PointCloud,
    radii=None,
    subsample_threshold: int = PAIR_SUBSAMPLE_THRESHOLD,
    max_pairs: int = 5_000_000,
    seed: int = 0,
) -> CorrelationCurve:
    """Fraction of point pairs within distance r, per radius.

    Counting is exact up to ``subsample_threshold`` points; beyond that a
    seeded uniform sample of ``max_pairs`` pairs estimates the fractions.
    Counts accumulate as integers, so the result does not depend on
    accumulation order.
    """
    if cloud.count < 2:
        raise DegenerateCloudError(f"need at least 2 points, got {cloud.count}")
    if radii is None:
        radii = default_radii(cloud, seed=seed)
    radii = np.asarray(radii, dtype=np.float64)
    if len(radii) < 1 or (radii <= 0).any() or (np.diff(radii) <= 0).any():
        raise ValueError("radii must be positive and strictly increasing")

    points = cloud.points
    n = cloud.count
    counts = np.zeros(len(radii) + 1, dtype=np.int64)
    if n <= subsample_threshold:
        denom = n * (n - 1) // 2
        block = max(1, int(4_000_000 // max(n, 1)))
        for i0 in range(0, n - 1, block):
            i1 = min(i0 + block, n - 1)
            rect = cdist(points[i0:i1], points[i0:])
            iu = np.triu_indices(i1 - i0, 1, rect.shape[1])
            d = rect[iu]
            counts += np.bincount(
                np.searchsorted(radii, d, side="left"), minlength=len(radii) + 1
            )
    else:
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
        i = rng.integers(0, n, max_pairs)
        j = rng.integers(0, n - 1, max_pairs)
        j = j + (j >= i)
        denom = max_pairs
        for k0 in range(0, max_pairs, 1_000_000):
            k1 = min(k0 + 1_000_000, max_pairs)
            diff = points[i[k0:k1]] - points[j[k0:k1]]
            d = np.sqrt((diff * diff).sum(axis=1))
            counts += np.bincount(
                np.searchsorted(radii, d, side="left"), minlength=len(radii) + 1
            )
    values = np.cumsum(counts)[: len(radii)] / denom
    return CorrelationCurve(
        radii=radii, values=values, n_points=n, ambient_dim=cloud.ambient_dim
    )


def _fit_linear_region(x, y, min_window: int, tie_start_sign: int):
    """Best OLS window: max R^2, tie to longer windows, then to start order.

    ``tie_start_sign`` = -1 prefers earlier windows on ties, +1 later ones.
    Returns (slope, start, end_inclusive, r_squared, stderr).
    """
    k = len(x)
    w = min(min_window, k)
    best = None
    best_key = None
    for length in range(w, k + 1):
        for start in range(0, k - length + 1):
            xs = x[start : start + length]
            ys = y[start : start + length]
            xm = xs.mean()
            ym = ys.mean()
            dx = xs - xm
            sxx = float(dx @ dx)
            if sxx == 0.0:
                continue
            dy = ys - ym
            sxy = float(dx @ dy)
            syy = float(dy @ dy)
            slope = sxy / sxx
            sse = max(syy - slope * sxy, 0.0)
            r2 = 0.0 if syy == 0.0 else 1.0 - sse / syy
            key = (r2, length, tie_start_sign * start)
            if best_key is None or key > best_key:
                if length > 2:
                    stderr = np.sqrt(sse / (length - 2) / sxx)
                else:
                    stderr = 0.0
                best_key = key
                best = (slope, start, start + length - 1, r2, float(stderr))
    if best is None:
        raise NoScalingRegionError("no window with radius variation to fit")
    return best


def estimate_correlation_dimension(
    curve: CorrelationCurve, min_window: int = MIN_FIT_WINDOW
) -> DimensionEstimate:
    """Slope of ln C versus ln r over the selected linear region.

    Radii with C = 0 are dropped before fitting. Requires at least four
    radii with positive C that are not all saturated at 1.
    """
    mask = curve.values > 0
    usable = np.flatnonzero(mask)
    if len(usable) < 4:
        raise NoScalingRegionError(
            f"only {len(usable)} radii with positive correlation; need >= 4"
        )
    vals = curve.values[usable]
    if (vals == 1.0).all():
        raise NoScalingRegionError("correlation saturated at 1 for every radius")
    x = np.log(curve.radii[usable])
    y = np.log(vals)
    slope, start, end, r2, stderr = _fit_linear_region(
        x, y, min_window, tie_start_sign=-1
    )
    suspect = (
        curve.ambient_dim is not None and slope > curve.ambient_dim + 0.5
    )
    return DimensionEstimate(
        value=float(slope),
        fit_lo=int(usable[start]),
        fit_hi=int(usable[end]),
        r_squared=float(r2),
        stderr=stderr,
        method="correlation",
        n_points=curve.n_points,
        suspect=bool(suspect),
    )


def default_box_sizes(
    cloud: PointCloud,
    n_sizes: int = DEFAULT_N_RADII,
    lo_percentile: float = DEFAULT_LO_PERCENTILE,
    hi_percentile: float = DEFAULT_HI_PERCENTILE,
    max_pairs: int = 1_000_000,
    seed: int = 0,
) -> np.ndarray:
    """Decreasing box-size grid spanning the same percentile range as the radii.

    Using one scale rule for both estimators keeps them comparable on the
    same cloud.
    """
    return default_radii(
        cloud, n_sizes, lo_percentile, hi_percentile, max_pairs, seed
    )[::-1].copy()


def box_occupancy(cloud: PointCloud, size: float) -> int:
    """Number of occupied boxes of a given side, grid anchored at the minimum."""
    if size <= 0:
        raise ValueError(f"box size must be positive, got {size}")
    idx = np.floor((cloud.points - cloud.points.min(axis=0)) / size).astype(np.int64)
    return len(np.unique(idx, axis=0))


def box_counting_dimension(
    cloud: PointCloud, sizes=None, min_window: int = MIN_FIT_WINDOW
) -> DimensionEstimate:
    """Slope of ln nu versus ln(1/r) over the selected linear region."""
    if cloud.count < 2:
        raise DegenerateCloudError(f"need at least 2 points, got {cloud.count}")
    if sizes is None:
        sizes = default_box_sizes(cloud)
    sizes = np.asarray(sizes, dtype=np.float64)
    if len(sizes) < 2 or (sizes <= 0).any() or (np.diff(sizes) >= 0).any():
        raise ValueError("sizes must be positive and strictly decreasing")
    counts = np.array([box_occupancy(cloud, s) for s in sizes], dtype=np.float64)
    x = np.log(1.0 / sizes)
    y = np.log(counts)
    # smaller boxes sit at later indices here, so ties prefer later starts
    slope, start, end, r2, stderr = _fit_linear_region(
        x, y, min_window, tie_start_sign=1
    )
    suspect = slope > cloud.ambient_dim + 0.5
    return DimensionEstimate(
        value=float(slope),
        fit_lo=int(start),
        fit_hi=int(end),
        r_squared=float(r2),
        stderr=stderr,
        method="box",
        n_points=cloud.count,
        suspect=bool(suspect),
    )
