"""Directed interaction strength from the dimension of lagged pair embeddings.

The pair cloud (x[n], y[n - lag]) collapses toward a curve when the lagged
series carries information about the reference series, and fills the plane
when it does not. The interaction measure is the reciprocal of the cloud's
correlation dimension: 1 for a perfect one-dimensional relation, 0.5 for
an independent pair in two dimensions.

Direction convention, used everywhere: ``cim_pair(x, y, lag)`` quantifies
flow FROM y TO x with the given delay -- y's past shares structure with
x's present.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .embedding import PointCloud, embed_pair
from .errors import (
    CimkitError,
    InsufficientLengthError,
    NoValidLagError,
    ShapeError,
)
from .fractal import (
    DimensionEstimate,
    correlation_integral,
    estimate_correlation_dimension,
)

LAG_TIE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class LagSet:
    """Strictly increasing non-negative candidate lags (samples)."""

    lags: tuple[int, ...]

    def __post_init__(self):
        lags = tuple(int(l) for l in self.lags)
        if not lags:
            raise ValueError("lag set must be non-empty")
        if lags[0] < 0:
            raise ValueError("lags must be non-negative")
        if any(b <= a for a, b in zip(lags, lags[1:])):
            raise ValueError("lags must be strictly increasing")
        object.__setattr__(self, "lags", lags)

    def __iter__(self):
        return iter(self.lags)

    def __len__(self):
        return len(self.lags)

    @classmethod
    def upto(cls, max_lag: int, include_zero: bool = False) -> "LagSet":
        start = 0 if include_zero else 1
        return cls(tuple(range(start, max_lag + 1)))


@dataclass(frozen=True)
class CimResult:
    """Interaction estimate for one (source, target, lag) triple.

    ``cim`` is exactly ``1 / dimension``; the estimate carries the fit
    diagnostics of the underlying dimension.
    """

    source: str
    target: str
    lag: int
    dimension: float
    cim: float
    estimate: DimensionEstimate


def cim_pair(
    x,
    y,
    lag: int,
    target_id: str = "x",
    source_id: str = "y",
    radii=None,
    seed: int = 0,
) -> CimResult:
    """Interaction strength for flow from y into x at one delay.

    Builds the cloud (x[n], y[n - lag]), estimates its correlation
    dimension d, and returns cim = 1/d.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ShapeError(f"series lengths differ: {x.shape} vs {y.shape}")
    if not 0 <= lag < len(x) - 4:
        raise InsufficientLengthError(
            f"lag {lag} leaves fewer than 5 points for series of length {len(x)}"
        )
    cloud = embed_pair(x, y, lag)
    curve = correlation_integral(cloud, radii=radii, seed=seed)
    est = estimate_correlation_dimension(curve)
    return CimResult(
        source=source_id,
        target=target_id,
        lag=lag,
        dimension=est.value,
        cim=1.0 / est.value,
        estimate=est,
    )


def best_lag(
    x,
    y,
    lags: LagSet | Sequence[int],
    target_id: str = "x",
    source_id: str = "y",
    seed: int = 0,
) -> CimResult:
    """Result with the smallest dimension over a lag set.

    Lags are scanned in increasing order; a later lag replaces the current
    best only when its dimension is smaller by more than 1e-9, so exact
    ties resolve to the smallest lag. Lags whose estimate fails (degenerate
    cloud, no scaling region) are skipped; if every lag fails a
    NoValidLagError is raised.
    """
    if not isinstance(lags, LagSet):
        lags = LagSet(tuple(lags))
    best: CimResult | None = None
    failures: list[str] = []
    for lag in lags:
        try:
            res = cim_pair(x, y, lag, target_id=target_id, source_id=source_id, seed=seed)
        except CimkitError as exc:
            failures.append(f"lag {lag}: {exc}")
            continue
        if best is None or res.dimension < best.dimension - LAG_TIE_TOLERANCE:
            best = res
    if best is None:
        raise NoValidLagError(
            "no lag produced a dimension estimate: " + "; ".join(failures)
        )
    return best


@dataclass(frozen=True)
class SelectionStep:
    """One candidate evaluation in the progressive builder."""

    series_id: str
    lag: int
    ambient_dim: int
    dimension: float
    accepted: bool


@dataclass(frozen=True)
class EmbeddingVectorSelection:
    """Accepted (series, lag) components plus the full evaluation trace."""

    selected: tuple[tuple[str, int], ...]
    pool: tuple[tuple[str, int], ...]
    target_id: str
    horizons: tuple[int, ...]
    steps: tuple[SelectionStep, ...]


def progressive_embed(
    series: Mapping[str, Sequence[float]],
    max_lags: Mapping[str, int],
    target_id: str,
    horizons: int | Sequence[int] = 1,
    dim_threshold_ratio: float = 0.9,
    seed: int = 0,
) -> EmbeddingVectorSelection:
    """Greedy construction of a predictive embedding vector.

    The candidate pool holds (series, lag) components for every series in
    ``max_lags`` order and lags 1..L_i; lag ell pairs ``s[t - ell]`` with
    the first predicted sample at time t. Candidates are scanned once in
    pool order. At each step the joint cloud of the accepted components,
    the candidate, and the future coordinates of the target (horizons
    0..T-1 ahead of t) is embedded; the candidate is kept when the cloud's
    correlation dimension falls below ``dim_threshold_ratio`` times the
    ambient dimension. With a single-candidate pool and a one-step horizon
    this reduces exactly to ``cim_pair(target, candidate, lag)``.

    Candidates whose estimate fails are recorded with a NaN dimension and
    rejected.
    """
    if not 0.0 < dim_threshold_ratio < 1.0:
        raise ValueError(
            f"dim_threshold_ratio must be in (0, 1), got {dim_threshold_ratio}"
        )
    arrays = {k: np.asarray(v, dtype=np.float64) for k, v in series.items()}
    if target_id not in arrays:
        raise KeyError(f"unknown target series {target_id!r}")
    n = len(arrays[target_id])
    if any(len(a) != n for a in arrays.values()):
        raise ShapeError("all series must have equal length")
    if isinstance(horizons, int):
        horizons = tuple(range(1, horizons + 1))
    else:
        horizons = tuple(int(h) for h in horizons)
    if not horizons or any(h < 1 for h in horizons):
        raise ValueError("horizons must be positive")
    extra_future = max(horizons) - 1
    pool = [
        (sid, lag)
        for sid in max_lags
        for lag in range(1, int(max_lags[sid]) + 1)
    ]
    if not pool:
        raise ValueError("candidate pool is empty")

    selected: list[tuple[str, int]] = []
    steps: list[SelectionStep] = []
    for sid, lag in pool:
        trial = selected + [(sid, lag)]
        max_lag = max(l for _, l in trial)
        count = n - max_lag - extra_future
        if count < 5:
            raise InsufficientLengthError(
                f"series of length {n} too short for lag {max_lag} "
                f"plus horizon {max(horizons)}"
            )
        cols = [
            arrays[target_id][max_lag + h - 1 : max_lag + h - 1 + count]
            for h in horizons
        ]
        cols += [arrays[s][max_lag - l : max_lag - l + count] for s, l in trial]
        cloud = PointCloud(np.column_stack(cols))
        ambient = cloud.ambient_dim
        try:
            curve = correlation_integral(cloud, seed=seed)
            dim = estimate_correlation_dimension(curve).value
        except CimkitError:
            dim = float("nan")
        accepted = bool(dim < dim_threshold_ratio * ambient) if np.isfinite(dim) else False
        steps.append(SelectionStep(sid, lag, ambient, dim, accepted))
        if accepted:
            selected.append((sid, lag))
    return EmbeddingVectorSelection(
        selected=tuple(selected),
        pool=tuple(pool),
        target_id=target_id,
        horizons=horizons,
        steps=tuple(steps),
    )
