"""Delay-coordinate embeddings: univariate, multivariate, and per-coordinate lags.

A lag list ``(l_1, ..., l_m)`` for a series x contributes the coordinates
``x[n - l_1], ..., x[n - l_m]`` to the point at index n. Points are emitted
only for indices where every coordinate is in range (no padding), so a
spec with maximum lag L over series of length N yields N - L points.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DataError, InsufficientLengthError, ShapeError


@dataclass(frozen=True)
class EmbeddingSpec:
    """Per-series lag lists; ambient dimension is the total lag count."""

    lags: tuple[tuple[int, ...], ...]
    ids: tuple[str, ...] | None = None

    def __post_init__(self):
        lag_lists = tuple(tuple(int(l) for l in ls) for ls in self.lags)
        if not lag_lists:
            raise ValueError("EmbeddingSpec needs at least one series")
        for i, ls in enumerate(lag_lists):
            if not ls:
                raise ValueError(f"series {i}: lag list is empty")
            if any(l < 0 for l in ls):
                raise ValueError(f"series {i}: lags must be non-negative")
            if any(b <= a for a, b in zip(ls, ls[1:])):
                raise ValueError(f"series {i}: lags must be strictly increasing")
        object.__setattr__(self, "lags", lag_lists)
        if self.ids is not None:
            ids = tuple(str(s) for s in self.ids)
            if len(ids) != len(lag_lists):
                raise ValueError("ids and lag lists must align")
            object.__setattr__(self, "ids", ids)

    @property
    def ambient_dim(self) -> int:
        return sum(len(ls) for ls in self.lags)

    @property
    def max_lag(self) -> int:
        return max(max(ls) for ls in self.lags)

    @classmethod
    def uniform(cls, n_series: int, m: int, tau: int, ids=None) -> "EmbeddingSpec":
        """Uniform-delay spec: every series contributes lags (0, tau, ..., (m-1)tau)."""
        ls = tuple(tuple(j * tau for j in range(m)) for _ in range(n_series))
        return cls(ls, ids=None if ids is None else tuple(ids))

    @classmethod
    def from_json_dict(cls, obj: dict) -> "EmbeddingSpec":
        """Parse the {"series": [{"id":..., "lags":[...]}, ...]} schema."""
        entries = obj["series"]
        return cls(
            tuple(tuple(e["lags"]) for e in entries),
            ids=tuple(e["id"] for e in entries),
        )

    def to_json_dict(self) -> dict:
        ids = self.ids or tuple(str(i) for i in range(len(self.lags)))
        return {
            "series": [
                {"id": sid, "lags": list(ls)} for sid, ls in zip(ids, self.lags)
            ]
        }


@dataclass(frozen=True)
class PointCloud:
    """Finite set of points in R^M, row per point."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=np.float64)
        if pts.ndim != 2:
            raise ShapeError(f"points must be 2-D, got shape {pts.shape}")
        if pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ShapeError(f"need at least one point and one coordinate, got {pts.shape}")
        if not np.isfinite(pts).all():
            raise DataError("point cloud contains non-finite coordinates")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @property
    def count(self) -> int:
        return self.points.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.points.shape[1]


def _as_series(x) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise ShapeError(f"series must be 1-D, got shape {arr.shape}")
    return arr


def embed_univariate(x, m: int, tau: int) -> PointCloud:
    """Embed one series with m coordinates at uniform delay tau.

    Point n is ``(x[n], x[n - tau], ..., x[n - (m-1) tau])`` for
    n = (m-1) tau ... N-1, giving N - (m-1) tau points.
    """
    x = _as_series(x)
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if tau < 1:
        raise ValueError(f"tau must be >= 1, got {tau}")
    span = (m - 1) * tau
    if span >= len(x):
        raise InsufficientLengthError(
            f"need length > {(m - 1) * tau} for m={m}, tau={tau}; got {len(x)}"
        )
    count = len(x) - span
    cols = [x[span - q * tau : span - q * tau + count] for q in range(m)]
    return PointCloud(np.column_stack(cols))


def embed_multivariate(series: Sequence, spec: EmbeddingSpec) -> PointCloud:
    """Embed several equal-length series under per-series lag lists.

    Coordinates appear in series order, then lag order within a series.
    """
    arrays = [_as_series(s) for s in series]
    if len(arrays) != len(spec.lags):
        raise ShapeError(
            f"spec covers {len(spec.lags)} series but {len(arrays)} were given"
        )
    n = len(arrays[0])
    if any(len(a) != n for a in arrays):
        raise ShapeError("all series must have equal length")
    max_lag = spec.max_lag
    if max_lag >= n:
        raise InsufficientLengthError(f"max lag {max_lag} >= series length {n}")
    count = n - max_lag
    cols = []
    for arr, ls in zip(arrays, spec.lags):
        for l in ls:
            cols.append(arr[max_lag - l : max_lag - l + count])
    return PointCloud(np.column_stack(cols))


def embed_pair(x, y, lag: int) -> PointCloud:
    """2-D cloud of (x[n], y[n - lag]); N - lag points."""
    if lag < 0:
        raise ValueError(f"lag must be >= 0, got {lag}")
    return embed_multivariate([x, y], EmbeddingSpec(((0,), (lag,))))
