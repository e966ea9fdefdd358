"""Directed interaction graphs over all channel pairs of a recording.

For each ordered channel pair (k, j) the lag with the smallest pair-cloud
dimension d_kj is selected from a shared lag set; the graph weight is
a_kj = 1 / d_kj for flow from channel j into channel k, with zero
diagonal. The weight matrix is generally asymmetric.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cim import LagSet, best_lag
from .errors import DegenerateChannelError, ShapeError
from .io import Recording


@dataclass(frozen=True)
class ConnectivityMap:
    """Weight matrix A (a_kj = 1/d_kj), integer lag matrix L, channel ids."""

    channel_ids: tuple[str, ...]
    weights: np.ndarray
    lags: np.ndarray
    lag_set: LagSet
    window: dict | None = None

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        l = np.asarray(self.lags, dtype=np.int64)
        n = len(self.channel_ids)
        if w.shape != (n, n) or l.shape != (n, n):
            raise ShapeError(
                f"weight/lag matrices must be ({n}, {n}); got {w.shape}, {l.shape}"
            )
        if np.diagonal(w).any() or np.diagonal(l).any():
            raise ShapeError("diagonals must be zero")
        w.flags.writeable = False
        l.flags.writeable = False
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "lags", l)
        object.__setattr__(self, "channel_ids", tuple(self.channel_ids))

    @property
    def n_channels(self) -> int:
        return len(self.channel_ids)

    def dimensions(self) -> np.ndarray:
        """Pair dimensions d_kj = 1 / a_kj (inf on the diagonal)."""
        with np.errstate(divide="ignore"):
            return np.where(self.weights > 0, 1.0 / self.weights, np.inf)


@dataclass(frozen=True)
class SensorProfile:
    """Per-channel strongest interaction: d_k = min over j of d_kj."""

    channel_ids: tuple[str, ...]
    dimensions: np.ndarray
    partners: np.ndarray


def build_map(
    rec: Recording,
    lags: LagSet,
    window: dict | None = None,
    seed: int = 0,
) -> ConnectivityMap:
    """Run the smallest-dimension lag search for every ordered channel pair."""
    n = rec.n_channels
    if n < 2:
        raise ShapeError(f"need at least 2 channels, got {n}")
    for c in range(n):
        if rec.samples[c].std() == 0:
            raise DegenerateChannelError(
                f"channel {rec.channels[c]!r} is constant; connectivity undefined"
            )
    weights = np.zeros((n, n))
    lag_out = np.zeros((n, n), dtype=np.int64)
    for k in range(n):
        for j in range(n):
            if k == j:
                continue
            res = best_lag(
                rec.samples[k],
                rec.samples[j],
                lags,
                target_id=rec.channels[k],
                source_id=rec.channels[j],
                seed=seed,
            )
            weights[k, j] = res.cim
            lag_out[k, j] = res.lag
    return ConnectivityMap(
        channel_ids=rec.channels,
        weights=weights,
        lags=lag_out,
        lag_set=lags,
        window=window,
    )


def sensor_profile(cmap: ConnectivityMap) -> SensorProfile:
    """Strongest partner per channel; ties go to the lowest channel index."""
    n = cmap.n_channels
    dims = np.empty(n)
    partners = np.empty(n, dtype=np.int64)
    for k in range(n):
        row = cmap.weights[k].copy()
        row[k] = -np.inf
        j = int(np.argmax(row))  # argmax returns the first (lowest) index on ties
        partners[k] = j
        dims[k] = 1.0 / row[j]
    return SensorProfile(
        channel_ids=cmap.channel_ids, dimensions=dims, partners=partners
    )


def symmetrize(cmap: ConnectivityMap, policy: str = "max") -> np.ndarray:
    """Undirected weight matrix combining the two directions of each pair."""
    a = cmap.weights
    if policy == "max":
        w = np.maximum(a, a.T)
    elif policy == "mean":
        w = (a + a.T) / 2.0
    else:
        raise ValueError(f"unknown symmetrize policy {policy!r}")
    np.fill_diagonal(w, 0.0)
    return w


def extract_features(cmap: ConnectivityMap) -> np.ndarray:
    """One weight per unordered pair: the k -> j flow a_jk for k < j.

    Pairs are enumerated in lexicographic order, so the vector has length
    n(n-1)/2 and a fixed, reproducible layout.
    """
    n = cmap.n_channels
    out = np.empty(n * (n - 1) // 2)
    pos = 0
    for k in range(n):
        for j in range(k + 1, n):
            out[pos] = cmap.weights[j, k]
            pos += 1
    return out


def feature_labels(channel_ids) -> list[str]:
    """Feature names aligned with extract_features: 'src->dst' per pair."""
    ids = list(channel_ids)
    return [
        f"{ids[k]}->{ids[j]}"
        for k in range(len(ids))
        for j in range(k + 1, len(ids))
    ]
