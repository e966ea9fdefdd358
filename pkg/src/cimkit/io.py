"""Recording ingestion, windowing, normalization, and CSV/JSON serialization.

A recording is stored on disk as a CSV file with a header row of channel
ids and one column per channel, one row per sample. Metadata that the CSV
cannot carry (sample rate, optional sensor positions) lives in a JSON
sidecar next to the file (same path with a ``.json`` suffix).
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    BoundsError,
    DataError,
    DegenerateChannelError,
    ParseError,
)


@dataclass(frozen=True)
class Recording:
    """Multichannel, uniformly sampled time series.

    ``samples`` has one row per channel. Arrays are marked read-only so a
    recording can be shared freely between workers.
    """

    channels: tuple[str, ...]
    samples: np.ndarray
    sample_rate: float = 1.0
    positions: np.ndarray | None = None

    def __post_init__(self):
        samples = np.ascontiguousarray(self.samples, dtype=np.float64)
        if samples.ndim != 2 or samples.shape[0] != len(self.channels):
            raise DataError(
                f"samples must be (n_channels, n_samples); got {samples.shape} "
                f"for {len(self.channels)} channels"
            )
        if samples.shape[1] < 2:
            raise DataError("recordings need at least 2 samples per channel")
        if not np.isfinite(samples).all():
            bad = np.argwhere(~np.isfinite(samples))[0]
            raise DataError(
                f"non-finite value in channel {self.channels[bad[0]]!r} "
                f"at sample {bad[1]}"
            )
        if self.sample_rate <= 0:
            raise DataError(f"sample_rate must be > 0, got {self.sample_rate}")
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "channels", tuple(str(c) for c in self.channels))
        if self.positions is not None:
            pos = np.ascontiguousarray(self.positions, dtype=np.float64)
            if pos.shape != (len(self.channels), 3):
                raise DataError(f"positions must be (n_channels, 3); got {pos.shape}")
            pos.flags.writeable = False
            object.__setattr__(self, "positions", pos)

    @property
    def n_channels(self) -> int:
        return len(self.channels)

    @property
    def n_samples(self) -> int:
        return self.samples.shape[1]

    @property
    def duration(self) -> float:
        """Length in seconds."""
        return self.n_samples / self.sample_rate

    def channel(self, channel_id: str) -> np.ndarray:
        try:
            idx = self.channels.index(str(channel_id))
        except ValueError:
            raise KeyError(f"unknown channel {channel_id!r}") from None
        return self.samples[idx]


@dataclass(frozen=True)
class WindowSpec:
    """Sample-indexed half-open window [start, start + length)."""

    start: int
    length: int

    def __post_init__(self):
        if self.start < 0:
            raise BoundsError(f"window start must be >= 0, got {self.start}")
        if self.length < 2:
            raise BoundsError(f"window length must be >= 2, got {self.length}")


def to_sample_index(seconds: float, sample_rate: float) -> int:
    """Convert a time offset to a sample index (floors)."""
    return int(math.floor(seconds * sample_rate))


def _sidecar_path(path) -> Path:
    return Path(path).with_suffix(".json")


def load_recording(path, format: str = "csv", sample_rate: float | None = None) -> Recording:
    """Load a recording from a header-row CSV (one column per channel).

    Parameters
    ----------
    path : str or Path
        CSV file to read.
    format : str
        Only ``"csv"`` is supported.
    sample_rate : float, optional
        Overrides the sidecar value. When neither is given, 1.0 is used.

    Raises
    ------
    ParseError
        Row with the wrong number of fields, or an unparseable number.
    DataError
        NaN / infinite cell, or fewer than 2 samples.
    """
    if format != "csv":
        raise ValueError(f"unsupported format {format!r}")
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        channels = [c.strip() for c in header]
        n_ch = len(channels)
        columns: list[list[float]] = [[] for _ in range(n_ch)]
        for row_num, row in enumerate(reader, start=1):
            if len(row) != n_ch:
                raise ParseError(
                    f"{path}: row {row_num}: expected {n_ch} fields, got {len(row)}"
                )
            for col, tok in enumerate(row):
                try:
                    val = float(tok)
                except ValueError:
                    raise ParseError(
                        f"{path}: row {row_num}, channel {channels[col]!r}: "
                        f"cannot parse {tok!r}"
                    ) from None
                if not math.isfinite(val):
                    raise DataError(
                        f"{path}: row {row_num}, channel {channels[col]!r}: "
                        f"non-finite value {tok!r}"
                    )
                columns[col].append(val)

    positions = None
    meta_rate = None
    sidecar = _sidecar_path(path)
    if sidecar.exists():
        with open(sidecar, encoding="utf-8") as fh:
            meta = json.load(fh)
        meta_rate = meta.get("sample_rate")
        if meta.get("positions") is not None:
            positions = np.asarray(meta["positions"], dtype=np.float64)

    rate = sample_rate if sample_rate is not None else (meta_rate if meta_rate else 1.0)
    return Recording(
        channels=tuple(channels),
        samples=np.asarray(columns, dtype=np.float64),
        sample_rate=float(rate),
        positions=positions,
    )


def save_recording(rec: Recording, path) -> None:
    """Write the CSV plus a JSON sidecar; round-trips exactly through load."""
    path = Path(path)
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(rec.channels)
        for t in range(rec.n_samples):
            writer.writerow(["%.17g" % rec.samples[c, t] for c in range(rec.n_channels)])
    meta = {"sample_rate": rec.sample_rate}
    if rec.positions is not None:
        meta["positions"] = rec.positions.tolist()
    with open(_sidecar_path(path), "w", newline="\n", encoding="utf-8") as fh:
        json.dump(meta, fh, sort_keys=True)
        fh.write("\n")


def slice_window(rec: Recording, window: WindowSpec) -> Recording:
    """Restrict a recording to [start, start + length); the result owns its data."""
    end = window.start + window.length
    if end > rec.n_samples:
        raise BoundsError(
            f"window [{window.start}, {end}) exceeds recording length {rec.n_samples}"
        )
    return Recording(
        channels=rec.channels,
        samples=rec.samples[:, window.start : end].copy(),
        sample_rate=rec.sample_rate,
        positions=None if rec.positions is None else rec.positions.copy(),
    )


def zscore(rec: Recording) -> Recording:
    """Standardize every channel to mean 0, sample std 1 (ddof=1)."""
    out = np.empty_like(rec.samples)
    for c in range(rec.n_channels):
        x = rec.samples[c]
        sd = x.std(ddof=1)
        if sd == 0:
            raise DegenerateChannelError(
                f"channel {rec.channels[c]!r} is constant; cannot z-score"
            )
        out[c] = (x - x.mean()) / sd
    return Recording(
        channels=rec.channels,
        samples=out,
        sample_rate=rec.sample_rate,
        positions=None if rec.positions is None else rec.positions.copy(),
    )
