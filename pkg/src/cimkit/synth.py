"""Seeded benchmark generators and SNR-controlled noise injection.

Reproducibility contract: every stochastic generator derives its streams
from ``numpy.random.SeedSequence(seed).spawn(...)`` over the PCG64 bit
generator. Child 0 drives the x series, child 1 the y series, so the same
seed always replays the same pair regardless of call order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, DegenerateChannelError, DivergenceError

HENON_DIVERGENCE_BOUND = 10.0
HENON_BURN_IN = 100
AR_BURN_IN = 50


@dataclass(frozen=True)
class SynthConfig:
    """Parameters of one synthetic run, serialized next to generated data."""

    system: str
    n: int
    seed: int
    params: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "system": self.system,
            "n": self.n,
            "seed": self.seed,
            "params": dict(self.params),
        }


def _streams(seed: int, count: int = 2):
    children = np.random.SeedSequence(seed).spawn(count)
    return [np.random.Generator(np.random.PCG64(c)) for c in children]


def gen_linear_flow(n: int, a: float = 0.5, seed: int = 0):
    """White-noise x driving y = a * x lagged one step (y[0] = 0)."""
    if n < 2:
        raise DataError(f"need n >= 2, got {n}")
    rng_x, _ = _streams(seed)
    x = rng_x.standard_normal(n)
    y = np.zeros(n)
    y[1:] = a * x[:-1]
    return x, y


def gen_ar_driven(n: int, seed: int = 0):
    """AR(1) x driving an AR(1) y.

    x[i] = 0.5 x[i-1] + u[i],  y[i] = 0.2 y[i-1] + 0.8 x[i-1] + v[i]
    with u ~ N(0,1) and v ~ N(0, 0.3^2), zero initial conditions, and a
    50-sample transient discarded.
    """
    if n < 2:
        raise DataError(f"need n >= 2, got {n}")
    rng_x, rng_y = _streams(seed)
    total = n + AR_BURN_IN
    u = rng_x.standard_normal(total)
    v = 0.3 * rng_y.standard_normal(total)
    x = np.zeros(total)
    y = np.zeros(total)
    for i in range(1, total):
        x[i] = 0.5 * x[i - 1] + u[i]
        y[i] = 0.2 * y[i - 1] + 0.8 * x[i - 1] + v[i]
    return x[AR_BURN_IN:], y[AR_BURN_IN:]


def gen_henon_coupled(
    n: int,
    coupling: float,
    seed: int = 0,
    y_lag2_variant: bool = False,
    ic_scale: float = 0.1,
):
    """Unidirectionally coupled quadratic (Henon-type) maps.

        x[i] = 1.4 - x[i-1]^2 + 0.3 x[i-2]
        y[i] = 1.4 - (C y[i-1] x[i-1] + (1-C) y[i-1]^2) + 0.3 y[i-1]

    With ``y_lag2_variant`` the last term uses y[i-2] instead, which is the
    usual driver-response form found in the synchronization literature.

    Initial conditions are drawn uniformly from [-ic_scale, ic_scale] out of
    the seeded x/y streams. Fixed equal initial conditions are deliberately
    avoided: y == x is an invariant manifold of the coupled system, so
    symmetric starts collapse the pair onto it and the escape is then driven
    by rounding noise alone. A 100-sample transient is discarded.

    Raises
    ------
    DivergenceError
        If any state exceeds 10 in magnitude (outside the attractor basin).
    """
    if n < 2:
        raise DataError(f"need n >= 2, got {n}")
    if not 0.0 <= coupling <= 1.0:
        raise ValueError(f"coupling must be in [0, 1], got {coupling}")
    rng_x, rng_y = _streams(seed)
    total = n + HENON_BURN_IN
    x = np.zeros(total)
    y = np.zeros(total)
    x[0], x[1] = rng_x.uniform(-ic_scale, ic_scale, 2)
    y[0], y[1] = rng_y.uniform(-ic_scale, ic_scale, 2)
    c = coupling
    for i in range(2, total):
        x[i] = 1.4 - x[i - 1] ** 2 + 0.3 * x[i - 2]
        y_back = y[i - 2] if y_lag2_variant else y[i - 1]
        y[i] = 1.4 - (c * y[i - 1] * x[i - 1] + (1 - c) * y[i - 1] ** 2) + 0.3 * y_back
        if abs(x[i]) > HENON_DIVERGENCE_BOUND or abs(y[i]) > HENON_DIVERGENCE_BOUND:
            raise DivergenceError(
                f"trajectory diverged at step {i} (coupling={coupling}, seed={seed})",
                index=i,
            )
    return x[HENON_BURN_IN:], y[HENON_BURN_IN:]


def gen_sine_recursive(n: int) -> np.ndarray:
    """Deterministic forced recursion z[i] = sin(i) + 1.5 sin(z[i-1]) + 0.6, z[0] = 0."""
    if n < 1:
        raise DataError(f"need n >= 1, got {n}")
    z = np.zeros(n)
    for i in range(1, n):
        z[i] = np.sin(i) + 1.5 * np.sin(z[i - 1]) + 0.6
    return z


def add_noise_snr(x, snr_db: float, seed: int = 0) -> np.ndarray:
    """Add white Gaussian noise at the requested signal-to-noise ratio (dB).

    Noise variance is mean(x^2) / 10^(snr_db / 10).
    """
    x = np.asarray(x, dtype=np.float64)
    power = float(np.mean(x**2))
    if power == 0.0:
        raise DegenerateChannelError("zero-power input; SNR undefined")
    noise_var = power / 10.0 ** (snr_db / 10.0)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    return x + np.sqrt(noise_var) * rng.standard_normal(len(x))
