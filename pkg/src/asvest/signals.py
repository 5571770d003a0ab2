"""Deterministic excitation and measurement-noise generators.

Controls and environmental disturbances are sinusoids with amplitude,
frequency, bias and phase drawn once from a seeded generator; GPS noise is a
normalized sum of sinusoids whose components live strictly inside a
frequency band, so its amplitude bound and band content hold analytically,
not just on the sampled grid.

Every generator is a pure function of (seed, t): replaying a seed reproduces
a trajectory bit-exactly.  Specs are immutable after construction and safe
to sample concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .vessel import ControlInput, EnvDisturbance

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ChannelRanges:
    """Draw ranges for one sinusoidal channel: (lo, hi) tuples."""

    bias: tuple = (0.0, 0.0)
    amplitude: tuple = (0.0, 0.0)
    frequency: tuple = (0.01, 0.05)

    def __post_init__(self):
        for name in ("bias", "amplitude", "frequency"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"{name} range ({lo}, {hi}) has min > max")
        if self.frequency[0] <= 0.0:
            raise ValueError("frequency range must be positive")


# Default ranges chosen so the nonlinear plant shows realistic motion:
# positive surge, time-average |v| <= |u|, |r| well inside +-0.8727 rad/s.
# Disturbance channels are one order of magnitude below the controls.
DEFAULT_CONTROL_RANGES = (
    ChannelRanges(bias=(0.5, 1.5), amplitude=(0.1, 0.5), frequency=(0.01, 0.05)),   # F_u [N]
    ChannelRanges(bias=(-0.05, 0.05), amplitude=(0.02, 0.1), frequency=(0.01, 0.05)),  # tau_r [N m]
)
DEFAULT_DISTURBANCE_RANGES = (
    ChannelRanges(bias=(0.05, 0.15), amplitude=(0.01, 0.05), frequency=(0.01, 0.05)),   # F_wu [N]
    ChannelRanges(bias=(0.05, 0.15), amplitude=(0.01, 0.05), frequency=(0.01, 0.05)),   # F_wv [N]
    ChannelRanges(bias=(-0.005, 0.005), amplitude=(0.002, 0.01), frequency=(0.01, 0.05)),  # tau_wr [N m]
)


@dataclass(frozen=True)
class SinusoidChannel:
    """One realized draw: value(t) = bias + amplitude*sin(2*pi*frequency*t + phase)."""

    bias: float
    amplitude: float
    frequency: float
    phase: float

    def value(self, t):
        return self.bias + self.amplitude * np.sin(TWO_PI * self.frequency * t + self.phase)


@dataclass(frozen=True)
class SinusoidSpec:
    """A tuple of realized sinusoid channels, fixed at construction."""

    channels: tuple

    @classmethod
    def draw(cls, ranges, seed):
        """Realize one channel per ChannelRanges from the given seed."""
        rng = np.random.default_rng(seed)
        channels = []
        for rg in ranges:
            channels.append(
                SinusoidChannel(
                    bias=float(rng.uniform(*rg.bias)),
                    amplitude=float(rng.uniform(*rg.amplitude)),
                    frequency=float(rng.uniform(*rg.frequency)),
                    phase=float(rng.uniform(0.0, TWO_PI)),
                )
            )
        return cls(channels=tuple(channels))

    def values(self, t):
        """Stack channel values; t may be scalar or an array of times."""
        return np.stack([ch.value(t) for ch in self.channels], axis=-1)


def sample_control(t, spec: SinusoidSpec) -> ControlInput:
    """Surge force and yaw torque at time t (two-channel spec)."""
    vals = spec.values(t)
    return ControlInput(F_u=float(vals[0]), tau_r=float(vals[1]))


def sample_env_disturbance(t, spec: SinusoidSpec) -> EnvDisturbance:
    """Environmental force/torque at time t (three-channel spec)."""
    vals = spec.values(t)
    return EnvDisturbance(F_wu=float(vals[0]), F_wv=float(vals[1]), tau_wr=float(vals[2]))


@dataclass(frozen=True)
class NoiseSpec:
    """Band-limited bounded position noise, one draw per planar channel.

    Each channel is bound * sum_k a_k sin(2 pi f_k t + phi_k) / sum_k a_k
    with f_k uniform in ``band``, so |n(t)| <= bound for every t (not merely
    on a sampling grid) and the spectrum sits inside the band by
    construction.  Component weights are drawn from [0.5, 1.5] to keep the
    normalization well away from zero.  The heading channel is noiseless.
    """

    bound: float = 0.2
    band: tuple = (0.1, 0.5)
    components: int = 8
    seed: int = 0
    _draws: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.bound < 0.0:
            raise ValueError("noise bound must be >= 0")
        lo, hi = self.band
        if not (0.0 < lo <= hi):
            raise ValueError(f"noise band ({lo}, {hi}) must satisfy 0 < lo <= hi")
        if self.components < 1:
            raise ValueError("need at least one noise component")
        rng = np.random.default_rng(self.seed)
        draws = []
        for _channel in range(2):
            a = rng.uniform(0.5, 1.5, self.components)
            f = rng.uniform(lo, hi, self.components)
            phi = rng.uniform(0.0, TWO_PI, self.components)
            draws.append((tuple(a), tuple(f), tuple(phi)))
        object.__setattr__(self, "_draws", tuple(draws))


def sample_gps_noise(t, spec: NoiseSpec):
    """Planar position noise at time t; returns shape (2,) or (len(t), 2)."""
    t = np.asarray(t, dtype=float)
    out = []
    for a, f, phi in spec._draws:
        a = np.asarray(a)
        f = np.asarray(f)
        phi = np.asarray(phi)
        s = np.sin(TWO_PI * np.multiply.outer(t, f) + phi) @ a
        out.append(spec.bound * s / a.sum())
    return np.stack(out, axis=-1)
