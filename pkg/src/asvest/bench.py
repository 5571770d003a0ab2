"""Scenario execution and error statistics.

Reproduces the benchmark protocol: synthesize gains offline (cached per
tuning configuration), excite the vessel with seeded sinusoidal controls
and disturbances, corrupt the position measurement with band-limited
bounded noise, run the cascade observers along the trajectory, and reduce
the post-warmup errors to per-channel standard deviations.

Runs are deterministic given (config, seed); Monte Carlo aggregation over
seeds 1..n is order-independent.  Individual runs are independent and could
execute in parallel; this module runs them sequentially for determinism.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import engine
from .lmi import ObserverGains, SynthesisConfig, synthesize, transformation
from .signals import (
    DEFAULT_CONTROL_RANGES,
    DEFAULT_DISTURBANCE_RANGES,
    NoiseSpec,
    SinusoidSpec,
    sample_gps_noise,
)
from .vessel import VesselParams, inertia_matrix, numerics

CSV_HEADER = (
    "t,x,y,psi,u,v,r,sigma_u,sigma_v,sigma_r,"
    "y_x,y_y,y_psi,x_hat,y_hat,psi_hat,u_hat,v_hat,r_hat,"
    "sigma_u_hat,sigma_v_hat,sigma_r_hat"
)


class EmptyWindowError(ValueError):
    """No samples at or after the requested warmup time."""


@dataclass(frozen=True)
class SurrogateSigma:
    """Prescribed per-channel disturbance bias + amplitude*sin(2 pi f t)."""

    bias: tuple = (0.0, 0.0, 0.0)
    amplitude: tuple = (0.0, 0.0, 0.0)
    frequency: tuple = (0.0, 0.0, 0.0)

    def values(self, t):
        t = np.asarray(t, dtype=float)
        cols = []
        for b, a, f in zip(self.bias, self.amplitude, self.frequency):
            cols.append(b + a * np.sin(2.0 * math.pi * f * t))
        return np.stack(cols, axis=-1)

    def omega_bound(self):
        """Exact bound on ||d sigma/dt||_2."""
        rates = [a * 2.0 * math.pi * f for a, f in zip(self.amplitude, self.frequency)]
        return math.sqrt(sum(w * w for w in rates))


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything one benchmark run depends on."""

    duration: float = 300.0
    dt: float = 0.01
    warmup: float = 50.0
    plant: str = "full"  # "full" | "surrogate"
    seed: int = 1
    engine: str = "auto"
    vessel: VesselParams = field(default_factory=VesselParams)
    synthesis: SynthesisConfig = field(default_factory=SynthesisConfig)
    control_ranges: tuple = DEFAULT_CONTROL_RANGES
    disturbance_ranges: tuple = DEFAULT_DISTURBANCE_RANGES
    noise_bound: float = 0.2
    noise_band: tuple = (0.1, 0.5)
    noise_components: int = 8
    initial_eta: tuple = (0.0, 10.0, 0.0)
    initial_nu: tuple = (0.0, 0.0, 0.0)
    surrogate_sigma: SurrogateSigma = field(default_factory=SurrogateSigma)

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if not self.warmup < self.duration:
            raise ValueError("warmup must be shorter than the run")
        if self.plant not in ("full", "surrogate"):
            raise ValueError(f"unknown plant kind {self.plant!r}")
        nyquist = 0.5 / self.dt
        if self.noise_bound > 0.0 and not self.noise_band[1] < nyquist:
            raise ValueError("noise band exceeds the Nyquist rate of dt")

    def n_steps(self):
        return int(round(self.duration / self.dt))

    def with_seed(self, seed):
        return replace(self, seed=int(seed))


@dataclass(frozen=True)
class RunRecord:
    """Time-stamped truth, measurement and estimate trajectories."""

    t: np.ndarray
    eta: np.ndarray
    nu: np.ndarray
    sigma: np.ndarray
    meas: np.ndarray
    est_rot: np.ndarray
    est_pos: np.ndarray
    omega_star_emp: float
    noise_max_abs: float

    @property
    def e_velocity(self):
        """Columns e_u, e_v, e_r."""
        return np.column_stack(
            [
                self.nu[:, 0] - self.est_pos[:, 2],
                self.nu[:, 1] - self.est_pos[:, 3],
                self.nu[:, 2] - self.est_rot[:, 1],
            ]
        )

    @property
    def e_sigma(self):
        """Columns e_sigma_u, e_sigma_v, e_sigma_r."""
        return np.column_stack(
            [
                self.sigma[:, 0] - self.est_pos[:, 4],
                self.sigma[:, 1] - self.est_pos[:, 5],
                self.sigma[:, 2] - self.est_rot[:, 2],
            ]
        )

    @property
    def e_psi_norm(self):
        e = np.column_stack(
            [
                self.eta[:, 2] - self.est_rot[:, 0],
                self.nu[:, 2] - self.est_rot[:, 1],
                self.sigma[:, 2] - self.est_rot[:, 2],
            ]
        )
        return np.sqrt((e * e).sum(axis=1))

    def e_p_matrix(self):
        return np.column_stack(
            [
                self.eta[:, 0] - self.est_pos[:, 0],
                self.eta[:, 1] - self.est_pos[:, 1],
                self.nu[:, 0] - self.est_pos[:, 2],
                self.nu[:, 1] - self.est_pos[:, 3],
                self.sigma[:, 0] - self.est_pos[:, 4],
                self.sigma[:, 1] - self.est_pos[:, 5],
            ]
        )

    @property
    def e_p_norm(self):
        e = self.e_p_matrix()
        return np.sqrt((e * e).sum(axis=1))

    @property
    def z_p_norm(self):
        """Norm of T_p(psi) e_p; equals ||e_p|| because T_p is orthogonal."""
        return self.e_p_norm


@dataclass(frozen=True)
class ErrorStats:
    """Per-channel population standard deviations of the estimation errors."""

    e_u: float
    e_v: float
    e_r: float
    e_sigma_u: float
    e_sigma_v: float
    e_sigma_r: float

    def as_tuple(self):
        return (self.e_u, self.e_v, self.e_r, self.e_sigma_u, self.e_sigma_v, self.e_sigma_r)

    CHANNELS = ("e_u", "e_v", "e_r", "e_sigma_u", "e_sigma_v", "e_sigma_r")


@dataclass(frozen=True)
class MonteCarloStats:
    """Mean and spread (population std over seeds) per channel."""

    n_seeds: int
    mean: ErrorStats
    spread: ErrorStats
    per_seed: tuple


_synth_cache = {}


def synthesized_gains(config: SynthesisConfig) -> ObserverGains:
    """Solve (or reuse) the offline gain synthesis for this tuning."""
    key = config.cache_key()
    if key not in _synth_cache:
        _synth_cache[key] = synthesize(config).gains
    return _synth_cache[key]


def _scenario_signals(config: ScenarioConfig):
    """Seed-derived signal specs: controls, disturbances, measurement noise."""
    base = np.random.SeedSequence(config.seed)
    ss_control, ss_dist, ss_noise = base.spawn(3)
    control = SinusoidSpec.draw(config.control_ranges, ss_control)
    disturbance = SinusoidSpec.draw(config.disturbance_ranges, ss_dist)
    noise = NoiseSpec(
        bound=config.noise_bound,
        band=config.noise_band,
        components=config.noise_components,
        seed=int(ss_noise.generate_state(1)[0]),
    )
    return control, disturbance, noise


def run_scenario(config: ScenarioConfig, gains: ObserverGains = None) -> RunRecord:
    """One deterministic benchmark run; synthesizes gains unless provided."""
    if gains is None:
        gains = synthesized_gains(config.synthesis)
    params = config.vessel
    M = inertia_matrix(params)
    M_inv = numerics.solve_linear(M, np.eye(3))

    n = config.n_steps()
    t = np.arange(n + 1) * config.dt
    control, disturbance, noise = _scenario_signals(config)
    tau = control.values(t)
    tauw = disturbance.values(t)
    n_p = (
        sample_gps_noise(t, noise)
        if config.noise_bound > 0.0
        else np.zeros((n + 1, 2))
    )
    sigma_pre = (
        config.surrogate_sigma.values(t)
        if config.plant == "surrogate"
        else np.zeros((n + 1, 3))
    )

    par = (
        params.m - params.X_udot,
        params.m - params.Y_vdot,
        params.m * params.x_g - params.Y_rdot,
        params.X_u, params.X_uu,
        params.Y_v, params.Y_vv, params.Y_vr, params.Y_r, params.Y_rv, params.Y_rr,
        params.N_v, params.N_vv, params.N_vr, params.N_r, params.N_rv, params.N_rr,
    )
    mode = engine.MODE_FULL if config.plant == "full" else engine.MODE_SURROGATE
    out = engine.simulate(
        config.engine,
        mode,
        config.dt,
        n,
        np.asarray(par, dtype=float),
        np.ascontiguousarray(M_inv),
        np.ascontiguousarray(gains.rotational.L_psi, dtype=float),
        np.ascontiguousarray(gains.positional.L_pz, dtype=float),
        np.ascontiguousarray(tau),
        np.ascontiguousarray(tauw),
        np.ascontiguousarray(sigma_pre),
        np.ascontiguousarray(n_p),
        np.asarray(config.initial_eta, dtype=float),
        np.asarray(config.initial_nu, dtype=float),
        np.zeros(3),
        np.zeros(6),
    )

    sigma = out["sigma"]
    d_sigma = np.diff(sigma, axis=0) / config.dt
    omega_emp = float(np.sqrt((d_sigma * d_sigma).sum(axis=1)).max()) if n else 0.0
    return RunRecord(
        t=t,
        eta=out["eta"],
        nu=out["nu"],
        sigma=sigma,
        meas=out["meas"],
        est_rot=out["est_rot"],
        est_pos=out["est_pos"],
        omega_star_emp=omega_emp,
        noise_max_abs=float(np.abs(n_p).max()) if n_p.size else 0.0,
    )


def error_std(record: RunRecord, warmup: float) -> ErrorStats:
    """Population standard deviation per error channel over t >= warmup."""
    mask = record.t >= warmup
    if not mask.any():
        raise EmptyWindowError(f"no samples at or after t = {warmup}")
    ev = record.e_velocity[mask]
    es = record.e_sigma[mask]
    return ErrorStats(
        e_u=float(np.std(ev[:, 0])),
        e_v=float(np.std(ev[:, 1])),
        e_r=float(np.std(ev[:, 2])),
        e_sigma_u=float(np.std(es[:, 0])),
        e_sigma_v=float(np.std(es[:, 1])),
        e_sigma_r=float(np.std(es[:, 2])),
    )


def monte_carlo(config: ScenarioConfig, n_seeds: int) -> MonteCarloStats:
    """Run seeds 1..n and aggregate; the result ignores execution order."""
    if n_seeds < 1:
        raise ValueError("need at least one seed")
    gains = synthesized_gains(config.synthesis)
    stats = []
    for seed in range(1, n_seeds + 1):
        record = run_scenario(config.with_seed(seed), gains=gains)
        stats.append(error_std(record, config.warmup))
    data = np.array([s.as_tuple() for s in stats])
    mean = ErrorStats(*[float(v) for v in data.mean(axis=0)])
    spread = ErrorStats(*[float(v) for v in data.std(axis=0)])
    return MonteCarloStats(n_seeds=n_seeds, mean=mean, spread=spread, per_seed=tuple(stats))


def _wrap_angle(values):
    """Wrap to (-pi, pi]; applied to heading columns at the CSV layer only."""
    return math.pi - np.mod(math.pi - np.asarray(values, dtype=float), 2.0 * math.pi)


def record_matrix(record: RunRecord):
    """Rows in CSV column order, heading channels wrapped for presentation."""
    return np.column_stack(
        [
            record.t,
            record.eta[:, 0],
            record.eta[:, 1],
            _wrap_angle(record.eta[:, 2]),
            record.nu,
            record.sigma,
            record.meas[:, 0],
            record.meas[:, 1],
            _wrap_angle(record.meas[:, 2]),
            record.est_pos[:, 0],
            record.est_pos[:, 1],
            _wrap_angle(record.est_rot[:, 0]),
            record.est_pos[:, 2],
            record.est_pos[:, 3],
            record.est_rot[:, 1],
            record.est_pos[:, 4],
            record.est_pos[:, 5],
            record.est_rot[:, 2],
        ]
    )


def export_csv(record, destination):
    """Write the run to CSV at full precision (17 significant digits)."""
    matrix = record_matrix(record) if isinstance(record, RunRecord) else np.asarray(record)
    with open(destination, "w", encoding="ascii", newline="\n") as fh:
        fh.write(CSV_HEADER + "\n")
        for row in matrix:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def load_csv(path):
    """Read back an exported run as (header, matrix)."""
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip()
        data = np.loadtxt(fh, delimiter=",", ndmin=2) if header else np.empty((0, 0))
    return header, data


def band_rms(series, dt, f_lo, f_hi):
    """RMS of the signal content inside [f_lo, f_hi] Hz (one-sided DFT)."""
    series = np.asarray(series, dtype=float)
    n = len(series)
    spectrum = np.fft.rfft(series)
    freqs = np.fft.rfftfreq(n, dt)
    mask = (freqs >= f_lo) & (freqs <= f_hi)
    # Parseval with one-sided doubling; the Nyquist/DC bins are outside any
    # band used here
    power = 2.0 * (np.abs(spectrum[mask]) ** 2).sum() / (n * n)
    return math.sqrt(power)
