"""Sectioned key=value configuration files.

Sections: [vessel], [synthesis], [signals], [noise], [scenario].  Every key
mirrors a field of the corresponding module; unknown sections or keys are
errors, and all values are validated through the module constructors before
a run starts.  Missing sections and keys fall back to the package defaults
(Table-style vessel coefficients, conservative excitation ranges).
"""

from __future__ import annotations

import configparser
import hashlib
from dataclasses import dataclass

from .bench import ScenarioConfig, SurrogateSigma
from .lmi import SynthesisConfig
from .signals import DEFAULT_CONTROL_RANGES, DEFAULT_DISTURBANCE_RANGES, ChannelRanges
from .vessel import VesselParams


class ConfigError(ValueError):
    """Malformed, unknown or invalid configuration content."""


VESSEL_KEYS = (
    "m", "I_z", "x_g",
    "X_udot", "Y_vdot", "Y_rdot", "N_vdot", "N_rdot",
    "X_u", "X_uu",
    "Y_v", "Y_vv", "Y_vr", "Y_r", "Y_rv", "Y_rr",
    "N_v", "N_vv", "N_vr", "N_r", "N_rv", "N_rr",
)

SYNTHESIS_KEYS = (
    "delta_psi1", "delta_p1", "k_omega_p", "k_n_p", "r_min", "r_max",
    "eps_feas", "pd_floor", "p_cap", "w_cap", "delta_ref",
)

_SIGNAL_CHANNELS = ("fu", "taur", "fwu", "fwv", "tauwr")
_RANGE_SUFFIXES = ("bias_min", "bias_max", "amp_min", "amp_max", "freq_min", "freq_max")
SIGNAL_KEYS = tuple(f"{ch}_{sfx}" for ch in _SIGNAL_CHANNELS for sfx in _RANGE_SUFFIXES)

NOISE_KEYS = ("bound", "freq_min", "freq_max", "components")

SCENARIO_KEYS = (
    "duration", "dt", "warmup", "plant", "seed", "engine",
    "init_x", "init_y", "init_psi", "init_u", "init_v", "init_r",
    "sigma_u_bias", "sigma_u_amp", "sigma_u_freq",
    "sigma_v_bias", "sigma_v_amp", "sigma_v_freq",
    "sigma_r_bias", "sigma_r_amp", "sigma_r_freq",
)

KNOWN = {
    "vessel": set(VESSEL_KEYS),
    "synthesis": set(SYNTHESIS_KEYS),
    "signals": set(SIGNAL_KEYS),
    "noise": set(NOISE_KEYS),
    "scenario": set(SCENARIO_KEYS),
}


@dataclass(frozen=True)
class LoadedConfig:
    vessel: VesselParams
    synthesis: SynthesisConfig
    scenario: ScenarioConfig
    hash: str


def _parse(path):
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#", ";")
    )
    parser.optionxform = str
    try:
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh, source=str(path))
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    for section in parser.sections():
        if section not in KNOWN:
            raise ConfigError(f"unknown section [{section}]")
        for key in parser[section]:
            if key not in KNOWN[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
    return parser


def _floats(section, defaults=None):
    out = dict(defaults or {})
    for key, raw in section.items():
        try:
            out[key] = float(raw)
        except ValueError as exc:
            raise ConfigError(f"key {key!r}: {raw!r} is not a number") from exc
    return out


def _range_for(values, channel, default: ChannelRanges):
    def pick(sfx, fallback):
        return values.get(f"{channel}_{sfx}", fallback)

    return ChannelRanges(
        bias=(pick("bias_min", default.bias[0]), pick("bias_max", default.bias[1])),
        amplitude=(pick("amp_min", default.amplitude[0]), pick("amp_max", default.amplitude[1])),
        frequency=(pick("freq_min", default.frequency[0]), pick("freq_max", default.frequency[1])),
    )


def load_config(path) -> LoadedConfig:
    """Parse and validate; raises ConfigError with the offending key/line."""
    parser = _parse(path)
    try:
        vessel_vals = _floats(parser["vessel"]) if parser.has_section("vessel") else {}
        vessel = VesselParams(**vessel_vals)

        syn_vals = _floats(parser["synthesis"]) if parser.has_section("synthesis") else {}
        from .vessel import inertia_matrix

        synthesis = SynthesisConfig(M=inertia_matrix(vessel), **syn_vals)

        sig_vals = _floats(parser["signals"]) if parser.has_section("signals") else {}
        control = tuple(
            _range_for(sig_vals, ch, dflt)
            for ch, dflt in zip(("fu", "taur"), DEFAULT_CONTROL_RANGES)
        )
        disturbance = tuple(
            _range_for(sig_vals, ch, dflt)
            for ch, dflt in zip(("fwu", "fwv", "tauwr"), DEFAULT_DISTURBANCE_RANGES)
        )

        noise_vals = _floats(parser["noise"]) if parser.has_section("noise") else {}

        sc_raw = dict(parser["scenario"]) if parser.has_section("scenario") else {}
        sc_vals = _floats({k: v for k, v in sc_raw.items() if k not in ("plant", "engine")})
        plant = sc_raw.get("plant", "full")
        eng = sc_raw.get("engine", "auto")

        scenario = ScenarioConfig(
            duration=sc_vals.get("duration", 300.0),
            dt=sc_vals.get("dt", 0.01),
            warmup=sc_vals.get("warmup", 50.0),
            plant=plant,
            seed=int(sc_vals.get("seed", 1)),
            engine=eng,
            vessel=vessel,
            synthesis=synthesis,
            control_ranges=control,
            disturbance_ranges=disturbance,
            noise_bound=noise_vals.get("bound", 0.2),
            noise_band=(noise_vals.get("freq_min", 0.1), noise_vals.get("freq_max", 0.5)),
            noise_components=int(noise_vals.get("components", 8)),
            initial_eta=(
                sc_vals.get("init_x", 0.0),
                sc_vals.get("init_y", 10.0),
                sc_vals.get("init_psi", 0.0),
            ),
            initial_nu=(
                sc_vals.get("init_u", 0.0),
                sc_vals.get("init_v", 0.0),
                sc_vals.get("init_r", 0.0),
            ),
            surrogate_sigma=SurrogateSigma(
                bias=tuple(sc_vals.get(f"sigma_{c}_bias", 0.0) for c in "uvr"),
                amplitude=tuple(sc_vals.get(f"sigma_{c}_amp", 0.0) for c in "uvr"),
                frequency=tuple(sc_vals.get(f"sigma_{c}_freq", 0.0) for c in "uvr"),
            ),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    return LoadedConfig(
        vessel=vessel,
        synthesis=synthesis,
        scenario=scenario,
        hash=config_hash(vessel, synthesis),
    )


def config_hash(vessel: VesselParams, synthesis: SynthesisConfig) -> str:
    """Digest of everything the synthesized gains depend on.

    Binds a gains file to its config so simulations refuse stale gains.
    """
    parts = [f"{k}={getattr(vessel, k):.17g}" for k in VESSEL_KEYS]
    for k in SYNTHESIS_KEYS:
        parts.append(f"{k}={getattr(synthesis, k):.17g}")
    return hashlib.sha256(";".join(parts).encode("ascii")).hexdigest()
