"""Plain-text gains files.

Line-oriented format: a header echoing the tuning scalars and the config
hash, then labeled matrices as whitespace-separated rows at 17 significant
digits, which round-trips IEEE doubles bit-identically.

    # asvest gains v1
    hash <hex digest>
    delta_psi1 <value>
    ...
    beta_psi <value>
    beta_p <value>
    M 3 3
    <row>
    ...
    P_psi 3 3 / W_psi 3 1 / L_psi 3 1 / P_p 6 6 / W_p 6 2
"""

from __future__ import annotations

import numpy as np

from .lmi import ObserverGains, PositionalSolution, RotationalSolution, SynthesisConfig
from .numerics import solve_linear


class GainsFormatError(ValueError):
    """The gains file does not follow the expected layout."""


MAGIC = "# asvest gains v1"

_SCALARS = (
    "delta_psi1", "delta_p1", "k_omega_p", "k_n_p", "r_min", "r_max",
    "eps_feas", "pd_floor", "p_cap", "w_cap", "delta_ref",
    "beta_psi", "beta_p",
)

_MATRICES = (("M", 3, 3), ("P_psi", 3, 3), ("W_psi", 3, 1), ("L_psi", 3, 1),
             ("P_p", 6, 6), ("W_p", 6, 2))


def write_gains(path, gains: ObserverGains, cfg_hash: str):
    cfg = gains.config
    scalars = {
        "delta_psi1": cfg.delta_psi1,
        "delta_p1": cfg.delta_p1,
        "k_omega_p": cfg.k_omega_p,
        "k_n_p": cfg.k_n_p,
        "r_min": cfg.r_min,
        "r_max": cfg.r_max,
        "eps_feas": cfg.eps_feas,
        "pd_floor": cfg.pd_floor,
        "p_cap": cfg.p_cap,
        "w_cap": cfg.w_cap,
        "delta_ref": cfg.delta_ref,
        "beta_psi": gains.rotational.beta_psi,
        "beta_p": gains.positional.beta_p,
    }
    matrices = {
        "M": cfg.M,
        "P_psi": gains.rotational.P_psi,
        "W_psi": gains.rotational.W_psi.reshape(3, 1),
        "L_psi": gains.rotational.L_psi.reshape(3, 1),
        "P_p": gains.positional.P_p,
        "W_p": gains.positional.W_p,
    }
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(MAGIC + "\n")
        fh.write(f"hash {cfg_hash}\n")
        for name in _SCALARS:
            fh.write(f"{name} {scalars[name]:.17g}\n")
        for name, rows, cols in _MATRICES:
            fh.write(f"{name} {rows} {cols}\n")
            for row in matrices[name]:
                fh.write(" ".join(f"{v:.17g}" for v in np.atleast_1d(row)) + "\n")


def read_gains(path):
    """Load a gains file; returns (ObserverGains, config_hash)."""
    try:
        with open(path, "r", encoding="ascii") as fh:
            lines = [ln.rstrip("\n") for ln in fh]
    except OSError as exc:
        raise GainsFormatError(f"cannot read gains file: {exc}") from exc
    if not lines or lines[0] != MAGIC:
        raise GainsFormatError("missing gains-file magic line")
    idx = 1
    if not lines[idx].startswith("hash "):
        raise GainsFormatError("missing hash line")
    cfg_hash = lines[idx].split(" ", 1)[1].strip()
    idx += 1

    scalars = {}
    for name in _SCALARS:
        try:
            key, raw = lines[idx].split(" ", 1)
        except (ValueError, IndexError) as exc:
            raise GainsFormatError(f"truncated header at line {idx + 1}") from exc
        if key != name:
            raise GainsFormatError(f"expected scalar {name!r} at line {idx + 1}, got {key!r}")
        scalars[name] = float(raw)
        idx += 1

    matrices = {}
    for name, rows, cols in _MATRICES:
        head = lines[idx].split()
        if len(head) != 3 or head[0] != name or head[1] != str(rows) or head[2] != str(cols):
            raise GainsFormatError(f"expected matrix header '{name} {rows} {cols}' at line {idx + 1}")
        idx += 1
        data = []
        for _ in range(rows):
            vals = lines[idx].split()
            if len(vals) != cols:
                raise GainsFormatError(f"bad row width at line {idx + 1}")
            data.append([float(v) for v in vals])
            idx += 1
        matrices[name] = np.array(data)

    config = SynthesisConfig(
        delta_psi1=scalars["delta_psi1"],
        delta_p1=scalars["delta_p1"],
        k_omega_p=scalars["k_omega_p"],
        k_n_p=scalars["k_n_p"],
        r_min=scalars["r_min"],
        r_max=scalars["r_max"],
        M=matrices["M"],
        eps_feas=scalars["eps_feas"],
        pd_floor=scalars["pd_floor"],
        p_cap=scalars["p_cap"],
        w_cap=scalars["w_cap"],
        delta_ref=scalars["delta_ref"],
    )
    rotational = RotationalSolution(
        P_psi=matrices["P_psi"],
        W_psi=matrices["W_psi"].reshape(3),
        beta_psi=scalars["beta_psi"],
        L_psi=matrices["L_psi"].reshape(3),
    )
    positional = PositionalSolution(
        P_p=matrices["P_p"],
        W_p=matrices["W_p"],
        beta_p=scalars["beta_p"],
        L_pz=solve_linear(matrices["P_p"], matrices["W_p"]),
    )
    return ObserverGains(config=config, rotational=rotational, positional=positional), cfg_hash
