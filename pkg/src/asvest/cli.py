"""Command-line front door.

    asvest synth    --config cfg --out gains.txt
    asvest simulate --config cfg --gains gains.txt [--seed N] --out run.csv
    asvest bench    --config cfg --sweep delta_p1=0.05,400 [--seeds N] --out table.csv
    asvest verify   --gains gains.txt --config cfg [--tol T] [--pole-tol T]

Exit codes: 0 success, 2 configuration/parse/file errors, 3 infeasible
synthesis or gains/config mismatch, 4 numerical failure, 5 certificate
failure.  Every command is deterministic given the config bytes and seed
flags.  Gains are cached to a file once (synthesis is offline) and bound to
the generating config by a hash so stale gains are refused.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from . import bench, gains_io, lmi, sdp
from .config import ConfigError, config_hash, load_config

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_NUMERICAL = 4
EXIT_CERTIFICATE = 5

SWEEP_KEYS = ("delta_psi1", "delta_p1", "k_omega_p", "k_n_p")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="asvest",
        description="Cascade velocity/disturbance estimation for surface vessels",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="solve the gain synthesis and write a gains file")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("simulate", help="run one scenario against stored gains")
    p.add_argument("--config", required=True)
    p.add_argument("--gains", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)

    p = sub.add_parser("bench", help="sweep one tuning key, aggregating over seeds")
    p.add_argument("--config", required=True)
    p.add_argument("--sweep", required=True, metavar="KEY=v1,v2,...")
    p.add_argument("--seeds", type=int, default=1)
    p.add_argument("--out", required=True)

    p = sub.add_parser("verify", help="re-check the certificates of a gains file")
    p.add_argument("--gains", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--pole-tol", type=float, default=1e-6)
    return parser


def _fail(code, message):
    print(f"error: {message}", file=sys.stderr)
    return code


def cmd_synth(args):
    try:
        loaded = load_config(args.config)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, exc)
    try:
        result = lmi.synthesize(loaded.synthesis)
    except (lmi.InvalidConfigError,) as exc:
        return _fail(EXIT_CONFIG, exc)
    except sdp.InfeasibleError as exc:
        return _fail(EXIT_INFEASIBLE, exc)
    except sdp.NumericalFailureError as exc:
        return _fail(EXIT_NUMERICAL, exc)
    try:
        gains_io.write_gains(args.out, result.gains, loaded.hash)
    except OSError as exc:
        return _fail(EXIT_CONFIG, f"cannot write gains file: {exc}")
    print(result.rotational_report.summary())
    print(result.positional_report.summary())
    print(f"beta_psi = {result.gains.rotational.beta_psi:.6g}")
    print(f"beta_p   = {result.gains.positional.beta_p:.6g}")
    print(f"gains written to {args.out}")
    if not (result.rotational_report.passed and result.positional_report.passed):
        return _fail(EXIT_CERTIFICATE, "verification failed on a fresh solution")
    return EXIT_OK


def cmd_simulate(args):
    try:
        loaded = load_config(args.config)
        gains, stored_hash = gains_io.read_gains(args.gains)
    except (ConfigError, gains_io.GainsFormatError) as exc:
        return _fail(EXIT_CONFIG, exc)
    if stored_hash != loaded.hash:
        return _fail(
            EXIT_INFEASIBLE,
            "gains file does not match this config (stale gains?); re-run synth",
        )
    scenario = loaded.scenario
    if args.seed is not None:
        scenario = scenario.with_seed(args.seed)
    try:
        record = bench.run_scenario(scenario, gains=gains)
    except bench.engine.DivergedError as exc:
        return _fail(EXIT_NUMERICAL, exc)
    try:
        bench.export_csv(record, args.out)
    except OSError as exc:
        return _fail(EXIT_CONFIG, f"cannot write CSV: {exc}")
    stats = bench.error_std(record, scenario.warmup)
    summary = " ".join(
        f"std({name})={value:.6g}"
        for name, value in zip(bench.ErrorStats.CHANNELS, stats.as_tuple())
    )
    print(summary)
    print(
        f"diagnostics: max|n_p|={record.noise_max_abs:.6g} "
        f"empirical omega*={record.omega_star_emp:.6g}"
    )
    print(f"run written to {args.out}")
    return EXIT_OK


def cmd_bench(args):
    try:
        loaded = load_config(args.config)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, exc)
    if "=" not in args.sweep:
        return _fail(EXIT_CONFIG, "sweep must look like KEY=v1,v2,...")
    key, _, raw_values = args.sweep.partition("=")
    key = key.strip()
    if key not in SWEEP_KEYS:
        return _fail(EXIT_CONFIG, f"unknown sweep key {key!r}; expected one of {SWEEP_KEYS}")
    try:
        values = [float(v) for v in raw_values.split(",") if v.strip()]
    except ValueError as exc:
        return _fail(EXIT_CONFIG, f"bad sweep value: {exc}")
    if not values:
        return _fail(EXIT_CONFIG, "sweep needs at least one value")
    if args.seeds < 1:
        return _fail(EXIT_CONFIG, "--seeds must be >= 1")

    rows = []
    for value in values:
        syn_kwargs = {
            "delta_psi1": loaded.synthesis.delta_psi1,
            "delta_p1": loaded.synthesis.delta_p1,
            "k_omega_p": loaded.synthesis.k_omega_p,
            "k_n_p": loaded.synthesis.k_n_p,
            "r_min": loaded.synthesis.r_min,
            "r_max": loaded.synthesis.r_max,
            "M": loaded.synthesis.M,
            "eps_feas": loaded.synthesis.eps_feas,
            "pd_floor": loaded.synthesis.pd_floor,
            "p_cap": loaded.synthesis.p_cap,
            "w_cap": loaded.synthesis.w_cap,
            "delta_ref": loaded.synthesis.delta_ref,
        }
        syn_kwargs[key] = value
        try:
            synthesis = lmi.SynthesisConfig(**syn_kwargs)
        except lmi.InvalidConfigError as exc:
            return _fail(EXIT_CONFIG, exc)
        scenario = replace(loaded.scenario, synthesis=synthesis)
        try:
            agg = bench.monte_carlo(scenario, args.seeds)
        except lmi.InvalidConfigError as exc:
            return _fail(EXIT_CONFIG, exc)
        except sdp.InfeasibleError as exc:
            return _fail(EXIT_INFEASIBLE, f"{key}={value}: {exc}")
        except sdp.NumericalFailureError as exc:
            return _fail(EXIT_NUMERICAL, f"{key}={value}: {exc}")
        except bench.engine.DivergedError as exc:
            return _fail(EXIT_NUMERICAL, f"{key}={value}: {exc}")
        rows.append((value, agg))
        printable = " ".join(
            f"{name}={mean:.4g}"
            for name, mean in zip(bench.ErrorStats.CHANNELS, agg.mean.as_tuple())
        )
        print(f"{key}={value:g} seeds={args.seeds}: {printable}")

    header = ["sweep_key", "sweep_value", "seeds"]
    for name in bench.ErrorStats.CHANNELS:
        header += [f"{name}_mean", f"{name}_spread"]
    try:
        with open(args.out, "w", encoding="ascii", newline="\n") as fh:
            fh.write(",".join(header) + "\n")
            for value, agg in rows:
                cells = [key, f"{value:.17g}", str(args.seeds)]
                for mean, spread in zip(agg.mean.as_tuple(), agg.spread.as_tuple()):
                    cells += [f"{mean:.17g}", f"{spread:.17g}"]
                fh.write(",".join(cells) + "\n")
    except OSError as exc:
        return _fail(EXIT_CONFIG, f"cannot write table: {exc}")
    print(f"sweep table written to {args.out}")
    return EXIT_OK


def cmd_verify(args):
    try:
        loaded = load_config(args.config)
        gains, stored_hash = gains_io.read_gains(args.gains)
    except (ConfigError, gains_io.GainsFormatError) as exc:
        return _fail(EXIT_CONFIG, exc)
    if stored_hash != loaded.hash:
        return _fail(EXIT_INFEASIBLE, "gains file does not match this config")
    try:
        rot, pos = lmi.verify_gains(loaded.synthesis, gains, tol=args.tol, pole_tol=args.pole_tol)
    except Exception as exc:  # indefinite P etc. surface as solver errors
        print(f"certificate check failed: {exc}", file=sys.stderr)
        return EXIT_CERTIFICATE
    print(rot.summary())
    print(pos.summary())
    if not (rot.passed and pos.passed):
        return _fail(EXIT_CERTIFICATE, "stored gains failed certificate checks")
    return EXIT_OK


def main(argv=None):
    args = _build_parser().parse_args(argv)
    handler = {
        "synth": cmd_synth,
        "simulate": cmd_simulate,
        "bench": cmd_bench,
        "verify": cmd_verify,
    }[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
