#!/usr/bin/env python3
"""
Subspace Witness - command line entry point

Usage:
    subspace-witness <command> [options]
    python -m subspace_witness <command> [options]

Exit codes: 0 success, 1 configuration or input error, 2 runtime failure
(rank-deficient system, fit or optimiser failure).
"""

import argparse
import logging
import math
import sys
from pathlib import Path
from typing import Any, Callable

import numpy as np
import pandas as pd

from . import __version__
from .core.config import Config, config
from .core.exceptions import USER_ERRORS, WitnessException
from .core.logging_config import get_logger, setup_logging
from .core.scenario_workflow import run_scenario
from .core.validation import Scenario, load_scenario
from .nodes.noise_channels import to_channel
from .nodes.state_preparation import build_initial_state
from .quantum.measures import bound_from_witness, concurrence, gme_bound_ghz3
from .quantum.protocol import DecayModel, apply_channel, echo_scan, lifetime_tau_star
from .quantum.qcore import DensityMatrix
from .quantum.reconstruct import (
    Schedule,
    appendix_c_schedule,
    assemble,
    bell_schedule,
    binary_schedule,
    feasible,
    solve,
    ws_from_result,
)
from .quantum.states import PhaseSetting, SubspaceSpec, bell_spec, dicke, ghz_spec, spec_from_name, w_spec
from .quantum.witness import alpha_separable, state_witness, subspace_witness
from .reproduce import EXPERIMENTS, run_reproduction
from .utils.csv_io import read_measurements, write_csv
from .utils.seeding import derive_rng

logger = get_logger(__name__)


def parse_shots(text: str) -> int | float:
    if text.strip().lower() == "inf":
        return math.inf
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"shots must be a positive integer or 'inf', got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError("shots must be >= 1")
    return value


def parse_seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {text!r}")
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must lie in [0, 2^64)")
    return value


def _out_dir(args: argparse.Namespace) -> Path:
    return Path(args.out or config.output.output_dir)


def _metadata(args: argparse.Namespace, **extra: Any) -> dict[str, Any]:
    return {
        "tool": f"subspace-witness {__version__}",
        "command": args.command,
        "seed": args.seed,
        "shots": args.shots,
        **extra,
    }


def _scenario(args: argparse.Namespace) -> Scenario:
    return load_scenario(args.config) if args.config else Scenario()


def _prepared_state(args: argparse.Namespace) -> tuple[SubspaceSpec, DensityMatrix]:
    """[state] + [[channels]] from --config; --spec overrides the subspace."""
    scenario = _scenario(args)
    name = getattr(args, "spec", None) or scenario.state.subspace
    spec = spec_from_name(name)
    rho = build_initial_state(scenario.state, spec, derive_rng(args.seed, 0))
    for section in scenario.channels:
        rho = apply_channel(rho, to_channel(section))
    return spec, rho


def _alpha(args: argparse.Namespace, spec: SubspaceSpec) -> float:
    if args.alpha is not None:
        return float(args.alpha)
    return alpha_separable(spec, seed=args.seed).value


def cmd_gen(args: argparse.Namespace) -> int:
    if args.family == "bell":
        spec = bell_spec(args.branch)
        name = f"bell-{args.branch}"
    elif args.family == "ghz":
        spec, name = ghz_spec(args.n), f"ghz{args.n}"
    elif args.family == "w":
        spec, name = w_spec(args.n), f"w{args.n}"
    else:
        spec, name = dicke(args.n, args.k), f"dicke_{args.n}_{args.k}"
    path = spec.save(_out_dir(args) / f"{name}.subspace")
    print(f"✅ {name}: d={spec.d}, n={spec.n} -> {path}")
    return 0


def cmd_witness(args: argparse.Namespace) -> int:
    spec, rho = _prepared_state(args)
    phases = args.phases if args.phases is not None else [0.0] * spec.n
    report = state_witness(rho, spec, PhaseSetting(tuple(phases)), _alpha(args, spec))
    write_csv(pd.DataFrame([report.to_row()]), _out_dir(args) / "witness.csv", _metadata(args, subspace=" ".join(spec.basis)))
    print(f"W_psi = {report.value:.6f} (F = {report.fidelity:.6f}, alpha = {report.alpha:.6f})")
    return 0


def cmd_subspace_witness(args: argparse.Namespace) -> int:
    spec, rho = _prepared_state(args)
    report = subspace_witness(rho, spec, _alpha(args, spec), args.mode, args.seed)
    write_csv(
        pd.DataFrame([report.to_row()]),
        _out_dir(args) / "subspace_witness.csv",
        _metadata(args, subspace=" ".join(spec.basis), guaranteed=report.guaranteed),
    )
    print(f"W_s = {report.value:.6f} (P = {report.population_P:.6f}, C = {report.coherence_C:.6f}, mode = {report.mode})")
    return 0


def _schedule_for(spec: SubspaceSpec, part: str) -> Schedule:
    if part == "bell":
        return bell_schedule(spec)
    if part == "all":
        return appendix_c_schedule(spec)
    return binary_schedule(spec, part)  # type: ignore[arg-type]


def cmd_schedule(args: argparse.Namespace) -> int:
    spec = spec_from_name(args.spec)
    report = feasible(spec)
    schedule = _schedule_for(spec, args.part)
    frame = schedule.to_frame()
    meta = _metadata(
        args,
        subspace=" ".join(spec.basis),
        part=args.part,
        unknowns=report.unknowns,
        reachable_settings=report.reachable_settings,
    )
    path = write_csv(frame, _out_dir(args) / f"schedule_{args.part}.csv", meta)
    print(f"{len(schedule)} settings ({args.part}); unknowns = {report.unknowns}, feasible = {report.feasible}")
    for row in frame.itertuples(index=False):
        print("  " + " ".join(f"{value:.6f}" if isinstance(value, float) else str(value) for value in row))
    print(f"✅ wrote {path}")
    return 0


def cmd_reconstruct(args: argparse.Namespace) -> int:
    spec = spec_from_name(args.spec)
    schedule, fidelities = read_measurements(args.measurements, spec.n)
    result = solve(assemble(spec, schedule, fidelities))
    report = ws_from_result(result, spec, _alpha(args, spec), args.mode, args.seed)
    out = _out_dir(args)
    meta = _metadata(args, subspace=" ".join(spec.basis), residual_norm=result.residual_norm)
    write_csv(result.to_frame(), out / "reconstruction.csv", meta)
    write_csv(pd.DataFrame([report.to_row()]), out / "reconstructed_witness.csv", meta)
    print(f"P = {result.P_hat:.6f}, residual = {result.residual_norm:.3e}, W_s = {report.value:.6f}")
    return 0


def cmd_alpha(args: argparse.Namespace) -> int:
    spec = spec_from_name(args.spec)
    result = alpha_separable(spec, restarts=args.restarts, seed=args.seed)
    print(f"alpha = {result.value:.10f} (converged = {result.converged})")
    return 0


def cmd_measures(args: argparse.Namespace) -> int:
    spec, rho = _prepared_state(args)
    rows: list[dict[str, Any]] = []
    if rho.n == 2:
        alpha = 0.5
        rows.append({"measure": "concurrence", "value": concurrence(rho).value})
        w_psi = state_witness(rho, spec, PhaseSetting.zeros(2), alpha).value
        w_s = subspace_witness(rho, spec, alpha, args.mode, args.seed).value
        rows.append({"measure": "bound_state_witness", "value": bound_from_witness(w_psi)})
        rows.append({"measure": "bound_subspace_witness", "value": bound_from_witness(w_s)})
    elif rho.n == 3:
        rows.append({"measure": "gme_bound_ghz3", "value": gme_bound_ghz3(rho)})
    else:
        logger.warning("no measure available for this qubit count", n=rho.n)
    write_csv(pd.DataFrame(rows, columns=["measure", "value"]), _out_dir(args) / "measures.csv", _metadata(args))
    for row in rows:
        print(f"{row['measure']} = {row['value']:.6f}")
    return 0


def cmd_decay_scan(args: argparse.Namespace) -> int:
    _, rho = _prepared_state(args)
    decay = DecayModel("exponential" if args.p == 1 else "stretched", args.t2, args.p)
    taus = np.linspace(0.0, args.tau_max, args.points)
    result = echo_scan(rho, args.nu, decay, taus)
    population = float((rho.element(0, 0) + rho.element(3, 3)).real) / 2
    lifetime = lifetime_tau_star(result.fitted_T2, args.p, result.fitted_amplitude / 2, 0.5, population)
    meta = _metadata(
        args,
        fitted_T2=result.fitted_T2,
        fitted_amplitude=result.fitted_amplitude,
        fitted_phase=result.fitted_phase,
        lifetime_status=lifetime.status.value,
        tau_star=lifetime.tau_star,
    )
    write_csv(result.to_frame(), _out_dir(args) / "decay_scan.csv", meta)
    print(
        f"T2 = {result.fitted_T2:.6e} s, amplitude = {result.fitted_amplitude:.6f}, "
        f"tau* = {lifetime.tau_star:.6e} s ({lifetime.status.value})"
    )
    return 0


def cmd_reproduce(args: argparse.Namespace) -> int:
    targets = list(EXPERIMENTS) if args.target == "all" else [args.target]
    for name in targets:
        result, paths = run_reproduction(name, _out_dir(args), args.seed, args.shots)
        summary = ", ".join(f"{k} = {v:.6g}" if isinstance(v, float) else f"{k} = {v}" for k, v in result.summary.items())
        print(f"{name}: {summary}")
        print(f"✅ wrote {len(paths)} file(s)")
    return 0


def cmd_run(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    seed = args.seed if args.seed_given else None
    shots = args.shots if args.shots_given else None
    result = run_scenario(scenario, seed=seed, shots=shots, out_dir=args.out, mode=args.mode_given)
    for row in result.get("reports", []):
        print(f"{row['source']:>13} {row['mode']:>15}  value = {float(row['value']):.6f}")
    print(f"✅ wrote {len(result.get('artifacts', []))} file(s)")
    return 0


COMMANDS: dict[str, Callable[[argparse.Namespace], int]] = {
    "gen": cmd_gen,
    "witness": cmd_witness,
    "subspace-witness": cmd_subspace_witness,
    "schedule": cmd_schedule,
    "reconstruct": cmd_reconstruct,
    "alpha": cmd_alpha,
    "measures": cmd_measures,
    "decay-scan": cmd_decay_scan,
    "reproduce": cmd_reproduce,
    "run": cmd_run,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", "-c", help="Scenario file (TOML) providing [state] and [[channels]]")
    common.add_argument("--env-file", help=".env file overriding numeric and output settings")
    common.add_argument("--seed", type=parse_seed, default=None, help="Random seed, u64 (default 0)")
    common.add_argument("--shots", type=parse_shots, default=None, help="Shots per setting, integer or 'inf' (default inf)")
    common.add_argument("--out", "-o", help="Output directory (default $WITNESS_OUTPUT_DIR or ./output)")
    common.add_argument(
        "--mode",
        choices=["constrained", "magnitude-sum"],
        default=None,
        help="Subspace witness mode (default constrained)",
    )
    common.add_argument("--verbose", "-v", action="store_true", help="Enable debug logging")

    parser = argparse.ArgumentParser(
        prog="subspace-witness",
        description="Subspace Witness - fidelity-based entanglement witnesses on simulated states",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
    subspace-witness alpha --spec bell
    subspace-witness schedule --spec w4 --part real
    subspace-witness gen --family ghz --n 3
    subspace-witness subspace-witness --config scenario.toml --mode magnitude-sum
    subspace-witness reproduce fig2b --shots 100000 --seed 7
    subspace-witness run scenario.toml --out results/
        """,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", parents=[common], help="Write a named subspace to a file")
    gen.add_argument("--family", choices=["bell", "ghz", "w", "dicke"], required=True)
    gen.add_argument("--n", type=int, default=2, help="Qubit count")
    gen.add_argument("--k", type=int, default=1, help="Excitations (dicke only)")
    gen.add_argument("--branch", choices=["phi", "psi"], default="phi", help="Bell branch")

    witness = sub.add_parser("witness", parents=[common], help="State witness alpha - <psi|rho|psi>")
    witness.add_argument("--spec", help="Subspace name or file (default from the scenario)")
    witness.add_argument("--phases", type=float, nargs="+", help="Per-qubit z phases of the target")
    witness.add_argument("--alpha", type=float, help="Witness offset (default: computed)")

    subspace = sub.add_parser("subspace-witness", parents=[common], help="Phase-minimised subspace witness")
    subspace.add_argument("--spec", help="Subspace name or file (default from the scenario)")
    subspace.add_argument("--alpha", type=float, help="Witness offset (default: computed)")

    schedule = sub.add_parser("schedule", parents=[common], help="List a measurement schedule")
    schedule.add_argument("--spec", required=True, help="Subspace name or file")
    schedule.add_argument("--part", choices=["real", "imaginary", "all", "bell"], default="all")

    reconstruct = sub.add_parser("reconstruct", parents=[common], help="Solve a measurement file for P and coherences")
    reconstruct.add_argument("--spec", required=True, help="Subspace name or file")
    reconstruct.add_argument("--measurements", required=True, help="CSV with setting_index, theta_1..theta_n, fidelity")
    reconstruct.add_argument("--alpha", type=float, help="Witness offset (default: computed)")

    alpha = sub.add_parser("alpha", parents=[common], help="Maximal product-state overlap of the target")
    alpha.add_argument("--spec", required=True, help="Subspace name or file")
    alpha.add_argument("--restarts", type=int, default=None, help="Random restarts (default from config)")

    measures = sub.add_parser("measures", parents=[common], help="Concurrence and witness bounds")
    measures.add_argument("--spec", help="Subspace name or file (default from the scenario)")

    decay = sub.add_parser("decay-scan", parents=[common], help="Phase-modulated echo scan and fit")
    decay.add_argument("--t2", type=float, default=31e-6, help="Decay time T2 in seconds")
    decay.add_argument("--p", type=float, default=2.0, help="Stretch exponent (1 = exponential)")
    decay.add_argument("--nu", type=float, default=15e3, help="Phase modulation frequency in Hz")
    decay.add_argument("--tau-max", type=float, default=62e-6, help="Longest echo time in seconds")
    decay.add_argument("--points", type=int, default=121)

    reproduce = sub.add_parser("reproduce", parents=[common], help="Regenerate a figure table")
    reproduce.add_argument("target", choices=[*EXPERIMENTS, "all"])

    run = sub.add_parser("run", parents=[common], help="Run a scenario file through the full pipeline")
    run.add_argument("scenario", help="Scenario file (TOML)")

    return parser


def main(argv: list[str] | None = None) -> int:
    """Main CLI entry point"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits with 2 on usage errors; those are input errors (exit 1) here
        return 1 if e.code == 2 else int(e.code or 0)

    # flags left unset fall back to the scenario file in `run`
    args.seed_given = args.seed is not None
    args.shots_given = args.shots is not None
    args.mode_given = args.mode
    if args.seed is None:
        args.seed = 0
    if args.shots is None:
        args.shots = math.inf
    if args.mode is None:
        args.mode = "constrained"

    try:
        if args.env_file:
            Config.load_from_file(args.env_file)
        setup_logging(logging.DEBUG if args.verbose else None)
        return COMMANDS[args.command](args)
    except USER_ERRORS as e:
        logger.error("input rejected", **e.to_dict())
        print(f"❌ Error [{e.error_code}]: {e.message}", file=sys.stderr)
        return 1
    except WitnessException as e:
        logger.error("command failed", **e.to_dict())
        print(f"❌ Error [{e.error_code}]: {e.message}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
