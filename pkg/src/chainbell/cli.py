"""Command-line interface.

Subcommands wrap the library modules with reproducible seeded runs and
CSV/JSON outputs. Exit codes: 0 success, 2 usage or config problems,
3 simulation failures, 4 data-ingestion failures. A flat key=value config
file can seed any subcommand's options; explicit flags override it.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from ._backend import backend_name
from .correlations import (
    ChainConfig,
    ChainedNLBoxModel,
    DeterministicLocalModel,
    LocalStrategy,
    MixtureModel,
    QuantumModel,
)
from .errors import CapacityError, DataError, EstimationError, InputError
from .functional import bias_bound, curve_table, i_quantum_closed_form, optimal_chain_length
from .oracle import lhv_minimum
from .simulate import (
    MODE_TRIAL,
    MODE_WINDOW,
    POLICIES,
    POLICY_CHAIN,
    estimate_i,
    estimate_marginal_bias,
    generate_events,
    pair_coincidences,
    read_records_csv,
    write_records_csv,
)
from .timing import SpacetimeEvent, before_before_holds, min_speed_for_priority

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SIMULATION = 3
EXIT_DATA = 4


class UsageError(Exception):
    pass


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _emit_json(payload: dict, path: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if path:
        Path(path).write_text(text + "\n")
    else:
        print(text)


def _parse_sign_string(text: str) -> tuple[int, ...]:
    outcomes = []
    for ch in text.strip():
        if ch == "+":
            outcomes.append(1)
        elif ch == "-":
            outcomes.append(-1)
        else:
            raise UsageError(f"strategy string must contain only + and -, got {text!r}")
    if not outcomes:
        raise UsageError("strategy string is empty")
    return tuple(outcomes)


def _build_model(args) -> object:
    if args.model == "quantum":
        return QuantumModel(args.visibility)
    if args.model == "nlbox":
        return ChainedNLBoxModel()
    if args.model == "lhv":
        if not args.strategy_a or not args.strategy_b:
            raise UsageError("model lhv needs --strategy-a and --strategy-b")
        strat = LocalStrategy(_parse_sign_string(args.strategy_a),
                              _parse_sign_string(args.strategy_b))
        if strat.n != args.n:
            raise UsageError(f"strategy length {strat.n} does not match --n {args.n}")
        return DeterministicLocalModel(strat)
    if args.model == "mixture":
        if not args.mixture:
            raise UsageError("model mixture needs --mixture 'A:B:w;A:B:w;...'")
        components, weights = [], []
        for part in args.mixture.split(";"):
            fields = part.strip().split(":")
            if len(fields) != 3:
                raise UsageError(f"bad mixture component {part!r}, expected A:B:WEIGHT")
            strat = LocalStrategy(_parse_sign_string(fields[0]),
                                  _parse_sign_string(fields[1]))
            if strat.n != args.n:
                raise UsageError(f"strategy length {strat.n} does not match --n {args.n}")
            components.append(DeterministicLocalModel(strat))
            try:
                weights.append(float(fields[2]))
            except ValueError as exc:
                raise UsageError(f"bad mixture weight {fields[2]!r}") from exc
        try:
            return MixtureModel(components, weights)
        except InputError as exc:
            raise UsageError(str(exc)) from exc
    raise UsageError(f"unknown model {args.model!r}")


def _estimation_report(counts, config: ChainConfig, stream) -> dict:
    estimate = estimate_i(counts, config)
    bias = estimate_marginal_bias(stream, n=config.n)
    half_i = estimate.value / 2.0
    combined = math.sqrt(bias.worst.std_error ** 2 + (estimate.std_error / 2.0) ** 2)
    return {
        "i_estimate": {
            "value": estimate.value,
            "std_error": estimate.std_error,
            "samples_per_pair": [int(m) for m in estimate.samples_per_pair],
            "per_term": list(estimate.per_term),
        },
        "bias": {
            "cells": [
                {
                    "party": c.party,
                    "setting_index": c.setting_index,
                    "count": c.count,
                    "p_plus": c.p_plus,
                    "distance": c.distance,
                    "std_error": c.std_error,
                }
                for c in bias.cells
            ],
            "worst": {
                "party": bias.worst.party,
                "setting_index": bias.worst.setting_index,
                "distance": bias.worst.distance,
                "std_error": bias.worst.std_error,
            },
        },
        "bias_bound_estimate": half_i,
        "consistency_check": {
            "worst_distance": bias.worst.distance,
            "bound": half_i + 3.0 * combined,
            "combined_std_error": combined,
            "passed": bias.worst.distance <= half_i + 3.0 * combined,
        },
        "pairing": {
            "matched_pairs": counts.matched_pairs,
            "orphan_count": counts.orphan_count,
            "ambiguous_count": counts.ambiguous_count,
            "discarded_nonchain_pairs": counts.discarded_nonchain_pairs,
            "total_records": counts.total_records,
        },
    }


# --- subcommands ----------------------------------------------------------------


def _cmd_curves(args) -> int:
    if args.steps < 2:
        raise UsageError(f"--steps must be >= 2, got {args.steps}")
    if not args.theta_max > args.theta_min:
        raise UsageError("theta range is degenerate: need --theta-max > --theta-min")
    try:
        n_list = [int(part) for part in args.n_list.split(",") if part.strip()]
    except ValueError as exc:
        raise UsageError(f"bad --n-list {args.n_list!r}") from exc
    if not n_list or any(n < 2 for n in n_list):
        raise UsageError("--n-list needs chain orders >= 2")
    step = (args.theta_max - args.theta_min) / (args.steps - 1)
    grid = [args.theta_min + i * step for i in range(args.steps)]
    rows = curve_table(n_list, grid, args.visibility)
    try:
        with open(args.out, "w") as fh:
            fh.write("n,theta_rad,i_value\n")
            for n, theta, value in rows:
                fh.write(f"{n},{theta:.7g},{value:.7g}\n")
    except OSError as exc:
        raise UsageError(f"cannot write {args.out}: {exc}") from exc
    print(f"wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    try:
        model = _build_model(args)
    except InputError as exc:
        raise UsageError(str(exc)) from exc
    try:
        config = ChainConfig(args.n, args.theta, args.visibility)
        stream = generate_events(model, config, args.trials, args.seed,
                                 settings_policy=args.policy,
                                 interval_ns=args.interval_ns)
        if args.out:
            write_records_csv(stream, args.out)
        counts = pair_coincidences(stream, MODE_TRIAL, n=config.n)
        report = _estimation_report(counts, config, stream)
    except (InputError, DataError, EstimationError, OSError) as exc:
        return _fail(str(exc), EXIT_SIMULATION)
    payload = {
        "command": "simulate",
        "backend": backend_name(),
        "config": {
            "model": args.model,
            "n": args.n,
            "theta": args.theta,
            "visibility": args.visibility,
            "trials": args.trials,
            "seed": args.seed,
            "policy": args.policy,
            "interval_ns": args.interval_ns,
            "strategy_a": args.strategy_a,
            "strategy_b": args.strategy_b,
            "mixture": args.mixture,
            "out": args.out,
        },
        **report,
    }
    _emit_json(payload, args.summary_out)
    return EXIT_OK


def _cmd_estimate(args) -> int:
    if args.pairing == MODE_WINDOW and (args.window_ns is None or args.window_ns <= 0):
        raise UsageError("pairing by-timestamp-window needs --window-ns > 0")
    try:
        stream = read_records_csv(args.records)
        counts = pair_coincidences(stream, args.pairing, window_ns=args.window_ns,
                                   n=args.n)
        config = ChainConfig(args.n, args.theta)
        report = _estimation_report(counts, config, stream)
    except (DataError, EstimationError, InputError, OSError) as exc:
        return _fail(str(exc), EXIT_DATA)
    payload = {
        "command": "estimate",
        "backend": backend_name(),
        "config": {
            "records": args.records,
            "n": args.n,
            "theta": args.theta,
            "pairing": args.pairing,
            "window_ns": args.window_ns,
        },
        **report,
    }
    _emit_json(payload, args.summary_out)
    return EXIT_OK


def _cmd_lhv_bound(args) -> int:
    try:
        minimum, witness = lhv_minimum(args.n, args.theta)
    except CapacityError as exc:
        raise UsageError(str(exc)) from exc
    payload = {
        "command": "lhv-bound",
        "backend": backend_name(),
        "config": {"n": args.n, "theta": args.theta},
        "minimum_i": minimum,
        "witness": {
            "a_outcomes": list(witness.a_outcomes),
            "b_outcomes": list(witness.b_outcomes),
        },
        "strategies_scanned": 4 ** args.n,
    }
    _emit_json(payload, args.summary_out)
    return EXIT_OK


def _cmd_optimal_n(args) -> int:
    if args.n_max < 2:
        raise UsageError(f"--n-max must be >= 2, got {args.n_max}")
    n_star, i_min = optimal_chain_length(args.visibility, args.n_max)
    payload = {
        "command": "optimal-n",
        "config": {"visibility": args.visibility, "n_max": args.n_max},
        "n_star": n_star,
        "i_min": i_min,
    }
    _emit_json(payload, args.summary_out)
    return EXIT_OK


def _cmd_bias_bound(args) -> int:
    try:
        i_value = i_quantum_closed_form(args.n, args.theta, args.visibility)
    except InputError as exc:
        raise UsageError(str(exc)) from exc
    bound = bias_bound(i_value)
    payload = {
        "command": "bias-bound",
        "config": {"n": args.n, "theta": args.theta, "visibility": args.visibility},
        "i_value": i_value,
        "bias_bound": bound,
        "bias_bound_rounded": round(bound, 4),
    }
    _emit_json(payload, args.summary_out)
    return EXIT_OK


def _cmd_timing(args) -> int:
    try:
        event_a = SpacetimeEvent(args.t_a, args.x_a)
        event_b = SpacetimeEvent(args.t_b, args.x_b)
        report = before_before_holds(event_a, event_b, args.beta_a, args.beta_b, args.c)
    except InputError as exc:
        raise UsageError(str(exc)) from exc
    payload = {
        "command": "timing",
        "config": {
            "event_a": {"t": args.t_a, "x": args.x_a},
            "event_b": {"t": args.t_b, "x": args.x_b},
            "beta_a": args.beta_a,
            "beta_b": args.beta_b,
            "c": args.c,
        },
        "spacelike": report.spacelike,
        "before_before": report.holds,
        "a_first_in_a_frame": report.a_first_in_a_frame,
        "b_first_in_b_frame": report.b_first_in_b_frame,
        "times_in_a_frame": list(report.times_in_a_frame),
        "times_in_b_frame": list(report.times_in_b_frame),
        "reason": report.reason,
    }
    if report.spacelike:
        ab = min_speed_for_priority(args.t_b - args.t_a, args.x_b - args.x_a, args.c)
        ba = min_speed_for_priority(args.t_a - args.t_b, args.x_a - args.x_b, args.c)
        payload["priority_thresholds"] = {
            "a_before_b": {"threshold": ab.threshold, "boundary": ab.boundary,
                           "direction": ab.direction},
            "b_before_a": {"threshold": ba.threshold, "boundary": ba.boundary,
                           "direction": ba.direction},
        }
    _emit_json(payload, args.summary_out)
    return EXIT_OK


# --- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chainbell",
        description="Cyclic Bell functional: curves, bounds, simulation, timing.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="flat key=value file providing defaults")
        p.add_argument("--summary-out", help="write the JSON report here instead of stdout")

    p = sub.add_parser("curves", help="closed-form functional curves as CSV")
    p.add_argument("--n-list", default="2,3,4,5,6,7", help="comma separated chain orders")
    p.add_argument("--theta-min", type=float, default=0.0)
    p.add_argument("--theta-max", type=float, default=2 * math.pi)
    p.add_argument("--steps", type=int, default=512)
    p.add_argument("--visibility", type=float, default=1.0)
    p.add_argument("--out", required=True, help="output CSV path")
    add_common(p)
    p.set_defaults(func=_cmd_curves)

    p = sub.add_parser("simulate", help="generate a seeded detection-record stream")
    p.add_argument("--model", default="quantum",
                   choices=["quantum", "nlbox", "lhv", "mixture"])
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--theta", type=float, default=math.pi)
    p.add_argument("--visibility", type=float, default=1.0)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--policy", default=POLICY_CHAIN, choices=list(POLICIES))
    p.add_argument("--interval-ns", type=int, default=1000)
    p.add_argument("--strategy-a", help="sign string like ++- for the A side (lhv/mixture)")
    p.add_argument("--strategy-b", help="sign string for the B side")
    p.add_argument("--mixture", help="components 'A:B:WEIGHT;A:B:WEIGHT;...'")
    p.add_argument("--out", help="write the detection-record CSV here")
    add_common(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("estimate", help="estimate the functional from a record CSV")
    p.add_argument("records", help="detection-record CSV path")
    p.add_argument("--n", type=int)
    p.add_argument("--theta", type=float, default=0.0,
                   help="recorded for provenance only")
    p.add_argument("--pairing", default=MODE_TRIAL, choices=[MODE_TRIAL, MODE_WINDOW])
    p.add_argument("--window-ns", type=int)
    add_common(p)
    p.set_defaults(func=_cmd_estimate, _required=("n",))

    p = sub.add_parser("lhv-bound", help="exhaustive deterministic-strategy minimum")
    p.add_argument("--n", type=int)
    p.add_argument("--theta", type=float, default=0.0)
    add_common(p)
    p.set_defaults(func=_cmd_lhv_bound, _required=("n",))

    p = sub.add_parser("optimal-n", help="chain order minimizing the functional at pi")
    p.add_argument("--visibility", type=float)
    p.add_argument("--n-max", type=int, default=20)
    add_common(p)
    p.set_defaults(func=_cmd_optimal_n, _required=("visibility",))

    p = sub.add_parser("bias-bound", help="closed-form marginal-bias bound I/2")
    p.add_argument("--n", type=int)
    p.add_argument("--theta", type=float)
    p.add_argument("--visibility", type=float, default=1.0)
    add_common(p)
    p.set_defaults(func=_cmd_bias_bound, _required=("n", "theta"))

    p = sub.add_parser("timing", help="frame-dependent event ordering report")
    p.add_argument("--t-a", type=float)
    p.add_argument("--x-a", type=float)
    p.add_argument("--t-b", type=float)
    p.add_argument("--x-b", type=float)
    p.add_argument("--beta-a", type=float)
    p.add_argument("--beta-b", type=float)
    p.add_argument("--c", type=float, default=299_792_458.0)
    add_common(p)
    p.set_defaults(func=_cmd_timing,
                   _required=("t_a", "x_a", "t_b", "x_b", "beta_a", "beta_b"))

    return parser


def _load_config_file(path: str) -> dict[str, str]:
    values = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _apply_config_defaults(parser: argparse.ArgumentParser, argv: list[str],
                           args: argparse.Namespace) -> argparse.Namespace:
    """Use config-file entries as defaults, keeping explicit flags dominant."""
    file_values = _load_config_file(args.config)
    subparser = None
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            subparser = action.choices[args.command]
            break
    known = {}
    for action in subparser._actions:
        if action.dest in file_values:
            raw = file_values.pop(action.dest)
            try:
                known[action.dest] = action.type(raw) if action.type else raw
            except (TypeError, ValueError) as exc:
                raise UsageError(f"config key {action.dest}: bad value {raw!r}") from exc
    if file_values:
        raise UsageError(f"config file has unknown keys: {', '.join(sorted(file_values))}")
    subparser.set_defaults(**known)
    return parser.parse_args(argv)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "config", None):
            args = _apply_config_defaults(parser, argv, args)
        missing = [name for name in getattr(args, "_required", ())
                   if getattr(args, name) is None]
        if missing:
            flags = ", ".join("--" + name.replace("_", "-") for name in missing)
            raise UsageError(f"missing required option(s): {flags}")
        return args.func(args)
    except UsageError as exc:
        return _fail(str(exc), EXIT_USAGE)


if __name__ == "__main__":
    sys.exit(main())
