"""Command-line front end.

Every subcommand writes one JSON report (or a CSV series with
``--format csv``) and exits 0 when its criterion is met, 2 when it is
evaluated and not met, 1 on any operational error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Any, Callable

import numpy as np

from . import __version__
from .accuracy import accuracy_report, depolarizing_closed_forms, max_depolarizing_parameter
from .distributions import ExponentialModel, hellinger_discrete
from .errors import QStabilityError
from .quantum import (
    apply_channel,
    basis_state,
    bernstein_vazirani_unitary,
    depolarize_each_qubit,
    depolarizing,
    evolve,
    measure_distribution,
    readout_z,
    pure_state,
)
from .reliability import (
    DEFAULT_THRESHOLD,
    addressability,
    compare_windows,
    duty_cycle,
    load_calibration,
    metric_window,
    spatial_spread,
)
from .reproducibility import (
    ReproducibilitySpec,
    min_exponential_rate,
    parameter_bound_probability,
    predicted_probability,
    simulate_instances,
)
from .stability import (
    ErrorParameterProcess,
    depolarizing_functional,
    drift_hellinger,
    expected_output,
    max_hellinger_nonstationarity,
    printed_bound,
    quoted_depolarizing_phi,
    printed_drift_hellinger,
    printed_horizon,
    phi,
    stability_check,
    stable_time_horizon,
)

EXIT_OK, EXIT_ERROR, EXIT_FAIL = 0, 1, 2

# options that only choose where output goes; not echoed into reports
_OUTPUT_KEYS = {"out", "format", "csv", "config", "func"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _jsonable(x: Any) -> Any:
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.floating, float)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    return x


def _complex(text: str) -> complex:
    try:
        return complex(str(text).replace(" ", ""))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from exc


def _window(text: str) -> tuple[int, int]:
    try:
        a, b = str(text).split(":")
        return int(a), int(b)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"window must be START:END in epoch seconds, got {text!r}") from exc


def _state_from(args):
    alpha, beta = args.alpha, args.beta
    return pure_state([alpha, beta]), alpha, beta


def cmd_accuracy(args) -> tuple[dict, list[dict], bool]:
    state, alpha, beta = _state_from(args)
    ch = depolarizing(args.e, allow_unphysical=args.allow_unphysical)
    rep = accuracy_report(state, ch, readout_z(), args.epsilon)
    results = rep.to_dict()
    if args.e <= 0.75:
        cf = depolarizing_closed_forms(alpha, beta, args.e)
        results["closed_forms"] = {
            "hellinger": cf.hellinger,
            "observable_error": cf.observable_error,
            "hellinger_fallback": cf.fallback,
        }
    bound = max_depolarizing_parameter(args.epsilon)
    results["max_depolarizing_parameter"] = {"value": bound.value, "clamped": bound.clamped}
    checks = {
        "hellinger": [rep.accurate_hellinger],
        "observable": [rep.accurate_observable],
        "both": [rep.accurate_hellinger, rep.accurate_observable],
    }[args.criterion]
    ok = all(checks)
    results["criterion"] = args.criterion
    q = measure_distribution(state).probs
    p = measure_distribution(apply_channel(state, ch)).probs
    series = [{"outcome": k, "ideal": q[k], "noisy": p[k]} for k in range(2)]
    return results, series, ok


def cmd_reproduce(args) -> tuple[dict, list[dict], bool]:
    state, alpha, beta = _state_from(args)
    model = ExponentialModel(args.rate)
    spec = ReproducibilitySpec(args.epsilon, args.delta, args.instances, args.shots, args.truncation)
    res = simulate_instances(state, readout_z(), model, spec, args.seed)
    b2 = abs(beta) ** 2
    results = res.to_dict()
    results.update(
        {
            "rate": args.rate,
            "min_exponential_rate": min_exponential_rate(args.epsilon, args.delta),
            "parameter_bound_probability": parameter_bound_probability(model, args.epsilon, b2),
            "predicted_probability": predicted_probability(model, args.epsilon, b2, args.truncation),
            "mean_error": float(res.error_samples.mean()),
        }
    )
    series = [
        {"instance": i, "e": e, "d_O": d}
        for i, (e, d) in enumerate(zip(res.error_parameters, res.error_samples))
    ]
    return results, series, res.verdict


def _default_windows(snaps) -> tuple[tuple[int, int], tuple[int, int]]:
    if len(snaps) < 2:
        raise QStabilityError("need at least two snapshots to form default windows")
    ts = [s.timestamp for s in snaps]
    half = len(ts) // 2
    return (ts[0], ts[half - 1]), (ts[half], ts[-1])


def cmd_reliability(args) -> tuple[dict, list[dict], bool]:
    snaps = load_calibration(args.input)
    w1r, w2r = (args.window1, args.window2) if args.window1 and args.window2 else _default_windows(snaps)
    w1 = metric_window(snaps, args.metric, args.qubit, w1r)
    w2 = metric_window(snaps, args.metric, args.qubit, w2r)
    verdict = compare_windows(w1, w2, args.threshold)

    def window_info(w):
        return {
            "range": [w.start, w.end],
            "samples": int(w.samples.size),
            "mean": float(w.samples.mean()) if w.samples.size else None,
            "fit": None if w.fit is None else {"a": w.fit.a, "b": w.fit.b},
            "flag": w.flag,
        }

    latest = snaps[-1]
    spreads = []
    for s in snaps:
        sp = spatial_spread(s, args.metric)
        spreads.append({"timestamp": s.timestamp, "min": sp.min, "max": sp.max, "mean": sp.mean, "std": sp.std})
    pairs = [
        {"timestamp": s.timestamp, "a": p.a, "b": p.b, "mutual_information_bits": addressability(p.counts)}
        for s in snaps
        for p in s.pairs
        if sum(p.counts.values()) > 0
    ]
    results = {
        "verdict": verdict.to_dict(),
        "window1": window_info(w1),
        "window2": window_info(w2),
        "spatial_spread": spreads,
        "addressability": pairs,
        "duty_cycle_latest": {str(q.index): duty_cycle(latest, q.index) for q in latest.qubits},
    }
    grid = np.linspace(0.0005, 0.9995, 1000)
    series = [
        {"x": x, "window1_pdf": float(w1.fit.pdf(x)), "window2_pdf": float(w2.fit.pdf(x))}
        for x in grid
    ]
    results["per_qubit_latest"] = [
        {
            "qubit": q.index,
            "init_fidelity": q.init_fidelity,
            "gate_fidelity": q.gate_fidelity,
            "t1_s": q.t1_s,
            "t2_s": q.t2_s,
            "gate_duration_s": q.gate_duration_s,
        }
        for q in latest.qubits
    ]
    return results, series, verdict.stationary


def cmd_stability(args) -> tuple[dict, list[dict], bool]:
    proc = ErrorParameterProcess(args.rate0, args.eta, args.t0)
    t1, t2 = args.t1, args.t2
    grid = np.linspace(min(t1, t2), max(t1, t2), args.grid)
    for t in grid:
        proc.rate(t)  # fail fast on an expired drift model
    fn = depolarizing_functional(args.beta_sq, args.domain_upper)
    report = stability_check(proc, t1, t2, fn, args.epsilon)
    phi_res = phi(args.epsilon, fn)
    d_max = args.d_max if args.d_max is not None else max_hellinger_nonstationarity(phi_res.phi)
    horizon = stable_time_horizon(proc, d_max) if d_max < 1 or proc.eta == 0 else stable_time_horizon(proc, 1.0)

    phi_quoted = quoted_depolarizing_phi(args.epsilon)
    bound_quoted = printed_bound(phi_quoted)
    bound_printed_derived_phi = printed_bound(phi_res.phi)
    results = {
        "stability": report.to_dict(),
        "phi": phi_res.phi,
        "c": phi_res.c,
        "normalized_integral": phi_res.normalized_integral,
        "d_max": d_max,
        "d_max_source": "flag" if args.d_max is not None else "derived",
        "horizon": {
            "duration": horizon.duration,
            "rate_end": horizon.rate_end,
            "capped": horizon.capped,
            "infinite": horizon.infinite,
        },
        "drift_hellinger_at_horizon": (
            drift_hellinger(proc, proc.t0, horizon.duration)
            if math.isfinite(horizon.duration) and not horizon.capped
            else None
        ),
        "formula_variants": {
            "phi_derived": phi_res.phi,
            "phi_quoted": phi_quoted,
            "bound_derived": max_hellinger_nonstationarity(phi_res.phi),
            "bound_printed_with_derived_phi": bound_printed_derived_phi,
            "bound_printed_with_quoted_phi": bound_quoted,
            "horizon_derived": horizon.duration,
            "horizon_printed": printed_horizon(args.rate0, args.eta, bound_quoted),
            "drift_hellinger_printed_at_horizon": (
                printed_drift_hellinger(args.rate0, args.eta, horizon.duration)
                if math.isfinite(horizon.duration)
                else None
            ),
        },
    }
    series = [{"t": t, "rate": proc.rate(t), "expected_output": expected_output(proc, t, fn)} for t in grid]
    return results, series, report.verdict


def cmd_demo_bv(args) -> tuple[dict, list[dict], bool]:
    secret = args.secret
    u = bernstein_vazirani_unitary(secret)
    n = len(secret)
    ideal = evolve(basis_state("0" * n), u)
    noisy = depolarize_each_qubit(ideal, args.e) if args.e > 0 else ideal
    q = measure_distribution(ideal).probs
    p = measure_distribution(noisy).probs
    d = hellinger_discrete(p, q)
    labels = [format(k, f"0{n}b") for k in range(2**n)]
    modal = labels[int(np.argmax(p))]
    results = {
        "secret": secret,
        "hellinger": d,
        "epsilon": args.epsilon,
        "accurate": d <= args.epsilon,
        "modal_outcome": modal,
        "secret_is_modal": modal == secret,
        "p_secret": float(p[int(secret, 2)]),
    }
    series = [{"outcome": lab, "ideal": q[k], "noisy": p[k]} for k, lab in enumerate(labels)]
    return results, series, d <= args.epsilon


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--csv", help="also write the plot series as CSV to this path")
    common.add_argument("--epsilon", type=float, default=0.1)
    common.add_argument("--delta", type=float, default=0.05)
    common.add_argument("--config", help="JSON file of option values; command-line flags take precedence")

    parser = _Parser(prog="qstability", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def state_opts(p):
        p.add_argument("--alpha", type=_complex, default=complex(1.0))
        p.add_argument("--beta", type=_complex, default=complex(0.0))

    p = sub.add_parser("accuracy", parents=[common], help="epsilon-accuracy of a depolarized qubit")
    state_opts(p)
    p.add_argument("--e", type=float, default=0.0, help="depolarizing parameter")
    p.add_argument("--allow-unphysical", action="store_true", help="accept e in (3/4, 1]")
    p.add_argument("--criterion", choices=("hellinger", "observable", "both"), default="both")
    p.set_defaults(func=cmd_accuracy)

    p = sub.add_parser("reproduce", parents=[common], help="Monte Carlo reproducibility test")
    state_opts(p)
    p.add_argument("--rate", type=float, required=False, default=None, help="exponential rate of e")
    p.add_argument("--instances", type=int, default=10000)
    p.add_argument("--shots", type=int, default=0, help="0 means exact expectations")
    p.add_argument("--truncation", choices=("resample", "pass-through"), default="resample")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("reliability", parents=[common], help="calibration window stationarity")
    p.add_argument("--input", required=False, default=None, help="calibration JSON document")
    p.add_argument("--metric", default="init_fidelity")
    p.add_argument("--qubit", type=int, default=0)
    p.add_argument("--window1", type=_window, help="START:END epoch seconds")
    p.add_argument("--window2", type=_window, help="START:END epoch seconds")
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.set_defaults(func=cmd_reliability)

    p = sub.add_parser("stability", parents=[common], help="output stability under channel drift")
    p.add_argument("--rate0", type=float, default=40.0)
    p.add_argument("--eta", type=float, default=0.0)
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--t1", type=float, default=0.0)
    p.add_argument("--t2", type=float, default=1.0)
    p.add_argument("--beta-sq", type=float, default=1.0, help="|beta|^2 of the probed state")
    p.add_argument("--domain-upper", type=float, default=0.75, help="upper e-limit for phi")
    p.add_argument("--d-max", type=float, default=None, help="override the derived Hellinger bound")
    p.add_argument("--grid", type=int, default=21)
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("demo-bv", parents=[common], help="simulated Bernstein-Vazirani run")
    p.add_argument("--secret", default="1011")
    p.add_argument("--e", type=float, default=0.0, help="per-qubit depolarizing parameter")
    p.set_defaults(func=cmd_demo_bv)
    return parser


def _config_tokens(sub: argparse.ArgumentParser, cfg: dict) -> list[str]:
    actions = {a.dest: a for a in sub._actions if a.option_strings}
    tokens = []
    for key, value in cfg.items():
        dest = key.replace("-", "_")
        if dest not in actions or dest in ("config", "help"):
            raise UsageError(f"unknown config key {key!r}")
        flag = actions[dest].option_strings[-1]
        if isinstance(actions[dest], argparse._StoreTrueAction):
            if value:
                tokens.append(flag)
        else:
            tokens += [flag, str(value)]
    return tokens


def parse_args(argv) -> argparse.Namespace:
    """Parse flags; a ``--config`` file supplies values that flags override."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise UsageError("config file must hold a JSON object")
        sub = parser._subparsers._group_actions[0].choices[args.command]
        at = argv.index(args.command) + 1
        args = parser.parse_args(argv[:at] + _config_tokens(sub, cfg) + argv[at:])
    if args.command == "reproduce" and args.rate is None:
        raise UsageError("reproduce needs --rate")
    if args.command == "reliability" and args.input is None:
        raise UsageError("reliability needs --input")
    return args


def _series_csv(series: list[dict]) -> str:
    buf = io.StringIO()
    if series:
        w = csv.DictWriter(buf, fieldnames=list(series[0]), lineterminator="\n")
        w.writeheader()
        for row in series:
            w.writerow({k: _jsonable(v) for k, v in row.items()})
    return buf.getvalue()


def run(argv=None) -> tuple[int, str]:
    """Execute one CLI invocation; returns (exit code, text written to the main output)."""
    try:
        args = parse_args(argv)
        func: Callable = args.func
        results, series, ok = func(args)
    except UsageError as exc:
        print(f"qstability: error: {exc}", file=sys.stderr)
        return EXIT_ERROR, ""
    except (QStabilityError, ValueError, KeyError, OSError, TypeError) as exc:
        print(f"qstability: error: {exc}", file=sys.stderr)
        return EXIT_ERROR, ""

    config = {k: v for k, v in sorted(vars(args).items()) if k not in _OUTPUT_KEYS}
    report = {
        "tool": "qstability",
        "version": __version__,
        "command": args.command,
        "seed": args.seed,
        "config": config,
        "results": results,
        "criterion_met": bool(ok),
    }
    if args.format == "json":
        report["series"] = series
        text = json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n"
    else:
        text = _series_csv(series)
    try:
        if args.csv:
            with open(args.csv, "w", encoding="utf-8", newline="") as fh:
                fh.write(_series_csv(series))
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"qstability: error: {exc}", file=sys.stderr)
        return EXIT_ERROR, text
    return (EXIT_OK if ok else EXIT_FAIL), text


def main(argv=None) -> int:
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
