"""Command-line experiment runner.

Every subcommand reads optional settings from ``--config FILE`` (a JSON
object keyed by flag name with dashes turned into underscores); flags given
on the command line win over the file, which wins over built-in defaults.

Exit codes: 0 ok, 1 replay mismatch, 2 usage or invalid parameters,
3 resource budget exceeded. ``WIRETAP_OT_WORKERS`` sets the worker pool size.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import capacity as cap
from .analysis import code_entropy_experiment, exact_leakage, monte_carlo_leakage
from .analysis.leakage import ATOM_BUDGET, N_MAX_EXACT
from .channel import ChannelParams, DiscreteBroadcastChannel, bec_pair_as_broadcast
from .errors import BudgetExceeded, TooLarge
from .protocol import (
    ProtocolParams,
    public_parameters,
    replay_record,
    run_protocol,
    run_record,
    trial_inputs,
    trial_params,
)

SCHEMA_VERSION = 1
WORKERS_ENV = "WIRETAP_OT_WORKERS"

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3

CAPACITY_COLUMNS = [
    "eps1",
    "eps2",
    "c2p",
    "c1p",
    "bound_IXY_given_Z",
    "bound_HX_given_YZ",
    "bound_HX_given_Y",
    "bound_half_eps2",
]

PROTOCOL_DEFAULTS = {
    "eps1": 0.5,
    "eps2": 0.5,
    "n": 2000,
    "rate": 0.2,
    "delta": 0.1,
    "mode": "2p",
    "regime": None,
    "seed": 0,
    "public_seed": None,
}

DEFAULTS = {
    "simulate": {**PROTOCOL_DEFAULTS, "trials": 1000, "records": None},
    "capacity": {"eps1": None, "eps2": None, "grid": None, "tol": None},
    "bounds": {"eps1": 0.5, "eps2": 0.5, "channel": None, "tol": None},
    "leakage": {
        **PROTOCOL_DEFAULTS,
        "n": 6,
        "rate": 1 / 6,
        "method": "exact",
        "trials": 10_000,
        "n_max_exact": N_MAX_EXACT,
        "budget": ATOM_BUDGET,
    },
    "code-entropy": {
        "n": 20,
        "r": 0.4,
        "r_prime": 0.7,
        "beta": 0.2,
        "codes": 200,
        "subsets": 100,
        "seed": 0,
        "ensemble": "iid",
    },
    "replay": {"record": None},
}


class UsageError(Exception):
    pass


def workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        value = int(raw)
    except ValueError as exc:
        raise UsageError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from exc
    if value < 1:
        raise UsageError(f"{WORKERS_ENV} must be positive")
    return value


def _pool_map(fn, items: list) -> list:
    """Ordered map, parallel when the worker count is above one."""
    count = workers()
    if count == 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=count) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * count))))


# ---------------------------------------------------------------------------
# argument handling


def _protocol_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--eps1", type=float, help="Bob's erasure probability")
    p.add_argument("--eps2", type=float, help="Eve's erasure probability")
    p.add_argument("--n", type=int, help="blocklength")
    p.add_argument("--rate", type=float, help="string rate r, so m = ceil(n r)")
    p.add_argument("--delta", type=float, help="slack in (0, 1)")
    p.add_argument("--mode", choices=["2p", "1p"])
    p.add_argument("--regime", choices=["unerased", "mixed", "erased"], help="force the 1p regime")
    p.add_argument("--seed", type=int)
    p.add_argument("--public-seed", type=int, help="seed of the public code and hash (default: --seed)")


def _common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file of default settings")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=["json", "csv"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wiretap-ot", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    S = argparse.SUPPRESS

    p = sub.add_parser("simulate", help="run protocol trials", argument_default=S)
    _protocol_flags(p)
    p.add_argument("--trials", type=int)
    p.add_argument("--records", help="also write one replayable JSON record per trial (JSON Lines)")
    _common_flags(p)

    p = sub.add_parser("capacity", help="closed-form capacities next to their outer bounds", argument_default=S)
    p.add_argument("--eps1", type=float)
    p.add_argument("--eps2", type=float)
    p.add_argument("--grid", type=int, help="sweep an N x N grid over [0, 1]^2")
    p.add_argument("--tol", type=float)
    _common_flags(p)

    p = sub.add_parser("bounds", help="outer bounds of a general broadcast channel", argument_default=S)
    p.add_argument("--eps1", type=float)
    p.add_argument("--eps2", type=float)
    p.add_argument("--channel", help="JSON file with input_size, output_pairs, pmf")
    p.add_argument("--tol", type=float)
    _common_flags(p)

    p = sub.add_parser("leakage", help="exact or Monte Carlo leakage", argument_default=S)
    _protocol_flags(p)
    p.add_argument("--method", choices=["exact", "mc"])
    p.add_argument("--trials", type=int)
    p.add_argument("--n-max-exact", type=int)
    p.add_argument("--budget", type=float)
    _common_flags(p)

    p = sub.add_parser("code-entropy", help="restricted entropy of random codes", argument_default=S)
    p.add_argument("--n", type=int)
    p.add_argument("--r", type=float)
    p.add_argument("--r-prime", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--codes", type=int)
    p.add_argument("--subsets", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--ensemble", choices=["iid", "linear"])
    _common_flags(p)

    p = sub.add_parser("replay", help="re-run recorded transcripts and re-check decoding", argument_default=S)
    p.add_argument("record", help="JSON record or JSON Lines file from simulate --records")
    _common_flags(p)
    return parser


def resolve_config(args: argparse.Namespace) -> dict:
    """Merge defaults, the config file and explicit flags, in rising priority."""
    given = vars(args).copy()
    command = given.pop("command")
    cfg = dict(DEFAULTS[command])
    cfg.update({"out": None, "format": "json"})
    path = given.pop("config", None)
    if path is not None:
        try:
            with open(path) as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise UsageError("config file must hold a JSON object")
        unknown = set(loaded) - set(cfg)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(loaded)
    cfg.update(given)
    return cfg


def _protocol_params(cfg: dict) -> ProtocolParams:
    for key in ("eps1", "eps2"):
        if cfg[key] is None or not 0.0 <= cfg[key] <= 1.0:
            raise UsageError(f"{key} must lie in [0, 1]")
    if cfg["rate"] <= 0:
        raise UsageError("rate must be positive")
    return ProtocolParams(
        n=cfg["n"],
        r=cfg["rate"],
        delta=cfg["delta"],
        eps=ChannelParams(cfg["eps1"], cfg["eps2"]),
        mode=cfg["mode"],
        seed=cfg["seed"],
        public_seed=cfg["public_seed"],
        regime=cfg["regime"],
    )


# ---------------------------------------------------------------------------
# output


def _csv_text(command: str, columns: list[str], rows: list[dict]) -> str:
    buf = io.StringIO()
    buf.write(f"# wiretap-ot {command} schema v{SCHEMA_VERSION}\n")
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: "" if row.get(k) is None else row[k] for k in columns})
    return buf.getvalue()


def _json_text(command: str, payload: dict) -> str:
    return json.dumps({"schema_version": SCHEMA_VERSION, "command": command, **payload}, indent=2, sort_keys=True) + "\n"


def _emit(cfg: dict, text: str) -> None:
    if cfg.get("out"):
        with open(cfg["out"], "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands


def _simulate_trial(job: tuple) -> dict:
    p, t, with_record = job
    c, k0, k1 = trial_inputs(p, t)
    out = run_protocol(trial_params(p, t), c, k0, k1, public_parameters(p))
    row = {"trial": t, "c": c, "J": out.J, "decoded_ok": None}
    if out.J == 1:
        row["decoded_ok"] = bool(np.array_equal(out.khat_c, (k0, k1)[c]))
    if with_record:
        row["record"] = run_record(trial_params(p, t), c, k0, k1, out)
    return row


def cmd_simulate(cfg: dict) -> int:
    p = _protocol_params(cfg)
    if cfg["trials"] < 0:
        raise UsageError("trials must be nonnegative")
    jobs = [(p, t, cfg["records"] is not None) for t in range(cfg["trials"])]
    rows = _pool_map(_simulate_trial, jobs)
    if cfg["records"] is not None:
        with open(cfg["records"], "w") as fh:
            for row in rows:
                fh.write(json.dumps(row.pop("record"), sort_keys=True) + "\n")
    j1 = sum(r["J"] for r in rows)
    failures = sum(1 for r in rows if r["J"] == 1 and not r["decoded_ok"])
    aggregate = {
        "params": p.to_dict(),
        "m": p.m,
        "s": p.s,
        "k": p.k,
        "trials": len(rows),
        "j1_trials": j1,
        "j1_fraction": j1 / len(rows) if rows else None,
        "decode_failures": failures,
    }
    if cfg["format"] == "csv":
        _emit(cfg, _csv_text("simulate", ["trial", "c", "J", "decoded_ok"], rows))
    else:
        _emit(cfg, _json_text("simulate", {"aggregate": aggregate, "per_trial": rows}))
    return EXIT_OK


def _capacity_point(job: tuple) -> dict:
    e1, e2, tol = job
    return cap.capacity_report(ChannelParams(e1, e2), tol=tol).to_dict()


def cmd_capacity(cfg: dict) -> int:
    if cfg["grid"] is not None:
        if cfg["grid"] < 2:
            raise UsageError("grid needs at least 2 points per axis")
        axis = np.linspace(0.0, 1.0, cfg["grid"])
        jobs = [(float(a), float(b), cfg["tol"]) for a in axis for b in axis]
    else:
        if cfg["eps1"] is None or cfg["eps2"] is None:
            raise UsageError("give --eps1 and --eps2, or --grid")
        jobs = [(cfg["eps1"], cfg["eps2"], cfg["tol"])]
    for e1, e2, _ in jobs:
        if not (0 <= e1 <= 1 and 0 <= e2 <= 1):
            raise UsageError("erasure probabilities must lie in [0, 1]")
    rows = _pool_map(_capacity_point, jobs)
    if cfg["format"] == "csv":
        _emit(cfg, _csv_text("capacity", CAPACITY_COLUMNS, rows))
    elif len(rows) == 1:
        _emit(cfg, _json_text("capacity", rows[0]))
    else:
        _emit(cfg, _json_text("capacity", {"rows": rows}))
    return EXIT_OK


def cmd_bounds(cfg: dict) -> int:
    if cfg["channel"] is not None:
        try:
            with open(cfg["channel"]) as fh:
                ch = DiscreteBroadcastChannel.from_dict(json.load(fh))
        except (OSError, json.JSONDecodeError, KeyError) as exc:
            raise UsageError(f"cannot read channel {cfg['channel']}: {exc}") from exc
        source = {"channel": ch.to_dict()}
    else:
        eps = ChannelParams(cfg["eps1"], cfg["eps2"])
        ch = bec_pair_as_broadcast(eps)
        source = {"eps1": eps.eps1, "eps2": eps.eps2}
    bounds = cap.outer_bounds(ch, cfg["tol"])
    if cfg["format"] == "csv":
        cols = ["bound_IXY_given_Z", "bound_HX_given_YZ", "bound_HX_given_Y"]
        _emit(cfg, _csv_text("bounds", cols, [bounds]))
    else:
        _emit(cfg, _json_text("bounds", {**source, **bounds}))
    return EXIT_OK


LEAKAGE_COLUMNS = [
    "method",
    "n",
    "m",
    "trials",
    "p_j1",
    "i_c_given_aliceview",
    "i_kcbar_given_bob_eve",
    "i_kcbar_given_bob",
    "i_keys_choice_given_eve",
]


def cmd_leakage(cfg: dict) -> int:
    p = _protocol_params(cfg)
    if cfg["method"] == "exact":
        report = exact_leakage(p, n_max_exact=cfg["n_max_exact"], budget=cfg["budget"])
    else:
        report = monte_carlo_leakage(p, cfg["trials"])
    data = report.to_dict()
    if cfg["format"] == "csv":
        cols = LEAKAGE_COLUMNS + [f"stderr_{f}" for f in LEAKAGE_COLUMNS[5:]]
        row = dict(data)
        for key, value in (data["stderr"] or {}).items():
            row[f"stderr_{key}"] = value
        _emit(cfg, _csv_text("leakage", cols, [row]))
    else:
        _emit(cfg, _json_text("leakage", data))
    return EXIT_OK


def cmd_code_entropy(cfg: dict) -> int:
    if cfg["codes"] < 0 or cfg["subsets"] < 0:
        raise UsageError("codes and subsets must be nonnegative")
    report = code_entropy_experiment(
        cfg["n"], cfg["r"], cfg["r_prime"], cfg["beta"], cfg["codes"], cfg["subsets"], cfg["seed"], cfg["ensemble"]
    )
    data = report.to_dict()
    if cfg["format"] == "csv":
        _emit(cfg, _csv_text("code-entropy", list(data), [data]))
    else:
        _emit(cfg, _json_text("code-entropy", data))
    return EXIT_OK


def cmd_replay(cfg: dict) -> int:
    try:
        with open(cfg["record"]) as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {cfg['record']}: {exc}") from exc
    try:
        records = [json.loads(text)]
    except json.JSONDecodeError:
        try:
            records = [json.loads(line) for line in text.splitlines() if line.strip()]
        except json.JSONDecodeError as exc:
            raise UsageError(f"malformed record file: {exc}") from exc
    results = []
    for i, rec in enumerate(records):
        try:
            ok, reason = replay_record(rec)
        except (KeyError, ValueError, TypeError) as exc:
            ok, reason = False, f"malformed record: {exc}"
        results.append({"index": i, "ok": ok, "reason": reason})
    mismatches = sum(not r["ok"] for r in results)
    if cfg["format"] == "csv":
        _emit(cfg, _csv_text("replay", ["index", "ok", "reason"], results))
    else:
        _emit(cfg, _json_text("replay", {"records": len(results), "mismatches": mismatches, "results": results}))
    return EXIT_MISMATCH if mismatches else EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "capacity": cmd_capacity,
    "bounds": cmd_bounds,
    "leakage": cmd_leakage,
    "code-entropy": cmd_code_entropy,
    "replay": cmd_replay,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except (TooLarge, BudgetExceeded) as exc:
        print(f"wiretap-ot: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (UsageError, ValueError, TypeError) as exc:
        print(f"wiretap-ot: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
