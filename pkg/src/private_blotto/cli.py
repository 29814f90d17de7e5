"""Command-line front end.

Exit status: 0 on success, 1 on a domain error (its class name goes to stderr),
2 on malformed input (bad flags, unreadable files, unparsable documents).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import analysis, constructive, scan, stability
from .errors import BlottoError, InvalidArrangement, InvalidInstance
from .model import Arrangement, Instance, Outcome, as_number, dumps_instance, instance_from_dict, number_to_json

WORKERS_ENV = "PRIVATE_BLOTTO_WORKERS"


class InputError(Exception):
    """Malformed user input; maps to exit status 2."""


# ---------------------------------------------------------------- input helpers

def _number(text: str):
    try:
        return as_number(text)
    except (InvalidInstance, TypeError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _cu(text: str):
    return "auto" if text == "auto" else _number(text)


def _weights(text: str):
    return tuple(_number(w) for w in text.split(","))


def _load(path: str, cu_override=None) -> Instance:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise InputError(f"{path}: expected a JSON object")
    cost = cu_override if cu_override is not None else data.get("unlabeled_cost", 0)
    if cost == "auto":
        try:
            biases = [c["bias"] for c in data["classes"] if int(c["count"]) > 0]
            cost = constructive.auto_unlabeled_cost(biases, data.get("weights"))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"{path}: malformed instance document: {exc}") from None
    data = {**data, "unlabeled_cost": cost}
    try:
        return instance_from_dict(data)
    except InvalidInstance as exc:
        raise InputError(str(exc)) from None


def _arrangement(text: str, instance: Instance) -> Arrangement:
    try:
        return Arrangement.from_text(text, instance.num_classes)
    except InvalidArrangement as exc:
        raise InputError(str(exc)) from None


def _workers(args) -> int:
    if args.workers is not None:
        return args.workers
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise InputError(f"{WORKERS_ENV} must be an integer, got {env!r}") from None
    return 1


def _emit(args, record: dict, lines: list[str]) -> None:
    if args.json:
        print(json.dumps(record, sort_keys=True))
    else:
        for line in lines:
            print(line)


# ---------------------------------------------------------------- commands

def cmd_check(args) -> int:
    inst = _load(args.instance, args.cu)
    arr = _arrangement(args.arrangement, inst)
    report = stability.is_stable(inst, arr)
    lines = ["STABLE" if report.stable else "UNSTABLE"]
    if report.witness:
        lines.append(f"witness: {report.witness}")
    _emit(args, {"arrangement": arr.to_text(), "stable": report.stable,
                 "witness": report.witness.to_dict() if report.witness else None}, lines)
    return 0


def cmd_enumerate(args) -> int:
    inst = _load(args.instance, args.cu)
    found = stability.find_stable(inst, args.mode, budget=args.budget,
                                  symmetric=args.symmetric, workers=_workers(args))
    texts = [a.to_text() for a in found]
    _emit(args, {"count": len(found), "mode": args.mode, "arrangements": texts},
          [f"{len(found)} stable arrangements", *texts])
    return 0


CONSTRUCTORS = {
    "many-agents": constructive.construct_many_agents,
    "tie-based": constructive.construct_tie_based,
    "high-misallocation": analysis.construct_high_misallocation,
}


def cmd_construct(args) -> int:
    if args.regime == "weighted-mean":
        w1, w2, arr = constructive.stabilizing_weights(args.n_a, args.n_b)
        record = {"arrangement": arr.to_text(), "weights": [number_to_json(w1), number_to_json(w2)],
                  "outcome": "mean", "stable": True}
        lines = [arr.to_text(), f"weights: {w1}, {w2}", "certificate: STABLE (no improving move)"]
        _emit(args, record, lines)
        return 0
    build = constructive.construct_median_stable if args.regime == "auto" else CONSTRUCTORS[args.regime]
    arr = build(args.n_a, args.n_b, args.m)
    _emit(args, {"arrangement": arr.to_text(), "outcome": "median", "stable": True},
          [arr.to_text(), "certificate: STABLE (no improving move)"])
    return 0


def cmd_dynamics(args) -> int:
    inst = _load(args.instance, args.cu)
    start = _arrangement(args.start, inst)
    traj = stability.best_response_dynamics(inst, start, args.policy, args.max_steps)
    lines = [f"0: {traj.states[0]}"]
    for k, (move, state) in enumerate(zip(traj.moves, traj.states[1:]), 1):
        lines.append(f"{k}: {state}  [{move}]")
    tail = f"terminal: {traj.terminal.value} after {len(traj.moves)} moves"
    if traj.cycle_start is not None:
        tail += f" (cycle returns to state {traj.cycle_start})"
    lines.append(tail)
    _emit(args, {"terminal": traj.terminal.value, "cycle_start": traj.cycle_start,
                 "states": [s.to_text() for s in traj.states],
                 "moves": [m.to_dict() for m in traj.moves]}, lines)
    return 0


def cmd_scenario(args) -> int:
    kind = args.kind
    if args.cu == "auto" and kind != "three-agent":
        raise InputError("scenarios fix their own unlabeled cost; pass an explicit value or omit --cu")
    if kind in ("no-ne-median", "no-ne-mean"):
        if args.n is None or args.m is None:
            raise InputError(f"{kind} needs --n and --m")
        make = analysis.scenario_no_ne_median if kind == "no-ne-median" else analysis.scenario_no_ne_mean
        inst = make(args.n, args.m) if args.cu is None else make(args.n, args.m, args.cu)
    elif kind == "weighted-median":
        inst = analysis.scenario_weighted_median_unstable(args.epsilon)
    else:
        if args.gap is None or args.cu in (None, "auto"):
            raise InputError("three-agent needs --gap and an explicit --cu")
        inst = analysis.three_agent_instance(args.gap, args.cu, args.m or 4)
    text = dumps_instance(inst)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_analyze(args) -> int:
    inst = _load(args.instance, args.cu)
    arr = _arrangement(args.arrangement, inst)
    effort = analysis.misallocated_effort(inst, arr)
    close = analysis.check_close_to_proportional(inst, arr)
    stable = stability.is_stable(inst, arr).stable
    lines = [
        f"arrangement: {arr}",
        f"misallocated effort: {effort.misallocated_effort}",
        f"close to proportional: {'yes' if close else 'no'}",
        f"stable: {'yes' if stable else 'no'}",
    ]
    _emit(args, {
        "arrangement": arr.to_text(),
        "misallocated_effort": number_to_json(effort.misallocated_effort),
        "per_item_deviation": [[number_to_json(v) for v in row] for row in effort.per_item_deviation],
        "close_to_proportional": close,
        "stable": stable,
    }, lines)
    return 0


def cmd_scan(args) -> int:
    if args.weights and len(args.weights) != args.items:
        raise InputError(f"--weights needs {args.items} values")
    region = scan.scan_region(args.items, args.outcome, args.n_max, args.weights, args.cu,
                              workers=_workers(args), budget=args.budget)
    doc = scan.export_region(region, args.format)
    if args.out:
        Path(args.out).write_text(doc)
    else:
        sys.stdout.write(doc)
    return 0


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print a machine-readable JSON record")
    cu = argparse.ArgumentParser(add_help=False)
    cu.add_argument("--cu", type=_cu, default=None,
                    help="unlabeled cost override: a number, 'p/q', or 'auto' (1.1x the empty-item threshold)")
    par = argparse.ArgumentParser(add_help=False)
    par.add_argument("--workers", type=int, default=None,
                     help=f"worker processes (default: ${WORKERS_ENV} or 1)")

    parser = argparse.ArgumentParser(prog="private-blotto", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common, cu], help="test one arrangement for stability")
    p.add_argument("instance")
    p.add_argument("arrangement", help="e.g. '2x0,1x1;1x0;0'")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("enumerate", parents=[common, cu, par], help="exhaustive stable-arrangement search")
    p.add_argument("instance")
    p.add_argument("--mode", choices=[m.value for m in stability.SearchMode], default="all")
    p.add_argument("--symmetric", action="store_true", help="one representative per item permutation")
    p.add_argument("--budget", type=int, default=stability.DEFAULT_BUDGET)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("construct", parents=[common], help="build a certified stable arrangement")
    p.add_argument("n_a", type=int)
    p.add_argument("n_b", type=int)
    p.add_argument("m", type=int)
    p.add_argument("--regime", choices=["auto", *CONSTRUCTORS, "weighted-mean"], default="auto")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("dynamics", parents=[common, cu], help="run best-response dynamics")
    p.add_argument("instance")
    p.add_argument("start")
    p.add_argument("--policy", choices=[q.value for q in stability.Policy], default="first")
    p.add_argument("--max-steps", type=int, default=1000)
    p.set_defaults(func=cmd_dynamics)

    p = sub.add_parser("scenario", parents=[cu], help="emit a generated instance file")
    p.add_argument("kind", choices=["no-ne-median", "no-ne-mean", "weighted-median", "three-agent"])
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--gap", type=_number)
    p.add_argument("--epsilon", type=_number, default=as_number("1/10"))
    p.add_argument("--out")
    p.set_defaults(func=cmd_scenario)

    p = sub.add_parser("analyze", parents=[common, cu], help="misallocated effort and proportionality")
    p.add_argument("instance")
    p.add_argument("arrangement")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("scan", parents=[par], help="existence map over (n_a, n_b)")
    p.add_argument("--items", type=int, required=True)
    p.add_argument("--outcome", choices=[o.value for o in Outcome], default="median")
    p.add_argument("--n-max", type=int, default=11)
    p.add_argument("--weights", type=_weights)
    p.add_argument("--cu", type=_cu, default="auto")
    p.add_argument("--format", choices=["csv", "jsonl"], default="csv")
    p.add_argument("--out")
    p.add_argument("--budget", type=int, default=scan.CELL_BUDGET)
    p.set_defaults(func=cmd_scan)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BlottoError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
