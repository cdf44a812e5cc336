"""Command-line front end: config files, experiment commands, schedule files.

Subcommands::

    cransched simulate [--algo greedy-p1] [--seed N] [--dump-schedule FILE]
    cransched compare  --algo optimal,heuristic [--runs N]
    cransched sweep    --gamma-db 0,5,10 --algo greedy-p1,greedy-p2 [--out FILE]
    cransched validate SCHEDULE.json

Exit status: 0 success, 1 usage or config error, 2 infeasible instance or
schedule, 3 solver failure.
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import math
import sys

import numpy as np

from .dp_offline import InstanceTooLarge
from .harness import ALGORITHMS, SweepSpec, aggregate, run_cell, run_once, run_sweep
from .model import (
    Network,
    Request,
    Schedule,
    SlotAssignment,
    StructuralError,
    validate_schedule,
)
from .scenario import (
    DEFAULT_BBU_CAPACITY,
    DEFAULT_FIBER_POWER,
    ScenarioConfig,
    default_network,
    default_rrh_layout,
    make_instance,
)
from .simplex import SolverError

log = logging.getLogger(__name__)

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_SOLVER = 0, 1, 2, 3
SCHEDULE_FORMAT = "cransched-schedule/1"


class ConfigError(ValueError):
    pass


def _floats(text):
    return tuple(float(v) for v in text.split(",") if v.strip())


def _ints(text):
    return tuple(int(v) for v in text.split(",") if v.strip())


def _strs(text):
    return tuple(v.strip() for v in text.split(",") if v.strip())


def _positions(text):
    if text.strip() == "auto":
        return "auto"
    out = []
    for item in _strs(text):
        x, y = item.split(":")
        out.append((float(x), float(y)))
    return tuple(out)


def _optional_ints(text):
    return "all" if text.strip() == "all" else _ints(text)


def _window(text):
    v = _ints(text)
    if len(v) != 2:
        raise ValueError("expected two integers")
    return v


# section -> key -> (parser, default)
SCHEMA = {
    "network": {
        "num_subcarriers": (int, 2),
        "horizon": (int, 3),
        "max_power_dbm": (float, 48.0),
        "activation_power": (float, 130.0),
        "sleep_power": (float, 75.0),
        "fiber_power": (_floats, DEFAULT_FIBER_POWER),
        "rrh_positions": (_positions, "auto"),
        "usable_rrhs": (_optional_ints, "all"),
        "bbu_capacity": (float, DEFAULT_BBU_CAPACITY),
        "bbu_power_per_unit": (float, 1.0),
        "noise_power": (float, 1e-13),
        "weight_rrh": (float, 0.01),
        "weight_bbu": (float, 0.1),
        "vm_base": (float, 5.0),
        "theta": (float, 1.0),
        "epsilon": (float, 0.0),
    },
    "scenario": {
        "radius": (float, 500.0),
        "max_users": (int, 7),
        "arrival_prob": (float, 0.5),
        "min_sinr_db": (float, 0.0),
        "deadline_policy": (str, "end-of-horizon"),
        "deadline_window": (_window, (0, 0)),
        "pathloss_intercept_db": (float, 128.1),
        "pathloss_slope_db": (float, 37.6),
        "arrival_mode": (str, "per-run"),
        "seed": (int, 0),
    },
    "sweep": {
        "algorithms": (_strs, ("greedy-p1", "greedy-p2")),
        "gamma_db_values": (_floats, (0.0, 5.0, 10.0, 15.0, 20.0)),
        "epsilon_values": (_floats, (0.0,)),
        "r_max_values": (_ints, (7,)),
        "runs": (int, 500),
        "base_seed": (int, 0),
        "workers": (int, 1),
    },
}


def default_values() -> dict:
    return {sec: {k: d for k, (_, d) in keys.items()} for sec, keys in SCHEMA.items()}


def _line_of(lines, section, key):
    current = None
    for no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
        elif current == section and line.split("=", 1)[0].split(":", 1)[0].strip().lower() == key:
            return no
    return None


def parse_config(text: str, source: str = "<config>") -> dict:
    """Parse config text into a fully populated ``{section: {key: value}}`` dict.

    ``max_power`` in watts is accepted in place of ``max_power_dbm``.
    Nothing is returned on error; the whole file is rejected.
    """
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    lines = text.splitlines()
    values = default_values()
    for section in cp.sections():
        if section not in SCHEMA:
            raise ConfigError(f"{source}: unknown section [{section}]; valid sections: {', '.join(SCHEMA)}")
        keys = SCHEMA[section]
        for key, raw in cp.items(section):
            lineno = _line_of(lines, section, key)
            where = f"{source}:{lineno}" if lineno else source
            if section == "network" and key == "max_power":
                if cp.has_option(section, "max_power_dbm"):
                    raise ConfigError(f"{where}: give either max_power or max_power_dbm, not both")
                key, raw = "max_power_dbm", None
                try:
                    watts = float(cp.get(section, "max_power"))
                    values[section]["max_power_dbm"] = 10.0 * math.log10(watts * 1000.0)
                except ValueError:
                    raise ConfigError(f"{where}: invalid value for max_power: expected float") from None
                continue
            if key not in keys:
                valid = ", ".join(sorted(keys) + (["max_power"] if section == "network" else []))
                raise ConfigError(f"{where}: unknown key {key!r} in [{section}]; valid keys: {valid}")
            parser = keys[key][0]
            try:
                values[section][key] = parser(raw)
            except ValueError as exc:
                kind = getattr(parser, "__name__", "value").lstrip("_")
                raise ConfigError(f"{where}: invalid value {raw!r} for {key} ({kind}): {exc}") from None
    return values


def _fmt_value(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, int):
        return str(v)
    if v and isinstance(v[0], tuple):
        return ", ".join(f"{x!r}:{y!r}" for x, y in v)
    return ", ".join(_fmt_value(x) for x in v)


def dump_config(values: dict) -> str:
    """Canonical text form: every key, schema order, exact floats."""
    out = []
    for section, keys in SCHEMA.items():
        out.append(f"[{section}]")
        for key in keys:
            out.append(f"{key} = {_fmt_value(values[section][key])}")
        out.append("")
    return "\n".join(out)


def build(values: dict) -> tuple[Network, ScenarioConfig, SweepSpec]:
    """Turn parsed values into model objects; bad combinations raise ConfigError."""
    nv, sv, wv = values["network"], values["scenario"], values["sweep"]
    try:
        layout = default_rrh_layout(sv["radius"]) if nv["rrh_positions"] == "auto" else list(nv["rrh_positions"])
        net = default_network(
            num_subcarriers=nv["num_subcarriers"],
            horizon=nv["horizon"],
            max_power_dbm=nv["max_power_dbm"],
            activation_power=nv["activation_power"],
            sleep_power=nv["sleep_power"],
            fiber_power=nv["fiber_power"],
            layout=layout,
            bbu_capacity=nv["bbu_capacity"],
            bbu_power_per_unit=nv["bbu_power_per_unit"],
            noise_power=nv["noise_power"],
            weight_rrh=nv["weight_rrh"],
            weight_bbu=nv["weight_bbu"],
            vm_base=nv["vm_base"],
            theta=nv["theta"],
            epsilon=nv["epsilon"],
        )
        if nv["usable_rrhs"] != "all":
            net = net.with_rrhs(nv["usable_rrhs"])
        scenario = ScenarioConfig(
            radius=sv["radius"],
            max_users=sv["max_users"],
            arrival_prob=sv["arrival_prob"],
            min_sinr_db=sv["min_sinr_db"],
            deadline_policy=sv["deadline_policy"],
            deadline_window=sv["deadline_window"],
            rrh_layout=tuple(r.position for r in net.rrhs),
            pathloss_intercept_db=sv["pathloss_intercept_db"],
            pathloss_slope_db=sv["pathloss_slope_db"],
            arrival_mode=sv["arrival_mode"],
            seed=sv["seed"],
        )
        sweep = SweepSpec(
            algorithms=wv["algorithms"],
            gamma_db_values=wv["gamma_db_values"],
            epsilon_values=wv["epsilon_values"],
            r_max_values=wv["r_max_values"],
            runs=wv["runs"],
            base_seed=wv["base_seed"],
        )
    except (ValueError, KeyError) as exc:
        raise ConfigError(str(exc)) from None
    return net, scenario, sweep


def read_config(path) -> dict:
    if path is None:
        return default_values()
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    return parse_config(text, source=str(path))


def load_config(path) -> tuple[Network, ScenarioConfig, SweepSpec]:
    return build(read_config(path))


# schedule files


def schedule_to_dict(schedule: Schedule, requests, network: Network) -> dict:
    return {
        "format": SCHEDULE_FORMAT,
        "rrh_ids": network.rrh_ids,
        "num_subcarriers": network.num_subcarriers,
        "horizon": network.horizon,
        "requests": [
            {
                "id": r.id,
                "user_id": r.user_id,
                "arrival_slot": r.arrival_slot,
                "window_len": r.window_len,
                "min_sinr": r.min_sinr,
                "resources": r.resources,
                "gains": r.gains.tolist(),
            }
            for r in requests
        ],
        "slots": [
            {"active": s.active.tolist(), "alloc": s.alloc.tolist(), "power": s.power.tolist()}
            for s in schedule.slots
        ],
        "satisfied": sorted(schedule.satisfied),
    }


def schedule_from_dict(data: dict) -> tuple[Schedule, list[Request], dict]:
    if data.get("format") != SCHEDULE_FORMAT:
        raise StructuralError(f"not a schedule file (format {data.get('format')!r})")
    try:
        requests = [
            Request(
                int(r["id"]),
                int(r["user_id"]),
                int(r["arrival_slot"]),
                int(r["window_len"]),
                float(r["min_sinr"]),
                float(r["resources"]),
                np.asarray(r["gains"], float),
            )
            for r in data["requests"]
        ]
        slots = [
            SlotAssignment(np.asarray(s["alloc"], bool), np.asarray(s["active"], bool), np.asarray(s["power"], float))
            for s in data["slots"]
        ]
        meta = {k: data[k] for k in ("rrh_ids", "num_subcarriers", "horizon")}
    except (KeyError, TypeError) as exc:
        raise StructuralError(f"malformed schedule file: {exc}") from None
    return Schedule(tuple(slots), frozenset(data.get("satisfied", ()))), requests, meta


# commands


def _apply_overrides(values: dict, args) -> dict:
    nv, sv, wv = values["network"], values["scenario"], values["sweep"]
    if args.usable_rrhs is not None:
        nv["usable_rrhs"] = args.usable_rrhs
    if args.subcarriers is not None:
        nv["num_subcarriers"] = args.subcarriers
    if args.horizon is not None:
        nv["horizon"] = args.horizon
    if args.epsilon is not None:
        nv["epsilon"] = args.epsilon[0]
        wv["epsilon_values"] = args.epsilon
    if args.r_max is not None:
        sv["max_users"] = args.r_max[0]
        wv["r_max_values"] = args.r_max
    if args.gamma_db is not None:
        sv["min_sinr_db"] = args.gamma_db[0]
        wv["gamma_db_values"] = args.gamma_db
    if args.algo is not None:
        wv["algorithms"] = args.algo
    if args.seed is not None:
        sv["seed"] = args.seed
        wv["base_seed"] = args.seed
    if args.runs is not None:
        wv["runs"] = args.runs
    if args.workers is not None:
        wv["workers"] = args.workers
    return values


def _emit(text: str, path) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def cmd_simulate(args, values) -> int:
    net, scenario, _ = build(values)
    algo = values["sweep"]["algorithms"][0]
    requests = make_instance(scenario, net)
    m = run_once(requests, algo, net)
    print(f"algo={algo} seed={scenario.seed} gamma_db={scenario.min_sinr_db:g} requests={len(requests)}")
    if not m.feasible:
        print("infeasible: no schedule meets every deadline")
        return EXIT_INFEASIBLE
    bd = m.breakdown
    print(f"weighted_cost_w={m.weighted_cost:.6g}")
    print(f"tx_w={bd.tx:.6g} activation_w={bd.rrh_activation:.6g} bbu_w={bd.bbu:.6g}")
    print(f"satisfied={len(m.schedule.satisfied)}/{len(requests)} ratio={m.satisfied_ratio:.6g}")
    print("activation " + " ".join(f"rrh{i}={a:.6g}" for i, a in zip(net.rrh_ids, m.rrh_activation)))
    if args.dump_schedule:
        with open(args.dump_schedule, "w", encoding="utf-8") as fh:
            json.dump(schedule_to_dict(m.schedule, requests, net), fh)
    return EXIT_OK


def cmd_compare(args, values) -> int:
    net, scenario, spec = build(values)
    seeds = range(spec.base_seed, spec.base_seed + spec.runs)
    workers = values["sweep"]["workers"]
    print(f"gamma_db={scenario.min_sinr_db:g} r_max={scenario.max_users} runs={spec.runs} rrhs={net.rrh_ids}")
    print(f"{'algo':<10} {'feasible':>8} {'mean_cost_w':>12} {'stderr':>9} {'satisfied':>9}  activation")
    for algo in spec.algorithms:
        agg = aggregate(run_cell(algo, scenario, net, seeds, workers), net.num_rrhs)
        act = " ".join(f"{a:.3f}" for a in agg["activation"])
        print(
            f"{algo:<10} {agg['runs']:>8d} {agg['mean_cost_w']:>12.6g} {agg['stderr_cost_w']:>9.3g}"
            f" {agg['satisfied_ratio']:>9.4f}  {act}"
        )
    return EXIT_OK


def cmd_sweep(args, values) -> int:
    net, scenario, spec = build(values)
    result = run_sweep(spec, scenario, net, workers=values["sweep"]["workers"])
    for params, reason in result.skipped:
        print(f"skipped {params}: {reason}", file=sys.stderr)
    _emit(result.to_csv(), args.out)
    return EXIT_OK


def cmd_validate(args, values) -> int:
    net, _, _ = build(values)
    try:
        with open(args.schedule, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read schedule: {exc}") from None
    schedule, requests, meta = schedule_from_dict(data)
    if meta["rrh_ids"] != net.rrh_ids:
        try:
            net = net.with_rrhs(meta["rrh_ids"])
        except (ValueError, KeyError) as exc:
            raise StructuralError(f"schedule RRHs {meta['rrh_ids']} not in the configured network: {exc}") from None
    net = net.replace(num_subcarriers=meta["num_subcarriers"], horizon=meta["horizon"])
    violations = validate_schedule(schedule, requests, net, require_all=args.require_all)
    for v in violations:
        print(f"{v.kind} slot={v.slot} request={v.request_id} rrh={v.rrh_id} magnitude={v.magnitude:.6g}")
    print(f"{len(violations)} violation(s)")
    return EXIT_INFEASIBLE if violations else EXIT_OK


def _list_of(conv):
    def parse(text):
        try:
            vals = tuple(conv(v) for v in text.split(",") if v.strip())
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid list {text!r}") from None
        if not vals:
            raise argparse.ArgumentTypeError("empty list")
        return vals

    return parse


def _algos(text):
    vals = _list_of(str)(text)
    bad = [a for a in vals if a not in ALGORITHMS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown algorithm(s) {bad}; choose from {', '.join(ALGORITHMS)}")
    return vals


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="sectioned key=value config file")
    common.add_argument("--gamma-db", type=_list_of(float), help="SINR target(s) in dB, comma separated")
    common.add_argument("--algo", type=_algos, help=f"algorithm(s): {', '.join(ALGORITHMS)}")
    common.add_argument("--r-max", type=_list_of(int), help="potential users per run, comma separated")
    common.add_argument("--usable-rrhs", type=_list_of(int), help="ids of the RRHs that may be switched on")
    common.add_argument("--subcarriers", type=int)
    common.add_argument("--horizon", type=int)
    common.add_argument("--epsilon", type=_list_of(float), help="orthogonality threshold(s)")
    common.add_argument("--seed", type=int, help="instance seed (simulate) or first seed (compare, sweep)")
    common.add_argument("--runs", type=int)
    common.add_argument("--workers", type=int, help="worker processes for compare and sweep")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="cransched", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("simulate", parents=[common], help="one seeded run of one algorithm")
    p.add_argument("--dump-schedule", metavar="FILE", help="write the schedule as JSON")
    p.set_defaults(func=cmd_simulate)
    p = sub.add_parser("compare", parents=[common], help="algorithms side by side on shared seeds")
    p.set_defaults(func=cmd_compare)
    p = sub.add_parser("sweep", parents=[common], help="parameter sweep to CSV")
    p.add_argument("--out", metavar="FILE", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_sweep)
    p = sub.add_parser("validate", parents=[common], help="check a schedule file for violations")
    p.add_argument("schedule")
    p.add_argument("--require-all", action="store_true", help="also flag unscheduled requests")
    p.set_defaults(func=cmd_validate)
    p = sub.add_parser("config", parents=[common], help="print the effective config")
    p.set_defaults(func=lambda args, values: print(dump_config(values), end="") or EXIT_OK)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        values = _apply_overrides(read_config(args.config), args)
        return args.func(args, values)
    except (ConfigError, StructuralError, InstanceTooLarge) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
