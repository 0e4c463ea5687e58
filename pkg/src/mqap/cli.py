"""Command line front end.

Subcommands: ``run`` (multi-trial island experiments), ``compare``
(hypervolume and rank-sum report across result directories), ``enumerate``
(exact front of a small instance), ``gen`` (instance generation) and ``hv``
(standalone hypervolume of a front file).  Options may come from a
``key=value`` config file; explicit flags win.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from . import runner
from .instance import InstanceFormatError, InstanceSpec, generate_uniform, save_instance
from .island import MEMETIC, NSGA2
from .metrics import hypervolume, normalize_fronts, reference_point
from .runner import (
    ExperimentConfig,
    compare_result_sets,
    enumerate_front,
    load_result_set,
    run_experiment,
    write_front_file,
)

RUN_CONFIG_KEYS = {
    "instance": str,
    "gen_spec": str,
    "algorithm": str,
    "islands": int,
    "trials": int,
    "seed": int,
    "generations": int,
    "time_budget_secs": float,
    "epoch": int,
    "migrants": int,
    "pc": float,
    "pm": float,
    "ls_secs": float,
    "population": int,
    "archive_capacity": int,
    "tournament_k": int,
    "out": str,
    "parallel_trials": int,
}


def parse_config_file(path) -> dict:
    """Line-oriented key=value options; '#' starts a comment."""
    options = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {raw!r} is not key=value")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in RUN_CONFIG_KEYS:
            raise ValueError(f"unknown config key {key!r}")
        options[key] = RUN_CONFIG_KEYS[key](value.strip())
    return options


def parse_gen_spec(text: str) -> InstanceSpec:
    """Comma-separated generator spec, e.g. 'n=30,m=2,correlation=0,seed=7'."""
    fields = {}
    for part in text.split(","):
        key, _, value = part.partition("=")
        fields[key.strip()] = value.strip()
    return InstanceSpec(
        n=int(fields["n"]),
        m=int(fields["m"]),
        correlation=float(fields.get("correlation", 0.0)),
        seed=int(fields.get("seed", 0)),
        max_value=int(fields.get("max_value", 100)),
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mqap")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a multi-trial island experiment")
    run_p.add_argument("--config", help="key=value config file; flags override it")
    run_p.add_argument("--instance", help="instance file to solve")
    run_p.add_argument("--gen-spec", help="generate the instance instead, e.g. n=30,m=2,correlation=0,seed=7")
    run_p.add_argument("--algorithm", choices=[MEMETIC, NSGA2])
    run_p.add_argument("--islands", type=int)
    run_p.add_argument("--trials", type=int)
    run_p.add_argument("--seed", type=int)
    run_p.add_argument("--generations", type=int)
    run_p.add_argument("--time-budget-secs", type=float)
    run_p.add_argument("--epoch", type=int)
    run_p.add_argument("--migrants", type=int)
    run_p.add_argument("--pc", type=float)
    run_p.add_argument("--pm", type=float)
    run_p.add_argument("--ls-secs", type=float)
    run_p.add_argument("--population", type=int)
    run_p.add_argument("--archive-capacity", type=int)
    run_p.add_argument("--tournament-k", type=int)
    run_p.add_argument("--parallel-trials", type=int)
    run_p.add_argument("--out")

    cmp_p = sub.add_parser("compare", help="compare result directories on one instance")
    cmp_p.add_argument("result_dirs", nargs="+")
    cmp_p.add_argument("--alpha", type=float, default=0.05)
    cmp_p.add_argument("--csv", help="write per-trial hypervolumes to this CSV file")

    enum_p = sub.add_parser("enumerate", help="exact front of a small instance")
    enum_p.add_argument("--instance", required=True)
    enum_p.add_argument("--out", help="front file to write (default: stdout)")

    gen_p = sub.add_parser("gen", help="generate a uniform instance file")
    gen_p.add_argument("--n", type=int, required=True)
    gen_p.add_argument("--m", type=int, required=True)
    gen_p.add_argument("--correlation", type=float, default=0.0)
    gen_p.add_argument("--seed", type=int, default=0)
    gen_p.add_argument("--max-value", type=int, default=100)
    gen_p.add_argument("--out", required=True)

    hv_p = sub.add_parser("hv", help="hypervolume of one front file")
    hv_p.add_argument("--front", required=True)
    hv_p.add_argument("--ref", help="comma-separated reference point (default: normalize)")
    hv_p.add_argument("--offset", type=float, default=0.01)
    return parser


_RUN_FIELDS = {
    # flag/config key -> ExperimentConfig attribute
    "instance": "instance_path",
    "algorithm": "algorithm",
    "islands": "island_count",
    "trials": "trials",
    "seed": "base_seed",
    "generations": "generations",
    "time_budget_secs": "time_budget",
    "epoch": "epoch",
    "migrants": "migrants",
    "pc": "pb_c",
    "pm": "pb_m",
    "ls_secs": "ls_secs",
    "population": "population",
    "archive_capacity": "archive_capacity",
    "tournament_k": "tournament_k",
    "out": "output_dir",
    "parallel_trials": "parallel_trials",
}


def _experiment_config(args: argparse.Namespace) -> ExperimentConfig:
    options = parse_config_file(args.config) if args.config else {}
    for key in _RUN_FIELDS:
        value = getattr(args, key, None)
        if value is not None:
            options[key] = value
    gen_spec = options.pop("gen_spec", None)
    if getattr(args, "gen_spec", None) is not None:
        gen_spec = args.gen_spec
    kwargs = {_RUN_FIELDS[key]: value for key, value in options.items()}
    if gen_spec is not None:
        kwargs["gen_spec"] = parse_gen_spec(gen_spec)
    return ExperimentConfig(**kwargs)


def cmd_run(args) -> int:
    config = _experiment_config(args)
    result = run_experiment(config)
    print(
        f"instance {result.instance_name}: {len(result.trials)} trial(s), "
        f"{result.algorithm} x {result.island_count} island(s) -> {result.output_dir}"
    )
    for rec in result.trials:
        print(
            f"  trial {rec.trial} seed {rec.seed}: front {rec.front_size} "
            f"({rec.front_file}, {rec.wall_time:.2f}s)"
        )
    return 0


def cmd_compare(args) -> int:
    sets = [load_result_set(d) for d in args.result_dirs]
    rows = compare_result_sets(sets, alpha=args.alpha)
    for row in rows:
        print(f"instance {row.instance} (mean normalized hypervolume)")
        for idx, (label, mean) in enumerate(zip(row.labels, row.means)):
            flag = " *" if idx == row.best_index else ""
            print(f"  {label:24s} {mean:.4f}{flag}")
        for a, b, p, significant in row.pairwise:
            if p is None:
                print(f"  rank-sum {a} vs {b}: p=n/a (needs >=3 trials per side)")
                continue
            verdict = f"significant at {args.alpha:g}" if significant else "not significant"
            print(f"  rank-sum {a} vs {b}: p={p:.4f} ({verdict})")
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(["instance", "label", "trial", "hypervolume"])
            for row in rows:
                for label, hvs in zip(row.labels, row.per_trial):
                    for trial, value in enumerate(hvs):
                        writer.writerow([row.instance, label, trial, f"{value:.6f}"])
        print(f"per-trial hypervolumes written to {args.csv}")
    return 0


def cmd_enumerate(args) -> int:
    instance = runner.load_instance_checked(args.instance)
    front = enumerate_front(instance)
    header = {"instance": instance.name or "unnamed", "exact": "true"}
    if args.out:
        write_front_file(args.out, front, header)
        print(f"exact front of {len(front)} solution(s) written to {args.out}")
    else:
        for key, value in header.items():
            print(f"! {key}={value}")
        for line in runner.front_lines(front):
            print(line)
    return 0


def cmd_gen(args) -> int:
    spec = InstanceSpec(
        n=args.n,
        m=args.m,
        correlation=args.correlation,
        seed=args.seed,
        max_value=args.max_value,
    )
    instance = generate_uniform(spec)
    save_instance(instance, args.out)
    print(f"wrote {instance.name} to {args.out}")
    return 0


def cmd_hv(args) -> int:
    _, rows = runner.read_front_file(args.front)
    points = [tuple(float(v) for v in obj) for _, obj in rows]
    if not points:
        print("front file holds no points", file=sys.stderr)
        return 1
    if args.ref:
        ref = tuple(float(v) for v in args.ref.split(","))
    else:
        (points,), _ = normalize_fronts([points])
        ref = reference_point(points, args.offset)
    print(f"{hypervolume(points, ref):.6f}")
    return 0


_COMMANDS = {
    "run": cmd_run,
    "compare": cmd_compare,
    "enumerate": cmd_enumerate,
    "gen": cmd_gen,
    "hv": cmd_hv,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (
        InstanceFormatError,
        runner.InstanceLoadError,
        runner.InstanceMismatchError,
        runner.OutputWriteError,
        runner.TooLargeError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
