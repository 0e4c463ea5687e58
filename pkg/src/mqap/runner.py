"""Experiment orchestration: trials, output files, enumeration, comparison.

A run produces one front file per trial plus a manifest; a comparison
pools result directories on the same instance into shared normalization
bounds and reports mean normalized hypervolume and rank-sum p-values.
"""

from __future__ import annotations

import itertools
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import metrics
from .evaluation import Solution
from .instance import Instance, InstanceFormatError, InstanceSpec, generate_uniform, load_instance
from .island import MEMETIC, IslandConfig, IslandStats, run_fleet
from .genetics import VariationParams
from .localsearch import LocalSearchParams

MANIFEST_NAME = "manifest.json"
REFERENCE_OFFSET = 0.01
ENUMERATION_LIMIT = 10


class InstanceLoadError(ValueError):
    pass


class OutputWriteError(OSError):
    pass


class TooLargeError(ValueError):
    pass


class InstanceMismatchError(ValueError):
    pass


def load_instance_checked(path) -> Instance:
    try:
        return load_instance(path)
    except (OSError, InstanceFormatError) as exc:
        raise InstanceLoadError(f"cannot load {path}: {exc}") from exc


def default_population_size(island_count: int) -> int:
    """Split a 100-individual budget across islands, floored at 13 for large fleets."""
    if island_count > 11:
        return 13
    return math.ceil(100 / island_count)


def trial_seed(base_seed: int, trial_index: int) -> int:
    return base_seed + trial_index


def island_seed(trial_seed: int, island_id: int) -> int:
    return trial_seed * 1000 + island_id


@dataclass
class ExperimentConfig:
    instance_path: str | None = None
    gen_spec: InstanceSpec | None = None
    algorithm: str = MEMETIC
    island_count: int = 1
    trials: int = 30
    base_seed: int = 1
    generations: int = 100
    time_budget: float | None = 300.0
    epoch: int = 5
    migrants: int = 2
    pb_c: float = 0.9
    pb_m: float = 0.01
    ls_secs: float = 5.0
    population: int | None = None
    archive_capacity: int = 100
    tournament_k: int = 2
    output_dir: str = "results"
    parallel_trials: int = 1

    def __post_init__(self):
        if self.trials < 1 or self.island_count < 1:
            raise ValueError("trials and island_count must be >= 1")
        if self.instance_path is None and self.gen_spec is None:
            raise ValueError("either an instance path or a generator spec is required")
        if self.time_budget is not None and self.time_budget <= 0:
            self.time_budget = None

    def resolve_instance(self) -> Instance:
        if self.instance_path is not None:
            return load_instance_checked(self.instance_path)
        return generate_uniform(self.gen_spec)

    def island_configs(self, trial_index: int) -> list[IslandConfig]:
        n_p = self.population or default_population_size(self.island_count)
        seed = trial_seed(self.base_seed, trial_index)
        return [
            IslandConfig(
                island_id=i,
                population_size=n_p,
                epoch=self.epoch,
                migrants=self.migrants,
                g_max=self.generations,
                variation=VariationParams(pb_c=self.pb_c, pb_m=self.pb_m),
                ls_params=LocalSearchParams(t_max=self.ls_secs),
                algorithm=self.algorithm,
                seed=island_seed(seed, i),
                time_budget=self.time_budget,
                archive_capacity=self.archive_capacity,
                tournament_k=self.tournament_k,
            )
            for i in range(self.island_count)
        ]


@dataclass
class TrialRecord:
    trial: int
    seed: int
    front_file: str
    front_size: int
    wall_time: float
    islands: list[IslandStats]


@dataclass
class RunResult:
    instance_name: str
    algorithm: str
    island_count: int
    base_seed: int
    output_dir: str
    trials: list[TrialRecord] = field(default_factory=list)


def front_lines(solutions: list[Solution]) -> list[str]:
    rows = sorted(
        (tuple(sol.objectives), tuple(int(v) for v in sol.perm)) for sol in solutions
    )
    return [
        " ".join(str(v) for v in perm) + " | " + " ".join(str(v) for v in obj)
        for obj, perm in rows
    ]


def write_front_file(path, solutions: list[Solution], header: dict[str, str]) -> None:
    lines = [f"! {key}={value}" for key, value in header.items()]
    lines.extend(front_lines(solutions))
    try:
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise OutputWriteError(f"cannot write {path}: {exc}") from exc


def read_front_file(path) -> tuple[dict[str, str], list[tuple[tuple[int, ...], tuple[int, ...]]]]:
    """Returns (header metadata, [(perm, objectives), ...])."""
    header: dict[str, str] = {}
    rows = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        stripped = line.strip()
        if not stripped:
            continue
        if not stripped[0].isdigit():
            if stripped.startswith("!") and "=" in stripped:
                key, _, value = stripped[1:].strip().partition("=")
                header[key.strip()] = value.strip()
            continue
        perm_part, _, obj_part = stripped.partition("|")
        perm = tuple(int(v) for v in perm_part.split())
        objectives = tuple(int(v) for v in obj_part.split())
        rows.append((perm, objectives))
    return header, rows


def run_experiment(config: ExperimentConfig, clock=time.monotonic) -> RunResult:
    instance = config.resolve_instance()
    out_dir = Path(config.output_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputWriteError(f"cannot create {out_dir}: {exc}") from exc

    result = RunResult(
        instance_name=instance.name or "unnamed",
        algorithm=config.algorithm,
        island_count=config.island_count,
        base_seed=config.base_seed,
        output_dir=str(out_dir),
    )

    def one_trial(index: int) -> TrialRecord:
        fleet = run_fleet(instance, config.island_configs(index), clock)
        name = f"trial_{index:04d}.front"
        write_front_file(
            out_dir / name,
            fleet.front,
            {
                "instance": result.instance_name,
                "algorithm": config.algorithm,
                "islands": str(config.island_count),
                "seed": str(trial_seed(config.base_seed, index)),
            },
        )
        return TrialRecord(
            trial=index,
            seed=trial_seed(config.base_seed, index),
            front_file=name,
            front_size=len(fleet.front),
            wall_time=fleet.wall_time,
            islands=[r.stats for r in fleet.islands],
        )

    indices = range(config.trials)
    if config.parallel_trials > 1:
        with ThreadPoolExecutor(max_workers=config.parallel_trials) as pool:
            records = list(pool.map(one_trial, indices))
    else:
        records = [one_trial(i) for i in indices]
    result.trials = sorted(records, key=lambda r: r.trial)

    manifest = {
        "instance": result.instance_name,
        "algorithm": result.algorithm,
        "islands": result.island_count,
        "trials": config.trials,
        "base_seed": config.base_seed,
        "generations": config.generations,
        "epoch": config.epoch,
        "migrants": config.migrants,
        "trial_records": [
            {
                "trial": rec.trial,
                "seed": rec.seed,
                "front_file": rec.front_file,
                "front_size": rec.front_size,
                "wall_time": rec.wall_time,
                "islands": [
                    {
                        "island_id": st.island_id,
                        "generations": st.generations,
                        "migrants_sent": st.migrants_sent,
                        "migrants_received": st.migrants_received,
                        "send_events": st.send_events,
                        "wall_time": st.wall_time,
                    }
                    for st in rec.islands
                ],
            }
            for rec in result.trials
        ],
    }
    try:
        (out_dir / MANIFEST_NAME).write_text(
            json.dumps(manifest, indent=2) + "\n", encoding="utf-8"
        )
    except OSError as exc:
        raise OutputWriteError(f"cannot write manifest: {exc}") from exc
    return result


def _nd_compress(objs: np.ndarray, perms: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Drop rows whose objective vector is strictly dominated (ties kept)."""
    order = np.argsort(objs.sum(axis=1), kind="stable")
    objs, perms = objs[order], perms[order]
    i = 0
    while i < objs.shape[0]:
        keep = np.ones(objs.shape[0], dtype=bool)
        tail = objs[i + 1 :]
        keep[i + 1 :] = np.any(tail < objs[i], axis=1) | np.all(tail == objs[i], axis=1)
        objs, perms = objs[keep], perms[keep]
        i += 1
    return objs, perms


def enumerate_front(
    instance: Instance, limit: int = ENUMERATION_LIMIT, chunk: int = 20000
) -> list[Solution]:
    """Exact non-dominated set by full permutation enumeration (n <= limit)."""
    if instance.n > limit:
        raise TooLargeError(
            f"enumeration of n={instance.n} exceeds the n<={limit} guard"
        )
    d = instance.distances
    best_objs = np.empty((0, instance.m), dtype=np.int64)
    best_perms = np.empty((0, instance.n), dtype=np.int64)
    perm_iter = itertools.permutations(range(instance.n))
    while True:
        batch = list(itertools.islice(perm_iter, chunk))
        if not batch:
            break
        perms = np.array(batch, dtype=np.int64)
        objs = np.stack(
            [
                (d[None, :, :] * f[perms[:, :, None], perms[:, None, :]]).sum(axis=(1, 2))
                for f in instance.flows
            ],
            axis=1,
        )
        objs, perms = _nd_compress(objs, perms)
        best_objs = np.concatenate([best_objs, objs])
        best_perms = np.concatenate([best_perms, perms])
        best_objs, best_perms = _nd_compress(best_objs, best_perms)
    return [
        Solution(perm=perm.copy(), objectives=tuple(int(v) for v in obj))
        for obj, perm in zip(best_objs, best_perms)
    ]


@dataclass
class ResultSet:
    label: str
    directory: str
    instance: str
    algorithm: str
    islands: int
    fronts: list[list[tuple[float, ...]]]
    seeds: list[int]


@dataclass
class ComparisonRow:
    instance: str
    labels: list[str]
    means: list[float]
    per_trial: list[list[float]]
    best_index: int
    # (label_a, label_b, p_value or None when too few trials, significant)
    pairwise: list[tuple[str, str, float | None, bool]]


def load_result_set(directory) -> ResultSet:
    path = Path(directory)
    manifest_path = path / MANIFEST_NAME
    if not manifest_path.exists():
        raise InstanceLoadError(f"{directory} has no {MANIFEST_NAME}")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    fronts = []
    seeds = []
    for rec in manifest["trial_records"]:
        _, rows = read_front_file(path / rec["front_file"])
        fronts.append([tuple(float(v) for v in obj) for _, obj in rows])
        seeds.append(rec["seed"])
    return ResultSet(
        label=f"{manifest['algorithm']}/{manifest['islands']}",
        directory=str(path),
        instance=manifest["instance"],
        algorithm=manifest["algorithm"],
        islands=manifest["islands"],
        fronts=fronts,
        seeds=seeds,
    )


def compare_result_sets(
    sets: list[ResultSet], alpha: float = 0.05
) -> list[ComparisonRow]:
    """Hypervolume comparison rows, one per instance.

    All fronts of the same instance share normalization bounds and one
    reference point derived from the pooled global non-dominated set.
    """
    by_instance: dict[str, list[ResultSet]] = {}
    for rs in sets:
        by_instance.setdefault(rs.instance, []).append(rs)
    for instance_name, group in by_instance.items():
        if len(group) < 2:
            raise InstanceMismatchError(
                f"instance {instance_name!r} appears in only one result set; "
                "nothing to compare it against"
            )

    rows = []
    for instance_name in sorted(by_instance):
        group = by_instance[instance_name]
        flat_fronts = [front for rs in group for front in rs.fronts]
        normalized, _ = metrics.normalize_fronts(flat_fronts)
        global_front = metrics.non_dominated([p for front in normalized for p in front])
        ref = metrics.reference_point(global_front, REFERENCE_OFFSET)

        per_trial: list[list[float]] = []
        cursor = 0
        for rs in group:
            count = len(rs.fronts)
            per_trial.append(
                [metrics.hypervolume(front, ref) for front in normalized[cursor : cursor + count]]
            )
            cursor += count

        means = [sum(hv) / len(hv) for hv in per_trial]
        labels = _disambiguated_labels(group)
        pairwise = []
        for a, b in itertools.combinations(range(len(group)), 2):
            if len(per_trial[a]) < 3 or len(per_trial[b]) < 3:
                p = None  # rank-sum needs at least 3 trials per side
            else:
                try:
                    _, p = metrics.wilcoxon_rank_sum(per_trial[a], per_trial[b])
                except metrics.DegenerateSampleError:
                    p = 1.0
            pairwise.append((labels[a], labels[b], p, p is not None and p < alpha))
        rows.append(
            ComparisonRow(
                instance=instance_name,
                labels=labels,
                means=means,
                per_trial=per_trial,
                best_index=max(range(len(means)), key=means.__getitem__),
                pairwise=pairwise,
            )
        )
    return rows


def _disambiguated_labels(group: list[ResultSet]) -> list[str]:
    labels = [rs.label for rs in group]
    seen: dict[str, int] = {}
    out = []
    for label in labels:
        seen[label] = seen.get(label, 0) + 1
        out.append(label if labels.count(label) == 1 else f"{label}#{seen[label]}")
    return out
