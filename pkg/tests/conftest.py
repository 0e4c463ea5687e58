"""Shared fixtures and independent oracles used across the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from mqap import Instance, Solution, dominates


def random_instance(rng: np.random.Generator, n: int, m: int, hi: int = 50) -> Instance:
    distances = rng.integers(0, hi + 1, (n, n))
    flows = tuple(rng.integers(0, hi + 1, (n, n)) for _ in range(m))
    return Instance(n=n, distances=distances, flows=flows)


def naive_objectives(instance: Instance, perm) -> tuple[int, ...]:
    """Triple-loop cost sums, independent of the numpy evaluation path."""
    out = []
    for f in instance.flows:
        total = 0
        for i in range(instance.n):
            for j in range(instance.n):
                total += int(instance.distances[i, j]) * int(f[perm[i], perm[j]])
        out.append(total)
    return tuple(out)


def repeated_filter_ranks(objectives: list[tuple[int, ...]]) -> list[int]:
    """Rank oracle: peel non-dominated subsets one front at a time."""
    remaining = set(range(len(objectives)))
    ranks = [0] * len(objectives)
    rank = 0
    while remaining:
        front = {
            i
            for i in remaining
            if not any(dominates(objectives[j], objectives[i]) for j in remaining if j != i)
        }
        for i in front:
            ranks[i] = rank
        remaining -= front
        rank += 1
    return ranks


def brute_force_non_dominated(objectives: list[tuple[int, ...]]) -> set[tuple[int, ...]]:
    return {
        obj
        for obj in objectives
        if not any(dominates(other, obj) for other in objectives)
    }


def crowding_oracle(front_objs: list[tuple[int, ...]]) -> list[float]:
    """Straightforward crowding re-implementation for cross-checking."""
    size = len(front_objs)
    values = [0.0] * size
    if size == 0:
        return values
    m = len(front_objs[0])
    for r in range(m):
        order = sorted(range(size), key=lambda i: front_objs[i][r])
        values[order[0]] = float("inf")
        values[order[-1]] = float("inf")
        span = front_objs[order[-1]][r] - front_objs[order[0]][r]
        if span <= 0:
            continue
        for pos in range(1, size - 1):
            i = order[pos]
            if values[i] == float("inf"):
                continue
            values[i] += (front_objs[order[pos + 1]][r] - front_objs[order[pos - 1]][r]) / span
    return values


def solution_from_objectives(objectives, perm_seed: int = 0, n: int | None = None) -> Solution:
    """Solution carrying arbitrary objectives (ranking tests don't evaluate)."""
    n = n or max(4, perm_seed % 7 + 4)
    rng = np.random.default_rng(perm_seed)
    return Solution(perm=rng.permutation(n).astype(np.int64), objectives=tuple(objectives))


@pytest.fixture
def np_rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
