"""Variation and selection operators on permutations.

All randomness flows through an explicit ``random.Random`` so operator
outputs are reproducible per island.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .evaluation import Solution

Rng = random.Random


@dataclass(frozen=True)
class VariationParams:
    pb_c: float = 0.9
    pb_m: float = 0.01

    def __post_init__(self):
        if not (0.0 <= self.pb_c <= 1.0 and 0.0 <= self.pb_m <= 1.0):
            raise ValueError("probabilities must lie in [0, 1]")


def cycle_crossover(p1: np.ndarray, p2: np.ndarray, rng: Rng | None = None):
    """Cycle crossover producing two children.

    Positions are partitioned into cycles (closed position loops traced by
    matching values across the two parents).  Cycles are copied alternately:
    the cycle containing position 0 goes parent1 -> child1, the next
    unassigned cycle parent2 -> child1, and so on, so every child position
    keeps the value one parent held there.
    """
    p1 = np.asarray(p1, dtype=np.int64)
    p2 = np.asarray(p2, dtype=np.int64)
    if len(p1) != len(p2):
        raise ValueError("parents must have equal length")
    n = len(p1)
    pos_in_p1 = np.empty(n, dtype=np.int64)
    pos_in_p1[p1] = np.arange(n)

    c1 = np.empty(n, dtype=np.int64)
    c2 = np.empty(n, dtype=np.int64)
    assigned = np.zeros(n, dtype=bool)
    from_p1 = True
    for start in range(n):
        if assigned[start]:
            continue
        pos = start
        while not assigned[pos]:
            assigned[pos] = True
            if from_p1:
                c1[pos], c2[pos] = p1[pos], p2[pos]
            else:
                c1[pos], c2[pos] = p2[pos], p1[pos]
            pos = int(pos_in_p1[p2[pos]])
        from_p1 = not from_p1
    return c1, c2


def swap_mutation(perm: np.ndarray, pb_m: float, rng: Rng) -> np.ndarray:
    """With probability pb_m exchange two distinct random positions."""
    if rng.random() >= pb_m:
        return perm
    n = len(perm)
    if n < 2:
        return perm
    i = rng.randrange(n)
    j = rng.randrange(n - 1)
    if j >= i:
        j += 1
    out = perm.copy()
    out[i], out[j] = out[j], out[i]
    return out


def tournament_select(
    pool: Sequence[Solution],
    k: int,
    comparator: Callable[[Solution, Solution], int],
    rng: Rng,
) -> Solution:
    """Deterministic tournament: k entrants drawn with replacement, best wins."""
    if not pool:
        raise ValueError("tournament pool is empty")
    if k < 1:
        raise ValueError("tournament size must be >= 1")
    best = pool[rng.randrange(len(pool))]
    for _ in range(k - 1):
        challenger = pool[rng.randrange(len(pool))]
        if comparator(challenger, best) < 0:
            best = challenger
    return best
