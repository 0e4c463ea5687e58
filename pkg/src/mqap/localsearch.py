"""Dominance-based local search over the ordered swap neighborhood.

Starting from the archive contents, unvisited solutions are drawn at
random; the first neighbor that Pareto-dominates the current solution is
accepted (its objectives come from the swap delta, never a re-evaluation)
and joins the working population unvisited.  The search stops when its
wall-clock budget runs out or no unvisited solutions remain.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

import numpy as np

from .archive import Archive
from .evaluation import Solution, apply_swap, swap_delta_matrix
from .genetics import Rng
from .instance import Instance

Clock = Callable[[], float]


@dataclass(frozen=True)
class LocalSearchParams:
    t_max: float = 5.0

    def __post_init__(self):
        if self.t_max <= 0:
            raise ValueError("local search budget must be positive")


def ordered_swap_neighborhood(n: int) -> Iterator[tuple[int, int]]:
    """Location pairs in scan order: (0,1), (0,2), ..., (n-2,n-1)."""
    for i in range(n - 1):
        for j in range(i + 1, n):
            yield (i, j)


def first_dominating_swap(
    instance: Instance, sol: Solution
) -> tuple[int, int, tuple[int, ...]] | None:
    """First pair in scan order whose swap strictly improves all-around.

    A neighbor dominates iff its delta is <= 0 in every objective and < 0 in
    at least one, so the whole neighborhood is screened on the batched delta
    matrix and only the winning pair is materialized.
    """
    deltas = swap_delta_matrix(instance, sol.perm)
    improving = np.logical_and((deltas <= 0).all(axis=0), (deltas < 0).any(axis=0))
    improving[np.tril_indices(instance.n)] = False
    hits = np.argwhere(improving)
    if hits.size == 0:
        return None
    i, j = int(hits[0][0]), int(hits[0][1])
    return i, j, tuple(int(deltas[r, i, j]) for r in range(instance.m))


def dominance_based_local_search(
    archive: Archive,
    params: LocalSearchParams,
    instance: Instance,
    rng: Rng,
    clock: Clock = time.monotonic,
    extra: Sequence[Solution] = (),
) -> list[Solution]:
    """Improve archive members in place of the island population.

    Returns the working population: the archive contents (plus any
    ``extra`` seeds, typically the generation's offspring, which get
    improved on the same terms) and every accepted dominating neighbor.
    Elapsed time is checked at the loop head only, so one neighborhood scan
    may overshoot the budget.
    """
    population = list(archive.members)
    member_ids = set(map(id, population))
    population.extend(s for s in extra if id(s) not in member_ids)
    for sol in population:
        sol.visited = False
    start = clock()
    unvisited = [s for s in population if not s.visited]
    while unvisited and clock() - start < params.t_max:
        sol = unvisited[rng.randrange(len(unvisited))]
        found = first_dominating_swap(instance, sol)
        if found is not None:
            i, j, delta = found
            neighbor = apply_swap(sol, i, j, delta)
            neighbor.visited = False
            population.append(neighbor)
        sol.visited = True
        unvisited = [s for s in population if not s.visited]
    return population
