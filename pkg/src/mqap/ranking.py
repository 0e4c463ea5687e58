"""Pareto ranking machinery: dominance depth, crowding, and survival.

Fitness is the dominance depth (front index) of a solution; diversity is
the front-local crowding value.  The FitnessThenDiversity comparator that
drives selection, migration and survival prefers lower depth and, on ties,
higher crowding.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Sequence

from .evaluation import ObjectiveVector, Solution

INFINITY = float("inf")


def dominates(a: ObjectiveVector, b: ObjectiveVector) -> bool:
    """Minimization Pareto dominance: a <= b everywhere and a != b."""
    if len(a) != len(b):
        raise ValueError(f"objective dimensions differ: {len(a)} vs {len(b)}")
    not_worse = True
    strictly_better = False
    for x, y in zip(a, b):
        if x > y:
            not_worse = False
            break
        if x < y:
            strictly_better = True
    return not_worse and strictly_better


@dataclass
class RankedPopulation:
    members: list[Solution]
    fronts: list[list[Solution]]


def dominance_depth_assign(pop: Sequence[Solution]) -> RankedPopulation:
    """Assign each solution its front index by domination-count peeling.

    For each solution we count its dominators and remember the set it
    dominates; front 0 is the zero-count group, and each next front appears
    as counts reach zero while peeling the previous one.
    """
    members = list(pop)
    n = len(members)
    dominated_by_me: list[list[int]] = [[] for _ in range(n)]
    dominator_count = [0] * n
    for i in range(n):
        oi = members[i].objectives
        for j in range(i + 1, n):
            oj = members[j].objectives
            if dominates(oi, oj):
                dominated_by_me[i].append(j)
                dominator_count[j] += 1
            elif dominates(oj, oi):
                dominated_by_me[j].append(i)
                dominator_count[i] += 1

    fronts: list[list[Solution]] = []
    current = [i for i in range(n) if dominator_count[i] == 0]
    rank = 0
    while current:
        front = []
        next_front: list[int] = []
        for i in current:
            members[i].rank = rank
            front.append(members[i])
            for j in dominated_by_me[i]:
                dominator_count[j] -= 1
                if dominator_count[j] == 0:
                    next_front.append(j)
        fronts.append(front)
        current = next_front
        rank += 1
    return RankedPopulation(members=members, fronts=fronts)


def crowding_assign(ranked: RankedPopulation) -> RankedPopulation:
    """Front-by-front crowding: boundary points get infinity, interior
    points accumulate the normalized gap between their two neighbors per
    objective (0 when an objective is constant across the front)."""
    for front in ranked.fronts:
        assign_front_crowding(front)
    return ranked


def assign_front_crowding(front: list[Solution]) -> None:
    for sol in front:
        sol.diversity = 0.0
    if not front:
        return
    m = len(front[0].objectives)
    for r in range(m):
        ordered = sorted(front, key=lambda s: s.objectives[r])
        ordered[0].diversity = INFINITY
        ordered[-1].diversity = INFINITY
        span = ordered[-1].objectives[r] - ordered[0].objectives[r]
        if span <= 0:
            continue
        for idx in range(1, len(ordered) - 1):
            sol = ordered[idx]
            if sol.diversity == INFINITY:
                continue
            gap = ordered[idx + 1].objectives[r] - ordered[idx - 1].objectives[r]
            sol.diversity += gap / span


def compare_fitness_then_diversity(a: Solution, b: Solution) -> int:
    """Negative if a is better: lower rank wins, then higher diversity."""
    if a.rank != b.rank:
        return -1 if a.rank < b.rank else 1
    if a.diversity != b.diversity:
        return -1 if a.diversity > b.diversity else 1
    return 0


FITNESS_THEN_DIVERSITY_KEY = functools.cmp_to_key(compare_fitness_then_diversity)


def rank_and_crowd(pop: Sequence[Solution]) -> RankedPopulation:
    return crowding_assign(dominance_depth_assign(pop))


def elitist_integration(
    current: Sequence[Solution],
    immigrants: Sequence[Solution],
    capacity: int,
) -> list[Solution]:
    """Survival of the comparator-best members of residents plus immigrants.

    Ranks and crowding are recomputed on the union before the stable sort,
    so residents precede immigrants on exact ties.
    """
    if capacity < 1:
        raise ValueError("capacity must be >= 1")
    union = list(current) + list(immigrants)
    rank_and_crowd(union)
    union.sort(key=FITNESS_THEN_DIVERSITY_KEY)
    return union[:capacity]
