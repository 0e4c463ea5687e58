"""Bounded archive of mutually non-dominated solutions.

Each island owns one archive for the whole run.  Inserts keep mutual
non-dominance and reject permutation duplicates; when the archive outgrows
its capacity the least crowded members are evicted first.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .evaluation import Solution
from .ranking import assign_front_crowding, dominates


class Archive:
    def __init__(self, capacity: int = 100, track_evictions: bool = False):
        if capacity < 1:
            raise ValueError("archive capacity must be >= 1")
        self.capacity = capacity
        self.members: list[Solution] = []
        self._perm_keys: set[bytes] = set()
        # Eviction log is opt-in; stress tests use it to audit truncation.
        self.evictions: list[Solution] | None = [] if track_evictions else None

    def __len__(self) -> int:
        return len(self.members)

    def insert(self, candidates: Iterable[Solution]) -> None:
        for candidate in candidates:
            self.insert_one(candidate)

    def insert_one(self, candidate: Solution) -> bool:
        """Insert one candidate; returns True if it joined the archive."""
        key = candidate.perm_key()
        if key in self._perm_keys:
            return False
        obj = candidate.objectives
        for member in self.members:
            if dominates(member.objectives, obj):
                return False

        survivors = []
        for member in self.members:
            if dominates(obj, member.objectives):
                self._perm_keys.discard(member.perm_key())
            else:
                survivors.append(member)
        survivors.append(candidate)
        self._perm_keys.add(key)
        self.members = survivors
        while len(self.members) > self.capacity:
            self._evict_most_crowded()
        return True

    def _evict_most_crowded(self) -> None:
        # Members form a single front, so crowding is computed directly.
        assign_front_crowding(self.members)
        worst = min(range(len(self.members)), key=lambda i: self.members[i].diversity)
        evicted = self.members.pop(worst)
        self._perm_keys.discard(evicted.perm_key())
        if self.evictions is not None:
            self.evictions.append(evicted)


def archive_merge(archives: Sequence[Archive]) -> list[Solution]:
    """Union of archives filtered to the global non-dominated, de-duplicated set."""
    merged: list[Solution] = []
    seen: set[bytes] = set()
    for archive in archives:
        for sol in archive.members:
            key = sol.perm_key()
            if key in seen:
                continue
            if any(dominates(other.objectives, sol.objectives) for other in merged):
                continue
            merged = [o for o in merged if not dominates(sol.objectives, o.objectives)]
            seen = {o.perm_key() for o in merged}
            merged.append(sol)
            seen.add(key)
    return merged
