"""Uncertainty-set algebra: observation updates, red/green partitions and
enumeration of the uncertainty sets a guaranteed-capture pursuer can
actually encounter.

An uncertainty set is a bitmask over path indices (bit ``k - 1`` = path
``k``). All functions here are pure and safe for concurrent use.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InconsistentObservation
from .network import VisitSchedule, indices_of, iter_indices
from .util import teq, tlt

GREEN = -1.0


@dataclass(frozen=True)
class Observation:
    """A sensor reading: green, or red with the elapsed delay since the
    evader's passage."""

    delay: float = GREEN

    @property
    def is_red(self) -> bool:
        return self.delay >= 0.0

    @classmethod
    def green(cls) -> "Observation":
        return cls(GREEN)

    @classmethod
    def red(cls, delay: float) -> "Observation":
        if delay < 0.0:
            raise ValueError(f"red delay must be >= 0, got {delay}")
        return cls(delay)


def update_red(mask: int, u: int, t_plus: float, delay: float, schedule: VisitSchedule) -> int:
    """Keep the paths that put the evader at node ``u`` exactly at
    ``t_plus - delay``.

    Raises InconsistentObservation when no retained path remains.
    """
    passage = t_plus - delay
    out = 0
    for k in iter_indices(mask):
        if teq(schedule.times[u][k], passage):
            out |= 1 << (k - 1)
    if out == 0:
        raise InconsistentObservation(
            f"red at node {u}, passage time {passage:.9g} matches no path in {indices_of(mask)}"
        )
    return out


def update_green(mask: int, u: int, t_plus: float, schedule: VisitSchedule) -> int:
    """Keep the paths that have not yet visited node ``u`` at ``t_plus``
    (strictly later visit, or no visit at all)."""
    out = 0
    for k in iter_indices(mask):
        # paths avoiding u have an infinite visit time and always stay
        if tlt(t_plus, schedule.times[u][k]):
            out |= 1 << (k - 1)
    if out == 0:
        raise InconsistentObservation(
            f"green at node {u}, time {t_plus:.9g} excludes every path in {indices_of(mask)}"
        )
    return out


def partition(mask: int, u: int, schedule: VisitSchedule) -> tuple[int, int]:
    """Split a set into (paths through ``u``, paths avoiding ``u``)."""
    red = mask & schedule.through[u]
    return red, mask & ~red


@dataclass(frozen=True)
class FamilyEvent:
    """One sweep event: the sets in play when node ``node`` can report at
    time ``time``."""

    node: int
    time: float
    masks: tuple[int, ...]


@dataclass(frozen=True)
class RealizableFamily:
    """All uncertainty sets reachable by a guaranteed-capture pursuer, with
    the chronological event log that produced them."""

    n: int
    sets: tuple[int, ...]
    log: tuple[FamilyEvent, ...]

    def __contains__(self, mask: int) -> bool:
        return mask in self._lookup()

    def _lookup(self) -> frozenset:
        # tiny cache; frozen dataclass so stash via object.__setattr__
        cached = getattr(self, "_members", None)
        if cached is None:
            cached = frozenset(self.sets)
            object.__setattr__(self, "_members", cached)
        return cached

    def to_json(self) -> dict:
        return {
            "sets": [list(indices_of(s)) for s in self.sets],
            "log": [
                {"node": ev.node, "time": ev.time, "sets": [list(indices_of(s)) for s in ev.masks]}
                for ev in self.log
            ],
        }


def realizable_sets(schedule: VisitSchedule, paths, reverse_ties: bool = False) -> RealizableFamily:
    """Event-sweep enumeration of the realizable uncertainty sets.

    Walk the distinct (node, visit-time) events in increasing time (ties by
    node id, or reversed when ``reverse_ties``). At each event, split every
    alive set by the paths visiting right then; after a path's exit event,
    drop alive sets containing it, since waiting on them past that instant
    would let the evader escape. Each log row lists the sets alive just
    before the event plus the children it created.
    """
    n = schedule.n
    full = (1 << n) - 1
    exit_time = {p.index: p.length for p in paths}
    exit_node = {p.index: p.exit for p in paths}

    events = []
    for j in range(1, schedule.m + 1):
        for t, group_mask in schedule.groups[j]:
            events.append((t, j, group_mask))
    events.sort(key=lambda ev: (ev[0], -ev[1] if reverse_ties else ev[1]))

    alive: list[int] = [full]
    family: list[int] = [full]
    seen = {full}
    log: list[FamilyEvent] = []

    for t, j, group_mask in events:
        row = list(alive)
        created = []
        additions = []
        for s in alive:
            hit = s & group_mask
            if hit == 0 or hit == s:
                continue
            for child in (hit, s & ~hit):
                created.append(child)
                if child not in seen:
                    seen.add(child)
                    family.append(child)
                additions.append(child)
        alive.extend(a for a in additions if a not in alive)

        # exit event: paths ending here now are out of play
        gone = 0
        for k in iter_indices(group_mask):
            if exit_node[k] == j and teq(exit_time[k], t):
                gone |= 1 << (k - 1)
        if gone:
            alive = [s for s in alive if s & gone == 0]

        row_masks = []
        for s in row + created:
            if s not in row_masks:
                row_masks.append(s)
        log.append(FamilyEvent(node=j, time=t, masks=tuple(row_masks)))

    family.sort(key=lambda s: (bin(s).count("1"), s))
    return RealizableFamily(n=n, sets=tuple(family), log=tuple(log))
