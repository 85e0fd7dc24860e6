"""Latest-exit-time tables and the optimal pursuit policy.

The recursion evaluates uncertainty sets in increasing cardinality. For a
set ``I`` and a candidate sensor ``u``:

* every path in ``I`` passes ``u``  ->  park there by the earliest possible
  visit and capture (a "capture" move, worth ``min`` visit time);
* no path in ``I`` passes ``u``  ->  nothing can be learned, skip;
* otherwise the visit splits ``I`` into the paths through ``u`` (red
  report) and the rest (green). The move is admissible only when the green
  continuation can still succeed once the red question resolves, and its
  worth is the worst case over the two reports.

Two resolution conventions are supported. The default treats a red report
as membership information only (the delay value is not used to narrow
further) and considers the green side resolved at the earliest scheduled
visit. Strict resolution narrows red reports to the exact visit-time class
and requires the green continuation to survive until the last scheduled
visit.

Values for a fixed set do not depend on the pursuer's node except through
the final travel-time subtraction, so candidates are evaluated once per set
and reused for every node. Result tables are immutable once built; cells
within one cardinality level are independent given the lower levels.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field

from .errors import MissingSubset
from .information import RealizableFamily, partition, realizable_sets
from .network import PursuerMetric, VisitSchedule, indices_of, mask_from
from .util import TIME_EPS, teq, tlt

log = logging.getLogger(__name__)

CAPTURE = "capture"
SPLIT = "split"


def base_case(j: int, k: int, schedule: VisitSchedule, metric: PursuerMetric, paths) -> float:
    """Latest exit time from node ``j`` when the evader's path ``k`` is
    known: reach the path's exit just in time."""
    path = paths[k - 1]
    return path.length - metric.time(j, path.exit)


@dataclass
class SolveResult:
    """Solved tables: latest guaranteed-capture exit times and the policy.

    Keys are ``(node, mask)`` pairs. ``latest`` holds the latest exit time
    or ``None`` when no move guarantees capture; ``policy`` holds the next
    node to visit; ``capture_move`` flags moves that end in immediate
    capture. ``strict_resolution`` records which convention produced the
    tables (simulation replays observations under the same convention).
    """

    n: int
    m: int
    strict_resolution: bool
    pruned: bool
    metric_digest: str
    latest: dict = field(default_factory=dict)
    policy: dict = field(default_factory=dict)
    capture_move: dict = field(default_factory=dict)
    family_sets: tuple = ()
    on_demand_sets: tuple = ()

    @property
    def root_mask(self) -> int:
        return (1 << self.n) - 1

    @property
    def root_latest(self):
        return self.latest[(1, self.root_mask)]

    @property
    def root_policy(self):
        return self.policy[(1, self.root_mask)]

    @property
    def tolerable_delay(self) -> float:
        value = self.root_latest
        return 0.0 if value is None else max(0.0, value)

    def to_json(self) -> dict:
        entries = []
        for (j, mask), value in sorted(self.latest.items()):
            entries.append(
                {
                    "node": j,
                    "set": list(indices_of(mask)),
                    "D": value,
                    "mu": self.policy.get((j, mask)),
                    "capture": bool(self.capture_move.get((j, mask), False)),
                }
            )
        return {
            "meta": {
                "n": self.n,
                "m": self.m,
                "strict_resolution": self.strict_resolution,
                "pruned": self.pruned,
                "metric_digest": self.metric_digest,
                "tolerable_delay": self.tolerable_delay,
            },
            "entries": entries,
        }

    @classmethod
    def from_json(cls, data: dict) -> "SolveResult":
        meta = data["meta"]
        result = cls(
            n=int(meta["n"]),
            m=int(meta["m"]),
            strict_resolution=bool(meta["strict_resolution"]),
            pruned=bool(meta["pruned"]),
            metric_digest=str(meta["metric_digest"]),
        )
        for entry in data["entries"]:
            key = (int(entry["node"]), mask_from(entry["set"]))
            result.latest[key] = entry["D"]
            result.policy[key] = entry["mu"]
            result.capture_move[key] = bool(entry["capture"])
        return result


def metric_digest(metric: PursuerMetric) -> str:
    blob = json.dumps([[round(v, 12) for v in row] for row in metric.d]).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


class _Solver:
    def __init__(self, schedule, metric, paths, family_members, strict_resolution, on_demand):
        self.schedule = schedule
        self.metric = metric
        self.paths = paths
        self.family_members = family_members
        self.strict = strict_resolution
        self.on_demand = on_demand
        self.latest: dict = {}
        self.policy: dict = {}
        self.capture_move: dict = {}
        self.computed: set[int] = set()
        self.extra: list[int] = []
        for k in range(1, schedule.n + 1):
            mask = 1 << (k - 1)
            exit_node = paths[k - 1].exit
            for j in range(1, schedule.m + 1):
                self.latest[(j, mask)] = base_case(j, k, schedule, metric, paths)
                self.policy[(j, mask)] = exit_node
                self.capture_move[(j, mask)] = True
            self.computed.add(mask)

    def value(self, u: int, mask: int):
        self.ensure(mask)
        return self.latest[(u, mask)]

    def ensure(self, mask: int) -> None:
        if mask in self.computed:
            return
        if mask not in self.family_members:
            if not self.on_demand:
                raise MissingSubset(f"set {indices_of(mask)} is outside the solve family")
            self.extra.append(mask)
            log.debug("computing out-of-family set %s on demand", indices_of(mask))
        candidates = self.candidates(mask)
        for j in range(1, self.schedule.m + 1):
            best = None
            for u, value, kind in candidates:
                score = value - self.metric.time(j, u)
                if best is None or score > best[0] + TIME_EPS:
                    best = (score, u, kind)
            if best is None:
                self.latest[(j, mask)] = None
                self.policy[(j, mask)] = None
                self.capture_move[(j, mask)] = False
            else:
                self.latest[(j, mask)] = best[0]
                self.policy[(j, mask)] = best[1]
                self.capture_move[(j, mask)] = best[2] == CAPTURE
        self.computed.add(mask)

    def candidates(self, mask: int):
        """Admissible moves for a set, as (node, exit-time-at-node, kind),
        ordered capture moves first then by node id (the tie-break order)."""
        schedule = self.schedule
        out = []
        for u in range(1, schedule.m + 1):
            red, green = partition(mask, u, schedule)
            if red == 0:
                continue
            if red == mask:
                out.append((u, schedule.min_visit(u, mask), CAPTURE))
                continue
            green_value = self.value(u, green)
            if green_value is None:
                continue
            if self.strict:
                if tlt(green_value, schedule.max_visit(u, red)):
                    continue
                worst = green_value
                for _, group_mask in schedule.groups[u]:
                    cls = group_mask & red
                    if cls == 0:
                        continue
                    cls_value = self.value(u, cls)
                    if cls_value is None:
                        worst = None
                        break
                    worst = min(worst, cls_value)
                if worst is None:
                    continue
            else:
                if tlt(green_value, schedule.min_visit(u, red)):
                    continue
                red_value = self.value(u, red)
                if red_value is None:
                    continue
                worst = min(red_value, green_value)
            out.append((u, worst, SPLIT))
        out.sort(key=lambda cand: (cand[2] != CAPTURE, cand[0]))
        return out

    def close_for_simulation(self) -> None:
        """Compute every set a policy walk can reach under either report
        convention, so simulation never sees a missing table row."""
        pending = list(self.computed)
        seen = set(pending)
        while pending:
            mask = pending.pop()
            self.ensure(mask)
            needed = []
            for u in range(1, self.schedule.m + 1):
                red, green = partition(mask, u, self.schedule)
                if red == 0:
                    continue
                if green:
                    needed.append(green)
                if red != mask:
                    needed.append(red)
                remaining = mask
                for _, group_mask in self.schedule.groups[u]:
                    cls = group_mask & mask
                    if cls == 0:
                        continue
                    needed.append(cls)
                    remaining &= ~cls
                    if remaining:
                        needed.append(remaining)
            for sub in needed:
                if sub and sub not in seen:
                    seen.add(sub)
                    self.ensure(sub)
                    pending.append(sub)


def candidate_moves(j: int, mask: int, memo, schedule: VisitSchedule, metric: PursuerMetric,
                    strict_resolution: bool = False):
    """Admissible moves out of node ``j`` holding set ``mask``.

    ``memo`` maps ``(node, mask)`` to latest exit times for every strictly
    smaller set the evaluation touches (raises MissingSubset otherwise).
    Returns (node, exit-time-at-node, kind) triples; subtract the travel
    time from ``j`` to rank them from ``j``.
    """
    lookup = memo.latest if isinstance(memo, SolveResult) else memo

    def value(u, sub):
        try:
            return lookup[(u, sub)]
        except KeyError:
            raise MissingSubset(f"memo lacks set {indices_of(sub)} at node {u}") from None

    out = []
    for u in range(1, schedule.m + 1):
        red, green = partition(mask, u, schedule)
        if red == 0:
            continue
        if red == mask:
            out.append((u, schedule.min_visit(u, mask), CAPTURE))
            continue
        green_value = value(u, green)
        if green_value is None:
            continue
        if strict_resolution:
            if tlt(green_value, schedule.max_visit(u, red)):
                continue
            worst = green_value
            for _, group_mask in schedule.groups[u]:
                cls = group_mask & red
                if cls == 0:
                    continue
                cls_value = value(u, cls)
                if cls_value is None:
                    worst = None
                    break
                worst = min(worst, cls_value)
            if worst is None:
                continue
        else:
            if tlt(green_value, schedule.min_visit(u, red)):
                continue
            red_value = value(u, red)
            if red_value is None:
                continue
            worst = min(red_value, green_value)
        out.append((u, worst, SPLIT))
    out.sort(key=lambda cand: (cand[2] != CAPTURE, cand[0]))
    return out


def full_lattice(n: int) -> tuple[int, ...]:
    masks = list(range(1, 1 << n))
    masks.sort(key=lambda s: (bin(s).count("1"), s))
    return tuple(masks)


def solve(network, schedule: VisitSchedule, metric: PursuerMetric, paths,
          prune: bool = True, strict_resolution: bool = False, family=None,
          on_demand: bool = True, close_for_simulation: bool = True) -> SolveResult:
    """Fill the latest-exit and policy tables for every set in the family
    (realizable sets by default, the full subset lattice with ``prune``
    off), in increasing cardinality order.

    Sets outside the family that the recursion or a policy walk needs are
    computed on demand and recorded, unless ``on_demand`` is off, in which
    case MissingSubset is raised.
    """
    if family is None:
        if prune:
            family = realizable_sets(schedule, paths)
            family_masks = family.sets
        else:
            family_masks = full_lattice(schedule.n)
    elif isinstance(family, RealizableFamily):
        family_masks = family.sets
    else:
        family_masks = tuple(family)

    worker = _Solver(
        schedule, metric, paths,
        family_members=frozenset(family_masks),
        strict_resolution=strict_resolution,
        on_demand=on_demand,
    )
    for mask in sorted(family_masks, key=lambda s: (bin(s).count("1"), s)):
        worker.ensure(mask)
    root = (1 << schedule.n) - 1
    worker.ensure(root)
    if close_for_simulation:
        if schedule.n <= 14:
            worker.close_for_simulation()
        else:
            log.warning("skipping simulation closure for n=%d (too many subsets)", schedule.n)

    return SolveResult(
        n=schedule.n,
        m=schedule.m,
        strict_resolution=strict_resolution,
        pruned=prune and family is None,
        metric_digest=metric_digest(metric),
        latest=worker.latest,
        policy=worker.policy,
        capture_move=worker.capture_move,
        family_sets=tuple(family_masks),
        on_demand_sets=tuple(worker.extra),
    )
