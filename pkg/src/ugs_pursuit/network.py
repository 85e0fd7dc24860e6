"""Road-network data model: sensor graph, evader paths, visit schedules and
the pursuer travel-time metric.

Conventions
-----------
Nodes are integers ``1..m`` and node ``1`` is the entry. Goal nodes are
exactly the childless nodes. Evader paths are directed entry-to-goal node
sequences, indexed ``1..n`` in lexicographic order of their node sequences.
Path subsets are represented as integer bitmasks with bit ``k - 1`` standing
for path ``k``.

All objects are immutable after construction and safe to share across
threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .errors import (
    CycleDetected,
    EntryIsGoal,
    GoalMismatch,
    MetricError,
    NetworkError,
    NonPositiveEdgeTime,
    NonZeroDiagonal,
    OrphanUgs,
    PathExplosion,
    SpeedAdvantageViolated,
    TriangleViolation,
    UnreachableNode,
)
from .util import TIME_EPS, group_times, tlt

DEFAULT_PATH_CAP = 63


@dataclass(frozen=True)
class RoadNetwork:
    """Validated directed acyclic sensor graph.

    ``children[j]`` lists the child nodes of ``j`` in increasing order and
    ``edge_time[(j, c)]`` is the evader's travel time along edge ``j -> c``.
    ``coords[j]`` is an optional ``(x, y)`` pair (``None`` when the input
    carried no geometry). Index 0 of the per-node tuples is unused padding.
    """

    m: int
    children: tuple[tuple[int, ...], ...]
    edge_time: dict[tuple[int, int], float]
    coords: tuple[tuple[float, float] | None, ...]
    entry: int = 1
    goals: frozenset[int] = field(default_factory=frozenset)

    def edges(self):
        for j in range(1, self.m + 1):
            for c in self.children[j]:
                yield j, c, self.edge_time[(j, c)]


@dataclass(frozen=True)
class EvaderPath:
    """One entry-to-goal node sequence with cumulative arrival times."""

    index: int
    nodes: tuple[int, ...]
    arrival: tuple[float, ...]

    @property
    def length(self) -> float:
        return self.arrival[-1]

    @property
    def exit(self) -> int:
        return self.nodes[-1]


@dataclass(frozen=True)
class VisitSchedule:
    """Per-node evader visit times across all paths.

    ``times[j][k]`` is the visit time of node ``j`` on path ``k``
    (``math.inf`` when the path avoids the node; index 0 padding).
    ``through[j]`` is the bitmask of paths that visit ``j`` and
    ``groups[j]`` lists ``(time, mask)`` pairs grouping the paths that
    visit ``j`` at the same instant, in increasing time order.
    """

    m: int
    n: int
    times: tuple[tuple[float, ...], ...]
    through: tuple[int, ...]
    groups: tuple[tuple[tuple[float, int], ...], ...]

    def visit_time(self, j: int, k: int) -> float:
        return self.times[j][k]

    def min_visit(self, j: int, mask: int) -> float:
        return min(self.times[j][k] for k in iter_indices(mask))

    def max_visit(self, j: int, mask: int) -> float:
        return max(self.times[j][k] for k in iter_indices(mask))


@dataclass(frozen=True)
class PursuerMetric:
    """Pursuer travel-time table ``d[i][j]`` (index 0 padding)."""

    d: tuple[tuple[float, ...], ...]

    @property
    def m(self) -> int:
        return len(self.d) - 1

    def time(self, i: int, j: int) -> float:
        return self.d[i][j]


def mask_from(indices) -> int:
    """Bitmask for an iterable of 1-based path indices."""
    mask = 0
    for k in indices:
        mask |= 1 << (k - 1)
    return mask


def iter_indices(mask: int):
    """Yield the 1-based path indices present in a bitmask."""
    k = 1
    while mask:
        if mask & 1:
            yield k
        mask >>= 1
        k += 1


def indices_of(mask: int) -> tuple[int, ...]:
    return tuple(iter_indices(mask))


def validate_network(raw: dict) -> RoadNetwork:
    """Build a RoadNetwork from a parsed description, enforcing the model's
    standing assumptions.

    ``raw`` uses the JSON input shape: ``nodes`` (each with ``id`` and
    optional ``x``/``y``), ``edges`` (``from``/``to``/``time``), ``entry``,
    and an optional ``goals`` list that is cross-checked against the derived
    childless set.

    Raises NetworkError subclasses on rejection: CycleDetected, EntryIsGoal,
    UnreachableNode, NonPositiveEdgeTime, GoalMismatch.
    """
    nodes = raw.get("nodes")
    if not nodes:
        raise NetworkError("network needs a non-empty 'nodes' list")
    ids = sorted(node["id"] for node in nodes)
    m = len(ids)
    if ids != list(range(1, m + 1)):
        raise NetworkError(f"node ids must be contiguous 1..{m}, got {ids}")

    coords: list[tuple[float, float] | None] = [None] * (m + 1)
    for node in nodes:
        if "x" in node and node.get("x") is not None:
            coords[node["id"]] = (float(node["x"]), float(node["y"]))

    entry = int(raw.get("entry", 1))
    if entry != 1:
        raise NetworkError("the entry node must be node 1 (relabel the input)")

    children: list[list[int]] = [[] for _ in range(m + 1)]
    edge_time: dict[tuple[int, int], float] = {}
    for edge in raw.get("edges", ()):
        j, c = int(edge["from"]), int(edge["to"])
        if not (1 <= j <= m and 1 <= c <= m):
            raise NetworkError(f"edge ({j},{c}) references an unknown node")
        t = float(edge["time"])
        if t <= 0.0:
            raise NonPositiveEdgeTime(f"edge ({j},{c}) has travel time {t} <= 0")
        if (j, c) in edge_time:
            raise NetworkError(f"duplicate edge ({j},{c})")
        children[j].append(c)
        edge_time[(j, c)] = t
    for j in range(1, m + 1):
        children[j].sort()

    _reject_cycles(m, children)

    goals = frozenset(j for j in range(1, m + 1) if not children[j])
    if entry in goals:
        raise EntryIsGoal("the entry node has no outgoing edge")
    declared = raw.get("goals")
    if declared is not None and frozenset(int(g) for g in declared) != goals:
        raise GoalMismatch(
            f"declared goals {sorted(int(g) for g in declared)} != childless nodes {sorted(goals)}"
        )

    reachable = _forward_reachable(entry, children)
    reaches_goal = _reaches_goal(m, children, goals)
    for j in range(1, m + 1):
        if j not in reachable or j not in reaches_goal:
            raise UnreachableNode(f"node {j} lies on no entry-to-goal path")

    return RoadNetwork(
        m=m,
        children=tuple(tuple(c) for c in children),
        edge_time=edge_time,
        coords=tuple(coords),
        entry=entry,
        goals=goals,
    )


def _reject_cycles(m: int, children) -> None:
    # Kahn's algorithm; leftover nodes sit on a cycle.
    indeg = [0] * (m + 1)
    for j in range(1, m + 1):
        for c in children[j]:
            indeg[c] += 1
    queue = [j for j in range(1, m + 1) if indeg[j] == 0]
    seen = 0
    while queue:
        j = queue.pop()
        seen += 1
        for c in children[j]:
            indeg[c] -= 1
            if indeg[c] == 0:
                queue.append(c)
    if seen != m:
        cyclic = sorted(j for j in range(1, m + 1) if indeg[j] > 0)
        raise CycleDetected(f"edge relation is cyclic (nodes {cyclic})")


def _forward_reachable(entry: int, children) -> set[int]:
    seen = {entry}
    stack = [entry]
    while stack:
        j = stack.pop()
        for c in children[j]:
            if c not in seen:
                seen.add(c)
                stack.append(c)
    return seen


def _reaches_goal(m: int, children, goals) -> set[int]:
    good = set(goals)
    changed = True
    while changed:
        changed = False
        for j in range(1, m + 1):
            if j not in good and any(c in good for c in children[j]):
                good.add(j)
                changed = True
    return good


def enumerate_paths(network: RoadNetwork, max_paths: int = DEFAULT_PATH_CAP) -> tuple[EvaderPath, ...]:
    """All directed entry-to-goal paths with cumulative arrival times.

    Paths are ordered lexicographically by node sequence and indexed 1..n in
    that order, so indices are reproducible across runs. Raises PathExplosion
    when more than ``max_paths`` paths exist.
    """
    sequences: list[tuple[int, ...]] = []

    def walk(prefix: list[int]) -> None:
        j = prefix[-1]
        if not network.children[j]:
            if len(sequences) >= max_paths:
                raise PathExplosion(f"more than {max_paths} evader paths")
            sequences.append(tuple(prefix))
            return
        for c in network.children[j]:
            prefix.append(c)
            walk(prefix)
            prefix.pop()

    walk([network.entry])
    sequences.sort()

    paths = []
    for k, seq in enumerate(sequences, start=1):
        arrival = [0.0]
        for a, b in zip(seq, seq[1:]):
            arrival.append(arrival[-1] + network.edge_time[(a, b)])
        paths.append(EvaderPath(index=k, nodes=seq, arrival=tuple(arrival)))
    return tuple(paths)


def build_schedule(paths, m: int) -> VisitSchedule:
    """Tabulate per-node visit times and path-membership masks.

    Raises OrphanUgs if some node appears on no path (validate_network
    already excludes that for whole networks).
    """
    if not paths:
        raise NetworkError("no evader paths")
    n = max(path.index for path in paths)
    times = [[math.inf] * (n + 1) for _ in range(m + 1)]
    through = [0] * (m + 1)
    for path in paths:
        for pos, j in enumerate(path.nodes):
            times[j][path.index] = path.arrival[pos]
            through[j] |= 1 << (path.index - 1)
    for j in range(1, m + 1):
        if through[j] == 0:
            raise OrphanUgs(f"node {j} appears on no evader path")
    groups = [()] * (m + 1)
    for j in range(1, m + 1):
        pairs = [(times[j][k], k) for k in range(1, n + 1) if times[j][k] < math.inf]
        groups[j] = tuple((t, mask_from(ks)) for t, ks in group_times(pairs))
    return VisitSchedule(
        m=m,
        n=n,
        times=tuple(tuple(row) for row in times),
        through=tuple(through),
        groups=tuple(groups),
    )


def euclidean_metric(network: RoadNetwork, speed: float) -> PursuerMetric:
    """Straight-line-distance-over-speed travel table.

    Requires coordinates on every node and ``speed > 0``; the result is
    checked against the triangle and speed-advantage requirements.
    """
    if speed <= 0:
        raise MetricError(f"pursuer speed must be positive, got {speed}")
    for j in range(1, network.m + 1):
        if network.coords[j] is None:
            raise MetricError(f"node {j} has no coordinates; euclidean metric unavailable")
    d = [[0.0] * (network.m + 1) for _ in range(network.m + 1)]
    for i in range(1, network.m + 1):
        xi, yi = network.coords[i]
        for j in range(1, network.m + 1):
            xj, yj = network.coords[j]
            d[i][j] = math.hypot(xi - xj, yi - yj) / speed
    metric = PursuerMetric(d=tuple(tuple(row) for row in d))
    validate_metric(metric, network, check_triangle=False)
    return metric


def metric_violations(metric: PursuerMetric, network: RoadNetwork, check_triangle: bool = True, limit: int = 5):
    """Collect up to ``limit`` violations of the metric requirements.

    Each entry is ``(kind, indices, detail)`` with kind one of
    ``diagonal``, ``triangle``, ``speed``.
    """
    out = []
    m = network.m
    if metric.m != m:
        raise MetricError(f"metric is {metric.m}x{metric.m} but the network has {m} nodes")
    d = metric.d
    for j in range(1, m + 1):
        if d[j][j] != 0.0:
            out.append(("diagonal", (j,), d[j][j]))
            if len(out) >= limit:
                return out
    for i in range(1, m + 1):
        for j in range(1, m + 1):
            if d[i][j] < 0.0:
                out.append(("diagonal", (i, j), d[i][j]))
                if len(out) >= limit:
                    return out
    if check_triangle:
        for i in range(1, m + 1):
            for s in range(1, m + 1):
                for j in range(1, m + 1):
                    if d[i][j] > d[i][s] + d[s][j] + TIME_EPS:
                        out.append(("triangle", (i, s, j), d[i][j] - d[i][s] - d[s][j]))
                        if len(out) >= limit:
                            return out
    for j, c, t in network.edges():
        if not tlt(d[j][c], t):
            out.append(("speed", (j, c), d[j][c] - t))
            if len(out) >= limit:
                return out
    return out


def validate_metric(metric: PursuerMetric, network: RoadNetwork, check_triangle: bool = True) -> None:
    """Raise NonZeroDiagonal / TriangleViolation / SpeedAdvantageViolated on
    the first problem found; silent when the table is acceptable."""
    violations = metric_violations(metric, network, check_triangle=check_triangle)
    if not violations:
        return
    kind, idx, detail = violations[0]
    if kind == "diagonal":
        raise NonZeroDiagonal(f"nonzero or negative entry at {idx}: {detail}", violations)
    if kind == "triangle":
        raise TriangleViolation(f"d{idx[0], idx[2]} exceeds the detour via {idx[1]} by {detail}", violations)
    raise SpeedAdvantageViolated(
        f"pursuer not faster than the evader on edge {idx}: excess {detail}", violations
    )


def table_metric(rows, network: RoadNetwork) -> PursuerMetric:
    """Wrap an explicit m-by-m table (0-based rows, as read from JSON) and
    validate it fully."""
    m = network.m
    if len(rows) != m or any(len(r) != m for r in rows):
        raise MetricError(f"metric table must be {m}x{m}")
    d = [[0.0] * (m + 1)]
    for r in rows:
        d.append(tuple([0.0] + [float(v) for v in r]))
    metric = PursuerMetric(d=tuple(tuple(row) if not isinstance(row, tuple) else row for row in d))
    validate_metric(metric, network)
    return metric


def load_network(path: str, max_paths: int = DEFAULT_PATH_CAP):
    """Read a network JSON file and return (network, paths, schedule)."""
    with open(path) as fh:
        raw = json.load(fh)
    network = validate_network(raw)
    paths = enumerate_paths(network, max_paths=max_paths)
    schedule = build_schedule(paths, network.m)
    return network, paths, schedule
