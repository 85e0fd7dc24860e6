"""Materialized pursuer decision trees with DOT and JSON renderings.

A tree expands the solved policy from a root (node, uncertainty set):
capture moves and known-path states end in capture leaves; split moves
branch on the red and green reports. Every child set is a strict subset of
its parent's, so depth never exceeds the path count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import PolicyHole
from .network import PursuerMetric, VisitSchedule, indices_of
from .solver import SolveResult, metric_digest


@dataclass(frozen=True)
class TreeNode:
    ugs: int
    mask: int
    latest: float | None
    kind: str  # "decision" or "capture"
    resolve_t: float | None = None
    children: dict = field(default_factory=dict)

    def depth(self) -> int:
        if not self.children:
            return 0
        return 1 + max(child.depth() for child in self.children.values())

    def leaves(self):
        if not self.children:
            yield self
            return
        for child in self.children.values():
            yield from child.leaves()

    def walk(self):
        yield self
        for child in self.children.values():
            yield from child.walk()


def build_tree(result: SolveResult, schedule: VisitSchedule,
               metric: PursuerMetric | None = None, root=None) -> TreeNode:
    """Expand the policy into a decision tree from ``root`` (default: the
    entry node with full uncertainty).

    ``metric`` is only used to confirm the tables were solved for it.
    Raises PolicyHole when the tables lack a reached (node, set) pair.
    """
    if metric is not None and metric_digest(metric) != result.metric_digest:
        raise ValueError("metric does not match the one the tables were solved with")
    full = (1 << result.n) - 1
    if root is None:
        root = (1, full)

    exits = {}
    for k in range(1, schedule.n + 1):
        best = None
        for j in range(1, schedule.m + 1):
            t = schedule.times[j][k]
            if t < math.inf and (best is None or t > best[1]):
                best = (j, t)
        exits[k] = best

    def lookup(j, mask):
        try:
            return result.latest[(j, mask)]
        except KeyError:
            raise PolicyHole(f"no table entry for node {j}, set {indices_of(mask)}") from None

    def expand(j, mask, resolve_t):
        latest = lookup(j, mask)
        move = result.policy[(j, mask)]
        if move is None:
            raise PolicyHole(f"no guaranteed move for node {j}, set {indices_of(mask)}")
        if mask & (mask - 1) == 0:  # known path: meet it at its exit
            (k,) = indices_of(mask)
            exit_node, exit_t = exits[k]
            leaf = TreeNode(ugs=exit_node, mask=mask, latest=exit_t, kind="capture",
                            resolve_t=exit_t)
            return TreeNode(ugs=j, mask=mask, latest=latest, kind="decision",
                            resolve_t=resolve_t, children={"red": leaf})
        if result.capture_move[(j, mask)]:
            catch_t = schedule.min_visit(move, mask)
            leaf = TreeNode(ugs=move, mask=mask, latest=catch_t, kind="capture",
                            resolve_t=catch_t)
            return TreeNode(ugs=j, mask=mask, latest=latest, kind="decision",
                            resolve_t=resolve_t, children={"red": leaf})
        red = mask & schedule.through[move]
        green = mask & ~red
        red_t = schedule.min_visit(move, red)
        green_t = (schedule.max_visit if result.strict_resolution else schedule.min_visit)(move, red)
        return TreeNode(
            ugs=j, mask=mask, latest=latest, kind="decision", resolve_t=resolve_t,
            children={
                "red": expand(move, red, red_t),
                "green": expand(move, green, green_t),
            },
        )

    return expand(root[0], root[1], None)


def tree_to_json(node: TreeNode) -> dict:
    out = {
        "ugs": node.ugs,
        "set": list(indices_of(node.mask)),
        "D": node.latest,
        "kind": node.kind,
    }
    if node.resolve_t is not None:
        out["t"] = node.resolve_t
    if node.children:
        out["children"] = {label: tree_to_json(child) for label, child in node.children.items()}
    return out


def tree_to_dot(node: TreeNode) -> str:
    lines = ["digraph pursuit {", '  node [shape=box, fontname="Helvetica"];']
    counter = [0]

    def fmt(value):
        return "?" if value is None else f"{value:.4g}"

    def emit(current: TreeNode) -> int:
        idx = counter[0]
        counter[0] += 1
        if current.kind == "capture":
            label = f"capture @ UGS {current.ugs}\\nt={fmt(current.latest)}"
            lines.append(f'  n{idx} [label="{label}", shape=oval];')
        else:
            members = ",".join(str(i) for i in indices_of(current.mask))
            label = f"UGS {current.ugs} | {{{members}}} | D={fmt(current.latest)}"
            lines.append(f'  n{idx} [label="{label}"];')
        for obs, child in current.children.items():
            cid = emit(child)
            lines.append(f'  n{idx} -> n{cid} [label="{obs} t={fmt(child.resolve_t)}"];')
        return idx

    emit(node)
    lines.append("}")
    return "\n".join(lines) + "\n"
