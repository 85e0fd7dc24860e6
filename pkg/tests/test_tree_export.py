import pytest

from ugs_pursuit import (
    build_tree,
    euclidean_metric,
    mask_from,
    simulate,
    solve,
    tree_to_dot,
    tree_to_json,
)
from ugs_pursuit.fixtures import random_instance, speed_floor

from conftest import mask_of


@pytest.fixture(scope="module")
def demo_tree(demo, demo_metric):
    network, paths, schedule = demo
    result = solve(network, schedule, demo_metric, paths)
    return result, build_tree(result, schedule, demo_metric)


class TestBuildTree:
    def test_root_annotation(self, demo_tree):
        result, tree = demo_tree
        assert tree.ugs == 1
        assert tree.mask == result.root_mask
        assert tree.latest == result.root_latest

    def test_every_leaf_is_a_capture(self, demo_tree):
        _, tree = demo_tree
        assert all(leaf.kind == "capture" for leaf in tree.leaves())

    def test_depth_bounded_by_path_count(self, demo, demo_tree):
        _, _, schedule = demo
        _, tree = demo_tree
        assert tree.depth() <= 2 * schedule.n  # counting capture leaves as a level

    def test_children_sets_strictly_shrink(self, demo_tree):
        _, tree = demo_tree
        for node in tree.walk():
            for child in node.children.values():
                if child.kind == "capture":
                    continue
                assert child.mask & node.mask == child.mask
                assert child.mask != node.mask

    def test_annotations_match_tables(self, demo_tree):
        result, tree = demo_tree
        for node in tree.walk():
            if node.kind == "decision":
                assert result.latest[(node.ugs, node.mask)] == node.latest

    def test_leaf_count_bound(self, demo, demo_tree):
        _, _, schedule = demo
        _, tree = demo_tree
        assert sum(1 for _ in tree.leaves()) <= 2 * schedule.n - 1

    def test_single_path_tree(self, single_edge):
        network, paths, schedule = single_edge
        metric = euclidean_metric(network, 1.0)
        result = solve(network, schedule, metric, paths)
        tree = build_tree(result, schedule, metric)
        (leaf,) = list(tree.leaves())
        assert leaf.ugs == paths[0].exit
        assert leaf.latest == pytest.approx(paths[0].length)

    def test_custom_root_wait_then_advance(self, demo, demo_metric, demo_index):
        # from exit 6 holding the rejoining pair: wait there; a red report
        # means capture on the spot, a green one sends the pursuer to 7
        network, paths, schedule = demo
        result = solve(network, schedule, demo_metric, paths)
        pair = mask_of(demo_index, (1, 3, 4, 6), (1, 3, 4, 7))
        tree = build_tree(result, schedule, demo_metric, root=(6, pair))
        assert tree.latest == pytest.approx(16.30, abs=1e-9)
        red = tree.children["red"]
        red_leaves = list(red.leaves())
        assert len(red_leaves) == 1
        assert red_leaves[0].ugs == 6
        assert red_leaves[0].latest == pytest.approx(16.30, abs=1e-9)
        green = tree.children["green"]
        assert green.mask == mask_of(demo_index, (1, 3, 4, 7))
        assert result.policy[(green.ugs, green.mask)] == 7

    def test_metric_mismatch_rejected(self, demo, demo_metric):
        network, paths, schedule = demo
        result = solve(network, schedule, demo_metric, paths)
        other = euclidean_metric(network, 2.0)
        with pytest.raises(ValueError):
            build_tree(result, schedule, other)

    def test_random_instances_structure(self):
        for seed in range(5):
            network, paths, schedule = random_instance(seed, n_max=4, m_max=8)
            metric = euclidean_metric(network, 1.1 * speed_floor(network))
            result = solve(network, schedule, metric, paths)
            tree = build_tree(result, schedule, metric)
            assert all(leaf.kind == "capture" for leaf in tree.leaves())
            assert sum(1 for _ in tree.leaves()) <= 2 * schedule.n - 1
            assert tree.depth() <= 2 * schedule.n


class TestReplayConsistency:
    def test_simulator_follows_tree_to_matching_leaf(self, demo, demo_metric):
        network, paths, schedule = demo
        result = solve(network, schedule, demo_metric, paths)
        tree = build_tree(result, schedule, demo_metric)
        t0 = result.root_latest
        for k in range(1, schedule.n + 1):
            outcome = simulate(network, schedule, demo_metric, result, k, t0)
            assert outcome.captured
            node = tree
            # follow the tree using the transcript's post-entry observations
            for row in outcome.transcript[1:]:
                label = "red" if row.obs.is_red else "green"
                if label in node.children and node.children[label].kind != "capture":
                    node = node.children[label]
            leaf_like = [leaf for leaf in node.walk() if leaf.kind == "capture"]
            assert any(
                leaf.ugs == outcome.node and abs(leaf.latest - outcome.time) <= 1e-9
                for leaf in leaf_like
            )


class TestRenderings:
    def test_json_schema(self, demo_tree):
        _, tree = demo_tree
        payload = tree_to_json(tree)
        assert {"ugs", "set", "D", "kind"} <= payload.keys()
        stack = [payload]
        while stack:
            node = stack.pop()
            for child in node.get("children", {}).values():
                assert {"ugs", "set", "D", "kind"} <= child.keys()
                stack.append(child)

    def test_dot_output(self, demo_tree):
        _, tree = demo_tree
        text = tree_to_dot(tree)
        assert text.startswith("digraph")
        assert text.rstrip().endswith("}")
        assert 'label="red' in text and 'label="green' in text
        assert "capture @ UGS" in text

    def test_full_set_membership_label(self, demo_tree):
        _, tree = demo_tree
        assert "{1,2,3,4}" in tree_to_dot(tree)
