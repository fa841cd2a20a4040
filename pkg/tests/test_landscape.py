import math
import random

import numpy as np
import pytest

import oracles
from conftest import complete_graph, cycle_graph, er_edges, er_graph, path_graph
from chordelim.data import DatasetSpec, generate_er
from chordelim.errors import NormalizationError
from chordelim.gnn import GnnParams, forward, kl_loss
from chordelim.graph import Graph
from chordelim.landscape import (
    ToyParams,
    sweep,
    toy_forward,
    uniform_loss,
    write_grid_csv,
)
from chordelim.metrics import policy_avg_fillin
from chordelim.policy import min_degree_policy, uniform_policy


def small_er_records(count=8, n=(8, 14), p=(0.2, 0.5), seed=1):
    return generate_er(DatasetSpec("erdos_renyi", count, n, p, seed=seed))


class TestToyForward:
    def test_w1_zero_logits_are_scaled_degrees(self, rng):
        g = er_graph(9, 0.4, rng)
        w2 = -1.7
        dist = toy_forward(ToyParams(0.0, w2), g)
        logits = [w2 * g.degree(v) for v in g.active_labels()]
        top = max(logits)
        exps = [math.exp(z - top) for z in logits]
        total = sum(exps)
        for v, e in zip(g.active_labels(), exps):
            assert dist.probs[v] == pytest.approx(e / total, rel=1e-12)

    def test_relu_inactive_region_is_exactly_uniform(self, rng):
        g_with_isolated = Graph.from_edges(6, [(0, 1), (1, 2)])  # 3 isolated vertices
        for g in (cycle_graph(5), er_graph(10, 0.3, rng), g_with_isolated):
            for w1 in (-1.0, -1.5, -3.0):
                dist = toy_forward(ToyParams(w1, 2.3), g)
                assert dist.probs == uniform_policy(g).probs

    def test_path3_matches_direct_softmax(self):
        dist = toy_forward(ToyParams(0.0, -10.0), path_graph(3))
        logits = np.array([-10.0, -20.0, -10.0])
        exps = np.exp(logits - logits.max())
        probs = exps / exps.sum()
        for i, v in enumerate((0, 1, 2)):
            assert dist.probs[v] == pytest.approx(probs[i], rel=1e-12)
        assert dist.probs[0] == pytest.approx(0.49998865, abs=1e-8)
        assert dist.probs[1] == pytest.approx(2.27e-05, rel=1e-3)

    def test_matches_full_network_with_pinned_bias(self, rng):
        # the two-parameter model is the full network with layer biases (1, 0)
        for _ in range(5):
            g = er_graph(8, 0.4, rng)
            w1, w2 = rng.uniform(-2, 2), rng.uniform(-2, 2)
            toy = toy_forward(ToyParams(w1, w2), g)
            params = GnnParams(
                [np.array([[w1]]), np.array([[w2]])],
                [np.array([[1.0]]), np.array([[0.0]])],
            )
            full, _ = forward(params, g)
            for v in g.active_labels():
                assert toy.probs[v] == pytest.approx(full.probs[v], rel=1e-12)

    def test_expert_limit_per_state(self, rng):
        t = ToyParams(0.0, -50.0)
        for _ in range(30):
            g = er_graph(rng.randint(5, 25), rng.uniform(0.1, 0.5), rng)
            if len(g.min_degree_nodes()) == g.num_active:  # regular state
                continue
            expert = min_degree_policy(g)
            assert kl_loss(expert, toy_forward(t, g)) < 1e-6
            dist = toy_forward(t, g)
            gap = max(abs(dist.probs[v] - expert.probs[v]) for v in g.active_labels())
            assert gap < 1e-9


class TestSweep:
    def test_all_complete_dataset_raises(self, rng):
        records = [complete_graph(5) for _ in range(3)]
        with pytest.raises(NormalizationError):
            sweep(records, [0.0], [0.0], 2, rng)

    def test_flat_region_exactly_flat_and_equals_uniform_loss(self):
        records = small_er_records()
        w2_values = [-3.0 + 0.5 * k for k in range(13)]
        grid = sweep(records, [-1.5], w2_values, 2, random.Random(404))
        row_loss = grid.loss[0]
        assert (row_loss == row_loss[0]).all()
        row_fill = grid.normalized_fill[0]
        assert (row_fill == row_fill[0]).all()
        reference = uniform_loss(records, 2, random.Random(404))
        assert row_loss[0] == reference

    def test_min_degree_limit_point(self):
        records = small_er_records(count=6, seed=9)
        grid = sweep(records, [0.0], [-50.0], 3, random.Random(11))
        assert grid.loss[0, 0] < 1e-6
        assert grid.normalized_fill[0, 0] == pytest.approx(1.0, abs=0.15)

    def test_nonnegative_quadrant_fill_at_least_one(self):
        records = small_er_records(count=6, n=(10, 16), seed=31)
        grid = sweep(records, [0.0, 1.0], [0.0, 1.5], 10, random.Random(5))
        assert (grid.normalized_fill >= 1.0).all()

    def test_normalized_fill_bounded_below_by_exact_optimum(self):
        # on tiny graphs the ratio can never beat exhaustive-minimum / min-degree
        rng = random.Random(6)
        edges = [er_edges(8, 0.4, rng) for _ in range(4)]
        graphs = [Graph.from_edges(8, e) for e in edges]
        base = 314159
        _, md = policy_avg_fillin(graphs, min_degree_policy, 5, base)
        exact = sum(oracles.min_fill_exact(8, e) for e in edges) / len(edges)
        grid = sweep(graphs, [-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], 5, random.Random(7))
        assert (grid.normalized_fill >= exact / md - 1e-9).all()

    def test_csv_export(self, tmp_path):
        records = small_er_records(count=3)
        grid = sweep(records, [-1.0, 0.0], [-1.0, 1.0], 1, random.Random(1))
        out = tmp_path / "grid.csv"
        write_grid_csv(grid, out)
        lines = out.read_text().splitlines()
        assert lines[0] == "w1,w2,avg_kl_loss,normalized_fill"
        assert len(lines) == 5
        assert lines[1].startswith("-1.0,-1.0,")
