"""Evaluation metrics: average imitation loss and average fill-in per graph.

Losses are measured under the states visited by the evaluated policy itself
(one rollout per graph), normalized by the total number of visited states.
Fill-in is the mean over graphs of the mean total rollout cost across
``repeats`` seeded rollouts. Per-graph child streams are derived from one
base seed, so evaluation is deterministic and could be parallelized without
changing results.
"""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .errors import ConfigError
from .gnn import GnnParams, as_policy, kl_loss
from .graph import Graph
from .mdp import PolicyFn, rollout
from .policy import min_degree_policy, sample_action, uniform_policy
from .seeding import child_rng

POLICY_ALIASES = {
    "gnn": "gnn",
    "min_degree": "min_degree",
    "mindeg": "min_degree",
    "uniform": "uniform",
}


def resolve_policy(name: str, params: GnnParams | None = None) -> PolicyFn:
    canonical = POLICY_ALIASES.get(name)
    if canonical is None:
        raise ConfigError(f"unknown policy {name!r} (expected gnn, mindeg, or uniform)")
    if canonical == "gnn":
        if params is None:
            raise ConfigError("policy 'gnn' requires network parameters")
        return as_policy(params)
    if canonical == "min_degree":
        return min_degree_policy
    return uniform_policy


def _as_graphs(records: Sequence) -> tuple[list[str], list[Graph]]:
    ids, graphs = [], []
    for i, item in enumerate(records):
        if hasattr(item, "graph"):
            ids.append(item.id)
            graphs.append(item.graph)
        else:
            ids.append(str(i))
            graphs.append(item)
    return ids, graphs


def policy_avg_kl_loss(
    graphs: Sequence[Graph],
    policy: PolicyFn,
    repeats: int,
    base_seed: int,
    tag: str = "loss",
) -> float:
    """Mean per-state KL(min-degree || policy) along rollouts of ``policy``.

    The child stream for graph ``i``, repeat ``r`` is derived as
    (base_seed, tag, i, r); callers sharing a base seed get identical
    trajectories for identical policies.
    """
    total_loss = 0.0
    total_states = 0
    for gi, g in enumerate(graphs):
        for r in range(repeats):
            rng = child_rng(base_seed, tag, gi, r)
            work = g.copy()
            while work.num_active:
                expert = min_degree_policy(work)
                learner = policy(work)
                total_loss += kl_loss(expert, learner)
                action = sample_action(learner, rng)
                work._eliminate_in_place(action)
                total_states += 1
    return total_loss / total_states


def policy_avg_fillin(
    graphs: Sequence[Graph],
    policy: PolicyFn,
    repeats: int,
    base_seed: int,
    tag: str = "fill",
) -> tuple[list[float], float]:
    """Per-graph mean total fill over ``repeats`` rollouts, plus the overall mean."""
    per_graph = []
    for gi, g in enumerate(graphs):
        total = 0
        for r in range(repeats):
            total += rollout(g, policy, child_rng(base_seed, tag, gi, r)).total_cost
        per_graph.append(total / repeats)
    return per_graph, sum(per_graph) / len(per_graph)


def avg_kl_loss(records: Sequence, params: GnnParams, rng: random.Random) -> float:
    """Average KL loss of the network under its own state distribution."""
    _, graphs = _as_graphs(records)
    if not graphs:
        raise ConfigError("cannot evaluate on an empty record list")
    return policy_avg_kl_loss(graphs, as_policy(params), 1, rng.getrandbits(63))


def avg_fillin(
    records: Sequence,
    policy_name: str,
    params: GnnParams | None,
    repeats: int,
    rng: random.Random,
) -> float:
    """Average total fill-in per graph for a named policy."""
    if repeats < 1:
        raise ConfigError(f"repeats must be >= 1, got {repeats}")
    _, graphs = _as_graphs(records)
    if not graphs:
        raise ConfigError("cannot evaluate on an empty record list")
    policy = resolve_policy(policy_name, params)
    _, mean = policy_avg_fillin(graphs, policy, repeats, rng.getrandbits(63))
    return mean


@dataclass
class PerGraphFill:
    graph_id: str
    num_nodes: int
    fillin: dict[str, float]  # policy name -> mean fill over repeats


@dataclass
class EvalReport:
    dataset_id: str
    num_graphs: int
    avg_kl_loss: float
    avg_fillin: dict[str, float]
    per_graph: list[PerGraphFill]


def evaluate(
    records: Sequence,
    params: GnnParams,
    repeats: int,
    rng: random.Random,
    dataset_id: str = "dataset",
) -> EvalReport:
    """Side-by-side comparison of the network, min-degree, and uniform policies.

    All policies share per-(graph, repeat) seed streams, so comparisons use
    common random numbers.
    """
    if repeats < 1:
        raise ConfigError(f"repeats must be >= 1, got {repeats}")
    ids, graphs = _as_graphs(records)
    if not graphs:
        raise ConfigError("cannot evaluate on an empty record list")
    base = rng.getrandbits(63)
    loss = policy_avg_kl_loss(graphs, as_policy(params), 1, base)
    per_policy = {
        name: policy_avg_fillin(graphs, resolve_policy(name, params), repeats, base)
        for name in ("gnn", "min_degree", "uniform")
    }
    per_graph = [
        PerGraphFill(
            graph_id=ids[i],
            num_nodes=graphs[i].num_labels,
            fillin={name: per_policy[name][0][i] for name in per_policy},
        )
        for i in range(len(graphs))
    ]
    return EvalReport(
        dataset_id=dataset_id,
        num_graphs=len(graphs),
        avg_kl_loss=loss,
        avg_fillin={name: per_policy[name][1] for name in per_policy},
        per_graph=per_graph,
    )


def write_report_csv(report: EvalReport, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["graph_id", "num_nodes", "fillin_gnn", "fillin_min_degree", "fillin_uniform"]
        )
        for row in report.per_graph:
            writer.writerow(
                [
                    row.graph_id,
                    row.num_nodes,
                    row.fillin["gnn"],
                    row.fillin["min_degree"],
                    row.fillin["uniform"],
                ]
            )


def format_report_table(report: EvalReport) -> str:
    lines = [
        f"dataset: {report.dataset_id}   graphs: {report.num_graphs}",
        f"avg KL loss (gnn, on-policy): {report.avg_kl_loss:.6g}",
        "",
        f"{'policy':<12} {'avg fill-in':>12}",
    ]
    for name in ("gnn", "min_degree", "uniform"):
        lines.append(f"{name:<12} {report.avg_fillin[name]:>12.4f}")
    return "\n".join(lines)
