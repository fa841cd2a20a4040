"""Graph elimination as a sequential decision process.

States are graphs, actions are active vertex labels, transitions eliminate
the chosen vertex (deterministically), and the step cost is the number of
fill edges the elimination inserts. A trajectory runs until no vertices
remain, so its length equals the number of active vertices of the initial
graph — the final single-vertex step costs zero.
"""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable

from .errors import EmptyGraphError
from .graph import Graph
from .policy import PolicyDistribution, sample_action

PolicyFn = Callable[[Graph], PolicyDistribution]


@dataclass(frozen=True)
class TrajectoryStep:
    state_size: int
    action: int
    step_cost: int
    per_step_loss: float | None = None


@dataclass(frozen=True)
class Trajectory:
    steps: tuple[TrajectoryStep, ...]

    @property
    def total_cost(self) -> int:
        return sum(s.step_cost for s in self.steps)

    @property
    def actions(self) -> list[int]:
        return [s.action for s in self.steps]

    def __len__(self) -> int:
        return len(self.steps)


def rollout(g: Graph, policy: PolicyFn, rng: random.Random) -> Trajectory:
    """Eliminate vertices sampled from ``policy`` until the graph is empty.

    The distribution returned by the policy is validated against the current
    state at every step. The state passed to the policy is a working copy
    reused between steps; policies must not hold on to it.
    """
    if g.num_active == 0:
        raise EmptyGraphError("cannot roll out on a graph with no active vertices")
    work = g.copy()
    steps: list[TrajectoryStep] = []
    while work.num_active:
        dist = policy(work)
        dist.validate_for(work)
        action = sample_action(dist, rng)
        size = work.num_active
        cost = work._eliminate_in_place(action)
        steps.append(TrajectoryStep(state_size=size, action=action, step_cost=cost))
    return Trajectory(tuple(steps))


def expected_immediate_cost(g: Graph, policy: PolicyFn) -> float:
    """Exact one-step expected fill under the policy's distribution."""
    if g.num_active == 0:
        raise EmptyGraphError("graph has no active vertices")
    dist = policy(g)
    dist.validate_for(g)
    return sum(
        p * g.fill_count_if_eliminated(v) for v, p in dist.probs.items() if p > 0.0
    )


def trajectory_csv_rows(graph_id: str, t: Trajectory) -> list[list]:
    return [
        [graph_id, i, s.state_size, s.action, s.step_cost]
        for i, s in enumerate(t.steps)
    ]


def write_trajectories_csv(items: Iterable[tuple[str, Trajectory]], path: str | Path) -> None:
    """Write trajectories as ``graph_id, step, state_size, action, step_cost`` rows."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["graph_id", "step", "state_size", "action", "step_cost"])
        for graph_id, t in items:
            writer.writerows(trajectory_csv_rows(graph_id, t))
