"""Two-scalar-parameter network and grid sweeps of its loss and fill-in.

The reduced model has one scalar weight per layer: ``x1 = relu(1 + w1 *
degree)``, a second neighborhood aggregation scaled by ``w2``, and a softmax
over nodes. At ``w1 = 0`` the logits are exactly ``w2 * degree``, so large
negative ``w2`` approaches the minimum-degree policy; for ``w1 <= -1`` the
first ReLU shuts off and the output is exactly uniform.

Sweeps share one base seed across all grid points (common random numbers),
which makes flat regions of the surfaces exactly flat and shrinks the
variance of comparisons between neighboring points.
"""

from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError, EmptyGraphError, NormalizationError
from .graph import Graph
from .metrics import _as_graphs, policy_avg_fillin, policy_avg_kl_loss
from .policy import PolicyDistribution, min_degree_policy, uniform_policy


@dataclass(frozen=True)
class ToyParams:
    w1: float
    w2: float


def toy_forward(t: ToyParams, g: Graph) -> PolicyDistribution:
    """Evaluate the two-parameter network on the active subgraph of ``g``."""
    nodes = g.active_labels()
    if not nodes:
        raise EmptyGraphError("cannot run the network on a graph with no active vertices")
    x1 = {v: max(0.0, 1.0 + t.w1 * g.degree(v)) for v in nodes}
    logits = [t.w2 * sum(x1[u] for u in g.neighbors(v)) for v in nodes]
    top = max(logits)
    exps = [math.exp(z - top) for z in logits]
    total = sum(exps)
    return PolicyDistribution({v: e / total for v, e in zip(nodes, exps)})


def toy_policy(t: ToyParams) -> Callable[[Graph], PolicyDistribution]:
    def policy(g: Graph) -> PolicyDistribution:
        return toy_forward(t, g)

    return policy


@dataclass
class LandscapeGrid:
    w1_values: list[float]
    w2_values: list[float]
    loss: np.ndarray  # shape (len(w1_values), len(w2_values))
    normalized_fill: np.ndarray  # same shape; ratio to the min-degree baseline


def sweep(
    records: Sequence,
    w1_values: Sequence[float],
    w2_values: Sequence[float],
    repeats: int,
    rng: random.Random,
) -> LandscapeGrid:
    """Estimate loss and normalized fill-in surfaces over a (w1, w2) grid.

    For each point: the average KL loss along rollouts of the point's own
    policy, and its mean total fill-in divided by the min-degree policy's
    mean total fill-in on the same records (same seeds). One base seed is
    drawn from ``rng`` up front and shared by every grid point.
    """
    w1s, w2s = list(w1_values), list(w2_values)
    if not w1s or not w2s:
        raise ConfigError("w1 and w2 grids must be nonempty")
    if repeats < 1:
        raise ConfigError(f"repeats must be >= 1, got {repeats}")
    _, graphs = _as_graphs(records)
    if not graphs:
        raise ConfigError("cannot sweep over an empty record list")
    base = rng.getrandbits(63)
    _, baseline = policy_avg_fillin(graphs, min_degree_policy, repeats, base)
    if baseline == 0:
        raise NormalizationError(
            "min-degree fill-in is zero on every record; normalized fill is undefined"
        )
    loss = np.empty((len(w1s), len(w2s)))
    fill = np.empty((len(w1s), len(w2s)))
    for i, w1 in enumerate(w1s):
        for j, w2 in enumerate(w2s):
            policy = toy_policy(ToyParams(w1, w2))
            loss[i, j] = policy_avg_kl_loss(graphs, policy, repeats, base)
            _, mean_fill = policy_avg_fillin(graphs, policy, repeats, base)
            fill[i, j] = mean_fill / baseline
    return LandscapeGrid(w1s, w2s, loss, fill)


def uniform_loss(records: Sequence, repeats: int, rng: random.Random) -> float:
    """Average KL loss of the uniform policy under sweep's seed discipline.

    Seeded identically to :func:`sweep`: grid points whose policy reduces to
    the uniform distribution produce exactly this value.
    """
    _, graphs = _as_graphs(records)
    if not graphs:
        raise ConfigError("cannot evaluate on an empty record list")
    base = rng.getrandbits(63)
    return policy_avg_kl_loss(graphs, uniform_policy, repeats, base)


def write_grid_csv(grid: LandscapeGrid, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["w1", "w2", "avg_kl_loss", "normalized_fill"])
        for i, w1 in enumerate(grid.w1_values):
            for j, w2 in enumerate(grid.w2_values):
                writer.writerow([w1, w2, grid.loss[i, j], grid.normalized_fill[i, j]])
