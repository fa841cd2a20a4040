"""Action policies: probability distributions over a graph's active vertices."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import EmptyGraphError, PolicyContractError
from .graph import Graph

PROB_SUM_TOL = 1e-9


@dataclass(frozen=True)
class PolicyDistribution:
    """Probability of eliminating each vertex; keys cover the full active set.

    Entries may be zero (e.g. non-minimum-degree vertices under the
    minimum-degree policy) but must be non-negative and sum to one.
    """

    probs: dict[int, float]

    def support(self) -> list[int]:
        return sorted(v for v, p in self.probs.items() if p > 0.0)

    def validate(self) -> None:
        total = 0.0
        for v, p in self.probs.items():
            if p < 0.0:
                raise PolicyContractError(f"negative probability {p} on vertex {v}")
            total += p
        if abs(total - 1.0) > PROB_SUM_TOL:
            raise PolicyContractError(f"probabilities sum to {total!r}, expected 1")

    def validate_for(self, g: Graph) -> None:
        if set(self.probs) != set(g.active_labels()):
            raise PolicyContractError(
                "distribution keys do not match the graph's active vertices "
                f"({len(self.probs)} keys vs {g.num_active} active)"
            )
        self.validate()


def min_degree_policy(g: Graph) -> PolicyDistribution:
    """1/k on each of the k minimum-degree vertices, 0 elsewhere."""
    if g.num_active == 0:
        raise EmptyGraphError("cannot build a policy on a graph with no active vertices")
    lowest = g.min_degree_nodes()
    share = 1.0 / len(lowest)
    lowest_set = set(lowest)
    return PolicyDistribution(
        {v: (share if v in lowest_set else 0.0) for v in g.active_labels()}
    )


def uniform_policy(g: Graph) -> PolicyDistribution:
    """Equal probability on every active vertex."""
    active = g.active_labels()
    if not active:
        raise EmptyGraphError("cannot build a policy on a graph with no active vertices")
    share = 1.0 / len(active)
    return PolicyDistribution({v: share for v in active})


def sample_action(dist: PolicyDistribution, rng: random.Random) -> int:
    """Draw a vertex label from ``dist`` by inverse CDF over ascending labels.

    Ascending-label traversal makes draws reproducible across platforms for
    a given seed. Zero-probability vertices are never returned.
    """
    u = rng.random()
    acc = 0.0
    last = -1
    for v in sorted(dist.probs):
        p = dist.probs[v]
        if p <= 0.0:
            continue
        acc += p
        last = v
        if u < acc:
            return v
    if last < 0:
        raise PolicyContractError("cannot sample from a distribution with empty support")
    return last
