"""Message-passing network mapping a graph to an elimination distribution.

Every node starts from the same constant scalar feature, so the output
depends only on the topology around each node. Each layer aggregates
neighbor features through the adjacency matrix, applies an affine map, and
a ReLU; the last layer produces one logit per node, and a softmax across
nodes yields the action distribution.

Gradients of the imitation loss are derived in closed form (no autodiff
framework): the loss gradient with respect to the logits is simply
``learner - expert``, and the rest is plain reverse-mode matrix calculus.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import EmptyGraphError, FormatError, ParamsContractError
from .graph import Graph
from .policy import PolicyDistribution

PARAMS_FORMAT_TAG = "gnn-params-v1"


@dataclass
class GnnParams:
    """Per-layer weight matrices (d_in x d_out) and bias rows (1 x d_out).

    Input and output widths are fixed at 1: constant scalar node features in,
    one logit per node out.
    """

    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def __post_init__(self):
        if not self.weights or len(self.weights) != len(self.biases):
            raise ParamsContractError("need one weight matrix and one bias row per layer")
        self.weights = [np.asarray(w, dtype=np.float64) for w in self.weights]
        self.biases = [np.asarray(b, dtype=np.float64) for b in self.biases]
        dims = self.layer_dims
        if dims[0] != 1:
            raise ParamsContractError(f"input feature width must be 1, got {dims[0]}")
        if dims[-1] != 1:
            raise ParamsContractError(f"output width must be 1, got {dims[-1]}")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.ndim != 2:
                raise ParamsContractError(f"layer {i} weight must be a matrix")
            if b.shape != (1, w.shape[1]):
                raise ParamsContractError(
                    f"layer {i} bias shape {b.shape} does not match weight {w.shape}"
                )
            if i and w.shape[0] != self.weights[i - 1].shape[1]:
                raise ParamsContractError(
                    f"layer {i} expects {w.shape[0]} inputs but layer {i - 1} "
                    f"produces {self.weights[i - 1].shape[1]}"
                )

    @property
    def layer_dims(self) -> list[int]:
        return [self.weights[0].shape[0]] + [w.shape[1] for w in self.weights]

    def copy(self) -> "GnnParams":
        return GnnParams([w.copy() for w in self.weights], [b.copy() for b in self.biases])

    def allclose(self, other: "GnnParams", rtol: float = 0.0, atol: float = 0.0) -> bool:
        return self.layer_dims == other.layer_dims and all(
            np.allclose(a, b, rtol=rtol, atol=atol)
            for a, b in zip(self.weights + self.biases, other.weights + other.biases)
        )


@dataclass
class GnnGradients:
    """Loss gradients, shaped exactly like the parameters they refer to."""

    weights: list[np.ndarray]
    biases: list[np.ndarray]


@dataclass
class ForwardTape:
    """Intermediate values of one forward pass, consumed by :func:`backward`."""

    nodes: tuple[int, ...]
    adjacency: np.ndarray
    activations: list[np.ndarray]
    pre_activations: list[np.ndarray]
    logits: np.ndarray
    log_probs: np.ndarray
    probs: np.ndarray


def xavier_init(layer_dims: Sequence[int], rng: random.Random) -> GnnParams:
    """Weights ~ Normal(0, 2/(d_in+d_out)), biases zero."""
    dims = list(layer_dims)
    if len(dims) < 2 or any(d < 1 for d in dims):
        raise ParamsContractError(f"invalid layer dims {dims}")
    weights, biases = [], []
    for din, dout in zip(dims, dims[1:]):
        std = math.sqrt(2.0 / (din + dout))
        weights.append(
            np.array([[rng.gauss(0.0, std) for _ in range(dout)] for _ in range(din)])
        )
        biases.append(np.zeros((1, dout)))
    return GnnParams(weights, biases)


def forward_prepared(
    params: GnnParams, nodes: Sequence[int], adjacency: np.ndarray
) -> tuple[PolicyDistribution, ForwardTape]:
    """Forward pass with a caller-supplied node order and adjacency matrix."""
    n = len(nodes)
    if n == 0:
        raise EmptyGraphError("cannot run the network on an empty graph")
    x = np.ones((n, 1))
    activations = [x]
    pre_activations: list[np.ndarray] = []
    last = len(params.weights) - 1
    for layer, (w, b) in enumerate(zip(params.weights, params.biases)):
        z = adjacency @ activations[-1] @ w + b
        pre_activations.append(z)
        if layer < last:
            activations.append(np.maximum(z, 0.0))
    logits = pre_activations[-1][:, 0]
    shifted = logits - logits.max()
    exps = np.exp(shifted)
    total = exps.sum()
    probs = exps / total
    log_probs = shifted - math.log(total)
    tape = ForwardTape(
        nodes=tuple(nodes),
        adjacency=adjacency,
        activations=activations,
        pre_activations=pre_activations,
        logits=logits,
        log_probs=log_probs,
        probs=probs,
    )
    dist = PolicyDistribution({v: float(probs[i]) for i, v in enumerate(nodes)})
    return dist, tape


def forward(params: GnnParams, g: Graph) -> tuple[PolicyDistribution, ForwardTape]:
    """Evaluate the network on the active subgraph of ``g``.

    Nodes are ordered by ascending label; the returned distribution maps
    labels to softmax probabilities and the tape holds everything
    :func:`backward` needs.
    """
    nodes = g.active_labels()
    if not nodes:
        raise EmptyGraphError("cannot run the network on a graph with no active vertices")
    return forward_prepared(params, nodes, g.adjacency_matrix(nodes))


def as_policy(params: GnnParams) -> Callable[[Graph], PolicyDistribution]:
    """Wrap parameters as a policy function usable in rollouts."""

    def policy(g: Graph) -> PolicyDistribution:
        return forward(params, g)[0]

    return policy


def kl_loss(expert: PolicyDistribution, learner: PolicyDistribution) -> float:
    """KL divergence of the learner from the expert, summed over expert support.

    Returns ``inf`` if the learner puts zero mass on a supported vertex
    (cannot happen for softmax outputs, modulo extreme underflow). Tiny
    negative rounding residue is clamped to zero.
    """
    total = 0.0
    for v, p in expert.probs.items():
        if p <= 0.0:
            continue
        q = learner.probs.get(v, 0.0)
        if q <= 0.0:
            return math.inf
        total += p * (math.log(p) - math.log(q))
    return total if total > 0.0 else 0.0


def backward(
    tape: ForwardTape, expert: PolicyDistribution, g: Graph, params: GnnParams
) -> GnnGradients:
    """Exact gradients of ``kl_loss(expert, forward(params, g))`` w.r.t. params."""
    if len(tape.pre_activations) != len(params.weights):
        raise ParamsContractError("tape layer count does not match params")
    for z, w in zip(tape.pre_activations, params.weights):
        if z.shape[1] != w.shape[1]:
            raise ParamsContractError("tape layer widths do not match params")
    index = {v: i for i, v in enumerate(tape.nodes)}
    p = np.zeros(len(tape.nodes))
    for v, prob in expert.probs.items():
        if prob == 0.0:
            continue
        if v not in index:
            raise ParamsContractError(
                f"expert puts mass on vertex {v}, absent from the tape's node set"
            )
        p[index[v]] = prob
    a = tape.adjacency
    dz = (tape.probs - p)[:, None]
    grad_w: list[np.ndarray] = [np.empty(0)] * len(params.weights)
    grad_b: list[np.ndarray] = [np.empty(0)] * len(params.weights)
    for layer in range(len(params.weights) - 1, -1, -1):
        m = a @ tape.activations[layer]
        grad_w[layer] = m.T @ dz
        grad_b[layer] = dz.sum(axis=0, keepdims=True)
        if layer:
            dz = (a @ (dz @ params.weights[layer].T)) * (
                tape.pre_activations[layer - 1] > 0.0
            )
    return GnnGradients(grad_w, grad_b)


def sgd_step(params: GnnParams, grads: GnnGradients, alpha: float) -> GnnParams:
    """One plain gradient-descent step; returns new parameters."""
    return GnnParams(
        [w - alpha * gw for w, gw in zip(params.weights, grads.weights)],
        [b - alpha * gb for b, gb in zip(params.biases, grads.biases)],
    )


def params_to_json(params: GnnParams) -> str:
    payload = {
        "format": PARAMS_FORMAT_TAG,
        "layer_dims": params.layer_dims,
        "weights": [w.tolist() for w in params.weights],
        "biases": [b.tolist() for b in params.biases],
    }
    return json.dumps(payload, indent=2) + "\n"


def params_from_json(text: str) -> GnnParams:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"params file is not valid JSON: {exc}") from None
    if not isinstance(payload, dict) or payload.get("format") != PARAMS_FORMAT_TAG:
        raise FormatError(
            f"unsupported params format tag {payload.get('format')!r} "
            f"(expected {PARAMS_FORMAT_TAG!r})"
        )
    try:
        params = GnnParams(
            [np.array(w, dtype=np.float64) for w in payload["weights"]],
            [np.array(b, dtype=np.float64) for b in payload["biases"]],
        )
    except KeyError as exc:
        raise FormatError(f"params file is missing key {exc}") from None
    if payload.get("layer_dims") != params.layer_dims:
        raise FormatError("layer_dims field does not match the stored arrays")
    return params


def save_params(params: GnnParams, path: str | Path) -> None:
    Path(path).write_text(params_to_json(params))


def load_params(path: str | Path) -> GnnParams:
    return params_from_json(Path(path).read_text())
