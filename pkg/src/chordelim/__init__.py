"""Chordal extensions via graph elimination, plus an imitation-learned
minimum-degree elimination policy."""

from .errors import (
    ChordelimError,
    ConfigError,
    EmptyGraphError,
    FormatError,
    InvalidOrderingError,
    InvalidVertexError,
    MatrixMarketParseError,
    MatrixMarketRejectError,
    NormalizationError,
    ParamsContractError,
    PolicyContractError,
)
from .graph import (
    EliminationResult,
    Graph,
    chordal_extension,
    from_edge_list_text,
    to_edge_list_text,
)
from .policy import PolicyDistribution, min_degree_policy, sample_action, uniform_policy
from .mdp import Trajectory, TrajectoryStep, expected_immediate_cost, rollout
from .gnn import (
    ForwardTape,
    GnnGradients,
    GnnParams,
    as_policy,
    backward,
    forward,
    kl_loss,
    load_params,
    save_params,
    sgd_step,
    xavier_init,
)
from .data import (
    DatasetSpec,
    GraphRecord,
    filter_square_sized,
    generate_er,
    load_dataset,
    load_matrix_market,
    save_dataset,
    split,
)
from .metrics import EvalReport, avg_fillin, avg_kl_loss, evaluate
from .train import TrainConfig, TrainHistory, run_episode, train
from .landscape import LandscapeGrid, ToyParams, sweep, toy_forward, uniform_loss

__version__ = "0.1.0"
