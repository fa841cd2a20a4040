"""Command-line front end.

Subcommands: generate, ingest, train, eval, order, landscape, check.
Every run resolves its options (defaults < config file < flags), writes a
manifest echoing the resolved values, and derives all randomness from one
``--seed``. Exit codes: 0 success, 1 negative domain result (``check`` on a
non-chordal graph), 2 usage or config error, 3 I/O or data-format error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from . import data as data_mod
from . import gnn as gnn_mod
from . import landscape as landscape_mod
from . import metrics as metrics_mod
from .train import TrainConfig, train as run_training, write_history_csv
from .errors import (
    ChordelimError,
    ConfigError,
    FormatError,
    MatrixMarketParseError,
    MatrixMarketRejectError,
)
from .graph import chordal_extension, from_edge_list_text
from .mdp import rollout, write_trajectories_csv


def _parse_range(text: str, flag: str, cast):
    parts = str(text).split(":")
    if len(parts) != 2:
        raise ConfigError(f"{flag}: expected a range 'lo:hi', got {text!r}")
    try:
        lo, hi = cast(parts[0]), cast(parts[1])
    except ValueError:
        raise ConfigError(f"{flag}: could not parse range {text!r}") from None
    if lo > hi:
        raise ConfigError(f"{flag}: invalid range {text!r} (lo must be <= hi)")
    return lo, hi


def _parse_grid(text: str, flag: str) -> list[float]:
    parts = str(text).split(":")
    if len(parts) != 3:
        raise ConfigError(f"{flag}: expected 'lo:hi:step', got {text!r}")
    try:
        lo, hi, step = (float(p) for p in parts)
    except ValueError:
        raise ConfigError(f"{flag}: could not parse grid {text!r}") from None
    if step <= 0 or lo > hi:
        raise ConfigError(f"{flag}: invalid grid {text!r} (need lo <= hi, step > 0)")
    values = []
    k = 0
    while True:
        v = lo + k * step
        if v > hi + step * 1e-9:
            break
        values.append(v)
        k += 1
    return values


def _parse_dims(text: str, flag: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(p) for p in str(text).split(","))
    except ValueError:
        raise ConfigError(f"{flag}: expected comma-separated integers, got {text!r}") from None
    return dims


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        payload = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"--config: {path} is not valid JSON ({exc})") from None
    if not isinstance(payload, dict):
        raise ConfigError(f"--config: {path} must hold a JSON object")
    return payload


def _resolve(args: argparse.Namespace, config: dict, key: str, default=None):
    value = getattr(args, key, None)
    if value is not None:
        return value
    if key in config:
        return config[key]
    return default


def _write_manifest(out_dir: Path, command: str, resolved: dict) -> None:
    lines = [f"command = {command}"]
    lines.extend(f"{k} = {v}" for k, v in sorted(resolved.items()))
    (out_dir / "manifest.txt").write_text("\n".join(lines) + "\n")


def _ensure_out(path_text: str | None) -> Path:
    if not path_text:
        raise ConfigError("--out: an output directory is required")
    out = Path(path_text)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _read_graph(path_text: str | None):
    if not path_text:
        raise ConfigError("--input: a graph file is required")
    return from_edge_list_text(Path(path_text).read_text())


def cmd_generate(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    kind = _resolve(args, config, "kind", "er")
    if kind not in ("er", "erdos_renyi"):
        raise ConfigError(f"--kind: unsupported kind {kind!r} (use 'er')")
    count = int(_resolve(args, config, "count", 10))
    n_lo, n_hi = _parse_range(_resolve(args, config, "n", "20:50"), "--n", int)
    p_lo, p_hi = _parse_range(_resolve(args, config, "p", "0.1:0.3"), "--p", float)
    seed = int(_resolve(args, config, "seed", 0))
    out = _ensure_out(_resolve(args, config, "out"))
    spec = data_mod.DatasetSpec(
        kind="erdos_renyi", count=count, n_range=(n_lo, n_hi), p_range=(p_lo, p_hi), seed=seed
    )
    records = data_mod.generate_er(spec)
    data_mod.save_dataset(records, out / "dataset.txt")
    _write_manifest(
        out,
        "generate",
        {
            "kind": "erdos_renyi",
            "count": count,
            "n": f"{n_lo}:{n_hi}",
            "p": f"{p_lo}:{p_hi}",
            "seed": seed,
            "out": out,
        },
    )
    print(f"wrote {len(records)} graphs to {out / 'dataset.txt'}")
    return 0


def cmd_ingest(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    source = _resolve(args, config, "source")
    if not source:
        raise ConfigError("--source: a directory of .mtx files is required")
    source_dir = Path(source)
    if not source_dir.is_dir():
        raise ConfigError(f"--source: {source_dir} is not a directory")
    size_range = _resolve(args, config, "n")
    bounds = _parse_range(size_range, "--n", int) if size_range else None
    out = _ensure_out(_resolve(args, config, "out"))
    records: list[data_mod.GraphRecord] = []
    skipped: list[tuple[str, str]] = []
    for path in sorted(source_dir.glob("*.mtx")):
        try:
            record = data_mod.load_matrix_market(path)
        except (MatrixMarketParseError, MatrixMarketRejectError) as exc:
            skipped.append((path.name, str(exc)))
            continue
        if bounds and not (bounds[0] <= record.graph.num_labels <= bounds[1]):
            skipped.append(
                (path.name, f"size {record.graph.num_labels} outside [{bounds[0]}, {bounds[1]}]")
            )
            continue
        records.append(record)
    data_mod.save_dataset(records, out / "dataset.txt")
    (out / "skipped.txt").write_text(
        "".join(f"{name}\t{reason}\n" for name, reason in skipped)
    )
    _write_manifest(
        out,
        "ingest",
        {
            "source": source_dir,
            "n": f"{bounds[0]}:{bounds[1]}" if bounds else "unbounded",
            "out": out,
            "accepted": len(records),
            "skipped": len(skipped),
        },
    )
    if not records:
        print("warning: no usable matrices found, dataset is empty", file=sys.stderr)
    print(f"wrote {len(records)} graphs to {out / 'dataset.txt'} ({len(skipped)} skipped)")
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    dataset_path = _resolve(args, config, "dataset")
    if not dataset_path:
        raise ConfigError("--dataset: a training dataset file is required")
    train_records = data_mod.load_dataset(dataset_path)
    val_path = _resolve(args, config, "val")
    val_records = data_mod.load_dataset(val_path) if val_path else []
    cfg = TrainConfig(
        epochs=int(_resolve(args, config, "epochs", 20)),
        learning_rate=float(_resolve(args, config, "lr", 1e-4)),
        seed=int(_resolve(args, config, "seed", 0)),
        behavior_mode=_resolve(args, config, "mode", "on_policy"),
        layer_dims=_parse_dims(_resolve(args, config, "dims", "1,8,1"), "--dims"),
        checkpoint_every=int(_resolve(args, config, "checkpoint_every", 0)),
        eval_repeats=int(_resolve(args, config, "eval_repeats", 1)),
    )
    out = _ensure_out(_resolve(args, config, "out"))
    params, history = run_training(
        [r.graph for r in train_records],
        [r.graph for r in val_records],
        cfg,
        checkpoint_dir=out / "checkpoints" if cfg.checkpoint_every else None,
    )
    gnn_mod.save_params(params, out / "params.json")
    write_history_csv(history, out / "history.csv")
    if not args.no_plots:
        from . import plots

        plots.plot_history(history, out / "train_curves.png")
    _write_manifest(
        out,
        "train",
        {
            "dataset": dataset_path,
            "val": val_path or "",
            "epochs": cfg.epochs,
            "lr": cfg.learning_rate,
            "seed": cfg.seed,
            "mode": cfg.behavior_mode,
            "dims": ",".join(str(d) for d in cfg.layer_dims),
            "checkpoint_every": cfg.checkpoint_every,
            "eval_repeats": cfg.eval_repeats,
            "out": out,
        },
    )
    last = [r for r in history.records if r.split == "train"][-1]
    print(
        f"trained {cfg.epochs} epochs on {len(train_records)} graphs; "
        f"final train avg KL loss {last.avg_kl_loss:.6g}"
    )
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    dataset_path = _resolve(args, config, "dataset")
    params_path = _resolve(args, config, "params")
    if not dataset_path:
        raise ConfigError("--dataset: a dataset file is required")
    if not params_path:
        raise ConfigError("--params: a params file is required")
    records = data_mod.load_dataset(dataset_path)
    params = gnn_mod.load_params(params_path)
    repeats = int(_resolve(args, config, "repeats", 5))
    seed = int(_resolve(args, config, "seed", 0))
    dataset_id = _resolve(args, config, "dataset_id", Path(dataset_path).stem)
    out = _ensure_out(_resolve(args, config, "out"))
    report = metrics_mod.evaluate(
        records, params, repeats, random.Random(seed), dataset_id=dataset_id
    )
    metrics_mod.write_report_csv(report, out / "report.csv")
    if not args.no_plots:
        from . import plots

        plots.plot_report(report, out / "eval_fillin.png")
    _write_manifest(
        out,
        "eval",
        {
            "dataset": dataset_path,
            "params": params_path,
            "repeats": repeats,
            "seed": seed,
            "dataset_id": dataset_id,
            "avg_kl_loss": report.avg_kl_loss,
            "out": out,
        },
    )
    print(metrics_mod.format_report_table(report))
    return 0


def cmd_order(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    g = _read_graph(_resolve(args, config, "input"))
    policy_name = _resolve(args, config, "policy", "mindeg")
    params_path = _resolve(args, config, "params")
    params = gnn_mod.load_params(params_path) if params_path else None
    policy = metrics_mod.resolve_policy(policy_name, params)
    seed = int(_resolve(args, config, "seed", 0))
    trajectory = rollout(g, policy, random.Random(seed))
    print(" ".join(str(a) for a in trajectory.actions))
    print(f"fill-in: {trajectory.total_cost}", file=sys.stderr)
    csv_path = _resolve(args, config, "trajectory_csv")
    if csv_path:
        input_path = _resolve(args, config, "input")
        write_trajectories_csv([(Path(input_path).stem, trajectory)], csv_path)
    return 0


def cmd_landscape(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    dataset_path = _resolve(args, config, "dataset")
    if not dataset_path:
        raise ConfigError("--dataset: a dataset file is required")
    records = data_mod.load_dataset(dataset_path)
    w1_values = _parse_grid(_resolve(args, config, "w1", "-3:3:0.25"), "--w1")
    w2_values = _parse_grid(_resolve(args, config, "w2", "-3:3:0.25"), "--w2")
    repeats = int(_resolve(args, config, "repeats", 5))
    seed = int(_resolve(args, config, "seed", 0))
    out = _ensure_out(_resolve(args, config, "out"))
    grid = landscape_mod.sweep(records, w1_values, w2_values, repeats, random.Random(seed))
    landscape_mod.write_grid_csv(grid, out / "grid.csv")
    if not args.no_plots:
        from . import plots

        plots.plot_grid(grid, out / "landscape_loss.png", out / "landscape_fill.png")
    _write_manifest(
        out,
        "landscape",
        {
            "dataset": dataset_path,
            "w1": f"{w1_values[0]}:{w1_values[-1]}:{len(w1_values)} points",
            "w2": f"{w2_values[0]}:{w2_values[-1]}:{len(w2_values)} points",
            "repeats": repeats,
            "seed": seed,
            "out": out,
        },
    )
    print(f"wrote {len(w1_values) * len(w2_values)} grid points to {out / 'grid.csv'}")
    return 0


def cmd_check(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    g = _read_graph(_resolve(args, config, "input"))
    ordering_text = _resolve(args, config, "ordering")
    ordering_file = _resolve(args, config, "ordering_file")
    if ordering_text and ordering_file:
        raise ConfigError("use either --ordering or --ordering-file, not both")
    if ordering_file:
        ordering_text = Path(ordering_file).read_text()
    if ordering_text:
        try:
            ordering = [int(tok) for tok in str(ordering_text).split()]
        except ValueError:
            raise ConfigError(f"--ordering: expected integer labels, got {ordering_text!r}") from None
        target, fill = chordal_extension(g, ordering)
        print(f"extension fill-in: {fill}", file=sys.stderr)
    else:
        target = g
    if target.is_chordal():
        print("chordal")
        return 0
    print("not chordal")
    return 1


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="JSON file of option defaults")
    sub.add_argument("--seed", type=int, help="master seed for all randomness")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chordelim",
        description="Chordal extensions via graph elimination and learned elimination policies",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample a random-graph dataset")
    _add_common(p)
    p.add_argument("--kind", help="dataset kind (er)")
    p.add_argument("--count", type=int, help="number of graphs")
    p.add_argument("--n", help="vertex-count range lo:hi")
    p.add_argument("--p", help="edge-probability range lo:hi")
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("ingest", help="build a dataset from Matrix Market files")
    _add_common(p)
    p.add_argument("--source", help="directory containing .mtx files")
    p.add_argument("--n", help="keep only matrices with size in lo:hi")
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("train", help="imitation-train the elimination network")
    _add_common(p)
    p.add_argument("--dataset", help="training dataset file")
    p.add_argument("--val", help="validation dataset file")
    p.add_argument("--epochs", type=int, help="number of epochs")
    p.add_argument("--lr", type=float, help="learning rate")
    p.add_argument("--mode", help="behavior policy: on_policy or expert_behavior")
    p.add_argument("--dims", help="layer dims, e.g. 1,8,1")
    p.add_argument("--checkpoint-every", dest="checkpoint_every", type=int,
                   help="save params every K epochs (0 = never)")
    p.add_argument("--eval-repeats", dest="eval_repeats", type=int,
                   help="rollouts per graph for per-epoch fill-in metrics")
    p.add_argument("--out", help="output directory")
    p.add_argument("--no-plots", action="store_true", help="skip figure rendering")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="compare gnn/min-degree/uniform on a dataset")
    _add_common(p)
    p.add_argument("--dataset", help="dataset file")
    p.add_argument("--params", help="trained params file")
    p.add_argument("--repeats", type=int, help="rollouts per graph")
    p.add_argument("--dataset-id", dest="dataset_id", help="label used in the report")
    p.add_argument("--out", help="output directory")
    p.add_argument("--no-plots", action="store_true", help="skip figure rendering")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("order", help="emit an elimination ordering for one graph")
    _add_common(p)
    p.add_argument("--input", help="graph file (edge-list format)")
    p.add_argument("--policy", help="mindeg, uniform, or gnn")
    p.add_argument("--params", help="params file (required for --policy gnn)")
    p.add_argument("--trajectory-csv", dest="trajectory_csv",
                   help="also write the trajectory as CSV")
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("landscape", help="sweep the two-parameter policy surface")
    _add_common(p)
    p.add_argument("--dataset", help="dataset file")
    p.add_argument("--w1", help="grid lo:hi:step for the first weight")
    p.add_argument("--w2", help="grid lo:hi:step for the second weight")
    p.add_argument("--repeats", type=int, help="rollouts per graph per grid point")
    p.add_argument("--out", help="output directory")
    p.add_argument("--no-plots", action="store_true", help="skip figure rendering")
    p.set_defaults(func=cmd_landscape)

    p = sub.add_parser("check", help="verify chordality of a graph or an extension")
    _add_common(p)
    p.add_argument("--input", help="graph file (edge-list format)")
    p.add_argument("--ordering", help="elimination ordering as space-separated labels")
    p.add_argument("--ordering-file", dest="ordering_file",
                   help="file containing the ordering")
    p.set_defaults(func=cmd_check)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return int(args.func(args))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (FormatError, MatrixMarketRejectError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ChordelimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    sys.exit(main())
