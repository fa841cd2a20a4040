import json


from conftest import complete_graph, cycle_graph
from chordelim.cli import main
from chordelim.data import DatasetSpec, generate_er, load_dataset, save_dataset
from chordelim.graph import to_edge_list_text


def write_graph(tmp_path, name, g):
    path = tmp_path / name
    path.write_text(to_edge_list_text(g))
    return path


def write_complete_dataset(tmp_path, name, count=3, n=5):
    from chordelim.data import GraphRecord

    records = [GraphRecord(f"k{i}", complete_graph(n), "fixture") for i in range(count)]
    path = tmp_path / name
    save_dataset(records, path)
    return path


class TestGenerate:
    def test_writes_dataset_and_manifest(self, tmp_path, capsys):
        out = tmp_path / "run"
        code = main([
            "generate", "--kind", "er", "--count", "10", "--n", "20:50",
            "--p", "0.1:0.3", "--seed", "7", "--out", str(out),
        ])
        assert code == 0
        records = load_dataset(out / "dataset.txt")
        assert len(records) == 10
        assert all(20 <= r.graph.num_labels <= 50 for r in records)
        manifest = (out / "manifest.txt").read_text()
        assert "command = generate" in manifest and "seed = 7" in manifest

    def test_rerun_byte_identical(self, tmp_path):
        args = ["generate", "--count", "5", "--n", "10:20", "--p", "0.2:0.4", "--seed", "3"]
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert main(args + ["--out", str(out1)]) == 0
        assert main(args + ["--out", str(out2)]) == 0
        assert (out1 / "dataset.txt").read_bytes() == (out2 / "dataset.txt").read_bytes()

    def test_invalid_p_range_names_flag(self, tmp_path, capsys):
        code = main([
            "generate", "--count", "2", "--n", "5:10", "--p", "0.5:0.2",
            "--out", str(tmp_path / "x"),
        ])
        assert code == 2
        assert "--p" in capsys.readouterr().err

    def test_config_file_with_flag_override(self, tmp_path):
        config = tmp_path / "cfg.json"
        config.write_text(json.dumps({"count": 4, "n": "6:9", "p": "0.2:0.3", "seed": 1,
                                      "out": str(tmp_path / "from_config")}))
        code = main(["generate", "--config", str(config), "--count", "2"])
        assert code == 0
        assert len(load_dataset(tmp_path / "from_config" / "dataset.txt")) == 2


class TestIngest:
    def test_square_kept_rectangular_skipped(self, tmp_path, capsys):
        src = tmp_path / "mats"
        src.mkdir()
        (src / "good.mtx").write_text(
            "%%MatrixMarket matrix coordinate pattern general\n3 3 2\n1 2\n2 3\n"
        )
        (src / "rect.mtx").write_text(
            "%%MatrixMarket matrix coordinate pattern general\n2 3 1\n1 2\n"
        )
        out = tmp_path / "out"
        code = main(["ingest", "--source", str(src), "--n", "1:100", "--out", str(out)])
        assert code == 0
        assert len(load_dataset(out / "dataset.txt")) == 1
        skipped = (out / "skipped.txt").read_text().splitlines()
        assert len(skipped) == 1 and "rect.mtx" in skipped[0] and "non-square" in skipped[0]

    def test_empty_directory_warns(self, tmp_path, capsys):
        src = tmp_path / "empty"
        src.mkdir()
        out = tmp_path / "out"
        code = main(["ingest", "--source", str(src), "--out", str(out)])
        assert code == 0
        assert "warning" in capsys.readouterr().err
        assert load_dataset(out / "dataset.txt") == []

    def test_size_filter_excludes(self, tmp_path):
        src = tmp_path / "mats"
        src.mkdir()
        (src / "small.mtx").write_text(
            "%%MatrixMarket matrix coordinate pattern general\n40 40 1\n1 2\n"
        )
        out = tmp_path / "out"
        code = main(["ingest", "--source", str(src), "--n", "50:500", "--out", str(out)])
        assert code == 0
        assert load_dataset(out / "dataset.txt") == []
        assert "outside" in (out / "skipped.txt").read_text()


class TestTrainEval:
    def test_train_then_eval_on_complete_graphs(self, tmp_path, capsys):
        ds = write_complete_dataset(tmp_path, "train.txt")
        out = tmp_path / "trained"
        code = main([
            "train", "--dataset", str(ds), "--epochs", "2", "--lr", "0.001",
            "--seed", "5", "--out", str(out), "--no-plots",
        ])
        assert code == 0
        history = (out / "history.csv").read_text().splitlines()
        assert history[0].startswith("epoch,split,avg_kl_loss")
        assert len(history) == 3
        assert all(line.split(",")[2] == "0.0" for line in history[1:])

        eval_out = tmp_path / "evaled"
        code = main([
            "eval", "--dataset", str(ds), "--params", str(out / "params.json"),
            "--repeats", "2", "--seed", "1", "--out", str(eval_out), "--no-plots",
        ])
        assert code == 0
        report = (eval_out / "report.csv").read_text().splitlines()
        assert len(report) == 4
        assert all(row.endswith("0.0,0.0,0.0") for row in report[1:])
        assert "avg KL loss" in capsys.readouterr().out

    def test_train_renders_figures(self, tmp_path):
        ds = write_complete_dataset(tmp_path, "train.txt", count=2, n=4)
        out = tmp_path / "trained"
        code = main([
            "train", "--dataset", str(ds), "--epochs", "1", "--seed", "5",
            "--out", str(out),
        ])
        assert code == 0
        assert (out / "train_curves.png").stat().st_size > 0

    def test_checkpoints(self, tmp_path):
        ds = write_complete_dataset(tmp_path, "train.txt", count=2, n=4)
        out = tmp_path / "trained"
        code = main([
            "train", "--dataset", str(ds), "--epochs", "4", "--checkpoint-every", "2",
            "--seed", "5", "--out", str(out), "--no-plots",
        ])
        assert code == 0
        assert (out / "checkpoints" / "epoch_002.json").exists()
        assert (out / "checkpoints" / "epoch_004.json").exists()

    def test_missing_dataset_is_io_error(self, tmp_path, capsys):
        code = main([
            "train", "--dataset", str(tmp_path / "nope.txt"), "--out", str(tmp_path / "o"),
        ])
        assert code == 3


class TestOrder:
    def test_cycle_min_degree(self, tmp_path, capsys):
        path = write_graph(tmp_path, "c4.txt", cycle_graph(4))
        code = main(["order", "--input", str(path), "--policy", "mindeg", "--seed", "3"])
        assert code == 0
        captured = capsys.readouterr()
        labels = captured.out.split()
        assert sorted(int(x) for x in labels) == [0, 1, 2, 3]
        assert "fill-in: 1" in captured.err

    def test_trajectory_csv(self, tmp_path):
        path = write_graph(tmp_path, "c4.txt", cycle_graph(4))
        csv_path = tmp_path / "traj.csv"
        code = main([
            "order", "--input", str(path), "--policy", "uniform", "--seed", "3",
            "--trajectory-csv", str(csv_path),
        ])
        assert code == 0
        assert csv_path.read_text().startswith("graph_id,step,state_size,action,step_cost")

    def test_gnn_policy_requires_params(self, tmp_path, capsys):
        path = write_graph(tmp_path, "c4.txt", cycle_graph(4))
        code = main(["order", "--input", str(path), "--policy", "gnn"])
        assert code == 2


class TestLandscape:
    def test_grid_csv_written(self, tmp_path):
        records = generate_er(DatasetSpec("erdos_renyi", 3, (8, 12), (0.2, 0.5), seed=2))
        ds = tmp_path / "ds.txt"
        save_dataset(records, ds)
        out = tmp_path / "sweep"
        code = main([
            "landscape", "--dataset", str(ds), "--w1=-1:1:1", "--w2=-1:1:1",
            "--repeats", "1", "--seed", "4", "--out", str(out), "--no-plots",
        ])
        assert code == 0
        lines = (out / "grid.csv").read_text().splitlines()
        assert lines[0] == "w1,w2,avg_kl_loss,normalized_fill"
        assert len(lines) == 10

    def test_figures_rendered(self, tmp_path):
        records = generate_er(DatasetSpec("erdos_renyi", 2, (6, 9), (0.3, 0.5), seed=2))
        ds = tmp_path / "ds.txt"
        save_dataset(records, ds)
        out = tmp_path / "sweep"
        code = main([
            "landscape", "--dataset", str(ds), "--w1=0:1:1", "--w2=-1:0:1",
            "--repeats", "1", "--seed", "4", "--out", str(out),
        ])
        assert code == 0
        assert (out / "landscape_loss.png").stat().st_size > 0
        assert (out / "landscape_fill.png").stat().st_size > 0


class TestCheck:
    def test_non_chordal_exits_one(self, tmp_path, capsys):
        path = write_graph(tmp_path, "c4.txt", cycle_graph(4))
        assert main(["check", "--input", str(path)]) == 1
        assert "not chordal" in capsys.readouterr().out

    def test_chordal_exits_zero(self, tmp_path, capsys):
        path = write_graph(tmp_path, "k4.txt", complete_graph(4))
        assert main(["check", "--input", str(path)]) == 0
        assert "chordal" in capsys.readouterr().out

    def test_extension_check(self, tmp_path, capsys):
        path = write_graph(tmp_path, "c4.txt", cycle_graph(4))
        code = main(["check", "--input", str(path), "--ordering", "0 1 2 3"])
        assert code == 0
        captured = capsys.readouterr()
        assert "chordal" in captured.out
        assert "extension fill-in: 1" in captured.err

    def test_bad_ordering_is_config_error(self, tmp_path):
        path = write_graph(tmp_path, "c4.txt", cycle_graph(4))
        assert main(["check", "--input", str(path), "--ordering", "0 1 zz"]) == 2
