"""Command-line interface: config handling, output files, exit codes."""

import json
import math

import numpy as np
import pytest

from smoptics import circuit, cli, shots


def tiny_config_dict(**overrides):
    cfg = {
        "master_seed": 0,
        "dataset": {"train_size": 10, "test_size": 30, "seeds": [0, 1]},
        "train": {"rounds": 1, "shot_counts": ["exact", 1]},
    }
    cfg.update(overrides)
    return cfg


def write_config(tmp_path, data, name="run.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


class TestConfig:
    def test_defaults_round_trip(self):
        cfg = cli.config_from_dict({})
        again = cli.config_from_dict(cfg.to_dict())
        assert cfg.to_dict() == again.to_dict()
        assert cfg.canonical_json() == again.canonical_json()

    def test_default_values(self):
        cfg = cli.config_from_dict({})
        assert cfg.master_seed == 0
        assert cfg.rounds == 10
        assert cfg.train_size == 300
        assert cfg.test_size == 1000
        assert cfg.shot_counts == (None, 200, 50, 10, 5, 2, 1)
        assert cfg.seeds == tuple(range(10))
        assert cfg.threshold == pytest.approx(0.4)
        assert cfg.rule_radius == pytest.approx(0.6)

    def test_config_hash_is_stable_and_key_order_free(self):
        a = cli.config_from_dict({"master_seed": 3, "threads": 2})
        b = cli.config_from_dict({"threads": 2, "master_seed": 3})
        assert a.config_hash() == b.config_hash()
        assert len(a.config_hash()) == 64
        assert a.config_hash() != cli.config_from_dict({}).config_hash()

    def test_unknown_top_level_key(self):
        with pytest.raises(cli.ConfigError, match="unknown"):
            cli.config_from_dict({"volume": 11})

    def test_unknown_nested_keys(self):
        with pytest.raises(cli.ConfigError):
            cli.config_from_dict({"dataset": {"sizes": 3}})
        with pytest.raises(cli.ConfigError):
            cli.config_from_dict({"train": {"momentum": 0.9}})
        with pytest.raises(cli.ConfigError):
            cli.config_from_dict({"classify": {"margin": 0.1}})
        with pytest.raises(cli.ConfigError):
            cli.config_from_dict({"dataset": {"rule": {"kind": "circle", "side": 2}}})

    def test_type_and_range_validation(self):
        with pytest.raises(cli.ConfigError):
            cli.config_from_dict({"train": {"rounds": -1}})
        with pytest.raises(cli.ConfigError):
            cli.config_from_dict({"train": {"shot_counts": []}})
        with pytest.raises(cli.ConfigError):
            cli.config_from_dict({"train": {"shot_counts": [0]}})
        with pytest.raises(cli.ConfigError):
            cli.config_from_dict({"train": {"shot_counts": ["sometimes"]}})
        with pytest.raises(cli.ConfigError):
            cli.config_from_dict({"dataset": {"seeds": [1, 1]}})
        with pytest.raises(cli.ConfigError):
            cli.config_from_dict({"classify": {"threshold": 1.5}})
        with pytest.raises(cli.ConfigError):
            cli.config_from_dict({"dataset": {"rule": {"kind": "square"}}})

    def test_exact_keyword_maps_to_none(self):
        cfg = cli.config_from_dict({"train": {"shot_counts": ["exact", 5]}})
        assert cfg.shot_counts == (None, 5)

    def test_inline_circuit_round_trip(self):
        spec = circuit.default_reuploading_circuit()
        cfg = cli.config_from_dict({"circuit": circuit.spec_to_dict(spec)})
        built = cfg.build_spec()
        assert built.param_count == spec.param_count
        assert built.outcome == spec.outcome

    def test_load_config_missing_file(self, tmp_path):
        with pytest.raises(cli.ConfigError, match="not found"):
            cli.load_config(str(tmp_path / "nope.json"))

    def test_load_config_malformed_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(cli.ConfigError):
            cli.load_config(str(path))

    def test_seed_override(self, tmp_path):
        path = write_config(tmp_path, tiny_config_dict())
        cfg = cli.load_config(path, seed_override=7)
        assert cfg.master_seed == 7


class TestCmdTrain:
    def test_trace_row_count_and_schema(self, tmp_path):
        path = write_config(tmp_path, tiny_config_dict())
        out = cli.cmd_train(path, str(tmp_path / "out"))
        meta, header, rows = cli.read_table(out / "trace.csv")
        assert header == ["round", "param_index", "theta", "est_min", "exact_cost", "cum_shots"]
        assert len(rows) == 1 * 6
        assert meta["master_seed"] == "0"
        assert "config_sha256" in meta

    def test_default_experiment_writes_sixty_rows(self, tmp_path):
        data = tiny_config_dict()
        data["train"]["rounds"] = 10
        path = write_config(tmp_path, data)
        out = cli.cmd_train(path, str(tmp_path / "out"))
        _, _, rows = cli.read_table(out / "trace.csv")
        assert len(rows) == 60

    def test_zero_rounds_keeps_initial_params(self, tmp_path):
        data = tiny_config_dict()
        data["train"]["rounds"] = 0
        path = write_config(tmp_path, data)
        out = cli.cmd_train(path, str(tmp_path / "out"))
        payload = json.loads((out / "params.json").read_text())
        expected = shots.substream(0, 101, 0).uniform(-np.pi, np.pi, 6)
        np.testing.assert_allclose(payload["params"], expected, atol=1e-15)
        assert payload["n_all"] == "exact"
        assert payload["shots_used"] == 0

    def test_rerun_is_byte_identical(self, tmp_path):
        path = write_config(tmp_path, tiny_config_dict())
        out1 = cli.cmd_train(path, str(tmp_path / "a"))
        out2 = cli.cmd_train(path, str(tmp_path / "b"))
        assert (out1 / "trace.csv").read_bytes() == (out2 / "trace.csv").read_bytes()
        assert (out1 / "params.json").read_bytes() == (out2 / "params.json").read_bytes()


class TestCmdSweep:
    def test_outputs_and_summary(self, tmp_path):
        path = write_config(tmp_path, tiny_config_dict())
        out = cli.cmd_sweep(path, str(tmp_path / "out"), plot=False)
        meta, header, rows = cli.read_table(out / "results.csv")
        assert header == ["n_all", "seed", "final_cost", "tp", "fp", "tn", "fn", "tpr", "tnr", "p", "shots"]
        assert len(rows) == 2 * 2  # shot counts x seeds
        assert {r["n_all"] for r in rows} == {"exact", "1"}

        summary = json.loads((out / "summary.json").read_text())
        assert summary["meta"]["master_seed"] == 0
        by_n = {str(r["n_all"]): r for r in summary["rows"]}
        for name in ("exact", "1"):
            ps = [float(r["p"]) for r in rows if r["n_all"] == name]
            assert by_n[name]["mean_p"] == pytest.approx(np.mean(ps), abs=1e-12)
            expected_std = np.std(ps, ddof=1) if len(ps) > 1 else 0.0
            assert by_n[name]["std_p"] == pytest.approx(expected_std, abs=1e-12)
            assert by_n[name]["runs"] == len(ps)

        # regions files for the first seed, one per shot count
        assert (out / "regions_exact.csv").is_file()
        assert (out / "regions_1.csv").is_file()
        # timings sidecar exists but carries the non-reproducible data
        assert (out / "timings.csv").is_file()
        # plots disabled
        assert not list(out.glob("*.svg"))

    def test_rerun_results_byte_identical(self, tmp_path):
        path = write_config(tmp_path, tiny_config_dict())
        out1 = cli.cmd_sweep(path, str(tmp_path / "a"), plot=False)
        out2 = cli.cmd_sweep(path, str(tmp_path / "b"), plot=False)
        assert (out1 / "results.csv").read_bytes() == (out2 / "results.csv").read_bytes()
        assert (out1 / "summary.json").read_bytes() == (out2 / "summary.json").read_bytes()
        assert (out1 / "regions_1.csv").read_bytes() == (out2 / "regions_1.csv").read_bytes()

    def test_plot_toggle_writes_svgs(self, tmp_path):
        path = write_config(tmp_path, tiny_config_dict())
        out = cli.cmd_sweep(path, str(tmp_path / "out"), plot=True)
        assert (out / "curve.svg").is_file()
        assert (out / "regions_exact.svg").is_file()
        assert (out / "regions_1.svg").is_file()

    def test_threads_match_serial(self, tmp_path):
        data = tiny_config_dict()
        path = write_config(tmp_path, data)
        serial = cli.cmd_sweep(path, str(tmp_path / "s"), plot=False)
        threaded = cli.cmd_sweep(path, str(tmp_path / "t"), threads=3, plot=False)
        assert (serial / "results.csv").read_bytes() == (threaded / "results.csv").read_bytes()


class TestCmdBudget:
    def test_stock_numbers(self, tmp_path, capsys):
        path = write_config(tmp_path, {})
        text = cli.cmd_budget(path)
        capsys.readouterr()
        lines = {line.split()[0]: line.split() for line in text.splitlines()[3:]}
        # N_all=1 paired run: 180,000 total, 100x cheaper than the
        # single-batch 200-shot reference
        assert lines["1"][2] == "180000"
        assert float(lines["1"][3]) == pytest.approx(100.0)
        # N_all=200 paired run costs twice the single-batch reference
        assert int(lines["200"][2]) == 10 * 6 * 300 * 5 * 2 * 200
        assert float(lines["200"][3]) == pytest.approx(0.5)
        assert "reference: single-batch 200-shot run = 18000000 shots" in text
        assert lines["exact"][1] == "0"

    def test_per_update_column(self, tmp_path):
        path = write_config(tmp_path, {})
        text = cli.cmd_budget(path)
        row = next(l for l in text.splitlines() if l.split() and l.split()[0] == "1")
        per_update, total = int(row.split()[1]), int(row.split()[2])
        assert per_update == 300 * 5 * 2
        assert total == 10 * 6 * per_update

    def test_zero_training_points(self, tmp_path):
        path = write_config(tmp_path, {"dataset": {"train_size": 0}})
        text = cli.cmd_budget(path)
        for line in text.splitlines()[3:]:
            cells = line.split()
            if cells[0] == "exact":
                continue
            assert cells[2] == "0"


class TestCmdPlot:
    def make_results(self, tmp_path, p=0.9):
        rows = ["# master_seed = 0", "n_all,seed,final_cost,tp,fp,tn,fn,tpr,tnr,p,shots"]
        for n_all in ("exact", "5"):
            for seed in (0, 1):
                rows.append(f"{n_all},{seed},0.1,10,2,8,0,1.0,0.8,{p},0")
        path = tmp_path / "results.csv"
        path.write_text("\n".join(rows) + "\n")
        return path

    def make_regions(self, tmp_path, perfect=True):
        lines = [
            "# n_all=exact",
            "# rule=circle center=(0,0) radius=0.6",
            "x1,x2,label,pred,prob",
        ]
        rng = np.random.default_rng(0)
        rule_radius = 0.6
        for _ in range(40):
            x1, x2 = rng.uniform(-1, 1, 2)
            label = 1 if x1 * x1 + x2 * x2 <= rule_radius**2 else 0
            pred = label if perfect else 1 - label
            lines.append(f"{x1},{x2},{label},{pred},{float(label)}")
        path = tmp_path / "regions_exact.csv"
        path.write_text("\n".join(lines) + "\n")
        return path

    def test_curve_from_constant_results(self, tmp_path):
        path = self.make_results(tmp_path)
        target = cli.cmd_plot(str(path), "curve", str(tmp_path / "plots"))
        assert target.is_file()
        assert target.suffix == ".svg"

    def test_regions_perfect_annotation(self, tmp_path):
        path = self.make_regions(tmp_path, perfect=True)
        target = cli.cmd_plot(str(path), "regions", str(tmp_path / "plots"))
        assert "P = 1.000" in target.read_text()

    def test_trace_plot(self, tmp_path):
        config = write_config(tmp_path, tiny_config_dict())
        out = cli.cmd_train(config, str(tmp_path / "run"))
        target = cli.cmd_plot(str(out / "trace.csv"), "trace", str(tmp_path / "plots"))
        assert target.is_file()
        assert target.name == "trace.svg"

    def test_trace_plot_rejects_wrong_schema(self, tmp_path):
        path = self.make_results(tmp_path)  # lacks the trace columns
        with pytest.raises(cli.ConfigError, match="malformed trace"):
            cli.cmd_plot(str(path), "trace", str(tmp_path / "plots"))

    def test_empty_results_error_and_no_file(self, tmp_path):
        empty = tmp_path / "results.csv"
        empty.write_text("")
        with pytest.raises(cli.ConfigError):
            cli.cmd_plot(str(empty), "curve", str(tmp_path / "plots"))
        assert not (tmp_path / "plots" / "curve.svg").exists()

    def test_missing_file(self, tmp_path):
        with pytest.raises(cli.ConfigError, match="not found"):
            cli.cmd_plot(str(tmp_path / "none.csv"), "curve")

    def test_unknown_kind(self, tmp_path):
        path = self.make_results(tmp_path)
        with pytest.raises(cli.ConfigError, match="kind"):
            cli.cmd_plot(str(path), "heatmap")


class TestMain:
    def test_budget_exit_zero(self, tmp_path, capsys):
        path = write_config(tmp_path, tiny_config_dict())
        assert cli.main(["budget", "--config", path]) == 0
        assert "shot budget" in capsys.readouterr().out

    def test_missing_config_exit_one(self, tmp_path, capsys):
        rc = cli.main(["budget", "--config", str(tmp_path / "none.json")])
        assert rc == 1
        assert "error" in capsys.readouterr().err

    def test_malformed_config_exit_one(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("[1, 2, 3]")
        assert cli.main(["budget", "--config", str(path)]) == 1
        capsys.readouterr()

    def test_bad_flag_exit_one(self, capsys):
        assert cli.main(["budget"]) == 1  # --config is required
        capsys.readouterr()

    def test_unknown_plot_kind_exit_one(self, tmp_path, capsys):
        results = tmp_path / "r.csv"
        results.write_text("n_all,seed,p\n")
        assert cli.main(["plot", str(results), "--kind", "pie"]) == 1
        capsys.readouterr()

    def test_runtime_failure_exit_two(self, tmp_path, capsys):
        config = write_config(tmp_path, tiny_config_dict())
        blocker = tmp_path / "blocked"
        blocker.write_text("a file, not a directory")
        rc = cli.main(["train", "--config", config, "--out", str(blocker)])
        assert rc == 2
        assert "runtime error" in capsys.readouterr().err

    def test_seed_override_changes_hash(self, tmp_path):
        path = write_config(tmp_path, tiny_config_dict())
        out1 = cli.cmd_train(path, str(tmp_path / "a"))
        out2 = cli.cmd_train(path, str(tmp_path / "b"), seed=1)
        meta1, _, _ = cli.read_table(out1 / "trace.csv")
        meta2, _, _ = cli.read_table(out2 / "trace.csv")
        assert meta1["master_seed"] == "0"
        assert meta2["master_seed"] == "1"
        assert meta1["config_sha256"] != meta2["config_sha256"]


class TestReadTable:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "t.csv"
        cli._write_table(
            path, ["# master_seed = 7", "# note = hello"],
            ["a", "b"], [[1, 2.5], [3, float("inf")]],
        )
        meta, header, rows = cli.read_table(path)
        assert meta["master_seed"] == "7"
        assert header == ["a", "b"]
        assert rows[0]["a"] == "1"
        assert float(rows[0]["b"]) == 2.5

    def test_no_table_raises(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("# only = comments\n")
        with pytest.raises(ValueError):
            cli.read_table(path)
