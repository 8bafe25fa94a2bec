"""Tests for the experiment config, subcommands and the nvqrao entry point."""

import json
import shutil
import tempfile
from pathlib import Path

import pandas as pd
import pytest

from nvqrao.cli.commands import (
    ENTROPY_COLUMNS,
    aggregate,
    build_report,
    cmd_encode,
    cmd_fixed_params,
    cmd_gen,
    cmd_oracle,
    cmd_report,
    cmd_run,
    derive_seed,
    instance_id,
)
from nvqrao.cli.config import (
    ConfigError,
    ExperimentConfig,
    config_hash,
    load_config,
    settings_hash,
)
from nvqrao.cli.main import EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME, main
from nvqrao.graph import Graph
from nvqrao.rounding import CSV_COLUMNS


class TestExperimentConfig:
    """Test config validation, overrides and hashing."""

    def setup_method(self):
        """Set up test fixtures."""
        self.temp_dir = tempfile.mkdtemp(prefix="nvqrao_config_test_")

    def teardown_method(self):
        """Clean up after tests."""
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def test_defaults(self):
        """Defaults describe the N=10,12 cubic suite with m=3 and exact evolution."""
        config = ExperimentConfig()
        assert config.sizes == [10, 12]
        assert config.m == 3
        assert config.evolutions == ["exact"]
        assert config.entropy_base is None

    @pytest.mark.parametrize(
        "overrides",
        [
            {"m": 4},
            {"mode": "hybrid"},
            {"mixer": "W"},
            {"evolutions": ["trotter"]},
            {"p_min": 3, "p_max": 2},
            {"params_source": "fixed-table"},
            {"entropy_unit": "bans"},
            {"prng": "MT19937"},
            {"sampled_shots": 0},
        ],
    )
    def test_invalid_values(self, overrides):
        """Invalid settings raise ConfigError."""
        with pytest.raises(ConfigError):
            ExperimentConfig(**overrides)

    def test_with_overrides(self):
        """None overrides are ignored and the result is validated."""
        config = ExperimentConfig().with_overrides(m=2, mixer=None)
        assert config.m == 2
        assert config.mixer == "Z"
        with pytest.raises(ConfigError, match="Unknown"):
            ExperimentConfig().with_overrides(colour="red")

    def test_hash_is_stable(self):
        """Equal configs hash equally; any change alters the hash."""
        assert config_hash(ExperimentConfig()) == config_hash(ExperimentConfig())
        assert config_hash(ExperimentConfig()) != config_hash(ExperimentConfig(seed=1))
        assert len(config_hash(ExperimentConfig())) == 16

    def test_settings_hash_ignores_scope(self):
        """Depth range, output, instance scope and workers leave the settings hash alone."""
        base = settings_hash(ExperimentConfig())
        for overrides in (
            {"p_max": 2},
            {"output": "elsewhere"},
            {"instance_ids": ["n10-000"]},
            {"workers": 4},
            {"evolutions": ["trotter:2"]},
        ):
            assert settings_hash(ExperimentConfig(**overrides)) == base

    def test_settings_hash_tracks_values(self):
        """Settings that change a cell's values change the hash."""
        base = settings_hash(ExperimentConfig())
        for overrides in (
            {"mixer": "X"},
            {"init": "plus"},
            {"m": 2},
            {"p_min": 0},
            {"budget": 10},
            {"entropy_unit": "bits"},
        ):
            assert settings_hash(ExperimentConfig(**overrides)) != base
        assert settings_hash(ExperimentConfig(), {"schedules": {"1": [0.1]}}) != base

    def test_settings_hash_normalizes_mixer_and_init(self):
        """Spelling out the default initial state or lowercasing the mixer keeps the hash."""
        assert settings_hash(ExperimentConfig(mixer="x")) == settings_hash(
            ExperimentConfig(mixer="X", init="plus")
        )
        assert settings_hash(ExperimentConfig(init="zero")) == settings_hash(ExperimentConfig())

    def test_load_file(self):
        """JSON files load into a config."""
        path = Path(self.temp_dir) / "config.json"
        path.write_text(json.dumps({"sizes": [8], "entropy_unit": "bits"}))
        config = load_config(path)
        assert config.sizes == [8]
        assert config.entropy_base == 2.0

    def test_load_errors(self):
        """Missing files, bad JSON and unknown keys are config errors."""
        with pytest.raises(ConfigError, match="not found"):
            load_config(Path(self.temp_dir) / "missing.json")
        bad = Path(self.temp_dir) / "bad.json"
        bad.write_text("{not json")
        with pytest.raises(ConfigError, match="valid JSON"):
            load_config(bad)
        with pytest.raises(ConfigError, match="Unknown"):
            load_config({"size": [8]})


class CommandTestCase:
    """Shared temp-dir handling for command tests."""

    def setup_method(self):
        """Set up test fixtures."""
        self.temp_dir = tempfile.mkdtemp(prefix="nvqrao_cli_test_")
        self.out = str(Path(self.temp_dir) / "run")

    def teardown_method(self):
        """Clean up after tests."""
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def config(self, **overrides) -> ExperimentConfig:
        settings = dict(
            sizes=[6],
            instances_per_size=2,
            output=self.out,
            p_max=2,
            restarts=1,
            budget=30,
            permutations=2,
        )
        settings.update(overrides)
        return ExperimentConfig(**settings)

    def path(self, *parts: str) -> Path:
        return Path(self.out, *parts)

    def write_k33(self) -> None:
        """Hand-write a one-instance suite holding K33."""
        self.path("instances").mkdir(parents=True)
        self.path("instances", "k33.json").write_text(Graph.complete_bipartite(3, 3).to_json())
        manifest = {
            "instances": [{"id": "k33", "status": "ok", "file": "instances/k33.json", "seed": 5}]
        }
        self.path("instances", "manifest.json").write_text(json.dumps(manifest))

    def write_json(self, name: str, data) -> str:
        path = Path(self.temp_dir) / name
        path.write_text(json.dumps(data))
        return str(path)


class TestGenerate(CommandTestCase):
    """Test instance generation."""

    def test_helpers(self):
        """Ids are zero-padded and derived seeds are stable."""
        assert instance_id(6, 3) == "n06-003"
        assert derive_seed(0, 6, 3) == derive_seed(0, 6, 3)
        assert derive_seed(0, 6, 3) != derive_seed(0, 6, 4)

    def test_writes_instances_and_manifest(self):
        """gen writes one file per instance plus a manifest."""
        summary = cmd_gen(self.config())
        assert summary["generated"] == 2
        manifest = json.loads(self.path("instances", "manifest.json").read_text())
        assert [e["id"] for e in manifest["instances"]] == ["n06-000", "n06-001"]
        assert manifest["prng"] == "PCG64"
        graph = Graph.from_json(self.path("instances", "n06-000.json").read_text())
        assert graph.degrees() == [3] * 6

    def test_rerun_is_byte_identical(self):
        """Regenerating with the same config reproduces every file."""
        cmd_gen(self.config())
        files = sorted(self.path("instances").iterdir())
        before = [f.read_bytes() for f in files]
        cmd_gen(self.config())
        assert [f.read_bytes() for f in sorted(self.path("instances").iterdir())] == before

    def test_odd_size_is_recorded(self):
        """N*k odd fails that instance without stopping the suite."""
        summary = cmd_gen(self.config(sizes=[5, 6], instances_per_size=1))
        assert (summary["generated"], summary["failed"]) == (1, 1)
        manifest = json.loads(self.path("instances", "manifest.json").read_text())
        failed = [e for e in manifest["instances"] if e["status"] == "error"]
        assert failed[0]["id"] == "n05-000"
        assert "even" in failed[0]["error"]


class TestEncodeAndOracle(CommandTestCase):
    """Test encoding and oracle dumps."""

    def test_encode(self):
        """encode writes an encoding JSON and a Pauli-sum file per instance."""
        cmd_gen(self.config())
        assert cmd_encode(self.config())["encoded"] == 2
        text = self.path("hamiltonians", "n06-000.txt").read_text()
        assert text.startswith("# n06-000 m=3")
        encoding = json.loads(self.path("encodings", "n06-000.json").read_text())
        assert encoding["m"] == 3

    def test_oracle(self):
        """oracle caches brute-force extrema per instance."""
        self.write_k33()
        assert cmd_oracle(self.config())["oracles"] == 1
        oracle = json.loads(self.path("oracles", "k33.json").read_text())
        assert (oracle["e_min"], oracle["e_max"], oracle["max_cut_value"]) == (-9, 9, 9)

    def test_oracle_cap(self):
        """Graphs above the node cap are reported as failures."""
        self.write_k33()
        summary = cmd_oracle(self.config(max_nodes=4))
        assert (summary["oracles"], summary["failed"]) == (0, 1)

    def test_missing_manifest(self):
        """Commands need a generated suite."""
        with pytest.raises(ConfigError, match="manifest"):
            cmd_encode(self.config())

    def test_unknown_instance_id(self):
        """Requested ids must exist in the manifest."""
        self.write_k33()
        with pytest.raises(ConfigError, match="n99-000"):
            cmd_oracle(self.config(instance_ids=["n99-000"]))


class TestRun(CommandTestCase):
    """Test metric runs."""

    def test_empty_suite_writes_headers(self):
        """No instances give header-only tables."""
        cmd_gen(self.config(instances_per_size=0))
        summary = cmd_run(self.config(instances_per_size=0))
        assert summary["rows"] == 0
        assert self.path("metrics.csv").read_text() == ",".join(CSV_COLUMNS) + "\n"
        assert self.path("entropy.csv").read_text() == ",".join(ENTROPY_COLUMNS) + "\n"

    def test_explicit_p_zero_on_k33(self):
        """The Z-mixer start state of K33 has relaxed energy +1 and rounds with ties."""
        self.write_k33()
        params = self.write_json("p0.json", {"gammas": [], "betas": []})
        cmd_run(self.config(params_source="explicit", explicit_params=params))
        metrics = pd.read_csv(self.path("metrics.csv"))
        assert len(metrics) == 1
        row = metrics.iloc[0]
        assert row["p"] == 0
        assert row["e_qrao"] == pytest.approx(1.0)
        assert row["alpha_r"] == pytest.approx(1 / 3)
        assert row["ties"] == 4
        assert row["qubits_qrao"] == 2
        entropy = pd.read_csv(self.path("entropy.csv"))
        assert entropy["entropy"].tolist() == pytest.approx([0.0])

    def test_rows_per_depth_and_evolution(self):
        """Every (instance, evolution, p) gets one row, sorted."""
        cmd_gen(self.config())
        summary = cmd_run(self.config(evolutions=["exact", "trotter:2"]))
        assert summary["completed"] == 2 * 2 * 2
        metrics = pd.read_csv(self.path("metrics.csv"))
        assert list(metrics.columns) == list(CSV_COLUMNS)
        assert metrics.groupby(["instance", "evolution"]).size().tolist() == [2, 2, 2, 2]
        entropy = pd.read_csv(self.path("entropy.csv"))
        assert len(entropy) == 4 * (2 + 3)

    def test_resume_skips_finished_cells(self):
        """A second run skips every cell and leaves the tables unchanged."""
        cmd_gen(self.config())
        cmd_run(self.config())
        before = self.path("metrics.csv").read_bytes()
        summary = cmd_run(self.config())
        assert (summary["completed"], summary["skipped"]) == (0, 4)
        assert self.path("metrics.csv").read_bytes() == before

    def test_resume_fills_missing_depths(self):
        """Raising p_max evaluates only the new depths and matches an uninterrupted run."""
        cmd_gen(self.config())
        cmd_run(self.config(p_max=1))
        summary = cmd_run(self.config(p_max=2))
        assert (summary["completed"], summary["skipped"]) == (2, 2)

        fresh = str(Path(self.temp_dir) / "fresh")
        cmd_run(self.config(output=fresh, instances=self.out))
        for table in ("metrics.csv", "entropy.csv"):
            resumed = pd.read_csv(self.path(table))
            expected = pd.read_csv(Path(fresh, table))
            if "config_hash" in expected.columns:
                resumed = resumed.drop(columns="config_hash")
                expected = expected.drop(columns="config_hash")
            pd.testing.assert_frame_equal(resumed, expected, check_exact=False, rtol=1e-9)

    def test_changed_settings_are_not_skipped(self):
        """A rerun with another mixer evaluates its own rows next to the old ones."""
        cmd_gen(self.config())
        first = cmd_run(self.config(mixer="Z", p_max=1))
        second = cmd_run(self.config(mixer="X", p_max=1))
        assert (second["completed"], second["skipped"]) == (2, 0)
        assert second["rows"] == 4
        assert first["settings_hash"] != second["settings_hash"]
        metrics = pd.read_csv(self.path("metrics.csv"))
        assert set(metrics["mixer"]) == {"X", "Z"}
        again = cmd_run(self.config(mixer="x", p_max=1))
        assert (again["completed"], again["skipped"]) == (0, 2)

    @pytest.mark.parametrize(
        "overrides",
        [{"m": 2}, {"mode": "standard", "mixer": "X"}, {"init": "plus"}, {"budget": 31}],
    )
    def test_value_settings_start_new_rows(self, overrides):
        """m, mode, init and the optimizer budget all key separate rows."""
        cmd_gen(self.config())
        cmd_run(self.config(p_max=1))
        summary = cmd_run(self.config(p_max=1, **overrides))
        assert (summary["completed"], summary["skipped"]) == (2, 0)

    def test_init_is_recorded_apart_from_the_mixer(self):
        """An explicit initial state is written next to the mixer it runs with."""
        cmd_gen(self.config())
        cmd_run(self.config(p_max=1))
        cmd_run(self.config(p_max=1, init="plus"))
        metrics = pd.read_csv(self.path("metrics.csv"))
        pairs = set(zip(metrics["mixer"], metrics["init"]))
        assert pairs == {("Z", "zero"), ("Z", "plus")}

    def test_standard_mode_uses_one_qubit_per_node(self):
        """Standard rows report N qubits next to the packed QRAO count."""
        cmd_gen(self.config())
        cmd_run(self.config(mode="standard", mixer="X", p_max=1))
        metrics = pd.read_csv(self.path("metrics.csv"))
        assert (metrics["qubits_standard"] == 6).all()
        assert (metrics["qubits_qrao"] < 6).all()
        assert (metrics["rounding"] == "expectation").all()

    def test_dump_states(self):
        """dump_states writes a binary state and its sidecar per cell."""
        self.write_k33()
        params = self.write_json("p1.json", {"gammas": [0.3], "betas": [0.2]})
        summary = cmd_run(
            self.config(params_source="explicit", explicit_params=params, dump_states=True)
        )
        folder = self.path("states", "k33", summary["settings_hash"], "exact")
        assert (folder / "p1.bin").stat().st_size == 8 + 4 * 16
        sidecar = json.loads((folder / "p1.bin.json").read_text())
        assert sidecar["metadata"]["gammas"] == [0.3]

    def test_fixed_table_mismatch(self):
        """A table built for another mode or mixer is refused."""
        self.write_k33()
        table = self.write_json(
            "table.json",
            {"mode": "standard", "mixer": "X", "schedules": {"1": {"gammas": [1], "betas": [1]}}},
        )
        with pytest.raises(ConfigError, match="mode=standard"):
            cmd_run(self.config(params_source="fixed-table", angle_table=table, p_max=1))

    def test_fixed_table_missing_depth(self):
        """Every requested depth needs a schedule."""
        self.write_k33()
        table = self.write_json(
            "table.json",
            {
                "mode": "qrao",
                "mixer": "Z",
                "m": 3,
                "schedules": {"1": {"gammas": [1], "betas": [1]}},
            },
        )
        with pytest.raises(ConfigError, match="p=\\[2\\]"):
            cmd_run(self.config(params_source="fixed-table", angle_table=table))


class TestFixedParams(CommandTestCase):
    """Test the fixed-parameter command."""

    def test_table_and_concentration(self):
        """fixed-params writes the table with provenance and the spread report."""
        cmd_gen(self.config())
        summary = cmd_fixed_params(self.config())
        assert summary["instances"] == 2
        table = json.loads(self.path("fixed_params.json").read_text())
        assert sorted(table["schedules"]) == ["1", "2"]
        assert table["provenance"]["instances"] == ["n06-000", "n06-001"]
        assert table["provenance"]["prng"] == "PCG64"
        concentration = pd.read_csv(self.path("concentration.csv"))
        assert set(concentration["which"]) == {"gamma", "beta"}

    def test_table_feeds_run(self):
        """A generated table can be evaluated with params_source fixed-table."""
        cmd_gen(self.config())
        cmd_fixed_params(self.config(train_ids=["n06-000"]))
        table = str(self.path("fixed_params.json"))
        cmd_run(self.config(params_source="fixed-table", angle_table=table))
        metrics = pd.read_csv(self.path("metrics.csv"))
        assert (metrics["params_source"] == "fixed-table").all()
        assert len(metrics) == 4

    def test_no_training_instances(self):
        """An empty suite cannot be averaged."""
        cmd_gen(self.config(instances_per_size=0))
        with pytest.raises(ConfigError, match="No training"):
            cmd_fixed_params(self.config(instances_per_size=0))


def metrics_row(**values):
    row = {
        "instance": "a",
        "n_nodes": 10,
        "mode": "qrao",
        "m": 3,
        "mixer": "X",
        "init": "plus",
        "evolution": "exact",
        "p": 1,
        "params_source": "optimize",
        "e_qrao": -1.0,
        "alpha_r": 0.8,
        "alpha_c": 0.9,
        "qubits_qrao": 4,
        "qubits_standard": 10,
        "settings_hash": "s1",
    }
    row.update(values)
    return row


def entropy_row(instance, layer, value, p=1, settings="s1"):
    return {
        "instance": instance,
        "p": p,
        "evolution": "exact",
        "settings_hash": settings,
        "layer": layer,
        "entropy": value,
    }


EMPTY_ENTROPY = pd.DataFrame(columns=ENTROPY_COLUMNS)


class TestReport(CommandTestCase):
    """Test report aggregation."""

    def test_aggregate(self):
        """Means, standard errors and counts per group."""
        frame = pd.DataFrame({"p": [1, 1, 2], "x": [1.0, 3.0, 5.0]})
        result = aggregate(frame, ["p"], ["x"])
        assert list(result.columns) == ["p", "x_mean", "x_sem", "n"]
        assert result["x_mean"].tolist() == [2.0, 5.0]
        assert result["x_sem"].tolist() == pytest.approx([1.0, 0.0])
        assert result["n"].tolist() == [2, 1]

    def test_aggregate_empty(self):
        """Empty input gives a header-only table."""
        result = aggregate(pd.DataFrame(columns=["p", "x"]), ["p"], ["x"])
        assert result.empty
        assert list(result.columns) == ["p", "x_mean", "x_sem", "n"]

    def test_depth_groups(self):
        """The depth table splits by mode, evolution and p."""
        metrics = pd.DataFrame(
            [
                metrics_row(),
                metrics_row(instance="b", alpha_r=0.6),
                metrics_row(evolution="trotter:4"),
                metrics_row(mode="standard", m=None),
            ]
        )
        depth = build_report(metrics, EMPTY_ENTROPY)["fig4b_depth"]
        assert len(depth) == 3
        qrao_exact = depth[(depth["mode"] == "qrao") & (depth["evolution"] == "exact")]
        assert qrao_exact["alpha_r_mean"].iloc[0] == pytest.approx(0.7)
        assert qrao_exact["n"].iloc[0] == 2

    def test_performance_ratio(self):
        """Fixed rows are paired with optimized rows of the same cell."""
        metrics = pd.DataFrame(
            [
                metrics_row(alpha_r=0.8, alpha_c=1.0),
                metrics_row(params_source="fixed-table", alpha_r=0.72, alpha_c=0.9),
            ]
        )
        ratio = build_report(metrics, EMPTY_ENTROPY)["fig4a_performance_ratio"]
        assert ratio["ratio_r_mean"].iloc[0] == pytest.approx(0.9)
        assert ratio["ratio_c_mean"].iloc[0] == pytest.approx(0.9)
        assert build_report(metrics, EMPTY_ENTROPY)["figA8_m2_ratio"].empty

    def test_mixed_m(self):
        """Figures that pool QRAO rows refuse mixed m."""
        metrics = pd.DataFrame([metrics_row(), metrics_row(instance="b", m=2)])
        with pytest.raises(ValueError, match="mixed m"):
            build_report(metrics, EMPTY_ENTROPY)

    def test_missing_columns(self):
        """Tables without the required columns are rejected."""
        with pytest.raises(ValueError, match="missing columns"):
            build_report(pd.DataFrame({"instance": ["a"]}), EMPTY_ENTROPY)

    def test_entropy_maxima(self):
        """The entropy figure averages each cell's peak entropy."""
        metrics = pd.DataFrame([metrics_row(), metrics_row(instance="b")])
        entropy = pd.DataFrame(
            [entropy_row("a", 0, 0.0), entropy_row("a", 1, 0.4)]
            + [entropy_row("b", 0, 0.0), entropy_row("b", 1, 0.6)]
        )
        figure = build_report(metrics, entropy)["fig7_entropy"]
        assert figure["entropy_mean"].iloc[0] == pytest.approx(0.5)

    def test_entropy_layers(self):
        """The trajectory table averages entropy layer by layer."""
        metrics = pd.DataFrame([metrics_row(), metrics_row(instance="b")])
        entropy = pd.DataFrame(
            [entropy_row("a", 0, 0.0), entropy_row("a", 1, 0.4), entropy_row("a", 2, 0.2)]
            + [entropy_row("b", 0, 0.0), entropy_row("b", 1, 0.6), entropy_row("b", 2, 0.4)]
        )
        layers = build_report(metrics, entropy)["fig7_entropy_layers"]
        assert layers["layer"].tolist() == [0, 1, 2]
        assert layers["entropy_mean"].tolist() == pytest.approx([0.0, 0.5, 0.3])
        assert layers["n"].tolist() == [2, 2, 2]

    def test_entropy_against_alpha(self):
        """Each cell's peak entropy sits next to its approximation ratios."""
        metrics = pd.DataFrame(
            [
                metrics_row(alpha_r=0.8, alpha_c=0.9),
                metrics_row(instance="b", alpha_r=0.6, alpha_c=1.0),
            ]
        )
        entropy = pd.DataFrame(
            [entropy_row("a", 0, 0.0), entropy_row("a", 1, 0.4)]
            + [entropy_row("b", 0, 0.0), entropy_row("b", 1, 0.7), entropy_row("b", 2, 0.5)]
        )
        table = build_report(metrics, entropy)["fig7_entropy_vs_alpha"]
        assert table["instance"].tolist() == ["a", "b"]
        assert table["max_entropy"].tolist() == pytest.approx([0.4, 0.7])
        assert table["alpha_r"].tolist() == pytest.approx([0.8, 0.6])
        assert table["alpha_c"].tolist() == pytest.approx([0.9, 1.0])

    def test_entropy_keeps_settings_apart(self):
        """Entropy rows join only the metrics row produced under the same settings."""
        metrics = pd.DataFrame(
            [metrics_row(alpha_r=0.8), metrics_row(mixer="Z", init="zero", settings_hash="s2")]
        )
        entropy = pd.DataFrame(
            [entropy_row("a", 1, 0.4), entropy_row("a", 1, 0.1, settings="s2")]
        )
        table = build_report(metrics, entropy)["fig7_entropy_vs_alpha"]
        assert len(table) == 2
        assert sorted(table["max_entropy"]) == pytest.approx([0.1, 0.4])

    def test_empty_entropy_tables(self):
        """Without entropy rows every entropy table is header-only."""
        tables = build_report(pd.DataFrame([metrics_row()]), EMPTY_ENTROPY)
        assert tables["fig7_entropy_layers"].empty
        assert "max_entropy" in tables["fig7_entropy_vs_alpha"].columns

    def test_mixer_table_splits_by_init(self):
        """Rows with one mixer but different initial states are grouped apart."""
        metrics = pd.DataFrame(
            [
                metrics_row(alpha_r=0.8),
                metrics_row(init="zero", alpha_r=0.4, settings_hash="s2"),
            ]
        )
        mixers = build_report(metrics, EMPTY_ENTROPY)["fig2_mixers"]
        assert list(mixers.columns[:3]) == ["mixer", "init", "p"]
        by_init = dict(zip(mixers["init"], mixers["alpha_r_mean"]))
        assert by_init == {"plus": pytest.approx(0.8), "zero": pytest.approx(0.4)}

    def test_nested_run_stores(self):
        """One input directory may hold several run stores; entropy tables are optional."""
        runs = Path(self.temp_dir) / "runs"
        (runs / "a").mkdir(parents=True)
        (runs / "b").mkdir()
        pd.DataFrame([metrics_row()]).to_csv(runs / "a" / "metrics.csv", index=False)
        pd.DataFrame([entropy_row("a", 0, 0.0), entropy_row("a", 1, 0.3)]).to_csv(
            runs / "a" / "entropy.csv", index=False
        )
        pd.DataFrame([metrics_row(instance="b")]).to_csv(runs / "b" / "metrics.csv", index=False)
        summary = cmd_report(self.config(report_inputs=[str(runs)]))
        assert summary["rows"] == 2
        manifest = json.loads(self.path("report", "manifest.json").read_text())
        assert [t.rsplit("/", 2)[-2] for t in manifest["metrics_tables"]] == ["a", "b"]
        peaks = pd.read_csv(self.path("report", "fig7_entropy_vs_alpha.csv"))
        assert peaks["max_entropy"].tolist() == pytest.approx([0.3])

    def test_input_without_metrics(self):
        """An input store with no metrics table is an error."""
        empty = Path(self.temp_dir) / "empty"
        empty.mkdir()
        with pytest.raises(FileNotFoundError, match="metrics.csv"):
            cmd_report(self.config(report_inputs=[str(empty)]))

    def test_empty_run_gives_header_only_tables(self):
        """Reporting an empty run writes every table with headers only."""
        cmd_gen(self.config(instances_per_size=0))
        cmd_run(self.config(instances_per_size=0))
        summary = cmd_report(self.config(instances_per_size=0))
        assert summary["rows"] == 0
        figure = self.path("report", "fig4b_depth.csv").read_text()
        assert figure.startswith("mode,evolution,p,alpha_r_mean")
        manifest = json.loads(self.path("report", "manifest.json").read_text())
        assert len(manifest["files"]) == len(summary["tables"])

    def test_report_from_run(self):
        """A real run aggregates into per-depth tables."""
        cmd_gen(self.config())
        cmd_run(self.config())
        cmd_report(self.config())
        depth = pd.read_csv(self.path("report", "fig4b_depth.csv"))
        assert depth["p"].tolist() == [1, 2]
        assert depth["n"].tolist() == [2, 2]


class TestMain(CommandTestCase):
    """Test the entry point and its exit codes."""

    def test_success(self, capsys):
        """A successful command prints its summary and exits 0."""
        code = main(["gen", "--output", self.out, "--sizes", "6", "--instances-per-size", "1"])
        assert code == EXIT_OK
        assert json.loads(capsys.readouterr().out)["generated"] == 1

    def test_config_file_and_flags(self, capsys):
        """Flags override values from --config."""
        config = self.write_json("config.json", {"sizes": [8], "instances_per_size": 3})
        code = main(["gen", "--config", config, "--output", self.out, "--instances-per-size", "1"])
        assert code == EXIT_OK
        assert json.loads(capsys.readouterr().out)["generated"] == 1
        assert self.path("instances", "n08-000.json").exists()

    def test_bad_flag_value(self):
        """Invalid flag values are configuration errors."""
        assert main(["gen", "--mode", "bogus"]) == EXIT_CONFIG

    def test_unknown_command(self):
        """An unknown subcommand is a configuration error."""
        assert main(["frobnicate"]) == EXIT_CONFIG

    def test_missing_config_file(self):
        """A missing --config file is a configuration error."""
        missing = str(Path(self.temp_dir) / "missing.json")
        assert main(["gen", "--config", missing, "--output", self.out]) == EXIT_CONFIG

    def test_missing_manifest(self):
        """Running before gen is a configuration error."""
        assert main(["run", "--output", self.out]) == EXIT_CONFIG

    def test_runtime_failure(self):
        """Reporting a store without metrics fails with exit code 2."""
        assert main(["report", "--output", self.out]) == EXIT_RUNTIME
