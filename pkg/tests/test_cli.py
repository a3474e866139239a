"""End-to-end tests of the command-line interface."""

import json

import numpy as np
import pytest

from wqisa.cli import cli_main
from wqisa.io import RunConfig, read_cloud, write_cloud, write_config
from wqisa.synthetic import hemisphere_cloud, perturb


@pytest.fixture
def cloud_file(tmp_path):
    cloud = perturb(hemisphere_cloud(300, seed=1), noise_std=0.05, seed=2)
    path = tmp_path / "cloud.xyz"
    write_cloud(path, cloud)
    return path


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "run.cfg"
    write_config(RunConfig(k_grid=(1, 2, 3), max_iterations=6, seed=7), path)
    return path


class TestSplitCommand:
    def test_writes_three_files_with_expected_sizes(self, tmp_path, cloud_file):
        prefix = tmp_path / "parts"
        code = cli_main(
            ["split", "--cloud", str(cloud_file), "--out-prefix", str(prefix), "--seed", "3"]
        )
        assert code == 0
        sizes = [
            read_cloud(f"{prefix}_{name}.xyz").shape[0]
            for name in ("train", "validation", "test")
        ]
        assert sizes == [150, 75, 75]


class TestFitCommand:
    def test_fit_produces_surface_and_report(self, tmp_path, cloud_file, config_file):
        surface_path = tmp_path / "surface.json"
        report_path = tmp_path / "report.json"
        code = cli_main(
            [
                "fit",
                "--cloud", str(cloud_file),
                "--config", str(config_file),
                "--surface-out", str(surface_path),
                "--report-out", str(report_path),
            ]
        )
        assert code == 0
        report = json.loads(report_path.read_text())
        assert 1 <= len(report["report"]["iterations"]) <= 15
        assert report["report"]["stop_reason"] in (
            "gmse_increased",
            "max_iterations",
            "threshold_met",
            "stagnated",
        )
        assert report["config"]["seed"] == 7
        assert surface_path.exists()

    def test_fixed_seed_reports_are_byte_identical(self, tmp_path, cloud_file, config_file):
        outputs = []
        for tag in ("a", "b"):
            surface_path = tmp_path / f"surface_{tag}.json"
            report_path = tmp_path / f"report_{tag}.json"
            assert (
                cli_main(
                    [
                        "fit",
                        "--cloud", str(cloud_file),
                        "--config", str(config_file),
                        "--surface-out", str(surface_path),
                        "--report-out", str(report_path),
                    ]
                )
                == 0
            )
            outputs.append((surface_path.read_bytes(), report_path.read_bytes()))
        assert outputs[0] == outputs[1]


class TestEvalCommand:
    def test_perfect_fit_scores_zero(self, tmp_path):
        # constant cloud: the fitted surface reproduces it exactly
        rng = np.random.default_rng(4)
        cloud = np.column_stack([rng.uniform(0, 1, size=(64, 2)), np.full(64, 1.5)])
        cloud_path = tmp_path / "c.xyz"
        write_cloud(cloud_path, cloud)
        config_path = tmp_path / "run.cfg"
        write_config(RunConfig(k_grid=(2,), max_iterations=3, seed=1), config_path)
        surface_path = tmp_path / "s.json"
        report_path = tmp_path / "r.json"
        assert (
            cli_main(
                [
                    "fit",
                    "--cloud", str(cloud_path),
                    "--config", str(config_path),
                    "--surface-out", str(surface_path),
                    "--report-out", str(report_path),
                ]
            )
            == 0
        )
        eval_path = tmp_path / "eval.json"
        assert (
            cli_main(
                [
                    "eval",
                    "--surface", str(surface_path),
                    "--cloud", str(cloud_path),
                    "--out", str(eval_path),
                ]
            )
            == 0
        )
        payload = json.loads(eval_path.read_text())
        assert payload["stats"]["mse"] == 0.0
        # the set-to-set distance also sees planar gaps to the sample grid,
        # so it is positive even for a perfect height fit
        assert 0.0 <= payload["hausdorff"] < 0.5


class TestCompareCommand:
    def test_both_methods_reported_finite(self, tmp_path, cloud_file, config_file):
        out = tmp_path / "compare.json"
        code = cli_main(
            [
                "compare",
                "--cloud", str(cloud_file),
                "--config", str(config_file),
                "--out", str(out),
            ]
        )
        assert code == 0
        payload = json.loads(out.read_text())
        for method in ("wqisa", "mba"):
            block = payload[method]
            assert np.isfinite(block["validation_gmse"])
            assert np.isfinite(block["punctual"]["mse"])
            assert np.isfinite(block["hausdorff"])
            assert block["iterations"] >= 1


class TestSampleCommand:
    def test_two_by_two_grid(self, tmp_path, cloud_file, config_file):
        surface_path = tmp_path / "s.json"
        report_path = tmp_path / "r.json"
        cli_main(
            [
                "fit",
                "--cloud", str(cloud_file),
                "--config", str(config_file),
                "--surface-out", str(surface_path),
                "--report-out", str(report_path),
            ]
        )
        grid_path = tmp_path / "g.csv"
        code = cli_main(
            ["sample", "--surface", str(surface_path), "--resolution", "2x2", "--out", str(grid_path)]
        )
        assert code == 0
        grid = read_cloud(grid_path)
        assert grid.shape == (4, 3)


class TestSynthCommand:
    def test_writes_cloud(self, tmp_path):
        out = tmp_path / "h.xyz"
        code = cli_main(["synth", "--n", "500", "--seed", "9", "--out", str(out)])
        assert code == 0
        cloud = read_cloud(out)
        assert cloud.shape == (500, 3)

    def test_matches_library_generator(self, tmp_path):
        out = tmp_path / "h.xyz"
        cli_main(["synth", "--n", "50", "--seed", "3", "--out", str(out)])
        np.testing.assert_array_equal(read_cloud(out), hemisphere_cloud(50, seed=3))


class TestExitCodes:
    def test_usage_error_is_one(self):
        assert cli_main(["frobnicate"]) == 1
        assert cli_main(["fit", "--cloud", "x.xyz"]) == 1

    def test_data_error_is_two(self, tmp_path):
        missing = tmp_path / "missing.xyz"
        assert cli_main(
            [
                "split",
                "--cloud", str(missing),
                "--out-prefix", str(tmp_path / "p"),
            ]
        ) == 2

    def test_malformed_cloud_is_two(self, tmp_path, config_file):
        bad = tmp_path / "bad.xyz"
        bad.write_text("1 2 fish\n")
        assert (
            cli_main(
                [
                    "fit",
                    "--cloud", str(bad),
                    "--config", str(config_file),
                    "--surface-out", str(tmp_path / "s.json"),
                    "--report-out", str(tmp_path / "r.json"),
                ]
            )
            == 2
        )

    def test_help_exits_zero(self, capsys):
        assert cli_main(["--help"]) == 0
        assert "wqisa" in capsys.readouterr().out
