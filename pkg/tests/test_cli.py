"""Tests for the command-line surface."""

import json
import sys
from pathlib import Path

from click.testing import CliRunner

# Add repo root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.cli import cli
from src.enums import GapSpec
from src.lattice import prime_slope_gap
from src.reporting import read_csv, read_json


class TestCli:
    """Test exit codes, artifacts and run reports."""

    def setup_method(self):
        """Set up test fixtures."""
        self.runner = CliRunner()

    def invoke(self, tmp_path, *args):
        report = tmp_path / "report.json"
        result = self.runner.invoke(cli, ["--report", str(report), *args])
        data = json.loads(report.read_text(encoding="utf-8")) if report.exists() else None
        return result.exit_code, data

    def test_gen_enumerate(self, tmp_path):
        """Test the generator table starts with the unit vectors."""
        out = tmp_path / "gens.csv"
        code, report = self.invoke(tmp_path, "gen", "enumerate", "--radius", "5", "--out", str(out))
        assert code == 0
        rows = read_csv(out)
        assert [(r["a"], r["b"]) for r in rows[:4]] == [("-1", "0"), ("0", "-1"), ("0", "1"), ("1", "0")]
        assert report["schema"] == "rgap/1"
        assert report["results"]["count"]["value"] == len(rows)
        assert out.read_bytes().endswith(b"\r\n")

    def test_set_build_and_measure(self, tmp_path):
        """Test building a set, reading it back and measuring it."""
        desc = tmp_path / "set.json"
        code, report = self.invoke(
            tmp_path, "set", "build", "--epsilon", "0.25", "--truncation", "8", "--grid", "256", "--out", str(desc)
        )
        assert code == 0
        assert read_json(desc)["epsilon"] == 0.25
        assert report["results"]["certified_lower_bound"]["value"] >= 0.75

        code, report = self.invoke(tmp_path, "set", "measure", "--set", str(desc), "--grid", "256")
        assert code == 0
        measure = report["results"]["measure"]
        assert measure["value"] + measure["error"] >= 0.75

    def test_set_build_deterministic(self, tmp_path):
        """Test equal inputs give byte-identical descriptors."""
        first, second = tmp_path / "a.json", tmp_path / "b.json"
        for out in (first, second):
            self.invoke(tmp_path, "set", "build", "--epsilon", "0.25", "--truncation", "4", "--grid", "64", "--out", str(out))
        assert first.read_bytes() == second.read_bytes()

    def test_invalid_epsilon(self, tmp_path):
        """Test epsilon = 1.5 exits 2 with the error in the report."""
        code, report = self.invoke(
            tmp_path, "set", "build", "--epsilon", "1.5", "--truncation", "4", "--out", str(tmp_path / "s.json")
        )
        assert code == 2
        assert report["error"]["code"] == "INVALID_ARGUMENT"

    def test_invalid_alpha(self, tmp_path):
        """Test alpha outside (0,1) exits 2."""
        desc = tmp_path / "set.json"
        self.invoke(tmp_path, "set", "strips", "--strip", "2,0:0.05", "--out", str(desc))
        result = self.runner.invoke(cli, ["thm1", "--set", str(desc), "--alpha", "1.5", "--sizes", "4"])
        assert result.exit_code == 2

    def test_empty_primes(self, tmp_path):
        """Test an empty prime list exits 2."""
        table = tmp_path / "table.json"
        self.invoke(tmp_path, "fourier", "build", "--rect", "0,1,0,1", "--max-freq", "64", "--out", str(table))
        result = self.runner.invoke(cli, ["thm2", "--fourier", str(table), "--primes", ""])
        assert result.exit_code == 2

    def test_missing_file(self, tmp_path):
        """Test a missing descriptor exits 2."""
        code, report = self.invoke(tmp_path, "set", "measure", "--set", str(tmp_path / "nope.json"))
        assert code == 2
        assert "not found" in report["error"]["message"]

    def test_grid_cap(self, tmp_path):
        """Test a grid above the cap exits 3."""
        desc = tmp_path / "set.json"
        self.invoke(tmp_path, "set", "strips", "--strip", "1,0:0.05", "--out", str(desc))
        code, report = self.invoke(tmp_path, "set", "measure", "--set", str(desc), "--grid", "16384")
        assert code == 3
        assert report["error"]["code"] == "RESOURCE_LIMIT"

    def test_thm1_writes_decay_table(self, tmp_path):
        """Test the decay CSV for an axis strip family."""
        desc, out = tmp_path / "set.json", tmp_path / "decay.csv"
        self.invoke(
            tmp_path, "set", "strips", "--strip", "2,0:0.05", "--strip", "3,0:0.05", "--out", str(desc)
        )
        code, report = self.invoke(
            tmp_path, "thm1", "--set", str(desc), "--alpha", "0.5", "--sizes", "4,9", "--out", str(out)
        )
        assert code == 0
        rows = read_csv(out)
        assert [r["N"] for r in rows] == ["4", "9"]
        assert report["results"]["monotone"] is True
        assert float(rows[1]["value"]) < float(rows[0]["value"])

    def test_fourier_round_trip(self, tmp_path):
        """Test a rectangle table survives the artifact round trip."""
        table = tmp_path / "table.json"
        code, report = self.invoke(
            tmp_path, "fourier", "build", "--rect", "0,0.6,0,0.6", "--max-freq", "64", "--out", str(table)
        )
        assert code == 0
        assert abs(report["results"]["measure"]["value"] - 0.36) < 1e-12
        assert read_json(table)["max_freq"] == 64

    def test_certify_partial(self, tmp_path):
        """Test an unreachable target exits 4 and still reports gamma."""
        table = tmp_path / "table.json"
        self.invoke(tmp_path, "fourier", "build", "--rect", "0,0.6,0,0.6", "--max-freq", "64", "--out", str(table))
        code, report = self.invoke(
            tmp_path, "riesz", "certify", "--fourier", str(table), "--block", "2,1", "--target", "0.99"
        )
        assert code == 4
        assert report["results"]["success"] is False
        assert 0.0 < report["results"]["gamma"]["value"] < 0.36

    def test_thm2_full_torus(self, tmp_path):
        """Test Lambda on the full torus has 13 frequencies and gamma 1."""
        table, out = tmp_path / "table.json", tmp_path / "lambda.json"
        self.invoke(tmp_path, "fourier", "build", "--rect", "0,1,0,1", "--max-freq", "128", "--out", str(table))
        code, report = self.invoke(tmp_path, "thm2", "--fourier", str(table), "--primes", "2,3", "--out", str(out))
        assert code == 0
        data = read_json(out)
        assert len(data["frequencies"]) == 13
        assert abs(data["global_gamma"] - 1.0) < 1e-9
        assert data["partial"] is False
        assert report["results"]["spot_check_min"]["value"] >= data["global_gamma"] - 1e-9
        assert report["results"]["sections"] == 2
        assert report["results"]["frequencies"] == 13
        assert report["results"]["global_gamma"]["value"] == data["global_gamma"]

    def test_measure_samples_use_seed(self, tmp_path):
        """Test --samples selects Monte-Carlo and --seed makes it repeatable."""
        desc = tmp_path / "set.json"
        self.invoke(tmp_path, "set", "strips", "--strip", "1,0:0.05", "--out", str(desc))
        values = []
        for _ in range(2):
            code, report = self.invoke(
                tmp_path, "set", "measure", "--set", str(desc), "--samples", "20000", "--seed", "7"
            )
            assert code == 0
            assert report["results"]["method"] == "montecarlo"
            assert report["parameters"]["seed"] == 7
            values.append(report["results"]["measure"]["value"])
        assert values[0] == values[1]
        assert abs(values[0] - 0.9) <= report["results"]["measure"]["error"]

    def test_measure_grid_and_samples_rejected(self, tmp_path):
        """Test giving both --grid and --samples exits 2."""
        desc = tmp_path / "set.json"
        self.invoke(tmp_path, "set", "strips", "--strip", "1,0:0.05", "--out", str(desc))
        result = self.runner.invoke(
            cli, ["set", "measure", "--set", str(desc), "--grid", "256", "--samples", "20000"]
        )
        assert result.exit_code == 2

    def test_subcommand_run_options(self, tmp_path):
        """Test --threads and --seed after the subcommand override the group values."""
        desc = tmp_path / "set.json"
        self.invoke(tmp_path, "set", "strips", "--strip", "1,0:0.05", "--out", str(desc))
        code, report = self.invoke(
            tmp_path, "--seed", "1", "set", "measure", "--set", str(desc), "--grid", "64", "--threads", "2", "--seed", "5"
        )
        assert code == 0
        assert report["parameters"]["threads"] == 2
        assert report["parameters"]["seed"] == 5
        result = self.runner.invoke(cli, ["set", "measure", "--set", str(desc), "--threads", "0"])
        assert result.exit_code == 2

    def test_fourier_build_from_bad_set(self, tmp_path):
        """Test a bad-set raster keeps its measure within a finite error."""
        desc, table = tmp_path / "set.json", tmp_path / "table.json"
        self.invoke(
            tmp_path, "set", "build", "--epsilon", "0.25", "--truncation", "16", "--grid", "256", "--out", str(desc)
        )
        code, report = self.invoke(
            tmp_path, "fourier", "build", "--set", str(desc), "--grid", "256", "--max-freq", "32", "--out", str(table)
        )
        assert code == 0
        measure = report["results"]["measure"]
        assert measure["error"] < 1.0
        assert measure["value"] + measure["error"] >= 0.75

    def test_certify_writes_block(self, tmp_path):
        """Test the certificate artifact stores its block in GapSpec form."""
        table, out = tmp_path / "table.json", tmp_path / "cert.json"
        self.invoke(tmp_path, "fourier", "build", "--rect", "0,0.6,0,0.6", "--max-freq", "64", "--out", str(table))
        self.invoke(
            tmp_path, "riesz", "certify", "--fourier", str(table), "--block", "2,1", "--target", "0.1", "--out", str(out)
        )
        block = read_json(out)["block"]
        assert block["w1"] == [2, 1]
        assert GapSpec.from_dict(block) == prime_slope_gap(2, 1)

    def test_thm1_deterministic(self, tmp_path):
        """Test repeated decay runs give byte-identical tables."""
        desc = tmp_path / "set.json"
        self.invoke(tmp_path, "set", "strips", "--strip", "2,0:0.05", "--strip", "3,0:0.05", "--out", str(desc))
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (first, second):
            self.invoke(tmp_path, "thm1", "--set", str(desc), "--alpha", "0.5", "--sizes", "4,9", "--out", str(out))
        assert first.read_bytes() == second.read_bytes()

    def test_thm2_deterministic(self, tmp_path):
        """Test repeated assemblies give byte-identical Lambda files."""
        table = tmp_path / "table.json"
        self.invoke(tmp_path, "fourier", "build", "--rect", "0,0.6,0,0.6", "--out", str(table))
        first, second = tmp_path / "a.json", tmp_path / "b.json"
        for out in (first, second):
            self.invoke(tmp_path, "thm2", "--fourier", str(table), "--primes", "2,3", "--out", str(out))
        assert first.read_bytes() == second.read_bytes()
