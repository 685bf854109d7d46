"""Command-line interface: subcommands, exit codes, file outputs."""

import json

import pytest

from blaschkeops.cli import main

FAST_FLAGS = ["--truncation", "128", "--corner", "16", "--grid", "1024"]


def write_config(tmp_path, **fields):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(fields))
    return str(path)


class TestVerifyCommand:
    def test_default_run_passes(self, capsys):
        assert main(["verify", *FAST_FLAGS]) == 0
        out = capsys.readouterr().out
        assert "overall: PASS" in out

    def test_failure_exit_code(self, capsys):
        code = main(["verify", *FAST_FLAGS, "--tol-override", "weight_sum=1e-30"])
        assert code == 1
        assert "FAIL" in capsys.readouterr().out

    def test_config_error_exit_code(self, capsys):
        assert main(["verify", "--truncation", "64", "--corner", "32"]) == 2
        assert "configuration error" in capsys.readouterr().err

    def test_missing_config_file(self, capsys):
        assert main(["verify", "--config", "/no/such/file.json"]) == 2

    def test_malformed_tol_override(self, capsys):
        assert main(["verify", *FAST_FLAGS, "--tol-override", "weight_sum"]) == 2

    def test_report_file_and_canonical_format(self, tmp_path, capsys):
        target = tmp_path / "out.json"
        code = main(["verify", *FAST_FLAGS, "--format", "canonical", "--report", str(target)])
        assert code == 0
        data = json.loads(target.read_text())
        assert data["overall_pass"] is True
        assert "report written" in capsys.readouterr().out

    def test_config_file_with_flag_overrides(self, tmp_path, capsys):
        config = write_config(tmp_path, zeros=[[0, 0], [0, 0]], truncation=256, corner=32, grid=4096)
        code = main(["verify", "--config", config, *FAST_FLAGS, "--format", "table"])
        assert code == 0
        out = capsys.readouterr().out
        assert "monomial_shift_relations" in out

    def test_parallel_flag(self, capsys):
        assert main(["verify", *FAST_FLAGS, "--parallel"]) == 0


class TestQueryCommands:
    def test_preimage(self, capsys):
        assert main(["preimage", "--angle", "0.0"]) == 0
        out = capsys.readouterr().out
        assert "weight sum = 1" in out

    def test_transfer_default_symbol(self, capsys):
        # L(z) for zeros [0, 0.5] is analytic with small coefficients
        assert main(["transfer", *FAST_FLAGS]) == 0
        assert "coefficients" in capsys.readouterr().out

    def test_transfer_symbol_validation(self, capsys):
        assert main(["transfer", "--symbol", "not json"]) == 2

    def test_basis_table(self, capsys):
        assert main(["basis", *FAST_FLAGS]) == 0
        out = capsys.readouterr().out
        assert "e_0" in out and "gram residual" in out

    def test_lift_export_row_count(self, tmp_path):
        target = tmp_path / "lift.tsv"
        assert main(["lift", "--grid", "1024", "--report", str(target)]) == 0
        rows = target.read_text().strip().splitlines()
        assert len(rows) == 1024
        theta, psi = map(float, rows[0].split("\t"))
        assert psi == pytest.approx(0.0, abs=1e-12)

    def test_kgroups_output(self, tmp_path, capsys):
        config = write_config(tmp_path, zeros=[[0, 0], [0, 0], [0, 0]])
        assert main(["kgroups", "--config", config]) == 0
        out = capsys.readouterr().out
        assert "K0 = Z ⊕ Z/2Z" in out
        assert "K1 = Z" in out
