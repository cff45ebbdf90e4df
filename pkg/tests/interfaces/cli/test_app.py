"""Tests for the couette-lab command line."""

import json
import logging

import pytest

from couette_lab.interfaces.cli.app import (
    EXIT_BUDGET,
    EXIT_CONFIG,
    EXIT_DIVERGED,
    EXIT_ERROR,
    EXIT_OK,
    main,
)
from couette_lab.services import runner
from couette_lab.services.records import RunRecord

SMALL = [
    "--set", "t_end=1.0",
    "--set", "sample_interval=0.1",
    "--set", "nu=0.01",
    "--set", "grid.n_x=2",
    "--set", "grid.n_y=16",
    "--set", "perturbation.k_max=2",
    "--set", "perturbation.n_max=4",
]  # fmt: skip


@pytest.fixture
def out(tmp_path):
    return tmp_path / "run"


@pytest.fixture(autouse=True)
def restore_logging():
    """main() reconfigures the root logger; put it back after each test."""
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


class TestSimulate:
    """Test the simulate and energy-audit subcommands."""

    def test_simulate(self, out, capsys):
        """Test exit 0, record.json and the printed summary."""
        code = main(["simulate", "--quiet", "--output-dir", str(out), *SMALL])

        assert code == EXIT_OK
        record = RunRecord.load(out)
        assert record.status == "completed"
        assert record.config["grid"]["n_y"] == 16
        assert json.loads(capsys.readouterr().out)["status"] == "completed"

    def test_seed_flag(self, out):
        main(["simulate", "--quiet", "--output-dir", str(out), "--seed", "9", *SMALL])

        assert RunRecord.load(out).seed == 9

    def test_config_file(self, tmp_path, out):
        """Test a TOML file combined with --set overrides."""
        path = tmp_path / "run.toml"
        path.write_text('mode = "linear-single-k"\nnu = 0.02\n\n[grid]\nn_x = 2\nn_y = 16\n')

        code = main(
            ["simulate", "--quiet", "--config", str(path), "--output-dir", str(out), "--set", "t_end=0.5",
             "--set", "perturbation.k_max=2"]
        )  # fmt: skip

        assert code == EXIT_OK
        assert RunRecord.load(out).config["nu"] == 0.02

    def test_invalid_override(self, out, capsys):
        """Test exit 2 and the offending field on stderr."""
        code = main(["simulate", "--quiet", "--output-dir", str(out), *SMALL, "--set", "grid.n_y=4"])

        assert code == EXIT_CONFIG
        assert "n_y" in capsys.readouterr().err
        assert not out.exists()

    def test_strict_budget_violation(self, out, tmp_path):
        """Test exit 4 under --strict for a ledger that breaks its inequalities."""
        args = ["simulate", "--quiet", *SMALL, "--set", "ledger.c_tau=0.9"]

        assert main([*args, "--output-dir", str(tmp_path / "lenient")]) == EXIT_OK
        assert main([*args, "--output-dir", str(out), "--strict"]) == EXIT_BUDGET

    def test_diverged_run(self, out, monkeypatch):
        """Test exit 3 when the energy blows up."""

        def blow_up(state, dt, options=None):
            return state.evolve(state.omega_k * 1e4, state.t + dt, state.profile)

        monkeypatch.setattr(runner, "step_linear", blow_up)

        assert main(["simulate", "--quiet", "--output-dir", str(out), *SMALL]) == EXIT_DIVERGED
        assert RunRecord.load(out).status == "diverged"

    def test_energy_audit_writes_per_k(self, out):
        assert main(["energy-audit", "--quiet", "--output-dir", str(out), *SMALL]) == EXIT_OK
        assert (out / "energy_per_k.csv").exists()

    def test_energy_audit_rejects_audit_mode(self, out):
        code = main(["energy-audit", "--quiet", "--output-dir", str(out), *SMALL, "--set", 'mode="operator-audit"'])

        assert code == EXIT_CONFIG


class TestOtherCommands:
    """Test operator-audit, sweeps, fit-rates and the schema dump."""

    def test_operator_audit(self, out):
        code = main(["operator-audit", "--quiet", "--output-dir", str(out), *SMALL, "--set", "sio.audit_k=[1, 2]"])

        assert code == EXIT_OK
        assert (out / "operator_audit.csv").exists()

    def test_sweep_nu(self, out, capsys):
        """Test --values and the slope in the printed summary."""
        code = main(["sweep-nu", "--quiet", "--output-dir", str(out), *SMALL, "--values", "0.01,0.02,0.04"])

        assert code == EXIT_OK
        assert (out / "sweep.csv").exists()
        assert json.loads(capsys.readouterr().out)["sweep"]["slope"] > 0

    def test_bad_sweep_values(self, out):
        assert main(["sweep-nu", "--quiet", "--output-dir", str(out), *SMALL, "--values", "0.01,abc"]) == EXIT_CONFIG

    def test_fit_rates(self, out, capsys):
        """Test rate fits read back from a run directory."""
        main(["simulate", "--quiet", "--output-dir", str(out), *SMALL])
        capsys.readouterr()

        code = main(["fit-rates", str(out), "--quiet"])

        rates = json.loads(capsys.readouterr().out)
        assert code == EXIT_OK
        assert rates["k=1"]["rate"] > 0

    def test_fit_rates_missing_file(self, tmp_path):
        assert main(["fit-rates", str(tmp_path / "absent.csv"), "--quiet"]) == EXIT_ERROR

    def test_show_config_schema(self, capsys):
        assert main(["show-config-schema"]) == EXIT_OK
        assert "properties" in json.loads(capsys.readouterr().out)
