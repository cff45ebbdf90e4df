"""Unit tests for RunConfig loading, validation and overrides."""

import logging

import pytest

from couette_lab.core.config import (
    RunConfig,
    RunMode,
    apply_overrides,
    get_config,
    parse_override_value,
    reset_config,
    set_config,
)
from couette_lab.core.exceptions import ConfigError
from couette_lab.settings import Settings


class TestRunConfigValidation:
    """Test field and cross-field validation."""

    def test_defaults_are_valid(self):
        """Test that an empty mapping yields the documented defaults."""
        config = RunConfig.from_dict({})

        assert config.mode == RunMode.LINEAR_SINGLE_K
        assert config.grid.n_y == 64
        assert config.ledger.K0 == 64.0
        assert config.sio.scheme == "alternating"

    def test_unknown_key_rejected(self):
        """Test that unknown keys are errors naming the offending field."""
        with pytest.raises(ConfigError) as excinfo:
            RunConfig.from_dict({"grid": {"n_y": 32, "bogus": 1}})

        assert any("grid.bogus" in error for error in excinfo.value.errors)

    def test_every_violation_reported(self):
        """Test that all invalid fields are listed, not only the first."""
        with pytest.raises(ConfigError) as excinfo:
            RunConfig.from_dict({"nu": -1.0, "grid": {"n_y": 4}, "time": {"cfl": 0.0}})

        joined = "\n".join(excinfo.value.errors)
        assert len(excinfo.value.errors) >= 3
        assert "nu" in joined
        assert "grid.n_y" in joined
        assert "time.cfl" in joined

    def test_semantic_errors(self):
        """Test cross-field checks after field validation passes."""
        with pytest.raises(ConfigError) as excinfo:
            RunConfig.from_dict({"linear": {"k": 0}, "t_end": 1.0, "sample_interval": 2.0})

        joined = "\n".join(excinfo.value.errors)
        assert "linear.k" in joined
        assert "sample_interval" in joined

    def test_sweep_requires_values(self):
        """Test that sweep mode without values is rejected."""
        with pytest.raises(ConfigError) as excinfo:
            RunConfig.from_dict({"mode": "sweep"})

        assert any("sweep.values" in error for error in excinfo.value.errors)

    def test_unknown_shear_preset(self):
        """Test that an unknown shear preset name is rejected."""
        with pytest.raises(ConfigError):
            RunConfig.from_dict({"shear": {"preset": "parabolic"}})

    def test_compact_shear_preset_accepted(self):
        """Test the compact 'single_mode n amp' form."""
        config = RunConfig.from_dict({"shear": {"preset": "single_mode 2 1e-8"}})

        assert config.shear.preset == "single_mode 2 1e-8"

    def test_m_outside_range_warns(self, caplog):
        """Test that m outside (2/3, 1) is accepted with a warning."""
        with caplog.at_level(logging.WARNING, logger="couette_lab.core.config"):
            config = RunConfig.from_dict({"ledger": {"m": 0.5}})

        assert config.ledger.m == 0.5
        assert "outside (2/3, 1)" in caplog.text

    def test_large_epsilon_warns(self, caplog):
        """Test that epsilon above delta1 sqrt(nu) is flagged."""
        with caplog.at_level(logging.WARNING, logger="couette_lab.core.config"):
            RunConfig.from_dict({"nu": 1e-4, "perturbation": {"epsilon": 0.1}})

        assert "stability threshold" in caplog.text


class TestRunConfigLoading:
    """Test TOML loading, overrides and hashing."""

    def test_from_toml_with_overrides(self, tmp_path):
        """Test that --set style overrides win over the file."""
        path = tmp_path / "run.toml"
        path.write_text('mode = "nonlinear"\nnu = 1e-3\n\n[grid]\nn_x = 4\nn_y = 32\n\n[perturbation]\nk_max = 2\n')

        config = RunConfig.from_toml(path, ["grid.n_y=48", "nu=2e-3"])

        assert config.mode == RunMode.NONLINEAR
        assert config.grid.n_y == 48
        assert config.nu == pytest.approx(2e-3)

    def test_missing_file(self, tmp_path):
        """Test that a missing file is a ConfigError."""
        with pytest.raises(ConfigError) as excinfo:
            RunConfig.from_toml(tmp_path / "absent.toml")

        assert "not found" in str(excinfo.value)

    def test_malformed_toml(self, tmp_path):
        """Test that malformed TOML is a ConfigError."""
        path = tmp_path / "bad.toml"
        path.write_text("nu = = 1\n")

        with pytest.raises(ConfigError) as excinfo:
            RunConfig.from_toml(path)

        assert "malformed TOML" in str(excinfo.value)

    def test_parse_override_value(self):
        """Test TOML literal parsing with a plain-string fallback."""
        assert parse_override_value("128") == 128
        assert parse_override_value("1e-3") == pytest.approx(1e-3)
        assert parse_override_value("[1, 2]") == [1, 2]
        assert parse_override_value("true") is True
        assert parse_override_value("subtracted") == "subtracted"

    def test_override_without_equals(self):
        """Test that a malformed override is reported."""
        with pytest.raises(ConfigError):
            apply_overrides({}, ["grid.n_y"])

    def test_apply_overrides_leaves_input_untouched(self):
        """Test that overrides copy the mapping."""
        data = {"grid": {"n_y": 32}}

        result = apply_overrides(data, ["grid.n_y=64"])

        assert data["grid"]["n_y"] == 32
        assert result["grid"]["n_y"] == 64

    def test_content_hash_ignores_output_dir(self):
        """Test that the hash depends on physics, not on where results go."""
        a = RunConfig.from_dict({"output_dir": "a"})
        b = RunConfig.from_dict({"output_dir": "b"})
        c = RunConfig.from_dict({"output_dir": "a", "nu": 2e-3})

        assert a.content_hash() == b.content_hash()
        assert a.content_hash() != c.content_hash()

    def test_with_updates_revalidates(self):
        """Test that nested updates are applied and validated."""
        config = RunConfig.from_dict({})

        updated = config.with_updates(grid__n_y=16, perturbation__n_max=4)

        assert updated.grid.n_y == 16
        with pytest.raises(ConfigError):
            config.with_updates(grid__n_y=2)


class TestGlobalConfig:
    """Test the process-wide configuration accessors."""

    def test_get_config_defaults(self):
        """Test that get_config builds defaults once."""
        first = get_config()

        assert first is get_config()
        assert first.mode == RunMode.LINEAR_SINGLE_K

    def test_set_and_reset(self):
        """Test installing and clearing a configuration."""
        custom = RunConfig.from_dict({"nu": 5e-3})
        set_config(custom)

        assert get_config() is custom

        reset_config()
        assert get_config() is not custom


class TestSettings:
    """Test environment-driven settings."""

    def test_env_prefix(self, monkeypatch):
        """Test that COUETTE_* variables configure Settings."""
        monkeypatch.setenv("COUETTE_LOG_LEVEL", "DEBUG")
        monkeypatch.setenv("COUETTE_OPERATOR_CACHE_SIZE", "12")

        settings = Settings()

        assert settings.LOG_LEVEL == "DEBUG"
        assert settings.OPERATOR_CACHE_SIZE == 12
