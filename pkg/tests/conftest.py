"""Shared fixtures for the couette-lab test suite."""

import numpy as np
import pytest

from couette_lab.core.config import RunConfig, reset_config
from couette_lab.modules.spectral import ChannelGrid
from couette_lab.services.operator_cache import reset_operator_cache


@pytest.fixture(autouse=True)
def fresh_globals():
    """Every test starts with no process-wide config or operator cache."""
    reset_config()
    reset_operator_cache()
    yield
    reset_config()
    reset_operator_cache()


@pytest.fixture
def grid():
    return ChannelGrid(4, 32)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def make_config(tmp_path):
    """Factory for small validated run configs writing under tmp_path."""

    def factory(name: str = "run", **updates) -> RunConfig:
        base = RunConfig.from_dict(
            {
                "output_dir": str(tmp_path / name),
                "nu": 1e-2,
                "t_end": 1.0,
                "sample_interval": 0.1,
                "grid": {"n_x": 4, "n_y": 16},
                "perturbation": {"k_max": 2, "n_max": 4},
            }
        )
        return base.with_updates(**updates) if updates else base

    return factory


@pytest.fixture
def smooth_coeffs(rng):
    """Factory for smooth complex sine-coefficient vectors (1/n^2 envelope on the first modes)."""

    def factory(n_y: int, band: int = 8) -> np.ndarray:
        coeffs = np.zeros(n_y, dtype=complex)
        n = np.arange(1, band + 1)
        coeffs[:band] = (rng.standard_normal(band) + 1j * rng.standard_normal(band)) / n**2
        return coeffs

    return factory
