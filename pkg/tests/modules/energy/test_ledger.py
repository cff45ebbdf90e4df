"""Unit tests for the energy-ledger constants."""

import logging

import pytest
from pydantic import ValidationError

from couette_lab.core.config import LedgerSection
from couette_lab.modules.energy import EnergyLedger


class TestEnergyLedger:
    """Test construction and the inequality audit."""

    def test_example_ledger_passes(self):
        """Test that the K0 example constants satisfy every inequality."""
        audit = EnergyLedger.from_k0(64.0, 1e-3).audit()

        assert audit.passed
        assert len(audit.checks) == 6
        assert audit.failures == []

    def test_large_c_tau_fails(self, caplog):
        """Test that an oversized c_tau is reported by name with both sides."""
        with caplog.at_level(logging.WARNING):
            audit = EnergyLedger.from_k0(64.0, 1e-3, c_tau=0.9).audit()

        assert not audit.passed
        assert "c_tau < 1/(32 K0)" in audit.failures
        assert audit.values["c_tau < 1/(32 K0)"] == (0.9, pytest.approx(1.0 / 2048.0))
        assert "violates" in caplog.text

    def test_from_section_matches_from_k0(self):
        """Test that unset section values fall back to the example ledger."""
        from_section = EnergyLedger.from_section(LedgerSection(K0=32.0), nu=1e-3)

        assert from_section == EnergyLedger.from_k0(32.0, 1e-3)

    def test_overrides_ignore_none(self):
        ledger = EnergyLedger.from_k0(64.0, 1e-3, c_tau=None, delta_star=1e-4)

        assert ledger.c_tau == pytest.approx(1.0 / 4096.0)
        assert ledger.delta_star == 1e-4

    def test_invalid_values_rejected(self):
        """Test that pydantic rejects a nonpositive viscosity."""
        with pytest.raises(ValidationError):
            EnergyLedger.from_k0(64.0, 0.0)

    def test_audit_to_dict(self):
        data = EnergyLedger.from_k0().audit().to_dict()

        assert data["passed"] is True
        assert set(data["values"]) == set(data["checks"])
