"""Run configuration for couette-lab.

A run is described by a TOML file with nested tables; every table maps onto one
of the section models below. Unknown keys are errors. Validation collects every
violated field into a single ConfigError.
"""

import copy
import hashlib
import json
import logging
import sys
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - Python 3.10 fallback
    import tomli as tomllib

from couette_lab.core.exceptions import ConfigError
from couette_lab.settings import settings

logger = logging.getLogger(__name__)


class RunMode(str, Enum):
    """What a run executes end-to-end."""

    LINEAR_SINGLE_K = "linear-single-k"
    LINEAR_ALL_K = "linear-all-k"
    NONLINEAR = "nonlinear"
    OPERATOR_AUDIT = "operator-audit"
    SWEEP = "sweep"


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class GridSection(_Section):
    """Channel resolution: n_x retained positive wavenumbers, n_y sine modes."""

    n_x: int = Field(8, ge=1)
    n_y: int = Field(64, ge=8)
    dealias: float = Field(2.0 / 3.0, gt=0.0, le=1.0)


class TimeSection(_Section):
    """Time stepping. dt fixes the step; otherwise it is chosen from cfl."""

    dt: Optional[float] = Field(None, gt=0.0)
    cfl: float = Field(0.5, gt=0.0, le=2.0)
    divergence_factor: float = Field(1e6, gt=1.0)
    checkpoint_every: int = Field(0, ge=0)  # samples between checkpoints; 0 = final only


class LedgerSection(_Section):
    """Energy-ledger constants. Unset values follow the K0 example ledger."""

    K0: float = Field(64.0, gt=0.0)
    c_alpha: Optional[float] = Field(None, ge=0.0)
    c_beta: Optional[float] = Field(None, ge=0.0)
    c_tau: Optional[float] = Field(None, ge=0.0)
    delta_star: Optional[float] = Field(None, gt=0.0)
    delta0: Optional[float] = Field(None, gt=0.0)
    delta1: Optional[float] = Field(None, gt=0.0)
    m: float = 0.75
    delta: float = Field(0.0, ge=0.0, lt=1.0)


class ShearSection(_Section):
    """Initial background perturbation W_in.

    `preset` also accepts the compact string forms "single_mode 2 1e-8" and
    "random_h4 7 1e-8" (seed, H4 amplitude).
    """

    preset: str = "zero"
    mode: int = Field(1, ge=1)
    amplitude: float = 0.0
    seed: int = 0
    path: Optional[str] = None

    @field_validator("preset")
    @classmethod
    def _known_preset(cls, value: str) -> str:
        name = value.split()[0] if value.strip() else ""
        if name not in {"zero", "single_mode", "random_h4", "file"}:
            raise ValueError(f"unknown shear preset '{value}' (zero | single_mode | random_h4 | file)")
        return value


class PerturbationSection(_Section):
    """Initial vorticity perturbation, normalised to the anisotropic size epsilon."""

    preset: Literal["single_mode", "random_band", "zero"] = "single_mode"
    epsilon: float = Field(1e-3, gt=0.0)
    k: int = 1
    n: int = Field(1, ge=1)
    k_max: int = Field(4, ge=1)
    n_max: int = Field(8, ge=1)


class LinearSection(_Section):
    k: int = 1
    k_values: Optional[List[int]] = None
    transport: bool = True


class NonlinearSection(_Section):
    enabled: bool = True  # False evolves the linear reference with the same code path
    transport: bool = True


class SioSection(_Section):
    scheme: Literal["alternating", "subtracted"] = "alternating"
    audit_k: Optional[List[int]] = None
    audit_n_y: Optional[List[int]] = None


class BudgetSection(_Section):
    tolerance: float = Field(1e-6, ge=0.0)
    strict: bool = False
    per_k_csv: bool = False


class SweepSection(_Section):
    parameter: Literal["nu", "epsilon"] = "nu"
    values: List[float] = Field(default_factory=list)
    base_mode: RunMode = RunMode.LINEAR_SINGLE_K
    workers: Optional[int] = Field(None, ge=1)
    departed_factor: float = Field(2.0, gt=1.0)
    rate_factor: float = Field(2.0, gt=1.0)
    # nu sweeps: stretch t_end and sample_interval by (nu / base nu)^(-1/3)
    scale_horizon: bool = False


class RunConfig(_Section):
    """Complete description of one run (or one sweep)."""

    mode: RunMode = RunMode.LINEAR_SINGLE_K
    nu: float = Field(1e-3, gt=0.0)
    t_end: float = Field(10.0, gt=0.0)
    sample_interval: float = Field(0.5, gt=0.0)
    seed: int = 0
    output_dir: str = Field(default_factory=lambda: str(Path(settings.OUTPUT_ROOT) / "run"))

    grid: GridSection = Field(default_factory=GridSection)
    time: TimeSection = Field(default_factory=TimeSection)
    ledger: LedgerSection = Field(default_factory=LedgerSection)
    shear: ShearSection = Field(default_factory=ShearSection)
    perturbation: PerturbationSection = Field(default_factory=PerturbationSection)
    linear: LinearSection = Field(default_factory=LinearSection)
    nonlinear: NonlinearSection = Field(default_factory=NonlinearSection)
    sio: SioSection = Field(default_factory=SioSection)
    budget: BudgetSection = Field(default_factory=BudgetSection)
    sweep: SweepSection = Field(default_factory=SweepSection)

    def semantic_errors(self) -> List[str]:
        """Cross-field checks that a single field validator cannot see.

        Returns:
            List of human-readable problems (empty when the config is consistent)
        """
        errors: List[str] = []
        if self.sample_interval > self.t_end:
            errors.append("sample_interval: must not exceed t_end")
        if self.time.dt is not None and self.time.dt > self.sample_interval:
            errors.append("time.dt: must not exceed sample_interval")
        if self.linear.k == 0:
            errors.append("linear.k: must be nonzero")
        if self.linear.k_values is not None:
            if not self.linear.k_values or any(k == 0 for k in self.linear.k_values):
                errors.append("linear.k_values: must be a non-empty list of nonzero wavenumbers")
        if self.mode in (RunMode.LINEAR_SINGLE_K, RunMode.LINEAR_ALL_K) and abs(self.linear.k) > 4096:
            errors.append("linear.k: unreasonably large wavenumber")
        if self.perturbation.k_max > self.grid.n_x:
            errors.append("perturbation.k_max: must not exceed grid.n_x")
        if self.perturbation.n_max > self.grid.n_y or self.perturbation.n > self.grid.n_y:
            errors.append("perturbation.n/n_max: must not exceed grid.n_y")
        if self.mode == RunMode.NONLINEAR and abs(self.perturbation.k) > self.grid.n_x:
            errors.append("perturbation.k: must not exceed grid.n_x for nonlinear runs")
        if self.shear.preset.split()[0] == "file" and not self.shear.path:
            errors.append("shear.path: required for the 'file' preset")
        if self.shear.mode > self.grid.n_y:
            errors.append("shear.mode: must not exceed grid.n_y")
        if self.sio.audit_k is not None and any(k == 0 for k in self.sio.audit_k):
            errors.append("sio.audit_k: wavenumbers must be nonzero")
        if self.sio.audit_n_y is not None and any(n < 8 for n in self.sio.audit_n_y):
            errors.append("sio.audit_n_y: resolutions must be >= 8")
        if self.mode == RunMode.SWEEP:
            if not self.sweep.values:
                errors.append("sweep.values: required for sweep mode")
            if self.sweep.base_mode in (RunMode.SWEEP, RunMode.OPERATOR_AUDIT):
                errors.append("sweep.base_mode: must be a simulation mode")
            if self.sweep.parameter == "nu" and any(v <= 0 for v in self.sweep.values):
                errors.append("sweep.values: viscosities must be positive")
            if self.sweep.parameter == "epsilon" and any(v < 0 for v in self.sweep.values):
                errors.append("sweep.values: epsilon multipliers must be nonnegative")
        return errors

    def content_hash(self) -> str:
        """sha256 over the canonical JSON of everything but the output location."""
        payload = self.model_dump(mode="json", exclude={"output_dir"})
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def with_updates(self, **updates: Any) -> "RunConfig":
        """Return a validated copy with dotted-key updates applied."""
        data = self.model_dump(mode="json")
        for key, value in updates.items():
            _set_dotted(data, key.replace("__", "."), value)
        return RunConfig.from_dict(data)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        """Validate a raw mapping into a RunConfig.

        Args:
            data: Parsed TOML (or equivalent) mapping

        Returns:
            Validated RunConfig

        Raises:
            ConfigError: Listing every violated field
        """
        try:
            config = cls.model_validate(data)
        except ValidationError as exc:
            raise ConfigError([_format_error(err) for err in exc.errors()]) from exc

        errors = config.semantic_errors()
        if errors:
            raise ConfigError(errors)

        m = config.ledger.m
        if not (2.0 / 3.0 < m < 1.0):
            logger.warning(f"ledger.m={m} lies outside (2/3, 1); continuing for exploration")
        delta1 = config.ledger.delta1 if config.ledger.delta1 is not None else 0.1
        if config.perturbation.epsilon > delta1 * config.nu**0.5:
            logger.warning(
                f"perturbation.epsilon={config.perturbation.epsilon:g} exceeds delta1*sqrt(nu)="
                f"{delta1 * config.nu**0.5:.3g}; outside the stability threshold"
            )
        return config

    @classmethod
    def from_toml(cls, path: str | Path, overrides: Optional[List[str]] = None) -> "RunConfig":
        """Load a TOML run file and apply `section.key=value` overrides.

        Raises:
            ConfigError: Unreadable file, malformed TOML or invalid fields
        """
        path = Path(path)
        try:
            with path.open("rb") as fh:
                data = tomllib.load(fh)
        except FileNotFoundError as exc:
            raise ConfigError([f"config file not found: {path}"]) from exc
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError([f"malformed TOML in {path}: {exc}"]) from exc

        return cls.from_dict(apply_overrides(data, overrides or []))

    def __repr__(self) -> str:
        return (
            f"RunConfig(mode={self.mode.value}, nu={self.nu:g}, t_end={self.t_end:g}, "
            f"grid={self.grid.n_x}x{self.grid.n_y}, seed={self.seed})"
        )


def _format_error(err: Dict[str, Any]) -> str:
    loc = ".".join(str(part) for part in err.get("loc", ())) or "<root>"
    return f"{loc}: {err.get('msg', 'invalid value')}"


def _set_dotted(data: Dict[str, Any], dotted: str, value: Any) -> None:
    parts = dotted.split(".")
    node = data
    for part in parts[:-1]:
        child = node.setdefault(part, {})
        if not isinstance(child, dict):
            raise ConfigError([f"{dotted}: '{part}' is not a table"])
        node = child
    node[parts[-1]] = value


def parse_override_value(raw: str) -> Any:
    """Parse the right-hand side of `--set key=value` as a TOML literal.

    Bare words that are not valid TOML fall back to plain strings.
    """
    try:
        return tomllib.loads(f"v = {raw}")["v"]
    except tomllib.TOMLDecodeError:
        return raw


def apply_overrides(data: Dict[str, Any], overrides: List[str]) -> Dict[str, Any]:
    """Apply `section.key=value` overrides to a raw config mapping.

    Args:
        data: Raw mapping (left untouched)
        overrides: Strings of the form "grid.n_y=128"

    Returns:
        New mapping with the overrides applied

    Raises:
        ConfigError: For overrides without '='
    """
    result = copy.deepcopy(data)
    errors = []
    for item in overrides:
        if "=" not in item:
            errors.append(f"override '{item}': expected key=value")
            continue
        key, raw = item.split("=", 1)
        _set_dotted(result, key.strip(), parse_override_value(raw.strip()))
    if errors:
        raise ConfigError(errors)
    return result


# Global configuration instance
_config: Optional[RunConfig] = None


def get_config() -> RunConfig:
    """Get the process-wide run configuration.

    Loads settings.CONFIG_PATH when set, otherwise the defaults.

    Returns:
        RunConfig instance
    """
    global _config
    if _config is None:
        if settings.CONFIG_PATH:
            _config = RunConfig.from_toml(settings.CONFIG_PATH)
        else:
            _config = RunConfig()
    return _config


def set_config(config: RunConfig) -> None:
    """Install a configuration as the process-wide default."""
    global _config
    _config = config


def reset_config():
    """Reset global configuration (useful for testing)."""
    global _config
    _config = None
