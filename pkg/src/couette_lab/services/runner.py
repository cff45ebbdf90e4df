"""Run orchestration: one entry point per run mode, artifacts and record."""

import logging
import math
import time
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from couette_lab.core.config import RunConfig, RunMode
from couette_lab.core.exceptions import DivergenceError, SamplingError
from couette_lab.modules.dynamics import (
    DynamicsOptions,
    LinearModeState,
    NonlinearState,
    initial_mode,
    linear_cfl_limit,
    make_initial_vorticity,
    nonlinear_cfl_limit,
    step_linear,
    step_nonlinear,
    transport_flux,
    velocity_damping_integrand,
)
from couette_lab.modules.energy import (
    ENERGY_COLUMNS,
    PER_K_COLUMNS,
    EnergyLedger,
    EnergySnapshot,
    ModeEnergy,
    aggregate,
    fit_decay_rate,
    mode_energy,
    verify_linear_budget,
    verify_nonlinear_bootstrap,
)
from couette_lab.modules.energy.rates import MIN_SAMPLES
from couette_lab.modules.shear import ShearProfile, load_shear_coeffs
from couette_lab.modules.sio.audit import AUDIT_COLUMNS, audit_operators
from couette_lab.modules.spectral import ChannelGrid
from couette_lab.services.operator_cache import OperatorCache, get_operator_cache
from couette_lab.services.persistence import write_checkpoint, write_csv
from couette_lab.services.records import RunRecord
from couette_lab.settings import settings

logger = logging.getLogger(__name__)

# Automatic steps stay this far below the CFL limit; U and u drift within a sample interval
CFL_SAFETY = 0.9
DIAGNOSTIC_COLUMNS = ["t", "norm", "norm_neq", "norm_mean", "transport_flux", "damping_integrand", "damping_integral"]
AUDIT_DEFAULT_K = [1, 2, 4, 8, 16]


def build_grid(config: RunConfig) -> ChannelGrid:
    return ChannelGrid(config.grid.n_x, config.grid.n_y, config.grid.dealias)


def build_profile(config: RunConfig, grid: ChannelGrid) -> ShearProfile:
    shear = config.shear
    coeffs = load_shear_coeffs(grid, shear.preset, shear.mode, shear.amplitude, shear.seed, shear.path)
    return ShearProfile.from_coeffs(grid, coeffs, config.nu)


def sample_times(config: RunConfig) -> np.ndarray:
    count = int(round(config.t_end / config.sample_interval))
    return config.sample_interval * np.arange(count + 1)


def substeps(config: RunConfig, dt_limit: float) -> Tuple[int, float]:
    """Number of equal steps per sample interval and their size.

    A fixed time.dt is rounded to divide the sample interval; otherwise the
    step is the largest that stays within CFL_SAFETY of the limit.
    """
    interval = config.sample_interval
    if config.time.dt is not None:
        count = max(1, int(round(interval / config.time.dt)))
    elif math.isinf(dt_limit):
        count = 1
    else:
        count = max(1, math.ceil(interval / (CFL_SAFETY * dt_limit)))
    return count, interval / count


def _new_record(config: RunConfig) -> RunRecord:
    return RunRecord(
        config=config.model_dump(mode="json"),
        content_hash=config.content_hash(),
        mode=config.mode.value,
        output_dir=str(config.output_dir),
        seed=config.seed,
    )


def _checkpoint_due(config: RunConfig, index: int, last: int) -> bool:
    every = config.time.checkpoint_every
    return index == last or (every > 0 and index > 0 and index % every == 0)


def _save_checkpoint(record: RunRecord, index: int, blocks: np.ndarray, wavenumbers: Sequence[int], nu: float, t: float):
    name = f"checkpoint_{index:05d}.bin"
    write_checkpoint(
        Path(record.output_dir) / name,
        blocks,
        wavenumbers,
        nu,
        t,
        precision=settings.CHECKPOINT_PRECISION,
        config_hash=record.content_hash,
    )
    record.checkpoints.append(name)


def _check_divergence(value: float, initial: float, factor: float, t: float) -> None:
    if not math.isfinite(value):
        raise DivergenceError(f"non-finite energy at t={t:.6g}", t)
    if initial > 0 and value > factor * initial:
        raise DivergenceError(f"energy {value:.3e} exceeds {factor:g} x initial {initial:.3e} at t={t:.6g}", t)


def _fit(record: RunRecord, key: str, times: Sequence[float], norms: Sequence[float]) -> None:
    if len(times) < MIN_SAMPLES:
        logger.info(f"Skipping rate fit '{key}': only {len(times)} samples")
        return
    try:
        rate, r2 = fit_decay_rate(times, norms)
    except SamplingError as exc:
        logger.warning(f"Rate fit '{key}' failed: {exc}")
        return
    record.rates[key] = rate
    record.rate_r2[key] = r2


def _budget_summary(report) -> Dict:
    data = report.to_dict()
    data.pop("margins", None)
    data.pop("integrated_lhs", None)
    data.pop("defects", None)
    return data


def run_linear(config: RunConfig, k_values: Sequence[int], cache: Optional[OperatorCache] = None) -> RunRecord:
    """Evolve independent linear modes and verify their energy budgets.

    All modes are advanced together from sample to sample, each with its own
    CFL-sized substeps, so energy.csv aggregates them at common times.
    """
    cache = cache or get_operator_cache()
    started = time.perf_counter()
    grid = build_grid(config)
    ledger = EnergyLedger.from_section(config.ledger, config.nu)
    profile = build_profile(config, grid)
    options = DynamicsOptions(transport=config.linear.transport, nonlinear=False, cfl=config.time.cfl)
    sio_ops = cache.sio_map(k_values, grid, ledger.delta, config.sio.scheme)
    pert = config.perturbation

    states = {
        k: LinearModeState(
            k,
            initial_mode(grid, k, pert.preset, pert.epsilon, config.nu, ledger.m, pert.n, pert.n_max, config.seed),
            0.0,
            config.nu,
            profile,
        )
        for k in k_values
    }
    record = _new_record(config)
    times = sample_times(config)
    last = len(times) - 1
    histories: Dict[int, List[ModeEnergy]] = {k: [] for k in k_values}
    norms: Dict[int, List[float]] = {k: [] for k in k_values}
    snapshots: List[EnergySnapshot] = []
    steps = 0
    logger.info(f"Linear run: k={list(k_values)} nu={config.nu:g} samples={len(times)} grid={grid}")

    try:
        for index, t in enumerate(times):
            modes = [mode_energy(states[k].omega_k, k, t, ledger, sio_ops) for k in k_values]
            snapshot = aggregate(modes, np.zeros(grid.n_y), ledger, t)
            for k, mode in zip(k_values, modes):
                histories[k].append(mode)
                norms[k].append(float(np.linalg.norm(states[k].omega_k)))
            snapshots.append(snapshot)
            _check_divergence(snapshot.E, snapshots[0].E, config.time.divergence_factor, t)

            if _checkpoint_due(config, index, last):
                blocks = np.stack([states[k].omega_k for k in k_values])
                _save_checkpoint(record, index, blocks, list(k_values), config.nu, t)
            if index == last:
                break

            for k in k_values:
                state = states[k]
                count, dt = substeps(config, linear_cfl_limit(k, state.profile, options.cfl))
                for _ in range(count):
                    state = step_linear(state, dt, options)
                # land exactly on the sample time
                states[k] = state.evolve(state.omega_k, float(times[index + 1]), state.profile)
                steps += count
    except DivergenceError as exc:
        record.status = "diverged"
        record.diverged_at = exc.t
        record.message = str(exc)
        logger.warning(f"Linear run diverged: {exc}")

    _write_energy(record, snapshots, config.budget.per_k_csv)
    norm_rows = [
        {"t": histories[k][i].t, "k": k, "norm": norms[k][i]} for i in range(len(snapshots)) for k in k_values
    ]
    write_csv(Path(record.output_dir) / "norms.csv", ["t", "k", "norm"], norm_rows)
    record.norms_csv = "norms.csv"

    reports = {}
    sampled = [float(s.t) for s in snapshots]
    for k in k_values:
        _fit(record, f"k={k}", sampled, norms[k])
        if len(histories[k]) >= 3:
            report = verify_linear_budget(histories[k], ledger, config.sample_interval, config.budget.tolerance)
            reports[k] = report
            record.budget[f"k={k}"] = _budget_summary(report)
    if f"k={k_values[0]}" in record.rates:
        record.rates["primary"] = record.rates[f"k={k_values[0]}"]
        record.rate_r2["primary"] = record.rate_r2[f"k={k_values[0]}"]
    if reports:
        record.budget_passed = all(r.passed for r in reports.values())

    record.budget["ledger"] = ledger.audit().to_dict()
    record.summary = _energy_summary(snapshots)
    record.wall_clock = {"seconds": time.perf_counter() - started, "steps": float(steps)}
    record.save()
    return record


def _energy_summary(snapshots: Sequence[EnergySnapshot]) -> Dict[str, float]:
    if not snapshots:
        return {}
    e_neq = np.array([s.Eneq for s in snapshots])
    initial = e_neq[0]
    return {
        "E_initial": snapshots[0].E,
        "E_final": snapshots[-1].E,
        "Eneq_initial": float(initial),
        "Eneq_max": float(np.max(e_neq)),
        "Eneq_growth": float(np.max(e_neq) / initial) if initial > 0 else 0.0,
        "t_final": snapshots[-1].t,
    }


def _write_energy(record: RunRecord, snapshots: Sequence[EnergySnapshot], per_k: bool) -> None:
    out = Path(record.output_dir)
    write_csv(out / "energy.csv", ENERGY_COLUMNS, [s.to_row() for s in snapshots])
    record.energy_csv = "energy.csv"
    if per_k:
        rows = [row for s in snapshots for row in s.per_k_rows()]
        write_csv(out / "energy_per_k.csv", PER_K_COLUMNS, rows)
        record.per_k_csv = "energy_per_k.csv"


def run_nonlinear(config: RunConfig, cache: Optional[OperatorCache] = None) -> RunRecord:
    """Evolve the full perturbation and check the bootstrap inequality."""
    cache = cache or get_operator_cache()
    started = time.perf_counter()
    grid = build_grid(config)
    ledger = EnergyLedger.from_section(config.ledger, config.nu)
    profile = build_profile(config, grid)
    options = DynamicsOptions(
        transport=config.nonlinear.transport, nonlinear=config.nonlinear.enabled, cfl=config.time.cfl
    )
    nonzero = [int(k) for k in grid.wavenumbers if k != 0]
    sio_ops = cache.sio_map(nonzero, grid, ledger.delta, config.sio.scheme)
    pert = config.perturbation

    omega = make_initial_vorticity(
        grid, pert.preset, pert.epsilon, config.nu, ledger.m, pert.k, pert.n, pert.k_max, pert.n_max, config.seed
    )
    state = NonlinearState(omega, profile, 0.0, config.nu, ledger)
    record = _new_record(config)
    times = sample_times(config)
    last = len(times) - 1
    snapshots: List[EnergySnapshot] = []
    diagnostics: List[Dict[str, float]] = []
    norm_rows: List[Dict[str, float]] = []
    damping_integral = 0.0
    steps = 0
    logger.info(
        f"Nonlinear run: eps={pert.epsilon:g} nu={config.nu:g} samples={len(times)} grid={grid} "
        f"nonlinear={options.nonlinear} transport={options.transport}"
    )

    try:
        for index, t in enumerate(times):
            field = state.omega
            modes = [mode_energy(field.mode(k), k, t, ledger, sio_ops) for k in nonzero]
            snapshot = aggregate(modes, field.mode(0).real, ledger, t)
            snapshots.append(snapshot)

            mode_norms = field.mode_norms_sq()
            mean_sq = float(mode_norms[grid.row(0)])
            integrand = velocity_damping_integrand(state, ledger)
            if diagnostics:
                damping_integral += 0.5 * config.sample_interval * (diagnostics[-1]["damping_integrand"] + integrand)
            diagnostics.append(
                {
                    "t": t,
                    "norm": math.sqrt(float(np.sum(mode_norms))),
                    "norm_neq": math.sqrt(max(float(np.sum(mode_norms)) - mean_sq, 0.0)),
                    "norm_mean": math.sqrt(mean_sq),
                    "transport_flux": transport_flux(state) if options.nonlinear else 0.0,
                    "damping_integrand": integrand,
                    "damping_integral": damping_integral,
                }
            )
            for k in range(0, grid.n_x + 1):
                sq = mode_norms[grid.row(k)] + (mode_norms[grid.row(-k)] if k else 0.0)
                norm_rows.append({"t": t, "k": k, "norm": math.sqrt(float(sq))})

            if not field.is_finite():
                raise DivergenceError(f"non-finite vorticity at t={t:.6g}", t)
            _check_divergence(snapshot.E, snapshots[0].E, config.time.divergence_factor, t)

            if _checkpoint_due(config, index, last):
                _save_checkpoint(record, index, field.coeffs, grid.wavenumbers.tolist(), config.nu, t)
            if index == last:
                break

            count, dt = substeps(config, nonlinear_cfl_limit(state, options.cfl, options))
            for _ in range(count):
                state = step_nonlinear(state, dt, options)
            state = state.evolve(state.omega, float(times[index + 1]), state.profile)
            steps += count
    except DivergenceError as exc:
        record.status = "diverged"
        record.diverged_at = exc.t
        record.message = str(exc)
        logger.warning(f"Nonlinear run diverged: {exc}")

    out = Path(record.output_dir)
    _write_energy(record, snapshots, config.budget.per_k_csv)
    write_csv(out / "norms.csv", ["t", "k", "norm"], norm_rows)
    record.norms_csv = "norms.csv"
    write_csv(out / "diagnostics.csv", DIAGNOSTIC_COLUMNS, diagnostics)
    record.diagnostics_csv = "diagnostics.csv"

    sampled = [row["t"] for row in diagnostics]
    _fit(record, "neq", sampled, [row["norm_neq"] for row in diagnostics])
    if "neq" in record.rates:
        record.rates["primary"] = record.rates["neq"]
        record.rate_r2["primary"] = record.rate_r2["neq"]

    if len(snapshots) >= 3:
        report = verify_nonlinear_bootstrap(snapshots, ledger, config.sample_interval, config.budget.tolerance)
        record.budget["bootstrap"] = _budget_summary(report)
        record.budget_passed = report.passed
    record.budget["ledger"] = ledger.audit().to_dict()
    record.summary = _energy_summary(snapshots)
    record.summary["damping_integral"] = damping_integral
    if diagnostics:
        record.summary["max_abs_transport_flux"] = float(max(abs(row["transport_flux"]) for row in diagnostics))
    record.wall_clock = {"seconds": time.perf_counter() - started, "steps": float(steps)}
    record.save()
    return record


def run_operator_audit(config: RunConfig, cache: Optional[OperatorCache] = None) -> RunRecord:
    """Norms, self-adjointness and coercivity of J_k and H_k over k and n_y."""
    cache = cache or get_operator_cache()
    started = time.perf_counter()
    ledger = EnergyLedger.from_section(config.ledger, config.nu)
    k_values = config.sio.audit_k or AUDIT_DEFAULT_K
    resolutions = config.sio.audit_n_y or [config.grid.n_y]
    scheme = config.sio.scheme

    rows = []
    for n_y in resolutions:
        grid = ChannelGrid(config.grid.n_x, n_y, config.grid.dealias)
        rows.extend(
            audit_operators(
                grid,
                k_values,
                ledger.c_tau,
                ledger.delta,
                scheme,
                sio_provider=lambda k, g=grid: cache.get_sio(k, g, ledger.delta, scheme),
                commutator_provider=lambda k, g=grid: cache.get_commutator(k, g, ledger.delta, scheme),
            )
        )

    record = _new_record(config)
    write_csv(Path(record.output_dir) / "operator_audit.csv", AUDIT_COLUMNS, [row.to_dict() for row in rows])
    record.operator_audit_csv = "operator_audit.csv"
    record.summary = {
        "max_norm_J": max(row.norm_J for row in rows),
        "max_norm_H_over_k": max(row.norm_H_over_k for row in rows),
        "max_selfadj_residual": max(row.selfadj_residual for row in rows),
        "min_coercivity_eig": min(row.coercivity_min_eig for row in rows),
    }
    record.budget["ledger"] = ledger.audit().to_dict()
    record.wall_clock = {"seconds": time.perf_counter() - started}
    logger.info(f"Operator audit: {len(rows)} rows, cache {cache}")
    record.save()
    return record


def run(config: RunConfig, cache: Optional[OperatorCache] = None) -> RunRecord:
    """Execute a run end-to-end and write its artifacts and record.json.

    Args:
        config: Validated run configuration
        cache: Operator cache (defaults to the process-wide one)

    Returns:
        RunRecord (status "diverged" when the trajectory blew up)
    """
    Path(config.output_dir).mkdir(parents=True, exist_ok=True)
    logger.info(f"Starting {config!r} -> {config.output_dir}")

    if config.mode == RunMode.LINEAR_SINGLE_K:
        return run_linear(config, [config.linear.k], cache)
    if config.mode == RunMode.LINEAR_ALL_K:
        k_values = config.linear.k_values or list(range(1, config.grid.n_x + 1))
        return run_linear(config, k_values, cache)
    if config.mode == RunMode.NONLINEAR:
        return run_nonlinear(config, cache)
    if config.mode == RunMode.OPERATOR_AUDIT:
        return run_operator_audit(config, cache)

    from couette_lab.services.sweeps import run_sweep

    return run_sweep(config)


def run_child(data: Dict) -> Dict:
    """Process-pool entry point: config mapping in, record mapping out."""
    record = run(RunConfig.from_dict(data))
    return record.model_dump(mode="json")
