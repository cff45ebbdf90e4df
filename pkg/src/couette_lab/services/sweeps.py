"""Parameter sweeps over viscosity and perturbation size.

Children run through an asyncio.Semaphore; with more than one worker each
child executes in a ProcessPoolExecutor, otherwise inline.
"""

import asyncio
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy import stats

from couette_lab.core.config import RunConfig, RunMode
from couette_lab.services.persistence import write_csv
from couette_lab.services.records import RECORD_NAME, RunRecord
from couette_lab.services.runner import run, run_child
from couette_lab.settings import settings

logger = logging.getLogger(__name__)

CLASS_CODES = {"damped": 0, "departed": 1, "diverged": 2}


async def run_children(configs: Sequence[RunConfig], max_workers: int = 1) -> List[RunRecord]:
    """Run child configurations concurrently, preserving input order.

    Args:
        configs: Child run configurations
        max_workers: Concurrency limit; 1 runs children inline

    Returns:
        One RunRecord per config
    """
    semaphore = asyncio.Semaphore(max(1, max_workers))
    loop = asyncio.get_running_loop()
    executor = ProcessPoolExecutor(max_workers=max_workers) if max_workers > 1 else None

    async def run_one(config: RunConfig) -> RunRecord:
        async with semaphore:
            logger.debug(f"Child start: {config!r}")
            if executor is None:
                return run(config)
            data = await loop.run_in_executor(executor, run_child, config.model_dump(mode="json"))
            return RunRecord.model_validate(data)

    try:
        return list(await asyncio.gather(*(run_one(config) for config in configs)))
    finally:
        if executor is not None:
            executor.shutdown(wait=True)


def _workers(base: RunConfig, max_workers: Optional[int]) -> int:
    return max_workers or base.sweep.workers or settings.MAX_WORKERS


def _child_mode(base: RunConfig, default: RunMode) -> RunMode:
    mode = base.sweep.base_mode
    return mode if mode not in (RunMode.SWEEP, RunMode.OPERATOR_AUDIT) else default


@dataclass
class NuSweepResult:
    """Decay rate per viscosity and the log-log slope of rate against nu."""

    nu: List[float]
    rate: List[float]
    r2: List[float]
    status: List[str]
    slope: Optional[float] = None
    slope_stderr: Optional[float] = None
    slope_ci95: Optional[List[float]] = None
    records: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return asdict(self)


def rate_slope(nu: Sequence[float], rates: Sequence[float]) -> Dict[str, Optional[float]]:
    """Slope of log(rate) against log(nu) with a 95% confidence band.

    The band is stderr times the two-sided Student t quantile with n - 2
    degrees of freedom; with two points it is unbounded.
    """
    nu = np.asarray(nu, dtype=float)
    rates = np.asarray(rates, dtype=float)
    fit = stats.linregress(np.log(nu), np.log(rates))
    dof = nu.size - 2
    half = float(stats.t.ppf(0.975, dof) * fit.stderr) if dof > 0 else math.inf
    return {"slope": float(fit.slope), "stderr": float(fit.stderr), "lower": fit.slope - half, "upper": fit.slope + half}


async def sweep_nu_async(base: RunConfig, nu_list: Sequence[float], max_workers: Optional[int] = None) -> NuSweepResult:
    """Run one child per viscosity and fit the scaling of the decay rate.

    The slope is omitted when fewer than two children finish or any child
    diverged.
    """
    mode = _child_mode(base, RunMode.LINEAR_SINGLE_K)
    root = Path(base.output_dir)
    configs = []
    for i, nu in enumerate(nu_list):
        stretch = (float(nu) / base.nu) ** (-1.0 / 3.0) if base.sweep.scale_horizon else 1.0
        configs.append(
            base.with_updates(
                mode=mode.value,
                nu=float(nu),
                t_end=base.t_end * stretch,
                sample_interval=base.sample_interval * stretch,
                output_dir=str(root / f"nu_{i:02d}"),
            )
        )
    records = await run_children(configs, _workers(base, max_workers))

    result = NuSweepResult(
        nu=[float(nu) for nu in nu_list],
        rate=[record.rates.get("primary", math.nan) for record in records],
        r2=[record.rate_r2.get("primary", math.nan) for record in records],
        status=[record.status for record in records],
        records=[str(Path(record.output_dir) / RECORD_NAME) for record in records],
    )
    usable = all(status == "completed" for status in result.status) and all(
        math.isfinite(rate) and rate > 0 for rate in result.rate
    )
    if len(records) >= 2 and usable:
        fit = rate_slope(result.nu, result.rate)
        result.slope = fit["slope"]
        result.slope_stderr = fit["stderr"]
        result.slope_ci95 = [fit["lower"], fit["upper"]]
        logger.info(f"nu sweep: slope {fit['slope']:.4f} (95% CI {fit['lower']:.4f}..{fit['upper']:.4f})")
    else:
        logger.info("nu sweep: slope omitted (single nu, diverged child or missing rate)")
    return result


def sweep_nu(base: RunConfig, nu_list: Sequence[float], max_workers: Optional[int] = None) -> NuSweepResult:
    return asyncio.run(sweep_nu_async(base, nu_list, max_workers))


@dataclass
class EpsilonSweepResult:
    """Classification of each perturbation size c (epsilon = c sqrt(nu))."""

    c: List[float]
    epsilon: List[float]
    classification: List[str]
    growth: List[float]
    rate: List[float]
    reference_rate: Optional[float]
    transition: List[Optional[float]]
    records: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return asdict(self)


def classify(
    record: RunRecord, reference_rate: Optional[float], departed_factor: float, rate_factor: float
) -> str:
    """damped, departed or diverged for one nonlinear child."""
    if record.status == "diverged":
        return "diverged"
    if record.summary.get("Eneq_growth", 0.0) > departed_factor:
        return "departed"
    rate = record.rates.get("primary")
    if reference_rate is not None and reference_rate > 0 and rate is not None:
        if not (reference_rate / rate_factor <= rate <= reference_rate * rate_factor):
            return "departed"
    return "damped"


def transition_band(c_values: Sequence[float], classes: Sequence[str]) -> List[Optional[float]]:
    """[largest damped c below the first non-damped c, first non-damped c]."""
    ordered = sorted(zip(c_values, classes))
    unstable = [c for c, label in ordered if label != "damped"]
    if not unstable:
        return [ordered[-1][0] if ordered else None, None]
    first = unstable[0]
    below = [c for c, label in ordered if label == "damped" and c < first]
    return [below[-1] if below else None, first]


async def sweep_epsilon_async(
    base: RunConfig, c_list: Sequence[float], max_workers: Optional[int] = None
) -> EpsilonSweepResult:
    """Run nonlinear children at epsilon = c sqrt(nu) against a linear reference.

    c = 0 is classified damped without running a child.
    """
    root = Path(base.output_dir)
    sqrt_nu = math.sqrt(base.nu)
    positive = [(i, float(c)) for i, c in enumerate(c_list) if c > 0]
    reference_eps = (min(c for _, c in positive) if positive else 1.0) * sqrt_nu

    reference = base.with_updates(
        mode=RunMode.NONLINEAR.value,
        perturbation__epsilon=reference_eps,
        nonlinear__enabled=False,
        output_dir=str(root / "linear_reference"),
    )
    children = [
        base.with_updates(
            mode=RunMode.NONLINEAR.value,
            perturbation__epsilon=c * sqrt_nu,
            nonlinear__enabled=True,
            output_dir=str(root / f"c_{i:02d}"),
        )
        for i, c in positive
    ]
    records = await run_children([reference] + children, _workers(base, max_workers))
    reference_record, child_records = records[0], records[1:]
    reference_rate = reference_record.rates.get("primary")
    by_index = {i: record for (i, _), record in zip(positive, child_records)}

    classes, growth, rates, paths = [], [], [], []
    for i, c in enumerate(c_list):
        record = by_index.get(i)
        if record is None:
            classes.append("damped")
            growth.append(1.0)
            rates.append(reference_rate if reference_rate is not None else math.nan)
            continue
        classes.append(classify(record, reference_rate, base.sweep.departed_factor, base.sweep.rate_factor))
        growth.append(record.summary.get("Eneq_growth", math.nan))
        rates.append(record.rates.get("primary", math.nan))
        paths.append(str(Path(record.output_dir) / RECORD_NAME))

    result = EpsilonSweepResult(
        c=[float(c) for c in c_list],
        epsilon=[float(c) * sqrt_nu for c in c_list],
        classification=classes,
        growth=growth,
        rate=rates,
        reference_rate=reference_rate,
        transition=transition_band(c_list, classes),
        records=[str(Path(reference_record.output_dir) / RECORD_NAME)] + paths,
    )
    logger.info(f"epsilon sweep: {dict(zip(result.c, classes))}, transition band {result.transition}")
    return result


def sweep_epsilon(base: RunConfig, c_list: Sequence[float], max_workers: Optional[int] = None) -> EpsilonSweepResult:
    return asyncio.run(sweep_epsilon_async(base, c_list, max_workers))


def _sweep_record(base: RunConfig, result, rows: List[Dict], columns: List[str], started: float) -> RunRecord:
    record = RunRecord(
        config=base.model_dump(mode="json"),
        content_hash=base.content_hash(),
        mode=base.mode.value,
        output_dir=str(base.output_dir),
        seed=base.seed,
    )
    write_csv(Path(base.output_dir) / "sweep.csv", columns, rows)
    record.sweep_csv = "sweep.csv"
    record.sweep = result.to_dict()
    record.children = list(result.records)
    record.wall_clock = {"seconds": time.perf_counter() - started}
    record.save()
    return record


async def run_sweep_async(base: RunConfig, max_workers: Optional[int] = None) -> RunRecord:
    """Dispatch a sweep-mode config and write sweep.csv plus the sweep record."""
    started = time.perf_counter()
    Path(base.output_dir).mkdir(parents=True, exist_ok=True)
    if base.sweep.parameter == "nu":
        result = await sweep_nu_async(base, base.sweep.values, max_workers)
        rows = [
            {"nu": nu, "rate": rate, "r2": r2, "completed": status == "completed"}
            for nu, rate, r2, status in zip(result.nu, result.rate, result.r2, result.status)
        ]
        return _sweep_record(base, result, rows, ["nu", "rate", "r2", "completed"], started)

    result = await sweep_epsilon_async(base, base.sweep.values, max_workers)
    rows = [
        {"c": c, "epsilon": eps, "class_code": CLASS_CODES[label], "growth": g, "rate": r}
        for c, eps, label, g, r in zip(result.c, result.epsilon, result.classification, result.growth, result.rate)
    ]
    return _sweep_record(base, result, rows, ["c", "epsilon", "class_code", "growth", "rate"], started)


def run_sweep(base: RunConfig, max_workers: Optional[int] = None) -> RunRecord:
    return asyncio.run(run_sweep_async(base, max_workers))
