"""Exponential decay-rate fits."""

import math
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from couette_lab.core.exceptions import SamplingError

MIN_SAMPLES = 10


def fit_decay_rate(
    t: Sequence[float],
    norms: Sequence[float],
    window: Optional[float] = None,
) -> Tuple[float, float]:
    """Fit norm ~ C exp(-rate t) by least squares on log(norm).

    Args:
        t: Sample times
        norms: Positive norms at those times
        window: Fraction of the samples, counted from the end, used in the fit
            (default: the final two-thirds)

    Returns:
        (rate, r_squared)

    Raises:
        SamplingError: Fewer than 10 samples, mismatched lengths or a
            nonpositive norm inside the window
    """
    t = np.asarray(t, dtype=float)
    norms = np.asarray(norms, dtype=float)
    if t.shape != norms.shape:
        raise SamplingError(f"t and norms differ in length ({t.size} vs {norms.size})")
    if t.size < MIN_SAMPLES:
        raise SamplingError(f"decay-rate fit needs at least {MIN_SAMPLES} samples, got {t.size}")

    fraction = 2.0 / 3.0 if window is None else float(window)
    if not (0.0 < fraction <= 1.0):
        raise ValueError(f"window must lie in (0, 1], got {window}")
    count = max(3, math.ceil(fraction * t.size))
    fitted = norms[-count:]
    if not np.all(np.isfinite(fitted)) or np.any(fitted <= 0):
        raise SamplingError("decay-rate fit needs finite, strictly positive norms inside the window")
    fit = stats.linregress(t[-count:], np.log(fitted))
    return float(-fit.slope), float(fit.rvalue**2)
