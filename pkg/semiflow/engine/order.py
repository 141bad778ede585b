"""
Empirical convergence-order and rate estimation from residual histories.
"""
import math
from typing import Optional, Sequence, Tuple

import numpy as np

from ..errors import InsufficientData, NotDecreasing

# Residuals at or below this are rounding noise and say nothing about the order
NOISE_FLOOR = 1e-14


def estimate_order(residuals: Sequence[float]) -> Tuple[float, float]:
    """
    Estimate the R-order and rate of a convergent residual sequence.

    The order is the median ratio of consecutive log-decrements
    log(e_{k+2}/e_{k+1}) / log(e_{k+1}/e_k), which is exactly r for
    e_k = σ^{r^k} and exactly 1 for a geometric sequence. The rate is
    exp(mean(log e_k / r̂^k)) for the rounded order r̂ ≥ 2 and the median
    one-step ratio otherwise.

    Args:
        residuals: at least three strictly decreasing values in (0, 1)

    Returns:
        (order, rate)
    """
    e = np.asarray(list(residuals), dtype=float)
    if e.size < 3:
        raise InsufficientData(f"need at least 3 residuals, got {e.size}")
    if not np.all(np.isfinite(e)) or np.any(e <= 0) or np.any(e >= 1):
        raise InsufficientData("residuals must be finite and lie in (0, 1)")
    if np.any(np.diff(e) >= 0):
        raise NotDecreasing("residuals must be strictly decreasing")

    logs = np.log(e)
    steps = np.diff(logs)
    order = float(np.median(steps[1:] / steps[:-1]))

    if order >= 1.5:
        r_hat = round(order)
        k = np.arange(e.size)
        rate = float(np.exp(np.mean(logs / float(r_hat) ** k)))
    else:
        rate = float(np.exp(np.median(steps)))

    return order, rate


def tail_window(residuals: Sequence[float]) -> list:
    """Longest strictly decreasing run of usable residuals that ends at the last usable one."""
    usable = [e for e in residuals if math.isfinite(e) and NOISE_FLOOR < e < 1.0]
    if not usable:
        return []

    start = len(usable) - 1
    while start > 0 and usable[start - 1] > usable[start]:
        start -= 1
    return usable[start:]


def order_or_none(residuals: Sequence[float]) -> Tuple[Optional[float], Optional[float]]:
    """estimate_order on the tail window, or (None, None) when there is too little to go on."""
    window = tail_window(residuals)
    if len(window) < 3:
        return None, None
    try:
        return estimate_order(window)
    except (InsufficientData, NotDecreasing):
        return None, None
