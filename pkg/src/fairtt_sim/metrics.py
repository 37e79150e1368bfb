"""Evaluation metrics: Jain's fairness index, bottleneck utilization,
elephant/mice throughput ratio, and across-seed confidence intervals."""

import math
from dataclasses import dataclass, field

from scipy.stats import t as student_t


def jain_index(throughputs) -> float:
    """Jain's fairness index, (sum T)^2 / (n * sum T^2), in [1/n, 1].

    Returns None (the no-traffic marker, excluded from averages) when all
    inputs are zero.
    """
    n = len(throughputs)
    if n < 1:
        raise ValueError("fairness index needs at least one flow")
    total = 0.0
    total_sq = 0.0
    for value in throughputs:
        if value < 0:
            raise ValueError(f"negative throughput: {value}")
        total += value
        total_sq += value * value
    if total_sq == 0.0:
        return None
    return (total * total) / (n * total_sq)


def utilization(throughputs, c_btl: float) -> float:
    """Aggregate throughput as a percentage of the bottleneck bandwidth."""
    if c_btl <= 0:
        raise ValueError("bottleneck bandwidth must be positive")
    return sum(throughputs) / c_btl * 100.0


def throughput_ratio(elephant_mean: float, mice_mean: float):
    """Elephant/mice throughput ratio; None marks mice starvation."""
    if mice_mean == 0:
        return None
    return elephant_mean / mice_mean


def confidence_interval(samples, level: float = 0.95):
    """(mean, half_width) of a Student-t interval with n-1 degrees of
    freedom.  With fewer than two samples the half-width is undefined and
    None is returned in its place."""
    n = len(samples)
    if n == 0:
        raise ValueError("confidence interval needs at least one sample")
    mean = sum(samples) / n
    if n < 2:
        return mean, None
    var = sum((x - mean) ** 2 for x in samples) / (n - 1)
    quantile = float(student_t.ppf((1.0 + level) / 2.0, n - 1))
    half = quantile * math.sqrt(var / n)
    return mean, half


@dataclass
class ThroughputSeries:
    """Per-flow receiver-side throughput in fixed windows (bits/s)."""

    flow_id: int
    flow_class: str
    window: int                      # window width, ticks
    samples: list = field(default_factory=list)   # one rate per window


@dataclass
class RunResult:
    """Everything measured in one simulation run."""

    scenario: str
    algo: str
    seed: int
    window_s: float
    flows: list                      # ThroughputSeries per flow
    fairness: list                   # Jain index per window (None = idle)
    utilization: list                # percent per window
    ratio: list                      # per-window elephant/mice ratio
    mean_throughput: dict            # flow_id -> bits/s, warm-up excluded
    mean_fairness: float
    mean_utilization: float
    mean_ratio: float                # ratio of run-average throughputs
    conservation: dict               # per-flow packet accounting
    adjustments_applied: int
    coefficient_min: float
    coefficient_max: float
    probe_rtt_visits: int
    events_processed: int
