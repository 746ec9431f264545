"""Batch metrics over trial outcomes: localization MSE over optimally
matched pairs, detection probability, and successful-recovery probability.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import InvalidParameterError, UndefinedMetricError


@dataclass(frozen=True)
class MetricsReport:
    """Aggregate metrics of one Monte-Carlo batch; `mse` is None when no
    matched pairs exist anywhere in the batch."""

    mse: float | None
    p_d: float
    srp: float
    trials: int
    pairs_used: int


def pair_targets(actual, estimated) -> list[tuple[int, int]]:
    """Optimal one-to-one matching of min(K, K_hat) pairs.

    Minimizes the total squared distance over all one-to-one assignments;
    returns (actual_index, estimated_index) pairs sorted by actual index.
    """
    if len(actual) == 0 or len(estimated) == 0:
        return []
    a = np.asarray(actual, dtype=float)
    e = np.asarray(estimated, dtype=float)
    cost = np.sum((a[:, None, :] - e[None, :, :]) ** 2, axis=2)
    rows, cols = linear_sum_assignment(cost)
    return sorted(zip(rows.tolist(), cols.tolist()))


def _pair_squared_errors(outcome) -> list[float]:
    pairs = pair_targets(outcome.true_positions, outcome.estimated_positions)
    out = []
    for i, j in pairs:
        p = outcome.true_positions[i]
        q = outcome.estimated_positions[j]
        out.append((p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2)
    return out


def mse(outcomes) -> float:
    """Mean squared position error over all matched pairs of all trials.

    Normalizes by the total pair count, which reduces to the fixed-U form
    when every trial matches the same number of pairs.
    """
    total = 0.0
    pairs = 0
    for outcome in outcomes:
        errors = _pair_squared_errors(outcome)
        total += sum(errors)
        pairs += len(errors)
    if pairs == 0:
        raise UndefinedMetricError("no matched pairs in the batch")
    return total / pairs


def detection_probability(outcomes) -> float:
    """Fraction of trials whose detected count equals the true count."""
    outcomes = list(outcomes)
    if not outcomes:
        raise InvalidParameterError("detection probability needs at least one trial")
    hits = sum(1 for o in outcomes if o.k_true == o.k_hat)
    return hits / len(outcomes)


def srp(outcomes, epsilon_m: float = 1.0, strict: bool = False) -> float:
    """Fraction of trials in which every true target was recovered.

    A trial succeeds when each true target has a matched estimate within
    `epsilon_m`. `strict` additionally requires the detected count to equal
    the true count.
    """
    outcomes = list(outcomes)
    if not outcomes:
        raise InvalidParameterError("srp needs at least one trial")
    if epsilon_m < 0:
        raise InvalidParameterError("epsilon_m must be non-negative")
    eps2 = epsilon_m * epsilon_m
    hits = 0
    for o in outcomes:
        errors = _pair_squared_errors(o)
        covered = len(errors) == o.k_true and all(e <= eps2 for e in errors)
        if covered and (not strict or o.k_hat == o.k_true):
            hits += 1
    return hits / len(outcomes)


def compute_report(outcomes, epsilon_m: float = 1.0) -> MetricsReport:
    """All batch metrics in one pass, with MSE downgraded to None when
    undefined."""
    outcomes = list(outcomes)
    pairs = sum(len(_pair_squared_errors(o)) for o in outcomes)
    try:
        mse_value: float | None = mse(outcomes)
    except UndefinedMetricError:
        mse_value = None
    return MetricsReport(
        mse=mse_value,
        p_d=detection_probability(outcomes),
        srp=srp(outcomes, epsilon_m),
        trials=len(outcomes),
        pairs_used=pairs,
    )
