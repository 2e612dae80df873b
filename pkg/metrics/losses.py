"""Training-style losses, used here to score traces and step-weight schedules."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from config.settings import WeightSchedule
from errors import InvalidArgumentError
from imaging.image import as_array, require_same_shape
from metrics.quality import ssim


@dataclass(frozen=True)
class LossWeights:
    schedule: WeightSchedule
    S: int
    weights: np.ndarray

    def renormalized(self, count: int) -> np.ndarray:
        """The first ``count`` weights rescaled to sum to 1."""
        head = self.weights[:count]
        return head / head.sum() if count else head


def step_weights(schedule, S: int) -> LossWeights:
    schedule = WeightSchedule(schedule)
    if S < 1:
        raise InvalidArgumentError(f"S must be >= 1, got {S}")
    k = np.arange(1, S + 1, dtype=np.float64)
    if schedule is WeightSchedule.EXP:
        raw = 2.0 ** k
    elif schedule is WeightSchedule.LINEAR:
        raw = k
    else:
        raw = np.log2(k + 1.0)
    return LossWeights(schedule, S, raw / raw.sum())


def charbonnier(yhat, y, xi: float) -> float:
    return float(np.mean(np.sqrt((yhat - y) ** 2 + xi * xi)))


def l_sup(yhat, y, xi: float = 1e-3) -> float:
    """(1 − SSIM) + mean Charbonnier."""
    if not xi > 0:
        raise InvalidArgumentError(f"xi must be > 0, got {xi}")
    yhat, y = as_array(yhat), as_array(y)
    require_same_shape("l_sup", yhat, y)
    return (1.0 - ssim(yhat, y)) + charbonnier(yhat, y, xi)


def l_res(trace_B, B_gt, w: LossWeights, xi: float = 1e-3) -> float:
    if len(trace_B) != w.S:
        raise InvalidArgumentError(f"restoration trace has {len(trace_B)} entries, weights expect {w.S}")
    return float(sum(wk * l_sup(B_k, B_gt, xi) for wk, B_k in zip(w.weights, trace_B)))


def l_deg(trace_TD, ref, w: LossWeights, xi: float = 1e-3) -> float:
    """Weighted reference reproduction loss over the S−1 matrix estimates."""
    if len(trace_TD) != w.S - 1:
        raise InvalidArgumentError(f"matrix trace has {len(trace_TD)} entries, expected {w.S - 1}")
    if w.S == 1:
        return 0.0
    O_ref, B_ref = (as_array(x) for x in ref)
    weights = w.renormalized(w.S - 1)
    return float(sum(
        wk * l_sup(as_array(T) * B_ref + as_array(D), O_ref, xi)
        for wk, (T, D) in zip(weights, trace_TD)
    ))


def l_total(trace_B, B_gt, trace_TD, ref, w: LossWeights, xi: float = 1e-3) -> float:
    return l_res(trace_B, B_gt, w, xi) + l_deg(trace_TD, ref, w, xi)
