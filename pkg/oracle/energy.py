"""Exact evaluation of the two split objectives and a descent checker for their traces."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List

import numpy as np

from errors import InvalidArgumentError
from imaging.image import broadcast_operands
from priors.operators import Identity


def _sq(x) -> float:
    return float(np.sum(np.square(x)))


def energy_restoration(O, B, Z, T, D, gamma, prior=Identity()) -> float:
    """½||O − (T∘Z + D)||² + (γ/2)||Z − B||² + λΦ(B)."""
    if not gamma > 0:
        raise InvalidArgumentError(f"gamma must be > 0, got {gamma}")
    O, B, Z, T, D = broadcast_operands("energy_restoration", O, B, Z, T, D)
    return 0.5 * _sq(O - (T * Z + D)) + 0.5 * gamma * _sq(Z - B) + prior.penalty(B)


def energy_degradation(O_ref, B_ref, P, Q, T, D, alpha, beta, prior_T=Identity(), prior_D=Identity()) -> float:
    """½||O_ref − (P∘B_ref + Q)||² + (α/2)||P − T||² + (β/2)||Q − D||² + μΨ(T, D)."""
    if not (alpha > 0 and beta > 0):
        raise InvalidArgumentError(f"alpha and beta must be > 0, got {alpha}, {beta}")
    O_ref, B_ref, P, Q, T, D = broadcast_operands("energy_degradation", O_ref, B_ref, P, Q, T, D)
    return (
        0.5 * _sq(O_ref - (P * B_ref + Q))
        + 0.5 * alpha * _sq(P - T)
        + 0.5 * beta * _sq(Q - D)
        + prior_T.penalty(T)
        + prior_D.penalty(D)
    )


@dataclass
class EnergyTrace:
    """Energies recorded at consecutive checkpoints of one alternation."""

    label: str
    values: List[float] = field(default_factory=list)
    checkpoints: List[str] = field(default_factory=list)

    def record(self, checkpoint: str, value: float):
        if not np.isfinite(value):
            raise InvalidArgumentError(f"{self.label}: non-finite energy at {checkpoint}")
        self.checkpoints.append(checkpoint)
        self.values.append(float(value))

    def __len__(self):
        return len(self.values)


@dataclass
class DescentReport:
    label: str
    violations: List[int]
    increases: List[float]

    @property
    def passed(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.passed


def check_descent(trace, slack: float = 0.0) -> DescentReport:
    """Fails iff some value exceeds its predecessor by more than ``slack``.

    Violations are reported by the index of the later value.
    """
    if slack < 0:
        raise InvalidArgumentError(f"slack must be >= 0, got {slack}")
    label = getattr(trace, "label", "trace")
    values = np.asarray(getattr(trace, "values", trace), dtype=np.float64)
    jumps = np.diff(values)
    bad = np.flatnonzero(jumps > slack)
    return DescentReport(label, [int(i) + 1 for i in bad], [float(jumps[i]) for i in bad])
