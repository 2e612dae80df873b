from __future__ import annotations

import numpy as np
from pydantic import BaseModel, ConfigDict

from degrade.model import EPS_T
from degrade.simulate import DegradationKind
from errors import InvalidArgumentError
from priors.operators import TV, BoxClamp, PriorOperator, SoftThreshold, Tikhonov, prox


class TaskPriorProfile(BaseModel):
    """Prior operators for the clean image (B) and the two degradation matrices (T, D)."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    B: PriorOperator
    T: PriorOperator
    D: PriorOperator

    @property
    def exact(self) -> bool:
        return self.B.exact and self.T.exact and self.D.exact


def _rain() -> TaskPriorProfile:
    return TaskPriorProfile(B=TV(lam=0.05), T=BoxClamp(lo=1.0, hi=1.0), D=SoftThreshold(lam=0.05))


def _haze() -> TaskPriorProfile:
    return TaskPriorProfile(B=TV(lam=0.02), T=Tikhonov(lam=0.5), D=Tikhonov(lam=0.5))


def _lowlight() -> TaskPriorProfile:
    return TaskPriorProfile(B=TV(lam=0.02), T=Tikhonov(lam=1.0), D=SoftThreshold(lam=0.5))


class PriorTable(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    rain: TaskPriorProfile = _rain()
    haze: TaskPriorProfile = _haze()
    lowlight: TaskPriorProfile = _lowlight()

    def for_kind(self, kind) -> TaskPriorProfile:
        return getattr(self, DegradationKind(kind).value)

    def with_profile(self, kind, profile: TaskPriorProfile) -> "PriorTable":
        return self.model_copy(update={DegradationKind(kind).value: profile})


def apply_prior_B(profile: TaskPriorProfile, Z, gamma: float) -> np.ndarray:
    return np.clip(prox(profile.B, Z, gamma), 0.0, 1.0)


def apply_prior_TD(profile: TaskPriorProfile, P, Q, alpha: float, beta: float):
    if not (alpha > 0 and beta > 0):
        raise InvalidArgumentError(f"alpha and beta must be > 0, got {alpha}, {beta}")
    T_hat = np.clip(prox(profile.T, P, alpha), EPS_T, 1.0)
    D_hat = np.clip(prox(profile.D, Q, beta), -1.0, 1.0)
    return T_hat, D_hat
