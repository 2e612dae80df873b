"""Proximal operators standing in for the learned prior modules.

Every operator answers argmin_x λΦ(x) + (γ/2)||z − x||²_F for its own Φ and
reports λΦ(x) through ``penalty`` so energies can be evaluated.
"""

from __future__ import annotations

import logging
from functools import lru_cache
from typing import Annotated, ClassVar, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import sparse
from scipy.sparse.linalg import cg

from errors import ConvergenceError, InvalidArgumentError

logger = logging.getLogger(__name__)


class _Prior(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)

    # exact prox: output minimises the prox objective (up to solver tolerance)
    exact: ClassVar[bool] = True

    def prox(self, z: np.ndarray, gamma: float) -> np.ndarray:
        raise NotImplementedError

    def penalty(self, x: np.ndarray) -> float:
        return 0.0

    def objective(self, x: np.ndarray, z: np.ndarray, gamma: float) -> float:
        return self.penalty(x) + 0.5 * gamma * float(np.sum((z - x) ** 2))


class Identity(_Prior):
    kind: Literal["identity"] = "identity"

    def prox(self, z, gamma):
        return np.array(z, dtype=np.float64, copy=True)


class BoxClamp(_Prior):
    """Indicator of [lo, hi]; the prox is the projection."""

    kind: Literal["box_clamp"] = "box_clamp"
    lo: float = 0.0
    hi: float = 1.0

    @model_validator(mode="after")
    def _ordered(self):
        if self.lo > self.hi:
            raise ValueError(f"box_clamp needs lo <= hi, got [{self.lo}, {self.hi}]")
        return self

    def prox(self, z, gamma):
        return np.clip(z, self.lo, self.hi)


class SoftThreshold(_Prior):
    """λ||x||₁."""

    kind: Literal["soft_threshold"] = "soft_threshold"
    lam: float = Field(0.05, ge=0.0, alias="lambda")

    def prox(self, z, gamma):
        return np.sign(z) * np.maximum(np.abs(z) - self.lam / gamma, 0.0)

    def penalty(self, x):
        return self.lam * float(np.sum(np.abs(x)))


class Tikhonov(_Prior):
    """λ xᵀLx with L the 5-point graph Laplacian (reflective boundary), per channel."""

    kind: Literal["tikhonov"] = "tikhonov"
    lam: float = Field(0.5, ge=0.0, alias="lambda")
    cg_tol: float = Field(1e-10, gt=0.0)
    cg_max_iter: int = Field(1000, ge=1)

    def prox(self, z, gamma):
        z = np.asarray(z, dtype=np.float64)
        if self.lam == 0.0:
            return z.copy()
        planes, restore = _as_planes(z)
        height, width = planes.shape[:2]
        A = gamma * sparse.identity(height * width, format="csr") + 2.0 * self.lam * grid_laplacian(height, width)
        solved = []
        for c in range(planes.shape[2]):
            b = gamma * planes[..., c].ravel()
            b_norm = float(np.linalg.norm(b))
            if b_norm == 0.0:
                solved.append(np.zeros_like(b))
                continue
            x, info = cg(A, b, x0=planes[..., c].ravel(), rtol=self.cg_tol, atol=0.0, maxiter=self.cg_max_iter)
            if info != 0:
                residual = float(np.linalg.norm(b - A @ x))
                raise ConvergenceError(residual, self.cg_tol * b_norm, self.cg_max_iter)
            solved.append(x)
        return restore(np.stack(solved, axis=-1).reshape(planes.shape))

    def penalty(self, x):
        x = np.asarray(x, dtype=np.float64)
        return self.lam * _quadratic_variation(x)


class TV(_Prior):
    """Isotropic total variation, solved approximately by dual projection iterations."""

    kind: Literal["tv"] = "tv"
    lam: float = Field(0.05, ge=0.0, alias="lambda")
    inner_iters: int = Field(50, ge=1)
    step: float = Field(0.125, gt=0.0, le=0.25)

    exact: ClassVar[bool] = False

    def prox(self, z, gamma):
        z = np.asarray(z, dtype=np.float64)
        theta = self.lam / gamma
        if theta == 0.0:
            return z.copy()
        planes, restore = _as_planes(z)
        py = np.zeros_like(planes)
        px = np.zeros_like(planes)
        scaled = planes / theta
        for _ in range(self.inner_iters):
            gy, gx = gradient(divergence(py, px) - scaled)
            norm = np.sqrt(gy ** 2 + gx ** 2)
            denom = 1.0 + self.step * norm
            py = (py + self.step * gy) / denom
            px = (px + self.step * gx) / denom
        return restore(planes - theta * divergence(py, px))

    def penalty(self, x):
        return self.lam * total_variation(np.asarray(x, dtype=np.float64))


PriorOperator = Annotated[
    Union[Identity, BoxClamp, SoftThreshold, Tikhonov, TV],
    Field(discriminator="kind"),
]


def prox(op: _Prior, z, gamma: float) -> np.ndarray:
    if not gamma > 0:
        raise InvalidArgumentError(f"gamma must be > 0, got {gamma}")
    z = np.asarray(z, dtype=np.float64)
    if not np.all(np.isfinite(z)):
        raise InvalidArgumentError("prox input contains NaN or Inf")
    return op.prox(z, gamma)


def _as_planes(z: np.ndarray):
    """View z as H×W×C; the returned callable restores the original shape."""
    if z.ndim == 2:
        return z[..., None], lambda out: out[..., 0]
    if z.ndim == 3:
        return z, lambda out: out
    raise InvalidArgumentError(f"prior operators need 2-D or 3-D arrays, got shape {z.shape}")


def gradient(u: np.ndarray):
    """Forward differences along rows and columns, zero on the last row/column."""
    gy = np.zeros_like(u)
    gx = np.zeros_like(u)
    gy[:-1] = u[1:] - u[:-1]
    gx[:, :-1] = u[:, 1:] - u[:, :-1]
    return gy, gx


def divergence(py: np.ndarray, px: np.ndarray) -> np.ndarray:
    """Negative adjoint of ``gradient``."""
    div = np.zeros_like(py)
    div[:-1] += py[:-1]
    div[1:] -= py[:-1]
    div[:, :-1] += px[:, :-1]
    div[:, 1:] -= px[:, :-1]
    return div


def total_variation(x: np.ndarray) -> float:
    planes, _ = _as_planes(x)
    gy, gx = gradient(planes)
    return float(np.sum(np.sqrt(gy ** 2 + gx ** 2)))


def _quadratic_variation(x: np.ndarray) -> float:
    # xᵀLx summed over channels
    planes, _ = _as_planes(x)
    return float(np.sum(np.diff(planes, axis=0) ** 2) + np.sum(np.diff(planes, axis=1) ** 2))


def _path_laplacian(n: int) -> sparse.csr_matrix:
    if n == 1:
        return sparse.csr_matrix((1, 1))
    diff = sparse.diags([-np.ones(n - 1), np.ones(n - 1)], [0, 1], shape=(n - 1, n))
    return (diff.T @ diff).tocsr()


@lru_cache(maxsize=16)
def grid_laplacian(height: int, width: int) -> sparse.csr_matrix:
    """Graph Laplacian of the 4-connected height×width grid, row-major pixel order."""
    return (
        sparse.kron(sparse.identity(height), _path_laplacian(width))
        + sparse.kron(_path_laplacian(height), sparse.identity(width))
    ).tocsr()
