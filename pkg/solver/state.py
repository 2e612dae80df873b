from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from degrade.model import EPS_T, DegradationMatrices
from errors import InvalidArgumentError, ShapeMismatchError
from imaging.image import Image

ARRAYS = ("B", "Z", "T", "D", "P", "Q")


def _readonly(array) -> np.ndarray:
    array = np.array(array, dtype=np.float64, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class SolverState:
    """All iterates of one unfolding run. Immutable; every step returns a new state."""

    B: np.ndarray
    Z: np.ndarray
    T: np.ndarray
    D: np.ndarray
    P: np.ndarray
    Q: np.ndarray
    k: int = 0

    def __post_init__(self):
        arrays = {name: _readonly(getattr(self, name)) for name in ARRAYS}
        shapes = {a.shape for a in arrays.values()}
        if len(shapes) > 1:
            raise ShapeMismatchError("SolverState", *[a.shape for a in arrays.values()])
        for name, array in arrays.items():
            if not np.all(np.isfinite(array)):
                raise InvalidArgumentError(f"SolverState.{name} contains NaN or Inf")
            object.__setattr__(self, name, array)
        T = arrays["T"]
        if T.min() < EPS_T or T.max() > 1.0:
            raise InvalidArgumentError(f"SolverState.T outside [{EPS_T}, 1]")
        if self.k < 0:
            raise InvalidArgumentError(f"step index must be >= 0, got {self.k}")

    @property
    def shape(self):
        return self.B.shape

    def matrices(self) -> DegradationMatrices:
        return DegradationMatrices(self.T, self.D)

    def replace(self, **changes) -> "SolverState":
        return dataclasses.replace(self, **changes)


@dataclass
class RestorationResult:
    """Output of one run: final image, per-step traces and run metadata."""

    B: Image
    trace_B: List[np.ndarray]
    trace_TD: List[Tuple[np.ndarray, np.ndarray]]
    trace_hat: List[Tuple[np.ndarray, np.ndarray]]
    energies: List[float]
    restoration_energy: list = field(default_factory=list)
    degradation_energy: list = field(default_factory=list)
    attention: List[np.ndarray] = field(default_factory=list)
    gammas: List[float] = field(default_factory=list)
    metadata: Dict[str, object] = field(default_factory=dict)
    initial: Optional[np.ndarray] = None

    @property
    def steps(self) -> int:
        return len(self.trace_B)
