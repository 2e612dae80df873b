from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from config.settings import SolverConfig
from degrade.model import EPS_T
from degrade.simulate import DegradationKind, synthetic_case
from dpt.transfer import attention, extract_features
from errors import InvalidArgumentError
from estimate.initial import estimate_initial
from oracle.energy import check_descent
from oracle.scalar import argmin_pixel, p_objective, q_objective, z_objective
from priors.operators import Identity, SoftThreshold, Tikhonov, grid_laplacian
from priors.profiles import PriorTable, TaskPriorProfile
from solver.engine import run
from solver.updates import update_P, update_Q, update_Z

logger = logging.getLogger(__name__)

ORACLE_TOL = 1e-8
DESCENT_SLACK = 1e-9
FAULTS = ("z-off-by-eps",)
FAULT_OFFSET = 1e-6


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


@dataclass
class SuiteReport:
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def table(self) -> str:
        width = max((len(c.name) for c in self.checks), default=5)
        lines = [f"{'check'.ljust(width)}  result  seconds  detail"]
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            lines.append(f"{c.name.ljust(width)}  {status:6}  {c.seconds:7.2f}  {c.detail}")
        return "\n".join(lines)


def scalar_instances(n: int, rng: np.random.Generator) -> dict:
    """Random per-pixel inputs whose subproblem minimisers lie well inside the oracle bracket."""
    return {
        "O": rng.uniform(0.0, 1.0, n),
        "B": rng.uniform(0.0, 1.0, n),
        "T": rng.uniform(EPS_T, 1.0, n),
        "D": rng.uniform(-0.5, 0.5, n),
        "P": rng.uniform(0.0, 1.5, n),
        "Q": rng.uniform(-0.5, 0.5, n),
        "gamma": rng.uniform(0.5, 1.0, n),
        "alpha": rng.uniform(0.3, 1.0, n),
        "beta": rng.uniform(0.3, 1.0, n),
    }


def _max_oracle_error(closed: np.ndarray, objectives) -> float:
    oracle = np.array([argmin_pixel(f) for f in objectives])
    return float(np.max(np.abs(closed - oracle)))


def check_update_Z(x: dict, update=update_Z) -> float:
    closed = update(x["O"], x["B"], x["T"], x["D"], x["gamma"])
    return _max_oracle_error(closed, [
        z_objective(*args) for args in zip(x["O"], x["B"], x["T"], x["D"], x["gamma"])
    ])


def check_update_P(x: dict) -> float:
    closed = update_P(x["O"], x["B"], x["T"], x["Q"], x["alpha"])
    return _max_oracle_error(closed, [
        p_objective(*args) for args in zip(x["O"], x["B"], x["T"], x["Q"], x["alpha"])
    ])


def check_update_Q(x: dict) -> float:
    closed = update_Q(x["O"], x["B"], x["P"], x["D"], x["beta"])
    return _max_oracle_error(closed, [
        q_objective(*args) for args in zip(x["O"], x["B"], x["P"], x["D"], x["beta"])
    ])


def _perturbed_update_Z(*args):
    return update_Z(*args) + FAULT_OFFSET


def exact_prior_table() -> PriorTable:
    """Exact-prox profiles for every kind; energy descent is guaranteed only for these."""
    profile = TaskPriorProfile(B=Tikhonov(lam=0.05), T=Identity(), D=SoftThreshold(lam=0.02))
    return PriorTable(rain=profile, haze=profile, lowlight=profile)


def descent_violations(kind, seed: int, size: int, steps: int = 3) -> List[str]:
    O, _, ref, _ = synthetic_case(kind, seed, size)
    cfg = SolverConfig(steps=steps, priors=exact_prior_table())
    result = run(O, ref, cfg, kind=kind, M0=estimate_initial(O, kind))
    failures = []
    for trace in result.restoration_energy + result.degradation_energy:
        report = check_descent(trace, DESCENT_SLACK)
        if not report.passed:
            failures.append(f"{kind} seed {seed}: {trace.label} rises at {report.violations}")
    return failures


def check_tikhonov_dense(rng: np.random.Generator, size: int = 8, lam: float = 0.2, gamma: float = 1.0) -> float:
    z = rng.uniform(0.0, 1.0, (size, size, 3))
    solved = Tikhonov(lam=lam).prox(z, gamma)
    A = gamma * np.eye(size * size) + 2.0 * lam * grid_laplacian(size, size).toarray()
    dense = np.stack([np.linalg.solve(A, gamma * z[..., c].ravel()) for c in range(3)], axis=-1)
    return float(np.max(np.abs(solved - dense.reshape(z.shape))))


def check_attention_rows(rng: np.random.Generator, size: int = 48, patch: int = 16) -> float:
    f_tgt = extract_features(rng.uniform(0.0, 1.0, (size, size, 3)), patch).vectors()
    f_ref = extract_features(rng.uniform(0.0, 1.0, (size, size, 3)), patch).vectors()
    weights = attention(f_tgt, f_ref, 0.1)
    if np.any(weights < 0):
        return float("inf")
    return float(np.max(np.abs(weights.sum(axis=1) - 1.0)))


def _timed(name: str, fn: Callable[[], tuple]) -> CheckResult:
    start_time = time.time()
    passed, detail = fn()
    result = CheckResult(name, passed, detail, time.time() - start_time)
    logger.debug(f"verify {name}: {'pass' if passed else 'FAIL'} ({detail})")
    return result


def _tolerance_check(value: float, tol: float):
    return value <= tol, f"max error {value:.3e} (tol {tol:.0e})"


def run_suite(instances: int = 1000, seed: int = 0, fault: Optional[str] = None,
              descent_cases: int = 2, descent_size: int = 32) -> SuiteReport:
    if fault is not None and fault not in FAULTS:
        raise InvalidArgumentError(f"unknown fault {fault!r}; known: {', '.join(FAULTS)}")
    rng = np.random.default_rng(seed)
    x = scalar_instances(instances, rng)
    z_update = _perturbed_update_Z if fault == "z-off-by-eps" else update_Z

    def descent():
        failures = []
        for kind in DegradationKind:
            for case in range(descent_cases):
                failures += descent_violations(kind, seed + case, descent_size)
        if failures:
            return False, "; ".join(failures[:3])
        return True, f"{descent_cases * len(DegradationKind)} runs, slack {DESCENT_SLACK:.0e}"

    report = SuiteReport()
    report.checks.append(_timed("update_Z vs oracle", lambda: _tolerance_check(check_update_Z(x, z_update), ORACLE_TOL)))
    report.checks.append(_timed("update_P vs oracle", lambda: _tolerance_check(check_update_P(x), ORACLE_TOL)))
    report.checks.append(_timed("update_Q vs oracle", lambda: _tolerance_check(check_update_Q(x), ORACLE_TOL)))
    report.checks.append(_timed("tikhonov vs dense solve", lambda: _tolerance_check(check_tikhonov_dense(rng), 1e-8)))
    report.checks.append(_timed("attention rows", lambda: _tolerance_check(check_attention_rows(rng), 1e-12)))
    report.checks.append(_timed("energy descent", descent))
    return report
