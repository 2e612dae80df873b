"""The unfolded solver: restoration updates (Z, B) interleaved with degradation-modeling
updates (P, Q, T̂/D̂ priors, transmitter) over a fixed number of steps."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from config.settings import EstimateConfig, InitImage, ModelingForm, PqUpdate, ScheduleMode, SolverConfig
from degrade.model import DegradationMatrices
from degrade.simulate import DegradationKind
from dpt.transfer import transfer
from errors import InvalidArgumentError, ShapeMismatchError
from estimate.initial import estimate_initial, init_state
from imaging.image import Image, as_array
from oracle.energy import EnergyTrace, energy_degradation, energy_restoration
from priors.profiles import TaskPriorProfile, apply_prior_B, apply_prior_TD
from solver.state import RestorationResult, SolverState
from solver.updates import update_P, update_Q, update_Z

logger = logging.getLogger(__name__)


@dataclass
class StepRecord:
    """Side outputs of the steps run so far, collected into the result."""

    record_energy: bool = True
    energies: List[float] = field(default_factory=list)
    restoration: List[EnergyTrace] = field(default_factory=list)
    degradation: List[EnergyTrace] = field(default_factory=list)
    hats: list = field(default_factory=list)
    attention: List[np.ndarray] = field(default_factory=list)


def _reference(ref):
    O_ref, B_ref = (as_array(x) for x in ref)
    if O_ref.shape != B_ref.shape:
        raise ShapeMismatchError("reference pair", O_ref.shape, B_ref.shape)
    return O_ref, B_ref


def restoration_update(state: SolverState, O, cfg: SolverConfig, profile: TaskPriorProfile, k: int,
                       record: Optional[StepRecord] = None) -> SolverState:
    """Z_k then B_k with (T, D) held at the state's values."""
    O = as_array(O)
    _, _, gamma = cfg.schedule.values(k)
    Z = np.clip(update_Z(O, state.B, state.T, state.D, gamma), 0.0, 1.0)
    B = apply_prior_B(profile, Z, gamma)
    if record is None:
        return state.replace(Z=Z, B=B)
    after_B = energy_restoration(O, B, Z, state.T, state.D, gamma, profile.B)
    record.energies.append(after_B)
    if record.record_energy:
        trace = EnergyTrace(f"restoration step {k}")
        trace.record("before", energy_restoration(O, state.B, state.Z, state.T, state.D, gamma, profile.B))
        trace.record("after Z", energy_restoration(O, state.B, Z, state.T, state.D, gamma, profile.B))
        trace.record("after B", after_B)
        record.restoration.append(trace)
        logger.debug(f"step {k}: gamma={gamma:.3f}, restoration energy {trace.values[-1]:.6g}")
    return state.replace(Z=Z, B=B)


def modeling_update(state: SolverState, ref, cfg: SolverConfig, profile: TaskPriorProfile, k: int,
                    record: Optional[StepRecord] = None) -> SolverState:
    """P_k, Q_k, the matrix priors, then the transmitter onto the current B."""
    O_ref, B_ref = _reference(ref)
    alpha, beta, _ = cfg.schedule.values(k)
    hb = cfg.modeling_form is ModelingForm.HB

    P = update_P(O_ref, B_ref, state.T, state.Q, alpha)
    if hb:
        Q = np.zeros_like(P)
    else:
        P_for_Q = P if cfg.pq_update is PqUpdate.GAUSS_SEIDEL else state.P
        Q = np.clip(update_Q(O_ref, B_ref, P_for_Q, state.D, beta), -1.0, 1.0)
    T_hat, D_hat = apply_prior_TD(profile, P, Q, alpha, beta)
    if hb:
        D_hat = np.zeros_like(D_hat)

    if record is not None and record.record_energy:
        trace = EnergyTrace(f"degradation step {k}")

        def energy(P_, Q_, T_, D_):
            return energy_degradation(O_ref, B_ref, P_, Q_, T_, D_, alpha, beta, profile.T, profile.D)

        trace.record("before", energy(state.P, state.Q, state.T, state.D))
        trace.record("after P", energy(P, state.Q, state.T, state.D))
        trace.record("after Q", energy(P, Q, state.T, state.D))
        trace.record("after prior", energy(P, Q, T_hat, D_hat))
        record.degradation.append(trace)
        logger.debug(f"step {k}: alpha={alpha:.3f}, beta={beta:.3f}, degradation energy {trace.values[-1]:.6g}")

    T, D, weights = transfer(T_hat, D_hat, state.B, B_ref, state.T, state.D, cfg.dpt, return_attention=True)
    if hb:
        D = np.zeros_like(D)
    if record is not None:
        record.hats.append((T_hat, D_hat))
        record.attention.append(weights)
    return state.replace(P=P, Q=Q, T=T, D=D)


def step(state: SolverState, O, ref, cfg: SolverConfig, kind, record: Optional[StepRecord] = None) -> SolverState:
    """One parallel step; the last step of a run refines only the image."""
    k = state.k + 1
    if k > cfg.steps:
        raise InvalidArgumentError(f"step {k} exceeds the configured {cfg.steps} steps")
    profile = cfg.priors.for_kind(kind)
    state = restoration_update(state, O, cfg, profile, k, record)
    if k < cfg.steps and cfg.reference_modeling:
        state = modeling_update(state, ref, cfg, profile, k, record)
    return state.replace(k=k)


def initial_state(O, M0: DegradationMatrices, cfg: SolverConfig) -> SolverState:
    if cfg.modeling_form is ModelingForm.HB:
        M0 = DegradationMatrices(M0.T, np.zeros(M0.shape))
    return init_state(O, M0, cursory=cfg.init_image is InitImage.CURSORY, eps=cfg.eps)


def run(O, ref, cfg: SolverConfig = SolverConfig(), kind=None, M0: Optional[DegradationMatrices] = None,
        estimate_cfg: EstimateConfig = EstimateConfig(), metadata: Optional[dict] = None) -> RestorationResult:
    if kind is None:
        raise InvalidArgumentError("run needs a degradation kind; classify the input first")
    kind = DegradationKind(kind)
    O = as_array(O)
    O_ref, B_ref = _reference(ref)
    if O_ref.shape != O.shape:
        raise ShapeMismatchError("reference pair vs input", O_ref.shape, O.shape)
    if M0 is None:
        M0 = estimate_initial(O, kind, estimate_cfg)

    state = initial_state(O, M0, cfg)
    initial = state.B
    record = StepRecord(record_energy=cfg.record_energy)
    trace_B, trace_TD, gammas = [], [], []

    if cfg.mode is ScheduleMode.PARALLEL:
        for _ in range(cfg.steps):
            state = step(state, O, (O_ref, B_ref), cfg, kind, record)
            trace_B.append(state.B)
            trace_TD.append((state.T, state.D))
            gammas.append(cfg.schedule.values(state.k)[2])
    else:
        profile = cfg.priors.for_kind(kind)
        for k in range(1, cfg.steps + 1):
            if cfg.reference_modeling:
                state = modeling_update(state, (O_ref, B_ref), cfg, profile, k, record)
            trace_TD.append((state.T, state.D))
        # the penalty schedule restarts for the restoration phase
        for k in range(1, cfg.steps + 1):
            state = restoration_update(state, O, cfg, profile, k, record)
            trace_B.append(state.B)
            gammas.append(cfg.schedule.values(k)[2])
        state = state.replace(k=cfg.steps)

    meta = {
        "kind": kind.value,
        "config_hash": cfg.digest(),
        "mode": cfg.mode.value,
        "modeling_form": cfg.modeling_form.value,
        "steps": cfg.steps,
    }
    meta.update(metadata or {})
    return RestorationResult(
        B=Image(state.B),
        trace_B=trace_B,
        trace_TD=trace_TD,
        trace_hat=record.hats,
        energies=record.energies,
        restoration_energy=record.restoration,
        degradation_energy=record.degradation,
        attention=record.attention,
        gammas=gammas,
        metadata=meta,
        initial=initial,
    )
