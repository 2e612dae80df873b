"""Desk-scale ablation grid over a seeded synthetic suite, one CSV per study."""

import csv
import io
import logging
import time
from pathlib import Path

import numpy as np

from actions.BaseAction import BaseAction
from actions.cli_args import non_negative_int, positive_int
from config.config import Config
from config.settings import DptConfig, ModelingForm, ScheduleMode, SolverConfig, WeightSchedule
from degrade.simulate import DegradationKind, synthetic_case
from errors import InvalidArgumentError
from estimate.classify import classify
from estimate.initial import estimate_initial
from imaging.io import ensure_dir
from metrics.losses import l_total, step_weights
from metrics.quality import psnr
from metrics.report import classifier_accuracy
from solver.engine import run
from utils import atomic_write, fan_out, print_timings

logger = logging.getLogger(__name__)

cfg = Config()

COLUMNS = ("study", "variant", "rain", "haze", "lowlight", "average", "seconds")
STUDIES = ("iterations", "modeling_form", "schedule", "dpt_depth", "dpt_mode", "reference",
           "loss_weights", "classifier")


def build_suite(count: int, seed: int, size: int):
    """``count`` synthetic cases per kind: (kind, O, B, ref)."""
    suite = []
    for kind in DegradationKind:
        for i in range(count):
            O, B, ref, _ = synthetic_case(kind, seed + i, size)
            suite.append((kind, O, B, ref))
    return suite


def solver_variants(study: str):
    base = SolverConfig()
    if study == "iterations":
        return [(f"S={s}", base.model_copy(update={"steps": s})) for s in range(1, 7)]
    if study == "modeling_form":
        return [(form.value, base.model_copy(update={"modeling_form": form})) for form in ModelingForm]
    if study == "schedule":
        return [(mode.value, base.model_copy(update={"mode": mode})) for mode in ScheduleMode]
    if study == "dpt_depth":
        return [(f"patch={p}", base.model_copy(update={"dpt": DptConfig(patch=p)})) for p in (2, 4, 8, 16)]
    if study == "dpt_mode":
        return [(mode, base.model_copy(update={"dpt": DptConfig(mode=mode)})) for mode in ("attention", "direct")]
    if study == "reference":
        return [("with", base), ("without", base.model_copy(update={"reference_modeling": False}))]
    raise InvalidArgumentError(f"{study} is not a solver study")


def restore_case(case, solver_cfg: SolverConfig):
    kind, O, _, ref = case
    return run(O, ref, solver_cfg, kind=kind, M0=estimate_initial(O, kind))


def per_kind(suite, values):
    """{kind: mean value} over the suite plus the average of the kind means."""
    by_kind = {kind.value: [] for kind in DegradationKind}
    for (kind, *_), value in zip(suite, values):
        by_kind[kind.value].append(value)
    means = {kind: float(np.mean(v)) for kind, v in by_kind.items()}
    means["average"] = float(np.mean(list(means.values())))
    return means


def solver_study(study: str, suite):
    rows = []
    for variant, solver_cfg in solver_variants(study):
        start_time = time.time()
        results = fan_out(lambda case: restore_case(case, solver_cfg), suite, cfg.threads, desc=f"{study} {variant}")
        scores = per_kind(suite, [psnr(r.B, case[2]) for r, case in zip(results, suite)])
        rows.append(dict(study=study, variant=variant, seconds=time.time() - start_time, **scores))
        logger.info(f"{study} {variant}: average PSNR {scores['average']:.3f} dB")
    return rows


def loss_weight_study(suite, xi: float = 1e-3):
    """Weighted l_total of default runs under each step-weight schedule (nothing is trained)."""
    solver_cfg = SolverConfig()
    results = fan_out(lambda case: restore_case(case, solver_cfg), suite, cfg.threads, desc="loss_weights")
    rows = []
    for schedule in (WeightSchedule.LOG, WeightSchedule.LINEAR, WeightSchedule.EXP):
        start_time = time.time()
        weights = step_weights(schedule, solver_cfg.steps)
        losses = [
            l_total(r.trace_B, case[2], r.trace_hat[:solver_cfg.steps - 1], case[3], weights, xi)
            for r, case in zip(results, suite)
        ]
        rows.append(dict(study="loss_weights", variant=schedule.value, seconds=time.time() - start_time,
                         **per_kind(suite, losses)))
    return rows


def classifier_study(suite):
    start_time = time.time()
    true = [case[0] for case in suite]
    predicted = fan_out(lambda case: classify(case[1]), suite, cfg.threads, desc="classifier")
    accuracy, recall, matrix = classifier_accuracy(true, predicted)
    logger.info(f"classifier accuracy {accuracy:.3f}; confusion (rain, haze, lowlight):\n{matrix}")
    row = dict(study="classifier", variant="heuristic", seconds=time.time() - start_time, **recall)
    row["average"] = accuracy
    return [row]


def render_rows(rows) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({
            key: f"{value:.6f}" if isinstance(value, float) else value
            for key, value in row.items()
        })
    return buffer.getvalue()


def run_study(study: str, suite):
    if study == "loss_weights":
        return loss_weight_study(suite)
    if study == "classifier":
        return classifier_study(suite)
    return solver_study(study, suite)


class AblateAction(BaseAction):
    def __init__(self):
        super().__init__(
            name="ablate",
            description="Run the ablation grid on a synthetic suite and write one CSV per study",
            action=self.action,
        )

    def add_arguments(self, parser):
        parser.add_argument("--out", required=True, help="output directory for <study>.csv files")
        parser.add_argument("--size", type=positive_int, default=64, help="square image side (default 64)")
        parser.add_argument("--count", type=positive_int, default=4, help="images per kind (default 4)")
        parser.add_argument("--seed", type=non_negative_int, default=0)
        parser.add_argument("--studies", nargs="+", choices=STUDIES, default=list(STUDIES))

    def action(self, args):
        timings = {}
        start_time = time.time()
        out = ensure_dir(args.out)
        suite = build_suite(args.count, args.seed, args.size)
        timings["suite"] = time.time() - start_time

        for study in args.studies:
            start_time = time.time()
            text = render_rows(run_study(study, suite))
            atomic_write(Path(out) / f"{study}.csv", lambda fh: fh.write(text), mode="w")
            timings[study] = time.time() - start_time

        logger.info(f"Wrote {len(args.studies)} studies to {out}")
        print_timings(timings)
        return 0
