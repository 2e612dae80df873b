import logging
import time
from pathlib import Path

import numpy as np

from actions.BaseAction import BaseAction
from actions.cli_args import KINDS, non_negative_int, positive_int
from config.config import Config
from config.settings import RunConfig, load_run_config
from degrade.model import DegradationMatrices, invert_model
from degrade.sidecar import write_matrices
from degrade.simulate import DegradationKind
from errors import InvalidArgumentError
from estimate.classify import classify
from estimate.initial import estimate_initial
from imaging.image import resize_bilinear
from imaging.io import ensure_dir, list_images, load_image, save_image
from metrics.quality import psnr, ssim
from metrics.report import MetricRow, write_metric_csv
from solver.engine import run
from utils import atomic_write, fan_out, print_timings, write_json

logger = logging.getLogger(__name__)

cfg = Config()

MANIFEST_NAME = "run-manifest.json"


def cli_overrides(args) -> dict:
    """Dotted RunConfig keys set explicitly on the command line (None = not given)."""
    return {
        "input": args.input,
        "output": args.out,
        "ref_degraded": args.ref_degraded,
        "ref_clean": args.ref_clean,
        "ref_pool": args.ref_pool,
        "ref_seed": args.ref_seed,
        "ref_trials": args.ref_trials,
        "gt": args.gt,
        "kind": args.kind,
        "seed": args.seed,
        "dump_intermediate": args.dump_intermediate,
        "dump_attention": args.dump_attention,
        "metrics_csv": args.metrics_csv,
        "solver.steps": args.steps,
        "solver.mode": args.schedule,
        "solver.modeling_form": args.modeling_form,
        "solver.init_image": args.init,
        "solver.reference_modeling": args.reference_modeling,
        "solver.pq_update": args.pq_update,
        "solver.dpt.patch": args.dpt_patch,
        "solver.dpt.tau": args.dpt_tau,
        "solver.dpt.rho": args.dpt_rho,
        "solver.dpt.mode": args.dpt_mode,
    }


def resolve_config(args) -> RunConfig:
    base = load_run_config(args.config) if args.config else RunConfig()
    run_cfg = base.merged(cli_overrides(args))
    if not run_cfg.input:
        raise InvalidArgumentError("restore needs --in (or 'input' in --config)")
    if not run_cfg.output:
        raise InvalidArgumentError("restore needs --out (or 'output' in --config)")
    has_pair = bool(run_cfg.ref_degraded and run_cfg.ref_clean)
    if not has_pair and not run_cfg.ref_pool:
        raise InvalidArgumentError("restore needs --ref-degraded and --ref-clean, or --ref-pool")
    if run_cfg.ref_trials > 1 and not run_cfg.ref_pool:
        raise InvalidArgumentError("--ref-trials needs --ref-pool to draw references from")
    return run_cfg


def pool_pairs(pool):
    """Names present in both <pool>/degraded and <pool>/clean, sorted."""
    pool = Path(pool)
    degraded = {p.name: p for p in list_images(pool / "degraded")}
    clean = {p.name: p for p in list_images(pool / "clean")}
    names = sorted(set(degraded) & set(clean))
    if not names:
        raise InvalidArgumentError(f"reference pool {pool} has no degraded/clean pairs")
    return [(degraded[n], clean[n]) for n in names]


def choose_reference(run_cfg: RunConfig, trial: int):
    if run_cfg.ref_pool and not (trial == 0 and run_cfg.ref_degraded and run_cfg.ref_clean):
        pairs = pool_pairs(run_cfg.ref_pool)
        rng = np.random.default_rng(run_cfg.ref_seed + trial)
        return pairs[int(rng.integers(len(pairs)))]
    return Path(run_cfg.ref_degraded), Path(run_cfg.ref_clean)


def load_reference(paths, shape):
    O_ref, B_ref = (load_image(p).data for p in paths)
    if O_ref.shape != B_ref.shape:
        raise InvalidArgumentError(f"reference pair shapes differ: {O_ref.shape} vs {B_ref.shape}")
    if O_ref.shape != shape:
        logger.warning(f"Resizing reference pair {O_ref.shape[:2]} -> {shape[:2]} (bilinear)")
        O_ref = np.clip(resize_bilinear(O_ref, shape), 0.0, 1.0)
        B_ref = np.clip(resize_bilinear(B_ref, shape), 0.0, 1.0)
    return O_ref, B_ref


def resolve_kind(run_cfg: RunConfig, O):
    predicted = classify(O, run_cfg.estimate)
    if run_cfg.kind == "auto":
        logger.info(f"Classified input as {predicted.value}")
        return predicted, predicted
    kind = DegradationKind(run_cfg.kind)
    if kind is not predicted:
        logger.warning(f"Using --kind {kind.value}; the classifier predicts {predicted.value}")
    return kind, predicted


def dump_intermediate(result, directory):
    directory = ensure_dir(directory)
    for k, (B_k, (T_k, D_k)) in enumerate(zip(result.trace_B, result.trace_TD), start=1):
        save_image(B_k, directory / f"step_{k}_B.png")
        save_image(T_k, directory / f"step_{k}_T.png")
        save_image((D_k + 1.0) / 2.0, directory / f"step_{k}_D.png")
        write_matrices(directory / f"step_{k}_TD.drmtd", DegradationMatrices(T_k, D_k))


def dump_attention(result, directory):
    directory = ensure_dir(directory)
    for k, weights in enumerate(result.attention, start=1):
        atomic_write(directory / f"attention_step_{k}.csv",
                     lambda fh, w=weights: np.savetxt(fh, w, delimiter=",", fmt="%.10e"), mode="w")


def step_metrics(result, cursory, gt, name, kind, config_hash) -> MetricRow:
    """PSNR/SSIM of the cursory image (row "init") and of every B_k."""
    images = [cursory] + result.trace_B
    row = MetricRow(
        image=name,
        kind=kind.value,
        psnr=[psnr(b, gt) for b in images],
        ssim=[ssim(b, gt) for b in images],
        steps=["init"] + [str(k) for k in range(1, len(result.trace_B) + 1)],
        config_hash=config_hash,
    )
    for step, p, s in zip(row.steps, row.psnr, row.ssim):
        logger.info(f"step {step}: PSNR {p:.3f} dB, SSIM {s:.4f}")
    return row


class RestoreAction(BaseAction):
    def __init__(self):
        super().__init__(
            name="restore",
            description="Restore a degraded image with the unfolded solver, guided by a reference pair",
            action=self.action,
        )

    def add_arguments(self, parser):
        io = parser.add_argument_group("inputs and outputs")
        io.add_argument("--in", dest="input", help="degraded input image")
        io.add_argument("--out", help="restored output image (.png or .ppm)")
        io.add_argument("--ref-degraded", help="degraded reference image")
        io.add_argument("--ref-clean", help="clean reference image")
        io.add_argument("--ref-pool", help="directory with degraded/ and clean/ reference pairs")
        io.add_argument("--ref-seed", type=non_negative_int, help="seed for drawing from --ref-pool (default 0)")
        io.add_argument("--ref-trials", type=positive_int, help="restore once per drawn reference and report mean/std")
        io.add_argument("--gt", help="clean ground truth; enables per-step PSNR/SSIM")
        io.add_argument("--config", help="RunConfig JSON (e.g. a previous run-manifest.json)")
        io.add_argument("--seed", type=non_negative_int, help="run seed recorded in the manifest (default 0)")
        io.add_argument("--dump-intermediate", metavar="DIR", help="write per-step B, T, D images and sidecars")
        io.add_argument("--dump-attention", metavar="DIR", help="write per-step attention matrices as CSV")
        io.add_argument("--metrics-csv", metavar="PATH", help="write per-step metrics (needs --gt)")

        solver = parser.add_argument_group("solver")
        solver.add_argument("--kind", choices=["auto"] + KINDS, help="degradation kind (default auto)")
        solver.add_argument("--steps", type=positive_int, help="unfolding steps (default 6)")
        solver.add_argument("--schedule", choices=["parallel", "serial"], help="default parallel")
        solver.add_argument("--modeling-form", choices=["tbd", "hb"], help="O=TB+D (default) or O=HB")
        solver.add_argument("--init", choices=["degraded", "cursory"], help="B0 = O (default) or (O-D)/(T+eps)")
        solver.add_argument("--no-ref-modeling", dest="reference_modeling", action="store_const", const=False,
                            help="keep the initial matrices; skip reference modeling")
        solver.add_argument("--pq-update", choices=["gauss_seidel", "jacobi"], help="default gauss_seidel")
        solver.add_argument("--dpt-patch", type=positive_int, help="transmitter patch size (default 16)")
        solver.add_argument("--dpt-tau", type=float, help="attention temperature (default 0.1)")
        solver.add_argument("--dpt-rho", type=float, help="blend weight in [0, 1] (default 0.5)")
        solver.add_argument("--dpt-mode", choices=["attention", "direct"], help="default attention")

    def restore_once(self, run_cfg: RunConfig, O, kind, M0, trial: int, predicted):
        ref_paths = choose_reference(run_cfg, trial)
        ref = load_reference(ref_paths, O.shape)
        metadata = {
            "predicted_kind": predicted.value,
            "reference": {"degraded": str(ref_paths[0]), "clean": str(ref_paths[1])},
            "trial": trial,
        }
        return run(O.data, ref, run_cfg.solver, kind=kind, M0=M0, metadata=metadata)

    def action(self, args):
        timings = {}
        start_time = time.time()
        run_cfg = resolve_config(args)
        config_hash = run_cfg.solver.digest()
        O = load_image(run_cfg.input)
        kind, predicted = resolve_kind(run_cfg, O)
        M0 = estimate_initial(O, kind, run_cfg.estimate)
        gt = load_image(run_cfg.gt) if run_cfg.gt else None
        timings["setup"] = time.time() - start_time

        start_time = time.time()
        results = fan_out(
            lambda trial: self.restore_once(run_cfg, O, kind, M0, trial, predicted),
            range(run_cfg.ref_trials),
            cfg.threads,
            desc="trials" if run_cfg.ref_trials > 1 else None,
        )
        result = results[0]
        timings["solve"] = time.time() - start_time

        start_time = time.time()
        output = Path(run_cfg.output)
        ensure_dir(output.parent if str(output.parent) else ".")
        save_image(result.B, output)
        write_json(output.parent / MANIFEST_NAME, run_cfg.to_dict())

        meta = dict(result.metadata)
        meta["energies"] = result.energies
        meta["gammas"] = result.gammas
        if gt is not None:
            cursory = invert_model(O, M0, run_cfg.solver.eps)
            row = step_metrics(result, cursory, gt, Path(run_cfg.input).stem, kind, config_hash)
            meta["psnr"] = dict(zip(row.steps, row.psnr))
            meta["ssim"] = dict(zip(row.steps, row.ssim))
            if run_cfg.metrics_csv:
                write_metric_csv([row], run_cfg.metrics_csv, config_hash)
            if len(results) > 1:
                finals = [psnr(r.B, gt) for r in results]
                meta["trials_psnr"] = finals
                logger.info(f"{len(finals)} reference trials: PSNR {np.mean(finals):.3f} ± {np.std(finals):.3f} dB")
        elif run_cfg.metrics_csv:
            logger.warning("--metrics-csv ignored without --gt")
        write_json(output.with_name(output.stem + ".meta.json"), meta)

        if run_cfg.dump_intermediate:
            dump_intermediate(result, run_cfg.dump_intermediate)
        if run_cfg.dump_attention:
            dump_attention(result, run_cfg.dump_attention)
        timings["write"] = time.time() - start_time

        logger.info(f"Restored {run_cfg.input} ({kind.value}, {result.steps} steps) -> {output}")
        print_timings(timings)
        return 0
