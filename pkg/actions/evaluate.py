import json
import logging
import time
from pathlib import Path

from actions.BaseAction import BaseAction
from actions.cli_args import KINDS
from config.config import Config
from errors import ImageIOError, InvalidArgumentError, UnmatchedFilesError
from imaging.image import require_same_shape
from imaging.io import list_images, load_image
from metrics.quality import psnr, ssim
from metrics.report import MetricRow, summarize, write_metric_csv
from utils import fan_out, print_timings

logger = logging.getLogger(__name__)

cfg = Config()

UNKNOWN_KIND = "unknown"


def match_files(pred_dir, gt_dir):
    """Pair prediction and ground-truth images by stem; any unpaired name is an error."""
    pred = {p.stem: p for p in list_images(pred_dir)}
    gt = {p.stem: p for p in list_images(gt_dir)}
    unmatched = sorted(set(pred) ^ set(gt))
    if unmatched:
        raise UnmatchedFilesError(unmatched)
    if not pred:
        raise InvalidArgumentError(f"no PNG/PPM images in {pred_dir}")
    return [(name, pred[name], gt[name]) for name in sorted(pred)]


def kind_of(name, params_dir, kind):
    if params_dir is None:
        return kind or UNKNOWN_KIND
    path = Path(params_dir) / f"{name}.json"
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)["params"]["kind"]
    except OSError as e:
        raise ImageIOError(path, str(e)) from e
    except (json.JSONDecodeError, KeyError, TypeError) as e:
        raise InvalidArgumentError(f"{path}: not a simulate params file ({e})") from e


def score_pair(name, pred_path, gt_path, kind) -> MetricRow:
    pred, gt = load_image(pred_path), load_image(gt_path)
    require_same_shape(f"evaluate {name}", pred.data, gt.data)
    return MetricRow(image=name, kind=kind, psnr=[psnr(pred, gt)], ssim=[ssim(pred, gt)], steps=["final"])


class EvaluateAction(BaseAction):
    def __init__(self):
        super().__init__(
            name="evaluate",
            description="Score restored images against ground truth (PSNR/SSIM) and write a metrics CSV",
            action=self.action,
        )

    def add_arguments(self, parser):
        parser.add_argument("--pred", required=True, help="directory of restored images")
        parser.add_argument("--gt", required=True, help="directory of ground-truth images (same filenames)")
        parser.add_argument("--out", required=True, help="metrics CSV path")
        labels = parser.add_mutually_exclusive_group()
        labels.add_argument("--params", help="simulate params/ directory; labels each image with its kind")
        labels.add_argument("--kind", choices=KINDS, help="label every image with this kind")

    def action(self, args):
        timings = {}
        start_time = time.time()
        pairs = match_files(args.pred, args.gt)
        jobs = [(name, pred, gt, kind_of(name, args.params, args.kind)) for name, pred, gt in pairs]
        timings["match"] = time.time() - start_time

        start_time = time.time()
        rows = fan_out(lambda job: score_pair(*job), jobs, cfg.threads, desc="evaluate")
        timings["score"] = time.time() - start_time

        write_metric_csv(rows, args.out)
        for kind, (mean_psnr, mean_ssim, count) in summarize(rows).items():
            logger.info(f"{kind}: PSNR {mean_psnr:.3f} dB, SSIM {mean_ssim:.4f} over {count} images")
        logger.info(f"Wrote {args.out}")
        print_timings(timings)
        return 0
