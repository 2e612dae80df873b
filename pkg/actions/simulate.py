import json
import logging
import time

from actions.BaseAction import BaseAction
from actions.cli_args import KINDS, image_size, non_negative_int, positive_int
from config.config import Config
from degrade.scenes import generate_clean
from degrade.sidecar import write_matrices
from degrade.simulate import SimParams, simulate
from errors import ImageIOError, InvalidArgumentError
from imaging.io import ensure_dir, list_images, load_image, save_image
from utils import fan_out, print_timings, write_json

logger = logging.getLogger(__name__)

cfg = Config()

SUBDIRS = ("degraded", "clean", "matrices", "params")


def _load_params(path, kind, seed):
    payload = {}
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                payload = json.load(fh)
        except OSError as e:
            raise ImageIOError(path, str(e)) from e
        except json.JSONDecodeError as e:
            raise InvalidArgumentError(f"{path}: not valid JSON ({e})") from e
    payload.update({"kind": kind, "seed": seed})
    return SimParams.from_dict(payload)


def simulate_one(job, out):
    """Degrade one clean image and write its degraded/clean/matrices/params files."""
    name, source, params = job
    B = source() if callable(source) else load_image(source)
    O, M = simulate(B, params)
    save_image(O, out["degraded"] / f"{name}.png")
    save_image(B, out["clean"] / f"{name}.png")
    write_matrices(out["matrices"] / f"{name}.drmtd", M)
    write_json(out["params"] / f"{name}.json", {
        "image": name,
        "source": str(source) if not callable(source) else "generated",
        "height": O.height,
        "width": O.width,
        "params": params.model_dump(mode="json"),
    })
    return name


class SimulateAction(BaseAction):
    def __init__(self):
        super().__init__(
            name="simulate",
            description="Degrade clean images (or generated scenes) with seeded synthetic rain/haze/low light",
            action=self.action,
        )

    def add_arguments(self, parser):
        parser.add_argument("--kind", required=True, choices=KINDS)
        source = parser.add_mutually_exclusive_group(required=True)
        source.add_argument("--in", dest="input", help="directory of clean PNG/PPM images")
        source.add_argument("--generate", type=positive_int, metavar="N", help="generate N synthetic clean scenes")
        parser.add_argument("--size", type=image_size, default=(64, 64), metavar="HxW",
                            help="size of generated scenes (default 64x64)")
        parser.add_argument("--out", required=True, help="output directory")
        parser.add_argument("--seed", type=non_negative_int, default=0, help="base seed; image i uses seed+i")
        parser.add_argument("--params", help="JSON file with rain/haze/lowlight parameter overrides")

    def action(self, args):
        timings = {}
        start_time = time.time()
        out = {sub: ensure_dir(f"{args.out}/{sub}") for sub in SUBDIRS}

        if args.generate:
            height, width = args.size
            sources = [
                (f"img_{i:04d}", lambda i=i: generate_clean(height, width, args.seed + i))
                for i in range(args.generate)
            ]
        else:
            sources = [(path.stem, path) for path in list_images(args.input)]
            if not sources:
                raise InvalidArgumentError(f"no PNG/PPM images in {args.input}")

        base = _load_params(args.params, args.kind, args.seed)
        jobs = [(name, source, base.with_seed(args.seed + i)) for i, (name, source) in enumerate(sources)]
        timings["setup"] = time.time() - start_time

        start_time = time.time()
        names = fan_out(lambda job: simulate_one(job, out), jobs, cfg.threads, desc="simulate")
        timings["simulate"] = time.time() - start_time

        logger.info(f"Wrote {len(names)} {args.kind} triples to {args.out}")
        print_timings(timings)
        return 0
