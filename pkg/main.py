from config.config import Config
from config.env import initialize_env
initialize_env()
cfg = Config()
import argparse
import logging
import sys

from config.actions_config import actions
from errors import DrmError

logger = logging.getLogger()


def build_parser():
    parser = argparse.ArgumentParser(
        prog="drm",
        description="Reference-guided all-in-one image restoration (rain, haze, low light)",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("--debug", action="store_true", help="debug logging (also DRM_DEBUG=1)")
    parser.add_argument("--threads", type=int, help="worker threads for batch commands (also DRM_THREADS)")
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="command")
    for action in actions:
        sub = subparsers.add_parser(
            action.name,
            help=action.description,
            description=action.description,
            formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        )
        action.add_arguments(sub)
        sub.set_defaults(handler=action)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.debug:
        cfg.debug = True
    if args.threads is not None:
        cfg.set_threads(args.threads)
    cfg.setup()
    logger.debug(f"Running {args.handler} with {vars(args)}")

    try:
        return args.handler(args)
    except DrmError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except Exception as e:
        logger.exception(f"Unexpected error: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
