import logging

from actions.BaseAction import BaseAction
from actions.cli_args import non_negative_int, positive_int
from oracle.suite import FAULTS, run_suite

logger = logging.getLogger(__name__)


class VerifyAction(BaseAction):
    def __init__(self):
        super().__init__(
            name="verify",
            description="Check every closed-form update against the numerical oracle; exit 0 iff all pass",
            action=self.action,
        )

    def add_arguments(self, parser):
        parser.add_argument("--instances", type=positive_int, default=1000,
                            help="random scalar instances per update (default 1000)")
        parser.add_argument("--seed", type=non_negative_int, default=0)
        parser.add_argument("--fault", choices=FAULTS, help="inject a known defect (the suite must then fail)")

    def action(self, args):
        report = run_suite(instances=args.instances, seed=args.seed, fault=args.fault)
        print(report.table())
        if report.passed:
            logger.info("All oracle checks passed")
            return 0
        failed = [c.name for c in report.checks if not c.passed]
        logger.error(f"Oracle checks failed: {', '.join(failed)}")
        return 1
