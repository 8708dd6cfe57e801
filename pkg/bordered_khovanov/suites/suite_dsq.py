"""d^2 = 0 for tangle complexes, their Type D structures and the box pairings, on the corpus
and on randomly Reidemeister-moved variants of it."""

import logging
import random

from bordered_khovanov import bordered, hncomplex, tangles
from bordered_khovanov.errors import InputError
from bordered_khovanov.framework.check_result import CheckReport
from bordered_khovanov.framework.config import RunConfig
from bordered_khovanov.framework.suite_decorator import SuiteBase, suite

logger = logging.getLogger(__name__)

RANDOM_TRIALS = 12
RANDOM_MOVES = ("R1+", "R1-", "R2")


@suite(name="dsq", max_n=3, description="d^2 = 0 batteries")
class DSquaredSuite(SuiteBase):
    def _word_checks(self, label: str, word: tangles.TangleWord) -> dict:
        M = tangles.khovanov_complex(word)
        checks = {
            f"{label}: C_module": hncomplex.check_C_module(M),
            f"{label}: d^2": hncomplex.check_d_squared(M),
        }
        if M.side == hncomplex.LEFT:
            checks[f"{label}: type D"] = bordered.verify_typeD(bordered.typeD_from_complex(M))
            checks[f"{label}: H^n (x) D"] = bordered.check_typeD_recovers(M)
        return checks

    def run(self, config: RunConfig) -> CheckReport:
        links = {name: link for name, link in tangles.corpus_links().items() if link.n <= config.n}
        checks = {}
        for name, link in links.items():
            for side, word in (("left", link.left), ("right", link.right)):
                checks.update(self._word_checks(f"{name} {side}", word))
            for method in (bordered.TENSOR_HN, bordered.BOX_HN):
                witness = bordered.pairing_complex(link, method).d_squared_witness()
                checks[f"{name} {method}: d^2"] = CheckReport.from_witness(f"{method} d^2", witness)

        rng = random.Random(config.seed)
        names = sorted(links)
        trials = 0
        attempts = 0
        while names and trials < RANDOM_TRIALS and attempts < 10 * RANDOM_TRIALS:
            attempts += 1
            link = links[rng.choice(names)]
            word = rng.choice((link.left, link.right))
            move = rng.choice(RANDOM_MOVES)
            site = (rng.randint(0, len(word.events)), rng.randint(1, word.points))
            try:
                moved = tangles.reidemeister(word, move, site)
            except InputError as e:
                logger.debug(f"Skipping {move} at {site}: {e}")
                continue
            trials += 1
            checks.update(self._word_checks(f"random {trials} ({move} at {site})", moved))
        report = CheckReport.combine("dsq", checks)
        report.metadata.update({"seed": config.seed, "random_trials": trials})
        return report
