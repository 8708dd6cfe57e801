"""Reidemeister moves on the corpus: elimination back to the original complex, homology of
the box pairing, and the equivalence carried through the product DD bimodule."""

import logging

from bordered_khovanov import bordered, roberts, tangles
from bordered_khovanov.framework.check_result import CheckReport
from bordered_khovanov.framework.config import RunConfig
from bordered_khovanov.framework.suite_decorator import SuiteBase, suite

logger = logging.getLogger(__name__)

# (link, side, move, site)
CASES = [
    ("unknot", "left", "R1+", (0, 1)),
    ("unknot", "right", "R1-", (0, 2)),
    ("unknot", "left", "R2", (0, 1)),
    ("hopf", "left", "R1+", (1, 1)),
    ("hopf", "right", "R2", (0, 1)),
    ("braid", "left", "R3", (0, 1)),
]


@suite(name="reidemeister", max_n=2, description="Reidemeister invariance and transport")
class ReidemeisterSuite(SuiteBase):
    def run(self, config: RunConfig) -> CheckReport:
        links = tangles.corpus_links()
        checks = {}
        for name, side, move, site in CASES:
            link = links.get(name)
            if link is None or link.n > config.n:
                continue
            label = f"{name} {side} {move} at {site}"
            word = link.left if side == "left" else link.right
            data = tangles.reidemeister_equivalence(word, move, site)
            checks[f"{label}: elimination"] = data.report

            moved = tangles.Link(data.moved, link.right) if side == "left" else tangles.Link(link.left, data.moved)
            same = bordered.pairing_complex(moved, bordered.BOX_PRODUCT).homology() == tangles.kh(link)
            checks[f"{label}: box homology"] = CheckReport.from_witness(
                "box pairing homology unchanged", None if same else {"move": label}
            )
            for mode in roberts.MODES:
                checks[f"{label}: transport {mode}"] = bordered.transport_equivalence(data, mode)
        return CheckReport.combine("reidemeister", checks)
