"""Every pairing pipeline against the direct cube complex of each corpus link."""

import logging

from bordered_khovanov import bordered, tangles
from bordered_khovanov.framework.check_result import CheckReport
from bordered_khovanov.framework.config import RunConfig
from bordered_khovanov.framework.suite_decorator import SuiteBase, suite

logger = logging.getLogger(__name__)


@suite(name="pairing", max_n=2, description="pairing theorem for every method")
class PairingSuite(SuiteBase):
    def run(self, config: RunConfig) -> CheckReport:
        checks = {}
        tables = {}
        for name, link in tangles.corpus_links().items():
            if link.n > config.n:
                logger.warning(f"Skipping {name}: n = {link.n} above {config.n}")
                continue
            reference = tangles.kh(link)
            for method in bordered.METHODS:
                checks[f"{name} {method}"] = bordered.check_pairing(link, method)
                homology = bordered.pairing_complex(link, method).homology()
                checks[f"{name} {method} homology"] = CheckReport.from_witness(
                    "homology agrees", None if homology == reference else {"link": name, "method": method}
                )
            tables[name] = reference.to_json()
        report = CheckReport.combine("pairing", checks)
        report.metadata["homology"] = tables
        return report
