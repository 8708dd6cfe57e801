"""DD relations for the Koszul bimodules over B_R(H^n) and for the product bimodule."""

import logging

from bordered_khovanov import bordered, roberts
from bordered_khovanov.framework.check_result import CheckReport
from bordered_khovanov.framework.config import RunConfig
from bordered_khovanov.framework.suite_decorator import SuiteBase, suite

logger = logging.getLogger(__name__)


@suite(name="dd", max_n=roberts.MAX_N, description="DD structure relations, n = 1..N")
class DDSuite(SuiteBase):
    def run(self, config: RunConfig) -> CheckReport:
        checks = {}
        for n in range(1, config.n + 1):
            for kind in (roberts.K_B_BDUAL, roberts.K_BDUAL_B):
                checks[f"{kind} n={n}"] = bordered.verify_DD(roberts.dd_delta(kind, n))
            for mode in roberts.MODES:
                K = roberts.dd_delta(roberts.K_PRODUCT, n, mode)
                checks[f"{roberts.K_PRODUCT} {mode} n={n}"] = bordered.verify_DD(K)
            gamma = roberts.product_algebra(n, roberts.GAMMA_QUOTIENT)
            checks[f"descent n={n}"] = roberts.check_differential_descends(gamma)
        return CheckReport.combine("dd", checks)
