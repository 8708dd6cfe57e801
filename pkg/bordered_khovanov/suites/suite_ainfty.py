"""A-infinity morphisms between Roberts Type A structures: identities, composition and the
maps induced by a Gaussian elimination."""

import logging

from bordered_khovanov import bordered, hncomplex, roberts, tangles
from bordered_khovanov.framework.check_result import CheckReport
from bordered_khovanov.framework.config import RunConfig
from bordered_khovanov.framework.suite_decorator import SuiteBase, suite

logger = logging.getLogger(__name__)


@suite(name="ainfty", max_n=2, description="A-infinity relations for n <= 3 inputs")
class AInftySuite(SuiteBase):
    def _elimination_checks(self, label: str, data: tangles.EquivalenceData) -> dict:
        checks = {}
        A = bordered.typeA_roberts(data.complex)
        for index, step in enumerate(data.steps, start=1):
            A1 = bordered.typeA_roberts(step.complex)
            F = bordered.ainfty_from_chainmap(step.f, A, A1)
            G = bordered.ainfty_from_chainmap(step.g, A1, A)
            H = bordered.ainfty_from_homotopy(step.psi, A, A)
            checks[f"{label} step {index}: A(f)"] = bordered.verify_ainfty(F)
            checks[f"{label} step {index}: A(g)"] = bordered.verify_ainfty(G)
            checks[f"{label} step {index}: homotopy"] = bordered.verify_ainfty_homotopy(
                bordered.compose(F, G), bordered.identity_ainfty(A), H
            )
            A = A1
        return checks

    def run(self, config: RunConfig) -> CheckReport:
        checks = {}
        for name, link in tangles.corpus_links().items():
            if link.n > config.n:
                continue
            M = tangles.khovanov_complex(link.left)
            for mode in roberts.MODES:
                A = bordered.typeA_roberts(M, mode)
                identity = bordered.identity_ainfty(A)
                lifted = bordered.ainfty_from_chainmap(hncomplex.identity_map(M), A, A)
                checks[f"{name} {mode}: identity"] = bordered.verify_ainfty(identity)
                checks[f"{name} {mode}: A(id) = id"] = bordered.verify_ainfty_homotopy(
                    lifted, identity, bordered.AInftyHomotopy(A, A)
                )
                checks[f"{name} {mode}: id o id"] = bordered.verify_ainfty(bordered.compose(identity, identity))
        data = tangles.reidemeister_equivalence(tangles.corpus_links()["unknot"].left, "R1+", (0, 1))
        checks.update(self._elimination_checks("unknot R1+", data))
        return CheckReport.combine("ainfty", checks)
