"""Command line: python -m bordered_khovanov {matchings, algebra, kh, verify}.

Exit codes: 0 when every check passes, 1 on a failed check, 2 on input errors.
"""

import argparse
import json
import logging
import sys
from typing import Any, Dict, List, Optional, Sequence

from . import arcalg, bordered, linquad, planar, roberts, tangles
from .errors import BorderedKhovanovError, InputError, SizeError
from .framework.check_result import CheckReport
from .framework.config import RunConfig, load_configs
from .framework.suite_loader import SuiteLoader

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2

MATCHINGS_CAP = 5
ROBERTS_CAP = 2


def _check_cap(n: int, cap: int, hard_cap: int, config: RunConfig) -> None:
    if n < 1:
        raise SizeError(f"n must be positive, got {n}")
    limit = hard_cap if config.allow_large else cap
    if n > limit:
        hint = "" if config.allow_large or n > hard_cap else " (pass --allow-large)"
        raise SizeError(f"n = {n} exceeds the limit {limit}{hint}")


def cmd_matchings(config: RunConfig) -> CheckReport:
    """B^n, NC_n with its Hasse diagram, and connectivity of every geodesic graph."""
    n = config.n
    _check_cap(n, MATCHINGS_CAP, planar.MAX_N, config)
    matchings = planar.enumerate_matchings(n)
    diagram = planar.hasse_diagram(n)
    disconnected = [
        (str(p), str(q))
        for p in diagram.vertices
        for q in diagram.vertices
        if not planar.geodesic_graph_connected(p, q)
    ]
    data = {
        "n": n,
        "matchings": [str(m) for m in matchings],
        "partitions": len(diagram.vertices),
        "hasse_edges": len(diagram.edges),
        "connectivity": "all pairs connected" if not disconnected else f"{len(disconnected)} pairs disconnected",
    }
    if disconnected:
        return CheckReport.failure_result("geodesic graph not connected", witness={"pairs": disconnected[:5]})
    return CheckReport.success_result(data=data, metadata={"check": "matchings"})


def cmd_algebra(config: RunConfig, options: argparse.Namespace) -> CheckReport:
    n = config.n
    checks: Dict[str, CheckReport] = {}
    data: Dict[str, Any] = {"n": n}
    needs_roberts = options.dual or options.roberts or options.dd_check
    if needs_roberts:
        _check_cap(n, ROBERTS_CAP, roberts.MAX_N, config)
    else:
        _check_cap(n, MATCHINGS_CAP, planar.MAX_N, config)

    algebra = arcalg.hn_presentation(n)
    data["algebra"] = {"name": algebra.name, "generators": len(algebra.generators), "rank": arcalg.algebra_rank(n)}
    if options.verify_presentation:
        checks["presentation"] = linquad.verify_presentation(algebra, arcalg.hn_oracle(n))
    if options.dual:
        dual = roberts.dual_BR(n)
        formal = linquad.formal_dual_presentation(algebra)
        data["dual"] = {"name": dual.name, "generators": len(dual.generators), "relations": len(dual.relations)}
        data["formal_dual"] = {"name": formal.name, "generators": len(formal.generators)}
        checks["dual mu1^2"] = dual.check_d_squared()
    if options.roberts:
        checks["B_R presentation"] = roberts.verify_BR(n)
        for mode in roberts.MODES:
            product = roberts.product_algebra(n, mode)
            checks[f"{product.name} mu1"] = roberts.check_differential_descends(product)
        data["graph_G"] = roberts.monomial_graph_G(n).shape_counts()
        data["degrees"] = {str(k): sorted(v) for k, v in roberts.degree_audit(n).items()}
    if options.dd_check:
        for kind in roberts.DD_KINDS:
            modes = roberts.MODES if kind == roberts.K_PRODUCT else (roberts.FULL,)
            for mode in modes:
                checks[f"{kind} {mode}"] = bordered.verify_DD(roberts.dd_delta(kind, n, mode))
    if not checks:
        return CheckReport.success_result(data=data, metadata={"check": "algebra"})
    report = CheckReport.combine("algebra", checks)
    if report.passed:
        report.data = {"summary": data, "checks": report.data}
    return report


def cmd_kh(config: RunConfig, all_methods: bool) -> CheckReport:
    if len(config.paths) != 1:
        raise InputError("kh takes exactly one link file")
    link = tangles.load_link(config.paths[0])
    methods: Sequence[str] = bordered.METHODS if all_methods else (config.method,)
    for method in methods:
        if method not in bordered.METHODS:
            raise InputError(f"unknown method {method!r}, expected one of {bordered.METHODS}")
    if link.n > ROBERTS_CAP and not config.allow_large and any(
        m in (bordered.BOX_PRODUCT, bordered.BOX_GAMMA) for m in methods
    ):
        raise SizeError(f"n = {link.n} needs --allow-large for the Roberts pipelines")

    tables = {}
    for method in methods:
        homology = bordered.pairing_complex(link, method).homology()
        tables[method] = homology
        logger.info(f"{method}: total rank {homology.total_rank()}")
    first = tables[methods[0]]
    data = {
        "link": config.paths[0],
        "homology": {method: table.to_json() for method, table in tables.items()},
        "euler_characteristic": {str(q): v for q, v in first.euler_characteristic().items()},
        "lines": first.lines(),
    }
    disagreeing = [method for method, table in tables.items() if table != first]
    if disagreeing:
        return CheckReport.failure_result("methods disagree", witness={"methods": disagreeing}, metadata={"data": data})
    return CheckReport.success_result(data=data, metadata={"check": "kh", "methods": list(methods)})


def cmd_verify(config: RunConfig) -> CheckReport:
    loader = SuiteLoader(config=config.suites_config)
    loader.load_suites()
    if config.suite:
        suite_class = loader.get_suite(config.suite)
        if suite_class is None:
            raise InputError(f"unknown or disabled suite {config.suite!r}")
        selected = {config.suite: suite_class}
    else:
        selected = loader.get_all_suites()
    checks = {}
    for name, suite_class in selected.items():
        _check_cap(config.n, min(suite_class.max_n, ROBERTS_CAP), suite_class.max_n, config)
        checks[name] = suite_class().run(config)
    return CheckReport.combine("verify", checks)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=None, help="Number of boundary point pairs")
    common.add_argument("--json", action="store_true", default=None, help="Print the report as JSON")
    common.add_argument("--allow-large", action="store_true", default=None, help="Lift the default size caps")
    common.add_argument("--config", default=None, help="Directory holding run_config.json / suites_config.json")
    common.add_argument("--verbose", "-v", action="store_true", help="Enable DEBUG-level logging to stderr")

    parser = argparse.ArgumentParser(prog="bordered_khovanov", description="Bordered Khovanov homology toolkit")
    commands = parser.add_subparsers(dest="command", required=True)

    commands.add_parser("matchings", parents=[common], help="Crossingless matchings and NC_n")

    algebra = commands.add_parser("algebra", parents=[common], help="Build and verify the algebras")
    algebra.add_argument("--verify-presentation", action="store_true")
    algebra.add_argument("--dual", action="store_true")
    algebra.add_argument("--roberts", action="store_true")
    algebra.add_argument("--dd-check", action="store_true")

    kh = commands.add_parser("kh", parents=[common], help="Khovanov homology of a link file")
    kh.add_argument("paths", nargs=1, metavar="LINK")
    kh.add_argument("--method", choices=bordered.METHODS, default=None)
    kh.add_argument("--all-methods", action="store_true")

    verify = commands.add_parser("verify", parents=[common], help="Run the verification suites")
    verify.add_argument("--suite", default=None, help="dsq, pairing, reidemeister, ainfty or dd")
    verify.add_argument("--seed", type=int, default=None)
    return parser


def _print_report(report: CheckReport, as_json: bool) -> None:
    if as_json:
        print(json.dumps(report.to_dict(), indent=2, default=str))
        return
    print("PASS" if report.passed else f"FAIL: {report.error}")
    data = report.data if isinstance(report.data, dict) else {}
    for line in data.get("lines", []):
        print(line)
    if report.witness:
        print(json.dumps(report.witness, default=str))


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        configs = load_configs(args.config)
        config = RunConfig.from_configs(
            configs,
            command=args.command,
            n=args.n,
            json=args.json,
            allow_large=args.allow_large,
            paths=getattr(args, "paths", None),
            method=getattr(args, "method", None),
            suite=getattr(args, "suite", None),
            seed=getattr(args, "seed", None),
        )
        if args.command == "matchings":
            report = cmd_matchings(config)
        elif args.command == "algebra":
            report = cmd_algebra(config, args)
        elif args.command == "kh":
            report = cmd_kh(config, args.all_methods)
        else:
            report = cmd_verify(config)
    except (InputError, OSError) as e:
        logger.error(f"Input error: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except BorderedKhovanovError as e:
        logger.error(f"{type(e).__name__}: {e}")
        _print_report(CheckReport.failure_result(str(e), witness=getattr(e, "witness", None)), args.json)
        return EXIT_FAILED

    _print_report(report, config.json)
    return EXIT_OK if report.passed else EXIT_FAILED
