import json

import pytest

from bordered_khovanov.errors import VerificationError
from bordered_khovanov.framework.check_result import CheckReport
from bordered_khovanov.framework.config import ENV_PREFIX, RunConfig, load_configs
from bordered_khovanov.framework.suite_decorator import SuiteBase, suite
from bordered_khovanov.framework.suite_loader import SuiteLoader


def test_run_config_precedence(monkeypatch):
    """Defaults, then run_config.json, then environment, then explicit overrides."""
    monkeypatch.delenv(f"{ENV_PREFIX}N", raising=False)
    monkeypatch.delenv(f"{ENV_PREFIX}SEED", raising=False)
    configs = {"run_config": {"n": 3, "seed": 5, "unknown": 1}, "suites_config": {}}
    config = RunConfig.from_configs(configs)
    assert (config.n, config.seed, config.method) == (3, 5, "direct")

    monkeypatch.setenv(f"{ENV_PREFIX}SEED", "11")
    assert RunConfig.from_configs(configs).seed == 11
    assert RunConfig.from_configs(configs, seed=2, n=None).seed == 2
    assert RunConfig.from_configs(configs, seed=2, n=None).n == 3


def test_env_booleans(monkeypatch):
    monkeypatch.setenv(f"{ENV_PREFIX}ALLOW_LARGE", "yes")
    monkeypatch.setenv(f"{ENV_PREFIX}JSON", "0")
    config = RunConfig.from_configs({})
    assert config.allow_large is True
    assert config.json is False


def test_suite_enabled():
    configs = {"suites_config": {"suites_config": {"suite_dd": {"enabled": False}}}}
    config = RunConfig.from_configs(configs)
    assert not config.suite_enabled("suite_dd")
    assert config.suite_enabled("suite_dsq")


def test_load_configs_tolerates_broken_files(tmp_path):
    (tmp_path / "run_config.json").write_text(json.dumps({"n": 1}))
    (tmp_path / "suites_config.json").write_text("{not json")
    configs = load_configs(str(tmp_path))
    assert configs["run_config"] == {"n": 1}
    assert configs["suites_config"] == {}


def test_sample_configs_load():
    configs = load_configs()
    assert configs["run_config"]["n"] == 2
    assert "suite_dd" in configs["suites_config"]["suites_config"]


def test_loader_finds_every_suite():
    loader = SuiteLoader()
    loader.load_suites()
    suites = loader.get_all_suites()
    assert set(suites) == {"suite_ainfty", "suite_dd", "suite_dsq", "suite_pairing", "suite_reidemeister"}
    assert loader.get_suite("dd") is loader.get_suite("suite_dd")
    assert loader.get_suite("dd").suite_name == "dd"
    assert loader.get_suite("missing") is None


def test_loader_skips_disabled_suites():
    loader = SuiteLoader(config={"suite_pairing": {"enabled": False}})
    loader.load_suites()
    assert "suite_pairing" not in loader.get_all_suites()
    assert "suite_dd" in loader.get_all_suites()


def test_loader_with_missing_directory(tmp_path):
    loader = SuiteLoader(suites_path=str(tmp_path / "nowhere"))
    loader.load_suites()
    assert loader.get_all_suites() == {}


@suite(name="broken", max_n=1, description="always raises")
class BrokenSuite(SuiteBase):
    def run(self, config: RunConfig) -> CheckReport:
        raise ValueError("boom")


@suite(name="trivial")
class TrivialSuite(SuiteBase):
    def run(self, config: RunConfig) -> CheckReport:
        return CheckReport.success_result(data={"n": config.n})


def test_suite_decorator_reports_errors():
    """Exceptions inside run become error reports instead of propagating."""
    instance = BrokenSuite()
    assert instance.get_result()["error"] == "suite has not run"
    report = instance.run(RunConfig())
    assert not report.passed
    assert report.error == "ValueError: boom"
    assert report.metadata["suite"] == "broken"
    assert BrokenSuite.metadata == {"name": "broken", "max_n": 1, "description": "always raises"}


def test_suite_decorator_records_result():
    instance = TrivialSuite()
    report = instance.run(RunConfig(n=1))
    assert report.passed
    assert report.metadata["suite"] == "trivial"
    assert instance.get_result()["data"] == {"n": 1}
    assert TrivialSuite.max_n == 2


def test_check_report_from_witness():
    assert CheckReport.from_witness("d^2", None, data={"k": 1}).passed
    failed = CheckReport.from_witness("d^2", {"generator": "x"})
    assert not failed
    assert failed.error == "d^2 failed"
    assert failed.metadata["check"] == "d^2"
    with pytest.raises(VerificationError) as info:
        failed.raise_for_failure()
    assert info.value.witness == {"generator": "x"}


def test_check_report_combine():
    good = CheckReport.success_result()
    bad = CheckReport.failure_result("mismatch", witness={"at": 3})
    combined = CheckReport.combine("all", {"first": good, "second": bad})
    assert not combined.passed
    assert combined.error == "all: second: mismatch"
    assert combined.witness == {"at": 3}
    assert set(combined.to_dict()["data"]) == {"first", "second"}
    assert CheckReport.combine("all", {"first": good}).passed
    assert CheckReport.combine("none", {}).passed
