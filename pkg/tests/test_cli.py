import json
import subprocess
import sys
from pathlib import Path

from bordered_khovanov.cli import EXIT_INPUT, EXIT_OK, main

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "bordered_khovanov" / "corpus"


def _json_run(capsys, argv):
    code = main(argv + ["--json"])
    return code, json.loads(capsys.readouterr().out)


def test_module_entry_point():
    """
    Run the package as a module and check the matchings report.
    """
    process = subprocess.run(
        [sys.executable, "-m", "bordered_khovanov", "matchings", "--n", "3", "--json"],
        cwd=ROOT,
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert process.returncode == EXIT_OK, process.stderr
    report = json.loads(process.stdout)
    assert report["passed"] is True
    assert report["data"]["partitions"] == 5
    assert report["data"]["hasse_edges"] == 6


def test_matchings_text_output(capsys):
    assert main(["matchings", "--n", "2"]) == EXIT_OK
    assert capsys.readouterr().out.splitlines()[0] == "PASS"


def test_matchings_size_caps(capsys):
    assert main(["matchings", "--n", "6"]) == EXIT_INPUT
    assert "--allow-large" in capsys.readouterr().err
    assert main(["matchings", "--n", "9", "--allow-large"]) == EXIT_INPUT
    assert main(["matchings", "--n", "0"]) == EXIT_INPUT


def test_algebra_presentation(capsys):
    code, report = _json_run(capsys, ["algebra", "--n", "1", "--verify-presentation"])
    assert code == EXIT_OK
    assert report["passed"]
    assert report["data"]["summary"]["algebra"]["rank"] == 2


def test_algebra_roberts_cap(capsys):
    assert main(["algebra", "--n", "3", "--roberts"]) == EXIT_INPUT


def test_kh_unknot(capsys):
    code, report = _json_run(capsys, ["kh", str(CORPUS / "unknot.link")])
    assert code == EXIT_OK
    assert report["passed"]
    entries = report["data"]["homology"]["direct"]
    assert sum(entry["free"] for entry in entries) == 2


def test_kh_all_methods_agree_on_hopf(capsys):
    code, report = _json_run(capsys, ["kh", str(CORPUS / "hopf.link"), "--all-methods"])
    assert code == EXIT_OK
    assert set(report["data"]["homology"]) == {"direct", "tensor-hn", "box-hn", "box-product", "box-gamma"}


def test_kh_input_errors(tmp_path, capsys):
    assert main(["kh", str(tmp_path / "missing.link")]) == EXIT_INPUT
    broken = tmp_path / "broken.link"
    broken.write_text("this is not a tangle\n")
    assert main(["kh", str(broken)]) == EXIT_INPUT
    assert "Error:" in capsys.readouterr().err


def test_verify_unknown_suite(capsys):
    assert main(["verify", "--suite", "nonexistent"]) == EXIT_INPUT


def test_verify_single_suite(capsys):
    code, report = _json_run(capsys, ["verify", "--suite", "dd", "--n", "1"])
    assert code == EXIT_OK, report["error"]
    assert "dd" in report["data"]
