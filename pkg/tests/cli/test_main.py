import json
from pathlib import Path

import pytest
from pytest_mock import MockerFixture

from app.core.errors import NonConvergent
from app.main import EXIT_CHECK_FAILED, EXIT_INVALID_INPUT, EXIT_NON_CONVERGENT, EXIT_OK, run
from app.models.schemas.responses.report import CheckReport, VerifyReport
from app.models.types.check_id import CheckId

RANK_ONE = ["--N", "1", "--q-re", "0.4", "--q-im", "0.0", "--r", "3.7", "--c", "1.0"]


def test_schema_lists_every_check(capsys: pytest.CaptureFixture[str]):
    assert run(["schema"]) == EXIT_OK
    info = json.loads(capsys.readouterr().out)

    assert info["schema"] == "ebq-report/1"
    assert info["check_ids"] == [c.value for c in CheckId]
    assert "reports" in info["report"]["properties"]


def test_eval_rmatrix_at_zero_is_flip(tmp_path: Path):
    out = tmp_path / "r.json"
    assert run(["eval-rmatrix", *RANK_ONE, "--u", "0", "--s", "0.3+0.1j", "--out", str(out)]) == EXIT_OK
    value = json.loads(out.read_text())

    assert value["N"] == 1
    assert value["prefactor_mode"] == "none"
    for entry in value["entries"]:
        flip = entry["col"] == list(reversed(entry["row"]))
        assert abs(complex(entry["re"], entry["im"]) - (1 if flip else 0)) < 1e-9


def test_eval_rmatrix_is_reproducible(tmp_path: Path):
    args = ["eval-rmatrix", *RANK_ONE, "--u", "0.3+0.05j"]
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    assert run([*args, "--out", str(first)]) == EXIT_OK
    assert run([*args, "--out", str(second)]) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()


def test_invalid_nome_is_rejected():
    assert run(["eval-rmatrix", "--N", "1", "--q-re", "1.5", "--q-im", "0.0"]) == EXIT_INVALID_INPUT


def test_wrong_height_length_is_rejected():
    assert run(["eval-rmatrix", *RANK_ONE, "--s", "0.3", "0.4"]) == EXIT_INVALID_INPUT


def test_degenerate_height_is_rejected():
    args = ["verify", "--suite", "dybe", "--N", "2", "--s", "0.5", "0.5", "--samples", "1"]
    assert run(args) == EXIT_INVALID_INPUT


def test_unknown_suite_exits_with_usage_error():
    with pytest.raises(SystemExit) as exc:
        run(["verify", "--suite", "nonsense"])
    assert exc.value.code == 2


def test_verify_special_suite(tmp_path: Path):
    out = tmp_path / "report.json"
    args = ["verify", "--suite", "special", "--seed", "5", "--samples", "2", "--out", str(out)]
    assert run(args) == EXIT_OK
    first = out.read_bytes()
    assert run(args) == EXIT_OK
    assert out.read_bytes() == first

    report = json.loads(first)
    assert report["schema"] == "ebq-report/1"
    assert report["seed"] == 5
    assert all(r["passed"] for r in report["reports"])


def test_tolerance_option(tmp_path: Path):
    out = tmp_path / "report.json"
    args = ["verify", "--suite", "special", "--samples", "1", "--tol", "theta_symmetry=0.5", "--out", str(out)]
    assert run(args) == EXIT_OK
    assert json.loads(out.read_text())["tolerances"]["theta_symmetry"] == 0.5


def test_failed_check_exit_code(mocker: MockerFixture, capsys: pytest.CaptureFixture[str]):
    failing = CheckReport(
        check_id=CheckId.DYBE,
        max_abs_residual=1.0,
        max_rel_residual=1.0,
        tolerance=1e-9,
        passed=False,
    )
    report = VerifyReport(seed=7, params={}, suites=["dybe"], tolerances={"dybe": 1e-9}, reports=[failing])
    service = mocker.patch("app.main.VerificationService")
    service.return_value.run.return_value = report

    assert run(["verify", "--suite", "dybe"]) == EXIT_CHECK_FAILED
    assert json.loads(capsys.readouterr().out)["reports"][0]["check_id"] == "dybe"


def test_non_convergence_exit_code(mocker: MockerFixture):
    service = mocker.patch("app.main.VerificationService")
    service.return_value.run.side_effect = NonConvergent("series did not settle")
    assert run(["verify", "--suite", "exchange"]) == EXIT_NON_CONVERGENT


def test_verify_all_on_defaults(tmp_path: Path):
    out = tmp_path / "report.json"
    assert run(["verify", "--suite", "all", "--out", str(out)]) == EXIT_OK

    report = json.loads(out.read_text())
    failing = [r["check_id"] for r in report["reports"] if not r["passed"]]
    assert failing == []
    assert {r["check_id"] for r in report["reports"]} >= {"dybe", "rep_lr", "relbasic_hc", "cece_commutators"}
