import argparse
import sys
from pathlib import Path
from typing import Sequence

from loguru import logger
from pydantic import ValidationError

from app.core.config import get_settings
from app.core.errors import EbqError, InvalidIndexPattern, InvalidParameters, NonConvergent
from app.core.rmatrix import assemble, matrix_to_schema
from app.models.domain import DynamicalParam, TruncationPolicy
from app.models.schemas.requests.run_config import RunConfig
from app.models.schemas.responses.report import SCHEMA_ID, VerifyReport
from app.models.schemas.responses.schema_info import SchemaInfo
from app.models.types.check_id import CheckId
from app.models.types.prefactor_mode import PrefactorMode
from app.models.types.suite import Suite
from app.services.verification_service import VerificationService

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INVALID_INPUT = 2
EXIT_NON_CONVERGENT = 3


def _tolerance(text: str) -> tuple[CheckId, float]:
    """Parse CHECK=VALUE"""
    name, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected CHECK=VALUE, got {text!r}")
    try:
        return CheckId(name.strip()), float(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _suites(text: str) -> list[Suite]:
    try:
        return Suite.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = argparse.ArgumentParser(
        prog="ebq",
        description="Evaluate and verify the dynamical R-matrix and current relations of the elliptic algebra of type B_N.",
    )
    parser.add_argument("--log-level", default=settings.LOG_LEVEL, help="loguru level for stderr output")
    commands = parser.add_subparsers(dest="command", required=True)

    def add_params(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("--N", type=int, default=settings.DEFAULT_N, help="rank")
        sub.add_argument("--q-re", type=float, default=settings.DEFAULT_Q_RE)
        sub.add_argument("--q-im", type=float, default=settings.DEFAULT_Q_IM)
        sub.add_argument("--r", type=float, default=settings.DEFAULT_R)
        sub.add_argument("--c", type=float, default=settings.DEFAULT_C, help="level")
        sub.add_argument("--s", type=complex, nargs="+", default=None, help="dynamical parameter, N complex values")
        sub.add_argument("--out", type=Path, default=None, help="output file, stdout when omitted")

    rmatrix = commands.add_parser("eval-rmatrix", help="write one R-matrix value as JSON")
    add_params(rmatrix)
    rmatrix.add_argument("--u", type=complex, default=0j, help="spectral parameter")
    rmatrix.add_argument(
        "--prefactor",
        choices=[m.value for m in PrefactorMode],
        default=PrefactorMode.NONE.value,
    )

    verify = commands.add_parser("verify", help="run check suites and write a report")
    add_params(verify)
    verify.add_argument("--suite", type=_suites, default=[Suite.ALL], help="comma list of suites or 'all'")
    verify.add_argument("--seed", type=int, default=settings.SEED)
    verify.add_argument("--samples", type=int, default=settings.SAMPLES)
    verify.add_argument("--tol", type=_tolerance, action="append", default=[], metavar="CHECK=VALUE")

    commands.add_parser("schema", help="print the report schema")
    return parser


def _config(args: argparse.Namespace) -> RunConfig:
    values = {
        "command": args.command,
        "N": args.N,
        "q_re": args.q_re,
        "q_im": args.q_im,
        "r": args.r,
        "c": args.c,
        "s": args.s,
        "out": args.out,
        "seed": getattr(args, "seed", get_settings().SEED),
    }
    if args.command == "eval-rmatrix":
        values.update(u=args.u, prefactor=args.prefactor)
    else:
        values.update(samples=args.samples, suites=args.suite, tolerances=dict(args.tol))
    return RunConfig(**values)


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text + "\n")
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text + "\n")
    logger.info(f"wrote {out}")


def cmd_eval_rmatrix(config: RunConfig, policy: TruncationPolicy) -> int:
    params = config.params
    values = config.s if config.s is not None else [0.3 + 0.1j * (j + 1) + 0.4 * j for j in range(params.N)]
    s = DynamicalParam.generic(values, params)
    value = assemble(config.u, s, config.prefactor, params, policy)
    _emit(matrix_to_schema(value).model_dump_json(indent=2), config.out)
    return EXIT_OK


def cmd_verify(config: RunConfig, policy: TruncationPolicy) -> int:
    report: VerifyReport = VerificationService(config, policy).run()
    _emit(report.model_dump_json(indent=2, by_alias=True), config.out)
    if not report.passed:
        logger.error(f"verification failed: first failing check {report.reports[0].check_id}")
        return EXIT_CHECK_FAILED
    return EXIT_OK


def cmd_report_schema() -> int:
    info = SchemaInfo(
        schema=SCHEMA_ID,
        check_ids=list(CheckId),
        report=VerifyReport.model_json_schema(by_alias=True),
    )
    _emit(info.model_dump_json(indent=2, by_alias=True), None)
    return EXIT_OK


def run(argv: Sequence[str] | None = None) -> int:
    """Parse arguments, dispatch and map failures to exit codes"""
    args = build_parser().parse_args(argv)
    logger.remove()
    logger.add(sys.stderr, level=args.log_level.upper())

    if args.command == "schema":
        return cmd_report_schema()
    try:
        config = _config(args)
        policy = TruncationPolicy.from_settings()
        if config.command == "eval-rmatrix":
            return cmd_eval_rmatrix(config, policy)
        return cmd_verify(config, policy)
    except (ValidationError, InvalidParameters, InvalidIndexPattern) as exc:
        logger.error(f"invalid input: {exc}")
        return EXIT_INVALID_INPUT
    except NonConvergent as exc:
        logger.error(f"numerical non-convergence: {exc}")
        return EXIT_NON_CONVERGENT
    except EbqError as exc:
        logger.error(f"evaluation failed: {exc}")
        return EXIT_INVALID_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
