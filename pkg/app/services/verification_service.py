from loguru import logger

from app.models.domain import TruncationPolicy
from app.models.schemas.requests.run_config import RunConfig
from app.models.schemas.responses.report import CheckReport, VerifyReport
from app.models.types.check_id import CheckId
from app.models.types.suite import Suite
from app.services.base_service import BaseCheckService
from app.services.exchange_service import ExchangeService
from app.services.face_check_service import FaceCheckService
from app.services.mode_algebra_service import ModeAlgebraService
from app.services.representation_service import RepresentationService
from app.services.special_function_service import SpecialFunctionService
from app.services.vertex_operator_service import VertexOperatorService

SERVICES: tuple[type[BaseCheckService], ...] = (
    SpecialFunctionService,
    ModeAlgebraService,
    ExchangeService,
    FaceCheckService,
    RepresentationService,
    VertexOperatorService,
)


def canonical_order(reports: list[CheckReport]) -> list[CheckReport]:
    """Failing reports first, each group in check id order"""
    position = {check_id.value: n for n, check_id in enumerate(CheckId)}
    return sorted(reports, key=lambda r: (r.passed, position[r.check_id]))


class VerificationService:
    """Service for running check suites and assembling the report"""

    def __init__(self, config: RunConfig, policy: TruncationPolicy | None = None):
        self.config = config
        self.params = config.params
        self.policy = policy if policy is not None else TruncationPolicy.from_settings()

    def selected_checks(self) -> list[CheckId]:
        suites = Suite.parse(",".join(s.value for s in self.config.suites))
        chosen = {check_id for suite in suites for check_id in suite.check_ids()}
        return [check_id for check_id in CheckId if check_id in chosen]

    def tolerances(self) -> dict[CheckId, float]:
        return {c: self.config.tolerances.get(c, c.default_tolerance) for c in self.selected_checks()}

    def run(self) -> VerifyReport:
        selected = set(self.selected_checks())
        reports: list[CheckReport] = []
        for service_class in SERVICES:
            wanted = selected.intersection(service_class.check_ids)
            if not wanted:
                continue
            logger.info(f"running {service_class.__name__} ({len(wanted)} checks)")
            service = service_class(
                self.params,
                self.policy,
                seed=self.config.seed,
                samples=self.config.samples,
                tolerances=self.config.tolerances,
                height=self.config.s,
            )
            reports.extend(service.run(wanted))
        ordered = canonical_order(reports)
        failed = [r.check_id for r in ordered if not r.passed]
        if failed:
            logger.warning(f"{len(failed)} checks failed: {', '.join(failed)}")
        return VerifyReport(
            seed=self.config.seed,
            params={
                "N": self.params.N,
                "q": [self.params.q.real, self.params.q.imag],
                "r": self.params.r.real,
                "c": self.params.c.real,
                "samples": self.config.samples,
                "max_terms": self.policy.max_terms,
            },
            suites=[s.value for s in self.config.suites],
            tolerances={c.value: tol for c, tol in self.tolerances().items()},
            reports=ordered,
        )
