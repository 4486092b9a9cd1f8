from functools import partial
from typing import Callable

from loguru import logger

from app.core.exchange import psikk_residuals
from app.core.face_checks import Residual
from app.core.relations import RelationResult, verify_family
from app.models.schemas.responses.report import CheckReport
from app.models.types.check_id import CheckId
from app.models.types.relation_family import RelationFamily
from app.services.base_service import BaseCheckService

FAMILY_CHECKS: dict[RelationFamily, CheckId] = {
    RelationFamily.KK: CheckId.EXCHANGE_KK,
    RelationFamily.KEF: CheckId.EXCHANGE_KEF,
    RelationFamily.REL_KK: CheckId.EXCHANGE_REL_KK,
    RelationFamily.REL_EK: CheckId.EXCHANGE_REL_EK,
}


def summarize(results: list[RelationResult]) -> tuple[Residual, dict[str, float | str]]:
    """Fold per-relation outcomes into one residual plus per-relation detail"""
    residual = Residual()
    extra: dict[str, float | str] = {}
    for result in results:
        # ratio times inverse ratio and P-independence count against the check too
        residual.max_rel = max(residual.max_rel, result.residual, result.inverse_residual, result.p_independence)
        residual.max_abs = residual.max_rel
        extra[result.name] = result.residual
        if result.gauge is not None:
            extra[f"{result.name}:gauge"] = str(result.gauge)
        if result.continued:
            extra[f"{result.name}:continued"] = "yes"
        if not result.charge_ok:
            residual.notes.append(f"{result.name}: zero-mode exponent differs from its symbolic value")
    return residual, extra


class ExchangeService(BaseCheckService):
    """Service for exchange relations of the currents"""

    check_ids = tuple(FAMILY_CHECKS.values()) + (CheckId.PSIKK_DECOMPOSITION,)

    def checks(self) -> dict[CheckId, Callable[[], CheckReport]]:
        table: dict[CheckId, Callable[[], CheckReport]] = {
            check_id: partial(self.check_family, family) for family, check_id in FAMILY_CHECKS.items()
        }
        table[CheckId.PSIKK_DECOMPOSITION] = self.check_psikk
        return table

    def check_family(self, family: RelationFamily) -> CheckReport:
        logger.info(f"verifying {family.value} exchange relations at N={self.params.N}")
        results = verify_family(family, self.params, self.policy, self.rng, self.samples)
        residual, extra = summarize(results)
        samples = [{"relation": r.name, "samples": r.samples} for r in results]
        return self.report(FAMILY_CHECKS[family], residual, samples, extra)

    def check_psikk(self) -> CheckReport:
        """psi_j oscillators against the k-current quotients"""
        residual = Residual()
        values = psikk_residuals(self.params)
        residual.max_rel = residual.max_abs = max(values.values(), default=0.0)
        worst = max(values, key=values.get) if values else ""
        return self.report(CheckId.PSIKK_DECOMPOSITION, residual, [{"modes": list(range(1, 7))}], {"worst": worst})
