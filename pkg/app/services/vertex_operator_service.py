from fractions import Fraction
from functools import partial
from typing import Any, Callable

from app.core.exchange import RationalExponent, crossing_exponent
from app.core.relations import ExchangeRelation, verify_relation, vertex_relations
from app.models.domain import AlgebraParams, TruncationPolicy
from app.models.schemas.responses.report import CheckReport
from app.models.types.check_id import CheckId
from app.models.types.relation_family import RelationFamily
from app.services.base_service import BaseCheckService
from app.services.exchange_service import summarize

BARE_CHECKS: dict[str, CheckId] = {
    "Phi.Phi": CheckId.VERTEX_PHI_PHI,
    "Psi*.Psi*": CheckId.VERTEX_PSI_PSI,
    "Phi.Psi*": CheckId.VERTEX_PHI_PSI,
}

# powers of z_A/z_B left by the zero modes; None accepts any integer power
NET_EXPONENTS: dict[str, RationalExponent | None] = {
    "Phi.Phi": RationalExponent(Fraction(1), Fraction(-1), Fraction(0)),
    "Psi*.Psi*": RationalExponent(Fraction(1), Fraction(0), Fraction(1)),
    "Phi.Psi*": None,
}


def net_exponent_ok(name: str, net: RationalExponent | None) -> bool:
    if net is None:
        return False
    expected = NET_EXPONENTS[name]
    return net.is_integral if expected is None else net == expected


FAMILY_CHECKS: dict[RelationFamily, CheckId] = {
    RelationFamily.VERTEX_SUFFICIENT: CheckId.VERTEX_SUFFICIENT,
    RelationFamily.VERTEX_INTERTWINING: CheckId.VERTEX_INTERTWINING,
}


class VertexOperatorService(BaseCheckService):
    """Service for level-one vertex operator exchange relations"""

    check_ids = tuple(BARE_CHECKS.values()) + tuple(FAMILY_CHECKS.values())

    def __init__(self, params: AlgebraParams, policy: TruncationPolicy | None = None, **kwargs: Any):
        # vertex operators only exist at level one
        super().__init__(params.at_level(1), policy, **kwargs)
        self.relations = vertex_relations(self.params, self.policy)

    def checks(self) -> dict[CheckId, Callable[[], CheckReport]]:
        table: dict[CheckId, Callable[[], CheckReport]] = {
            check_id: partial(self.check_bare, name) for name, check_id in BARE_CHECKS.items()
        }
        for family, check_id in FAMILY_CHECKS.items():
            table[check_id] = partial(self.check_family, family)
        return table

    def _relation(self, name: str) -> ExchangeRelation:
        return next(r for r in self.relations if r.name == name)

    def check_bare(self, name: str) -> CheckReport:
        """One vertex-vertex relation plus its net power of z_A/z_B"""
        relation = self._relation(name)
        result = verify_relation(relation, self.params, self.policy, self.rng, self.samples)
        residual, extra = summarize([result])
        exponent_ab = crossing_exponent(relation.left.zero, relation.right.zero)
        exponent_ba = crossing_exponent(relation.right.zero, relation.left.zero)
        net = exponent_ab if exponent_ab == exponent_ba else None
        extra["net_exponent"] = str(net) if net is not None else "orderings disagree"
        if not net_exponent_ok(name, net):
            residual.max_rel = residual.max_abs = max(residual.max_rel, 1.0)
            residual.notes.append(f"{name}: net exponent {extra['net_exponent']} is not the expected power")
        return self.report(BARE_CHECKS[name], residual, [{"relation": name, "samples": result.samples}], extra)

    def check_family(self, family: RelationFamily) -> CheckReport:
        chosen = [r for r in self.relations if r.family is family]
        results = [verify_relation(r, self.params, self.policy, self.rng, self.samples) for r in chosen]
        residual, extra = summarize(results)
        samples = [{"relation": r.name, "samples": r.samples} for r in results]
        return self.report(FAMILY_CHECKS[family], residual, samples, extra)
