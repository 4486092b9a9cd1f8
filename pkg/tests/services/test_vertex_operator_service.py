from fractions import Fraction

import pytest
from pytest_mock import MockerFixture

from app.core.exchange import RationalExponent
from app.core.relations import GaugeFactor, RelationResult
from app.models.domain import AlgebraParams
from app.models.types.check_id import CheckId
from app.services.vertex_operator_service import VertexOperatorService, net_exponent_ok


def _exact(relation, *args, **kwargs) -> RelationResult:
    return RelationResult(
        name=relation.name,
        family=relation.family,
        residual=0.0,
        gauge_constant=1 + 0j,
        p_independence=0.0,
        inverse_residual=0.0,
        charge_ok=True,
        samples=2,
        gauge=GaugeFactor(1, RationalExponent()) if relation.allows_gauge else None,
    )


def test_service_moves_to_level_one(params_n2: AlgebraParams):
    service = VertexOperatorService(params_n2)
    assert service.params.c == 1
    assert set(service.checks()) == set(VertexOperatorService.check_ids)


def test_family_reports_every_relation(params_n2: AlgebraParams, mocker: MockerFixture):
    mocker.patch("app.services.vertex_operator_service.verify_relation", side_effect=_exact)
    (report,) = VertexOperatorService(params_n2, samples=2).run([CheckId.VERTEX_INTERTWINING])

    assert report.passed
    assert [s["relation"] for s in report.samples] == ["Phi.K-1", "K-1.Psi*"]
    assert set(report.extra) == {"Phi.K-1", "K-1.Psi*", "Phi.K-1:gauge", "K-1.Psi*:gauge"}


@pytest.mark.parametrize(
    "check_id, name, net",
    [
        (CheckId.VERTEX_PHI_PHI, "Phi.Phi", "1 + (-1)/r + (0)/r*"),
        (CheckId.VERTEX_PSI_PSI, "Psi*.Psi*", "1 + (0)/r + (1)/r*"),
        (CheckId.VERTEX_PHI_PSI, "Phi.Psi*", "-1 + (0)/r + (0)/r*"),
    ],
)
def test_bare_check_asserts_net_exponent(check_id: CheckId, name: str, net: str, params_n2: AlgebraParams, mocker: MockerFixture):
    mocker.patch("app.services.vertex_operator_service.verify_relation", side_effect=_exact)
    (report,) = VertexOperatorService(params_n2, samples=2).run([check_id])

    assert report.samples == [{"relation": name, "samples": 2}]
    assert report.extra["net_exponent"] == net
    assert report.passed
    assert report.notes == []


def test_net_exponent_rules():
    phi_phi = RationalExponent(Fraction(1), Fraction(-1), Fraction(0))
    assert net_exponent_ok("Phi.Phi", phi_phi)
    assert not net_exponent_ok("Phi.Phi", -phi_phi)
    assert not net_exponent_ok("Phi.Phi", None)
    assert net_exponent_ok("Phi.Psi*", RationalExponent(Fraction(-1)))
    assert not net_exponent_ok("Phi.Psi*", RationalExponent(Fraction(-1), Fraction(1), Fraction(0)))


def test_bare_check_fails_on_wrong_exponent(params_n2: AlgebraParams, mocker: MockerFixture):
    mocker.patch("app.services.vertex_operator_service.verify_relation", side_effect=_exact)
    mocker.patch.dict(
        "app.services.vertex_operator_service.NET_EXPONENTS", {"Phi.Phi": RationalExponent(Fraction(-1), Fraction(1))}
    )
    (report,) = VertexOperatorService(params_n2, samples=2).run([CheckId.VERTEX_PHI_PHI])

    assert not report.passed
    assert "Phi.Phi" in report.notes[0]


def test_bare_check_on_the_engine(params_n2: AlgebraParams):
    (report,) = VertexOperatorService(params_n2, samples=2).run([CheckId.VERTEX_PSI_PSI])
    assert report.passed, report.extra
