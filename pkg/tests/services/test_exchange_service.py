from fractions import Fraction

from pytest_mock import MockerFixture

from app.core.exchange import RationalExponent
from app.core.relations import GaugeFactor, RelationResult
from app.models.domain import AlgebraParams
from app.models.types.check_id import CheckId
from app.models.types.relation_family import RelationFamily
from app.services.exchange_service import ExchangeService, summarize


def _result(name: str, family: RelationFamily, residual: float, charge_ok: bool = True) -> RelationResult:
    return RelationResult(
        name=name,
        family=family,
        residual=residual,
        gauge_constant=2 + 0j,
        gauge=GaugeFactor(1, RationalExponent(per_r=Fraction(1))) if family.allows_gauge_constant else None,
        p_independence=1e-15,
        inverse_residual=1e-14,
        charge_ok=charge_ok,
        samples=2,
    )


def test_summarize_takes_largest_residual():
    residual, extra = summarize(
        [
            _result("k+1.k+1", RelationFamily.KK, 1e-13),
            _result("k+1.e1", RelationFamily.KK, 3e-9),
        ]
    )
    assert residual.max_rel == 3e-9
    assert extra == {"k+1.k+1": 1e-13, "k+1.e1": 3e-9}
    assert residual.notes == []


def test_summarize_counts_inverse_residual():
    residual, _ = summarize([_result("k+1.k+1", RelationFamily.KK, 0.0)])
    assert residual.max_rel == 1e-14


def test_summarize_reports_gauge_and_charge():
    residual, extra = summarize([_result("K+1.K+1", RelationFamily.REL_KK, 0.0, charge_ok=False)])
    assert extra["K+1.K+1:gauge"] == "q^(0 + (1)/r + (0)/r*)"
    assert len(residual.notes) == 1
    assert "K+1.K+1" in residual.notes[0]


def test_check_family_uses_family_check_id(params_n2: AlgebraParams, mocker: MockerFixture):
    verify = mocker.patch(
        "app.services.exchange_service.verify_family",
        return_value=[_result("K+1.K+1", RelationFamily.REL_KK, 1e-6)],
    )
    service = ExchangeService(params_n2, samples=2)
    report = service.check_family(RelationFamily.REL_KK)

    verify.assert_called_once()
    assert report.check_id == CheckId.EXCHANGE_REL_KK.value
    assert not report.passed
    assert report.samples == [{"relation": "K+1.K+1", "samples": 2}]


def test_psikk_report_has_every_key(params_n2: AlgebraParams):
    report = ExchangeService(params_n2).check_psikk()
    assert report.check_id == CheckId.PSIKK_DECOMPOSITION.value
    assert "worst" in report.extra


def test_psikk_report_passes(params_n2: AlgebraParams):
    report = ExchangeService(params_n2).check_psikk()
    assert report.passed
