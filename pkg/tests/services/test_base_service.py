from typing import Callable

import pytest

from app.core.errors import InvalidParameters
from app.core.face_checks import Residual
from app.models.domain import AlgebraParams
from app.models.schemas.responses.report import CheckReport
from app.models.types.check_id import CheckId
from app.services.base_service import BaseCheckService, encode, encode_height


class DrawingService(BaseCheckService):
    """Reports its first random draw as the residual"""

    check_ids = (CheckId.THETA_TRIPLE_PRODUCT, CheckId.THETA_SYMMETRY)

    def checks(self) -> dict[CheckId, Callable[[], CheckReport]]:
        return {check_id: (lambda c=check_id: self._draw(c)) for check_id in self.check_ids}

    def _draw(self, check_id: CheckId) -> CheckReport:
        value = float(self.rng.uniform())
        return self.report(check_id, Residual(max_abs=value, max_rel=value), [{"draw": value}])


@pytest.fixture
def service(params_n2: AlgebraParams) -> DrawingService:
    return DrawingService(params_n2, seed=11, samples=1)


def test_report_pass_and_fail(service: DrawingService):
    tol = CheckId.BBAR_SPREAD.default_tolerance
    passing = service.report(CheckId.BBAR_SPREAD, Residual(max_abs=tol, max_rel=tol))
    failing = service.report(CheckId.BBAR_SPREAD, Residual(max_abs=1.0, max_rel=1.0, notes=["large"]))

    assert passing.passed
    assert passing.tolerance == tol
    assert not failing.passed
    assert failing.notes == ["large"]


def test_zero_tolerance_accepts_exact_zero(service: DrawingService):
    assert service.report(CheckId.WEIGHT_CONSERVATION, Residual()).passed
    assert not service.report(CheckId.WEIGHT_CONSERVATION, Residual(max_abs=1e-300, max_rel=1e-300)).passed


def test_tolerance_override(params_n2: AlgebraParams):
    service = DrawingService(params_n2, tolerances={"dybe": 1.0})
    assert service.tolerance(CheckId.DYBE) == 1.0
    assert service.tolerance(CheckId.CROSSING) == CheckId.CROSSING.default_tolerance


def test_base_service_has_no_checks(params_n2: AlgebraParams):
    with pytest.raises(NotImplementedError):
        BaseCheckService(params_n2).run()


def test_run_filters_selection(service: DrawingService):
    reports = service.run([CheckId.THETA_SYMMETRY])
    assert [r.check_id for r in reports] == [CheckId.THETA_SYMMETRY.value]


def test_check_streams_do_not_depend_on_selection(params_n2: AlgebraParams):
    """Test that a check draws the same numbers alone or alongside others."""
    together = DrawingService(params_n2, seed=11).run()
    alone = DrawingService(params_n2, seed=11).run([CheckId.THETA_SYMMETRY])
    assert together[1].samples == alone[0].samples
    assert together[0].samples != together[1].samples


def test_sample_s_is_generic(service: DrawingService):
    s = service.sample_s()
    assert len(s.values) == 2
    assert len(encode_height(s)) == 2


def test_fixed_height_is_validated(params_n2: AlgebraParams):
    with pytest.raises(InvalidParameters):
        DrawingService(params_n2, height=[0.5, 0.5]).sample_s()
    fixed = DrawingService(params_n2, height=[0.4 + 0.1j, 1.1 + 0.2j]).sample_s()
    assert fixed.values == (0.4 + 0.1j, 1.1 + 0.2j)


def test_encode():
    assert encode(1.5 - 2j) == [1.5, -2.0]
