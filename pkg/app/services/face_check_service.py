from typing import Callable

from app.core.face_checks import (
    Residual,
    check_bbar_spread,
    check_crossing,
    check_dybe,
    check_g_inversion,
    check_inversion2,
    check_prefactor_phi,
    check_r_initial,
    check_reflection,
    check_rho_inversion,
    check_unitarity,
    check_weight_conservation,
)
from app.models.domain import DynamicalParam
from app.models.schemas.responses.report import CheckReport
from app.models.types.check_id import CheckId
from app.services.base_service import BaseCheckService, encode, encode_height

HeightCheck = Callable[..., Residual]


class FaceCheckService(BaseCheckService):
    """Service for R-matrix structure, face identities and the dynamical YBE"""

    check_ids = (
        CheckId.R_INITIAL_CONDITION,
        CheckId.WEIGHT_CONSERVATION,
        CheckId.BBAR_SPREAD,
        CheckId.G_INVERSION,
        CheckId.PREFACTOR_PHI,
        CheckId.RHO_INVERSION,
        CheckId.UNITARITY,
        CheckId.CROSSING,
        CheckId.REFLECTION,
        CheckId.INVERSION2,
        CheckId.DYBE,
    )

    def checks(self) -> dict[CheckId, Callable[[], CheckReport]]:
        return {
            CheckId.R_INITIAL_CONDITION: self.check_r_initial,
            CheckId.WEIGHT_CONSERVATION: lambda: self._sweep_u_s(CheckId.WEIGHT_CONSERVATION, check_weight_conservation),
            CheckId.BBAR_SPREAD: lambda: self._sweep_u_s(CheckId.BBAR_SPREAD, check_bbar_spread),
            CheckId.G_INVERSION: self.check_g_inversion,
            CheckId.PREFACTOR_PHI: lambda: self._sweep_u(CheckId.PREFACTOR_PHI, check_prefactor_phi),
            CheckId.RHO_INVERSION: lambda: self._sweep_u(CheckId.RHO_INVERSION, check_rho_inversion),
            CheckId.UNITARITY: lambda: self._sweep_u_s(CheckId.UNITARITY, check_unitarity),
            CheckId.CROSSING: lambda: self._sweep_u_s(CheckId.CROSSING, check_crossing),
            CheckId.REFLECTION: lambda: self._sweep_u_s(CheckId.REFLECTION, check_reflection),
            CheckId.INVERSION2: lambda: self._sweep_u_s(CheckId.INVERSION2, check_inversion2),
            CheckId.DYBE: self.check_dybe,
        }

    def _sweep_u(self, check_id: CheckId, check: HeightCheck) -> CheckReport:
        residual = Residual()
        samples = []
        for _ in range(self.samples):
            u = self.sample_u()
            residual.merge(check(u, self.params, self.policy))
            samples.append({"u": encode(u)})
        return self.report(check_id, residual, samples)

    def _sweep_u_s(self, check_id: CheckId, check: HeightCheck) -> CheckReport:
        residual = Residual()
        samples = []
        for _ in range(self.samples):
            u, s = self.sample_u(), self.sample_s()
            residual.merge(check(u, s, self.params, self.policy))
            samples.append({"u": encode(u), "s": encode_height(s)})
        extra: dict[str, float | str] = {"skipped": residual.skipped} if residual.skipped else {}
        return self.report(check_id, residual, samples, extra)

    def _sweep_s(self, check_id: CheckId, check: HeightCheck) -> CheckReport:
        residual = Residual()
        samples = []
        for _ in range(self.samples):
            s = self.sample_s()
            residual.merge(check(s, self.params, self.policy))
            samples.append({"s": encode_height(s)})
        return self.report(check_id, residual, samples)

    def check_r_initial(self) -> CheckReport:
        """R(0, s) is the flip operator"""
        return self._sweep_s(CheckId.R_INITIAL_CONDITION, check_r_initial)

    def check_g_inversion(self) -> CheckReport:
        return self._sweep_s(CheckId.G_INVERSION, check_g_inversion)

    def check_dybe(self) -> CheckReport:
        """Dynamical Yang-Baxter equation with independent spectral parameters"""
        residual = Residual()
        samples = []
        for _ in range(self.samples):
            u1, u2, u3 = self.sample_u(), self.sample_u(), self.sample_u()
            s: DynamicalParam = self.sample_s()
            residual.merge(check_dybe(u1, u2, u3, s, self.params, self.policy))
            samples.append({"u": [encode(u1), encode(u2), encode(u3)], "s": encode_height(s)})
        return self.report(CheckId.DYBE, residual, samples)
