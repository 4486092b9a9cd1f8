import cmath
from typing import Callable

from app.core.face_checks import Residual
from app.core.special_functions import bracket, cpow, theta_p, theta_sum
from app.models.schemas.responses.report import CheckReport
from app.models.types.check_id import CheckId
from app.services.base_service import BaseCheckService, encode


class SpecialFunctionService(BaseCheckService):
    """Service for theta function and bracket identities"""

    check_ids = (
        CheckId.THETA_TRIPLE_PRODUCT,
        CheckId.THETA_SYMMETRY,
        CheckId.BRACKET_IDENTITIES,
    )

    def checks(self) -> dict[CheckId, Callable[[], CheckReport]]:
        return {
            CheckId.THETA_TRIPLE_PRODUCT: self.check_triple_product,
            CheckId.THETA_SYMMETRY: self.check_theta_symmetry,
            CheckId.BRACKET_IDENTITIES: self.check_bracket_identities,
        }

    def _sample_nome_and_argument(self) -> tuple[complex, complex]:
        p = self.rng.uniform(0.05, 0.5) * cmath.exp(1j * self.rng.uniform(-cmath.pi, cmath.pi))
        z = self.rng.uniform(0.6, 1.8) * cmath.exp(1j * self.rng.uniform(0.3, 2 * cmath.pi - 0.3))
        return p, z

    def check_triple_product(self) -> CheckReport:
        """Product form of Theta_p against the Jacobi series"""
        residual = Residual()
        samples = []
        for _ in range(self.samples):
            p, z = self._sample_nome_and_argument()
            residual.add(theta_p(z, p, self.policy), theta_sum(z, p, self.policy))
            samples.append({"p": encode(p), "z": encode(z)})
        return self.report(CheckId.THETA_TRIPLE_PRODUCT, residual, samples)

    def check_theta_symmetry(self) -> CheckReport:
        """Theta_p(p/z) = Theta_p(z) and Theta_p(pz) = -Theta_p(z)/z"""
        residual = Residual()
        samples = []
        for _ in range(self.samples):
            p, z = self._sample_nome_and_argument()
            value = theta_p(z, p, self.policy)
            residual.add(theta_p(p / z, p, self.policy), value)
            residual.add(theta_p(p * z, p, self.policy), -value / z)
            samples.append({"p": encode(p), "z": encode(z)})
        return self.report(CheckId.THETA_SYMMETRY, residual, samples)

    def check_bracket_identities(self) -> CheckReport:
        """Quasi-periodicity and oddness of [u] and [u]*, plus cpow additivity"""
        params = self.params
        residual = Residual()
        samples = []
        for _ in range(self.samples):
            u = self.sample_u()
            for starred, period in ((False, params.r), (True, params.r_star)):
                value = bracket(u, params, starred, self.policy)
                residual.add(bracket(u + period, params, starred, self.policy), -value)
                residual.add(bracket(-u, params, starred, self.policy), -value)
            residual.add(cpow(u, 1 / params.r, params) * cpow(u, -1 / params.r, params), 1)
            samples.append({"u": encode(u)})
        if abs(bracket(0, params, policy=self.policy)) > 0:
            residual.notes.append("[0] evaluated to a nonzero value")
        return self.report(CheckId.BRACKET_IDENTITIES, residual, samples)
