from typing import Any, Callable, ClassVar, Iterable, Sequence

import numpy as np
from loguru import logger

from app.core.errors import InvalidParameters
from app.core.face_checks import Residual
from app.models.domain import AlgebraParams, DynamicalParam, TruncationPolicy
from app.models.schemas.responses.report import CheckReport
from app.models.types.check_id import CheckId


class BaseCheckService:
    """Base service with common check operations"""

    check_ids: ClassVar[tuple[CheckId, ...]] = ()

    def __init__(
        self,
        params: AlgebraParams,
        policy: TruncationPolicy | None = None,
        seed: int = 7,
        samples: int = 5,
        tolerances: dict[CheckId, float] | None = None,
        height: Sequence[complex] | None = None,
    ):
        self.params = params
        self.policy = policy if policy is not None else TruncationPolicy.from_settings()
        self.seed = seed
        self.samples = samples
        self.rng = np.random.default_rng(seed)
        self.tolerances = {CheckId(k): v for k, v in (tolerances or {}).items()}
        self.height = tuple(height) if height is not None else None

    def checks(self) -> dict[CheckId, Callable[[], CheckReport]]:
        """Check id to the method producing its report"""
        raise NotImplementedError

    def run(self, selected: Iterable[CheckId] | None = None) -> list[CheckReport]:
        """Run the selected checks of this service, all of them by default"""
        table = self.checks()
        wanted = set(table) if selected is None else {CheckId(c) for c in selected}
        reports = []
        for check_id, check in table.items():
            if check_id not in wanted:
                continue
            # one stream per check, independent of which checks run
            self.rng = np.random.default_rng([self.seed, list(CheckId).index(check_id)])
            reports.append(check())
        return reports

    def tolerance(self, check_id: CheckId) -> float:
        return self.tolerances.get(check_id, check_id.default_tolerance)

    def report(
        self,
        check_id: CheckId,
        residual: Residual,
        samples: list[dict[str, Any]] | None = None,
        extra: dict[str, float | str] | None = None,
    ) -> CheckReport:
        """Build a report; the check passes when the relative residual is within tolerance"""
        tol = self.tolerance(check_id)
        passed = residual.max_rel <= tol
        if passed:
            logger.info(f"{check_id.value}: passed, residual {residual.max_rel:.3e}")
        else:
            logger.warning(f"{check_id.value}: FAILED, residual {residual.max_rel:.3e} > {tol:.1e}")
        return CheckReport(
            check_id=check_id,
            samples=samples or [],
            max_abs_residual=residual.max_abs,
            max_rel_residual=residual.max_rel,
            tolerance=tol,
            passed=passed,
            notes=list(residual.notes),
            extra=extra or {},
        )

    # Sampling

    def sample_u(self, scale: float = 1.0) -> complex:
        """A generic spectral parameter away from the lattice of poles"""
        return complex(self.rng.uniform(0.1, 0.6) * scale, self.rng.uniform(0.05, 0.3))

    def sample_s(self, params: AlgebraParams | None = None, attempts: int = 8) -> DynamicalParam:
        """A generic dynamical parameter.

        A height fixed on the service is validated and returned as is;
        otherwise degenerate draws are redrawn.
        """
        params = params if params is not None else self.params
        if self.height is not None:
            return DynamicalParam.generic(self.height, params)
        for _ in range(attempts):
            values = self.rng.uniform(0.2, 1.6, params.N) + 1j * self.rng.uniform(0.1, 0.4, params.N)
            try:
                return DynamicalParam.generic(values, params)
            except InvalidParameters as exc:
                logger.debug(f"redrawing dynamical parameter: {exc}")
        raise InvalidParameters(f"no generic dynamical parameter in {attempts} draws")


def encode(value: complex) -> list[float]:
    """JSON form of a complex sample value"""
    return [value.real, value.imag]


def encode_height(s: DynamicalParam) -> list[list[float]]:
    return [encode(v) for v in s.values]
