from typing import Any

from pydantic import Field

from app.core.schema import BaseSchema
from app.models.types.check_id import CheckId

SCHEMA_ID = "ebq-report/1"


class CheckReport(BaseSchema):
    check_id: CheckId
    samples: list[dict[str, Any]] = Field(default_factory=list)
    max_abs_residual: float
    max_rel_residual: float
    tolerance: float
    passed: bool
    notes: list[str] = Field(default_factory=list)
    extra: dict[str, float | str] = Field(default_factory=dict)


class VerifyReport(BaseSchema):
    schema_id: str = Field(default=SCHEMA_ID, alias="schema")
    seed: int
    params: dict[str, Any]
    suites: list[str]
    tolerances: dict[str, float]
    reports: list[CheckReport]

    @property
    def passed(self) -> bool:
        return all(report.passed for report in self.reports)
