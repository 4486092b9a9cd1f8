from pathlib import Path

from pydantic import BaseModel, Field, field_validator, model_validator

from app.models.domain import AlgebraParams
from app.models.types.check_id import CheckId
from app.models.types.prefactor_mode import PrefactorMode
from app.models.types.suite import Suite


class RunConfig(BaseModel):
    """Parameters of one command line run"""

    command: str
    N: int = Field(ge=1)
    q_re: float
    q_im: float = 0.0
    r: float
    c: float
    seed: int = Field(ge=0, lt=2**64)
    samples: int = Field(default=5, ge=1)
    suites: list[Suite] = Field(default_factory=lambda: [Suite.ALL])
    tolerances: dict[CheckId, float] = Field(default_factory=dict)
    # eval-rmatrix point; s also pins the height used by verify
    u: complex = 0j
    s: list[complex] | None = None
    prefactor: PrefactorMode = PrefactorMode.NONE
    out: Path | None = None

    @field_validator("tolerances")
    @classmethod
    def non_negative_tolerances(cls, value: dict[CheckId, float]) -> dict[CheckId, float]:
        for check_id, tol in value.items():
            if tol < 0:
                raise ValueError(f"tolerance for {check_id.value} must be >= 0, got {tol}")
        return value

    @model_validator(mode="after")
    def valid_algebra(self) -> "RunConfig":
        # nome violations surface before any computation starts
        params = self.params
        if self.s is not None and len(self.s) != params.N:
            raise ValueError(f"s has {len(self.s)} components, expected N={params.N}")
        return self

    @property
    def params(self) -> AlgebraParams:
        return AlgebraParams(N=self.N, q=complex(self.q_re, self.q_im), r=self.r, c=self.c)
