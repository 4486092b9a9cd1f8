import cmath
from typing import Any, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.core.config import get_settings
from app.core.errors import InvalidParameters


class TruncationPolicy(BaseModel):
    """Cutoffs shared by every truncated series and product"""

    model_config = ConfigDict(frozen=True)

    tol: float = Field(default=1e-16, gt=0)
    max_terms: int = Field(default=4096, ge=8)
    ratio_guard: float = Field(default=0.95, gt=0, lt=1)

    @classmethod
    def from_settings(cls) -> "TruncationPolicy":
        settings = get_settings()
        return cls(
            tol=settings.TOL,
            max_terms=settings.MAX_TERMS,
            ratio_guard=settings.RATIO_GUARD,
        )


class AlgebraParams(BaseModel):
    """Global constants N, q, r, c and the quantities derived from them.

    Every fractional power goes through the single principal logarithm
    ``log_q``; ``p`` and ``p_star`` are built from it so that
    p* = p q^{-2c} holds by construction.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    N: int = Field(ge=1)
    q: complex
    r: complex
    c: complex = 1 + 0j

    @field_validator("q", "r", "c", mode="before")
    @classmethod
    def coerce_complex(cls, value: Any) -> complex:
        return complex(value)

    @model_validator(mode="after")
    def check_nome(self) -> "AlgebraParams":
        if not 0 < abs(self.q) < 1:
            raise ValueError(f"|q| must lie in (0, 1), got {abs(self.q):.6g}")
        if abs(self.p) >= 1:
            raise ValueError(f"|p| = |q^(2r)| must be < 1, got {abs(self.p):.6g}")
        if abs(self.p_star) >= 1:
            raise ValueError(
                f"|p*| = |q^(2(r-c))| must be < 1, got {abs(self.p_star):.6g}"
            )
        return self

    @classmethod
    def from_settings(cls, **overrides: Any) -> "AlgebraParams":
        settings = get_settings()
        values: dict[str, Any] = {
            "N": settings.DEFAULT_N,
            "q": complex(settings.DEFAULT_Q_RE, settings.DEFAULT_Q_IM),
            "r": settings.DEFAULT_R,
            "c": settings.DEFAULT_C,
        }
        values.update(overrides)
        return cls(**values)

    def at_level(self, c: complex) -> "AlgebraParams":
        """Same N, q, r at another level"""
        return AlgebraParams(N=self.N, q=self.q, r=self.r, c=c)

    @property
    def key(self) -> tuple[int, complex, complex, complex]:
        return (self.N, self.q, self.r, self.c)

    @property
    def log_q(self) -> complex:
        return cmath.log(self.q)

    @property
    def r_star(self) -> complex:
        return self.r - self.c

    @property
    def p(self) -> complex:
        return cmath.exp(2 * self.r * self.log_q)

    @property
    def p_star(self) -> complex:
        return cmath.exp(2 * self.r_star * self.log_q)

    @property
    def eta(self) -> float:
        return -(2 * self.N - 1) / 2

    @property
    def xi(self) -> complex:
        return cmath.exp(-2 * self.eta * self.log_q)

    def qpow(self, exponent: complex) -> complex:
        """q**exponent on the fixed branch"""
        return cmath.exp(exponent * self.log_q)


class DynamicalParam(BaseModel):
    """Dynamical vector s = (s_{eps_1}, ..., s_{eps_N}) with the extended lookup"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    values: tuple[complex, ...]

    @field_validator("values", mode="before")
    @classmethod
    def coerce_values(cls, value: Sequence[Any]) -> tuple[complex, ...]:
        return tuple(complex(v) for v in value)

    @classmethod
    def generic(
        cls, values: Sequence[Any], params: AlgebraParams, tol: float = 1e-9
    ) -> "DynamicalParam":
        """Build s and reject it when a denominator bracket vanishes"""
        from app.core.special_functions import bracket

        s = cls(values=values)
        if len(s.values) != params.N:
            raise InvalidParameters(
                f"s has {len(s.values)} components, expected N={params.N}"
            )
        checks: list[tuple[str, complex]] = []
        for j, sj in enumerate(s.values, start=1):
            checks.append((f"s_{j}", sj))
            checks.append((f"2s_{j}+1", 2 * sj + 1))
            for k, sk in enumerate(s.values[j:], start=j + 1):
                checks.append((f"s_{j}-s_{k}", sj - sk))
                checks.append((f"s_{j}+s_{k}", sj + sk))
        for label, argument in checks:
            if abs(bracket(argument, params)) < tol:
                raise InvalidParameters(f"dynamical parameter not generic: [{label}] = 0")
        return s

    @property
    def N(self) -> int:
        return len(self.values)

    def lookup(self, j: int) -> complex:
        """s_j for j in the ordered index set, s_{-j} = -s_j and s_0 = -1/2"""
        if j == 0:
            return -0.5 + 0j
        if abs(j) > self.N:
            raise IndexError(f"index {j} outside rank {self.N}")
        value = self.values[abs(j) - 1]
        return value if j > 0 else -value

    def shifted(self, weight: np.ndarray) -> "DynamicalParam":
        """s + w for an integer vector in epsilon coordinates"""
        return DynamicalParam(
            values=tuple(v + complex(w) for v, w in zip(self.values, weight))
        )


class ModeVector(BaseModel):
    """Degree-m oscillator as coefficients over alpha_{1..N, m}"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    m: int
    coeffs: np.ndarray

    @field_validator("m")
    @classmethod
    def nonzero_degree(cls, value: int) -> int:
        if value == 0:
            raise ValueError("mode degree must be nonzero")
        return value

    @field_validator("coeffs", mode="before")
    @classmethod
    def as_complex_array(cls, value: Any) -> np.ndarray:
        return np.asarray(value, dtype=complex)

    def scaled(self, factor: complex) -> "ModeVector":
        return ModeVector(m=self.m, coeffs=self.coeffs * factor)
