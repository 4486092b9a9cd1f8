from typing import Callable

import numpy as np

from app.core.face_checks import Residual
from app.core.mode_algebra import (
    alpha_coeffs,
    alpha_reconstruction,
    bilinear,
    cece_closed,
    eps_coeffs,
    fermion_closed,
    fermion_contraction,
    gram,
    mixed_closed,
    mixed_engine,
)
from app.models.schemas.responses.report import CheckReport
from app.models.types.check_id import CheckId
from app.models.types.fermion_sector import FermionSector
from app.services.base_service import BaseCheckService, encode

MODES = range(1, 7)


class ModeAlgebraService(BaseCheckService):
    """Service for boson commutators and fermion contractions"""

    check_ids = (
        CheckId.GRAM_ANTISYMMETRY,
        CheckId.CECE_COMMUTATORS,
        CheckId.ALPHA_RECONSTRUCTION,
        CheckId.MIXED_COMMUTATORS,
        CheckId.FERMION_CONTRACTION,
    )

    def checks(self) -> dict[CheckId, Callable[[], CheckReport]]:
        return {
            CheckId.GRAM_ANTISYMMETRY: self.check_gram,
            CheckId.CECE_COMMUTATORS: self.check_cece,
            CheckId.ALPHA_RECONSTRUCTION: self.check_alpha_reconstruction,
            CheckId.MIXED_COMMUTATORS: self.check_mixed,
            CheckId.FERMION_CONTRACTION: self.check_fermions,
        }

    def check_gram(self) -> CheckReport:
        """gram(m) is symmetric and odd in m"""
        residual = Residual()
        for m in MODES:
            G = gram(m, self.params)
            scale = float(np.max(np.abs(G)))
            for lhs, rhs in zip(G.ravel(), G.T.ravel()):
                residual.add(lhs, rhs, scale)
            for lhs, rhs in zip(gram(-m, self.params).ravel(), (-G).ravel()):
                residual.add(lhs, rhs, scale)
        return self.report(CheckId.GRAM_ANTISYMMETRY, residual, [{"modes": list(MODES)}])

    def check_cece(self) -> CheckReport:
        """All eps^{+-j}_m against eps^{+-k}_{-m} commutators"""
        params = self.params
        N = params.N
        residual = Residual()
        for m in MODES:
            for sx in (1, -1):
                for sy in (1, -1):
                    for j in range(1, N + 1):
                        for k in range(1, N + 1):
                            engine = bilinear(eps_coeffs(sx, j, m, params), eps_coeffs(sy, k, -m, params), m, params)
                            residual.add(engine, cece_closed(sx, j, sy, k, m, params))
        return self.report(CheckId.CECE_COMMUTATORS, residual, [{"modes": list(MODES)}])

    def check_alpha_reconstruction(self) -> CheckReport:
        params = self.params
        residual = Residual()
        for m in MODES:
            for sign in (1, -1):
                for j in range(1, params.N + 1):
                    rebuilt = alpha_reconstruction(sign, j, m, params)
                    for lhs, rhs in zip(rebuilt, alpha_coeffs(j, params.N)):
                        residual.add(lhs, rhs, 1.0)
        return self.report(CheckId.ALPHA_RECONSTRUCTION, residual, [{"modes": list(MODES)}])

    def check_mixed(self) -> CheckReport:
        """eps modes against alpha modes and the e_j, f_j oscillators"""
        params = self.params
        N = params.N
        residual = Residual()
        extra: dict[str, float | str] = {}
        for kind in ("alpha", "e", "f"):
            part = Residual()
            for m in MODES:
                for sign in (1, -1):
                    for i in range(1, N + 1):
                        for j in range(1, N + 1):
                            closed = mixed_closed(kind, sign, i, j, m, params)
                            engine = mixed_engine(kind, sign, i, j, m, params)
                            scale = max(abs(mixed_closed(kind, sign, j, j, m, params)), 1e-300)
                            part.add(engine, closed, scale)
            extra[kind] = part.max_rel
            residual.merge(part)
        return self.report(CheckId.MIXED_COMMUTATORS, residual, [{"modes": list(MODES)}], extra)

    def check_fermions(self) -> CheckReport:
        """NS and R mode sums against their closed forms for |x| < |q|"""
        residual = Residual()
        samples = []
        radius = abs(self.params.q) * 0.8
        for _ in range(self.samples):
            x = self.rng.uniform(0.1, radius) * np.exp(1j * self.rng.uniform(-2.5, 2.5))
            for sector in FermionSector:
                residual.add(
                    fermion_contraction(sector, x, self.params, self.policy),
                    fermion_closed(sector, x, self.params),
                )
            samples.append({"x": encode(complex(x))})
        return self.report(CheckId.FERMION_CONTRACTION, residual, samples)
