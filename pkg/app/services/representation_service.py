from typing import Any, Callable

from app.core.face_checks import Residual
from app.core.shifted_matrix import associativity_residual
from app.core.vector_rep import VectorRepresentation
from app.models.domain import AlgebraParams, TruncationPolicy
from app.models.schemas.responses.report import CheckReport
from app.models.types.check_id import CheckId
from app.services.base_service import BaseCheckService, encode, encode_height


class RepresentationService(BaseCheckService):
    """Service for the L-operator image in the vector representation"""

    check_ids = (
        CheckId.REP_LR,
        CheckId.REP_PROOF_IDENTITIES,
        CheckId.H_DECOMPOSITION,
        CheckId.RELBASIC_HC,
        CheckId.SHIFTED_ASSOCIATIVITY,
    )

    def __init__(self, params: AlgebraParams, policy: TruncationPolicy | None = None, **kwargs: Any):
        # the representation has level zero, where starred and bare brackets agree
        super().__init__(params.at_level(0), policy, **kwargs)
        self.rep = VectorRepresentation(self.params, self.policy)

    def checks(self) -> dict[CheckId, Callable[[], CheckReport]]:
        return {
            CheckId.REP_LR: self.check_rep_lr,
            CheckId.REP_PROOF_IDENTITIES: self.check_proof_identities,
            CheckId.H_DECOMPOSITION: self.check_h_decomposition,
            CheckId.RELBASIC_HC: self.check_relbasic,
            CheckId.SHIFTED_ASSOCIATIVITY: self.check_associativity,
        }

    def check_rep_lr(self) -> CheckReport:
        """Gauss product F K E against the R-matrix, entry by entry"""
        residual = Residual()
        samples = []
        extra: dict[str, float | str] = {"normalized_relative": 0.0}
        for _ in range(self.samples):
            v, u, P = self.sample_u(), self.sample_u(0.5), self.sample_s()
            values = self.rep.rep_lr_residuals(v, u, P)
            residual.max_rel = max(residual.max_rel, values["max_relative"])
            residual.max_abs = residual.max_rel
            extra["normalized_relative"] = max(extra["normalized_relative"], values["normalized_relative"])
            if values["shift_mismatch"]:
                residual.max_rel = residual.max_abs = float("inf")
                residual.notes.append("an entry carries a dynamical shift other than -weight(j)")
            for name, value in self.rep.selected_entries(v, u, P).items():
                extra[name] = max(float(extra.get(name, 0.0)), value)
            samples.append({"v": encode(v), "u": encode(u), "P": encode_height(P)})
        return self.report(CheckId.REP_LR, residual, samples, extra)

    def check_proof_identities(self) -> CheckReport:
        residual = Residual()
        samples = []
        for _ in range(self.samples):
            x, P = self.sample_u(), self.sample_s()
            for value in self.rep.proof_identity_residuals(x, P).values():
                residual.max_rel = residual.max_abs = max(residual.max_rel, value)
            samples.append({"x": encode(x), "P": encode_height(P)})
        return self.report(CheckId.REP_PROOF_IDENTITIES, residual, samples)

    def check_h_decomposition(self) -> CheckReport:
        """H^+- images against K ratios for every j"""
        residual = Residual()
        samples = []
        for _ in range(self.samples):
            v, u, P = self.sample_u(), self.sample_u(0.5), self.sample_s()
            for sign in (1, -1):
                for j in range(1, self.params.N + 1):
                    value = self.rep.h_decomposition_residual(sign, j, v, u, P)
                    residual.max_rel = residual.max_abs = max(residual.max_rel, value)
            samples.append({"v": encode(v), "u": encode(u), "P": encode_height(P)})
        return self.report(CheckId.H_DECOMPOSITION, residual, samples)

    def check_relbasic(self) -> CheckReport:
        """Half current / K exchange for consecutive index pairs"""
        residual = Residual()
        samples = []
        pairs = self.rep.consecutive_pairs()
        if not pairs:
            residual.notes.append(f"no consecutive index pairs at N={self.params.N}")
        for _ in range(self.samples):
            u1, u2, u, P = self.sample_u(), self.sample_u(), self.sample_u(0.5), self.sample_s()
            for a, b in pairs:
                for value in self.rep.relbasic_residuals(a, b, u1, u2, u, P).values():
                    residual.max_rel = residual.max_abs = max(residual.max_rel, value)
            samples.append({"u": [encode(u1), encode(u2), encode(u)], "P": encode_height(P)})
        return self.report(CheckId.RELBASIC_HC, residual, samples)

    def check_associativity(self) -> CheckReport:
        """(A B) C = A (B C) for half-current images with different shifts"""
        residual = Residual()
        samples = []
        for _ in range(self.samples):
            x, P = self.sample_u(), self.sample_s()
            K, E, F = self.rep.half_currents(x)
            factors = [next(iter(K.values())), next(iter(E.values())), next(iter(F.values()))]
            value = associativity_residual(*factors, P)
            residual.max_rel = residual.max_abs = max(residual.max_rel, value)
            samples.append({"x": encode(x), "P": encode_height(P)})
        return self.report(CheckId.SHIFTED_ASSOCIATIVITY, residual, samples)
