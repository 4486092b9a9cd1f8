from enum import Enum

from app.models.types.check_id import CheckId


class Suite(str, Enum):
    """Named groups of checks selectable from the command line"""

    SPECIAL = "special"
    MODES = "modes"
    EXCHANGE = "exchange"
    FACE = "face"
    DYBE = "dybe"
    REP_LR = "repLR"
    VERTEX = "vertex"
    ALL = "all"

    @classmethod
    def parse(cls, text: str) -> list["Suite"]:
        """Parse a comma separated suite list, expanding 'all'"""
        suites = [cls(part.strip()) for part in text.split(",") if part.strip()]
        if not suites:
            raise ValueError("empty suite selection")
        if cls.ALL in suites:
            return [s for s in cls if s is not cls.ALL]
        return list(dict.fromkeys(suites))

    def check_ids(self) -> list[CheckId]:
        """Checks produced by this suite"""
        if self is Suite.ALL:
            return list(CheckId)
        return [c for c in CheckId if _SUITE_OF[c] is self]


_SUITE_OF: dict[CheckId, Suite] = {
    CheckId.THETA_TRIPLE_PRODUCT: Suite.SPECIAL,
    CheckId.THETA_SYMMETRY: Suite.SPECIAL,
    CheckId.BRACKET_IDENTITIES: Suite.SPECIAL,
    CheckId.GRAM_ANTISYMMETRY: Suite.MODES,
    CheckId.CECE_COMMUTATORS: Suite.MODES,
    CheckId.ALPHA_RECONSTRUCTION: Suite.MODES,
    CheckId.MIXED_COMMUTATORS: Suite.MODES,
    CheckId.FERMION_CONTRACTION: Suite.MODES,
    CheckId.EXCHANGE_KK: Suite.EXCHANGE,
    CheckId.EXCHANGE_KEF: Suite.EXCHANGE,
    CheckId.EXCHANGE_REL_KK: Suite.EXCHANGE,
    CheckId.EXCHANGE_REL_EK: Suite.EXCHANGE,
    CheckId.PSIKK_DECOMPOSITION: Suite.EXCHANGE,
    CheckId.R_INITIAL_CONDITION: Suite.FACE,
    CheckId.WEIGHT_CONSERVATION: Suite.FACE,
    CheckId.BBAR_SPREAD: Suite.FACE,
    CheckId.G_INVERSION: Suite.FACE,
    CheckId.PREFACTOR_PHI: Suite.FACE,
    CheckId.UNITARITY: Suite.FACE,
    CheckId.CROSSING: Suite.FACE,
    CheckId.REFLECTION: Suite.FACE,
    CheckId.INVERSION2: Suite.FACE,
    CheckId.RHO_INVERSION: Suite.FACE,
    CheckId.DYBE: Suite.DYBE,
    CheckId.REP_LR: Suite.REP_LR,
    CheckId.REP_PROOF_IDENTITIES: Suite.REP_LR,
    CheckId.H_DECOMPOSITION: Suite.REP_LR,
    CheckId.RELBASIC_HC: Suite.REP_LR,
    CheckId.SHIFTED_ASSOCIATIVITY: Suite.REP_LR,
    CheckId.VERTEX_PHI_PHI: Suite.VERTEX,
    CheckId.VERTEX_PSI_PSI: Suite.VERTEX,
    CheckId.VERTEX_PHI_PSI: Suite.VERTEX,
    CheckId.VERTEX_SUFFICIENT: Suite.VERTEX,
    CheckId.VERTEX_INTERTWINING: Suite.VERTEX,
}
