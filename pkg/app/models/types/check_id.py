from enum import Enum


class CheckId(str, Enum):
    """Identifiers of every verification report"""

    # special functions
    THETA_TRIPLE_PRODUCT = "theta_triple_product"
    THETA_SYMMETRY = "theta_symmetry"
    BRACKET_IDENTITIES = "bracket_identities"

    # mode algebra
    GRAM_ANTISYMMETRY = "gram_antisymmetry"
    CECE_COMMUTATORS = "cece_commutators"
    ALPHA_RECONSTRUCTION = "alpha_reconstruction"
    MIXED_COMMUTATORS = "mixed_commutators"
    FERMION_CONTRACTION = "fermion_contraction"

    # exchange engine
    EXCHANGE_KK = "exchange_kk"
    EXCHANGE_KEF = "exchange_kef"
    EXCHANGE_REL_KK = "exchange_rel_kk"
    EXCHANGE_REL_EK = "exchange_rel_ek"
    PSIKK_DECOMPOSITION = "psikk_decomposition"

    # R-matrix and face identities
    R_INITIAL_CONDITION = "r_initial_condition"
    WEIGHT_CONSERVATION = "weight_conservation"
    BBAR_SPREAD = "bbar_spread"
    G_INVERSION = "g_inversion"
    PREFACTOR_PHI = "prefactor_phi"
    UNITARITY = "unitarity"
    CROSSING = "crossing"
    REFLECTION = "reflection"
    INVERSION2 = "inversion2"
    RHO_INVERSION = "rho_inversion"
    DYBE = "dybe"

    # vector representation
    REP_LR = "rep_lr"
    REP_PROOF_IDENTITIES = "rep_proof_identities"
    H_DECOMPOSITION = "h_decomposition"
    RELBASIC_HC = "relbasic_hc"
    SHIFTED_ASSOCIATIVITY = "shifted_associativity"

    # vertex operators
    VERTEX_PHI_PHI = "vertex_phi_phi"
    VERTEX_PSI_PSI = "vertex_psi_psi"
    VERTEX_PHI_PSI = "vertex_phi_psi"
    VERTEX_SUFFICIENT = "vertex_sufficient"
    VERTEX_INTERTWINING = "vertex_intertwining"

    @property
    def default_tolerance(self) -> float:
        """Largest relative residual accepted by default"""
        return _DEFAULT_TOLERANCES.get(self, 1e-10)


_DEFAULT_TOLERANCES: dict[CheckId, float] = {
    CheckId.THETA_TRIPLE_PRODUCT: 1e-12,
    CheckId.THETA_SYMMETRY: 1e-12,
    CheckId.BRACKET_IDENTITIES: 1e-12,
    CheckId.GRAM_ANTISYMMETRY: 1e-12,
    CheckId.CECE_COMMUTATORS: 1e-10,
    CheckId.ALPHA_RECONSTRUCTION: 1e-12,
    CheckId.EXCHANGE_KK: 1e-8,
    CheckId.EXCHANGE_KEF: 1e-8,
    CheckId.EXCHANGE_REL_KK: 1e-8,
    CheckId.EXCHANGE_REL_EK: 1e-8,
    CheckId.PSIKK_DECOMPOSITION: 1e-12,
    CheckId.R_INITIAL_CONDITION: 1e-12,
    CheckId.WEIGHT_CONSERVATION: 0.0,
    CheckId.BBAR_SPREAD: 1e-14,
    CheckId.UNITARITY: 1e-9,
    CheckId.CROSSING: 1e-9,
    CheckId.INVERSION2: 1e-9,
    CheckId.DYBE: 1e-9,
    CheckId.REP_PROOF_IDENTITIES: 1e-12,
    CheckId.SHIFTED_ASSOCIATIVITY: 1e-12,
    CheckId.VERTEX_PHI_PHI: 1e-8,
    CheckId.VERTEX_PSI_PSI: 1e-8,
    CheckId.VERTEX_PHI_PSI: 1e-8,
    CheckId.VERTEX_SUFFICIENT: 1e-8,
    CheckId.VERTEX_INTERTWINING: 1e-8,
}
