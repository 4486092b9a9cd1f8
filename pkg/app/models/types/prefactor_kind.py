from enum import Enum


class PrefactorKind(str, Enum):
    """Scalar prefactors of the R-matrix and of vertex-operator exchanges"""

    RHO0 = "rho0"
    RHO0_STAR = "rho0_star"
    RHO_TILDE = "rho_tilde"
    RHO_TILDE_STAR = "rho_tilde_star"
    RHO_HAT = "rho_hat"
    CFUN = "Cfun"
    MU = "mu"
    MU_STAR = "mu_star"
    CHI = "chi"
    PHI = "phi"
