from enum import Enum


class PrefactorMode(str, Enum):
    """How the scalar prefactor enters an assembled R-matrix"""

    NONE = "none"
    RHO0 = "rho0"
    # matrix stays bare, rho_hat(u)^2 is recorded in metadata
    RHO_HAT_SQUARED = "rho_hat_squared"
