from enum import Enum


class CoefKind(str, Enum):
    """R-matrix coefficient functions"""

    B = "b"
    BBAR = "bbar"
    C = "c"
    CBAR = "cbar"
    D = "d"
    DBAR = "dbar"
    E = "e"
    E0 = "e0"
