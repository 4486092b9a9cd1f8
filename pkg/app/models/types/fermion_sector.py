from enum import Enum


class FermionSector(str, Enum):
    """Moding of the level-one free fermion"""

    NS = "NS"  # half-integer modes
    R = "R"  # integer modes with a zero mode
