from enum import Enum


class RelationFamily(str, Enum):
    """Families of exchange relations compared against closed forms"""

    KK = "kk"
    KEF = "kef"
    REL_KK = "rel_kk"
    REL_EK = "rel_ek"
    VERTEX_BARE = "vertex_bare"
    VERTEX_SUFFICIENT = "vertex_sufficient"
    VERTEX_INTERTWINING = "vertex_intertwining"

    @property
    def allows_gauge_constant(self) -> bool:
        """Whether a u-independent constant factor is tolerated"""
        return self in (RelationFamily.REL_KK, RelationFamily.REL_EK, RelationFamily.VERTEX_INTERTWINING)
