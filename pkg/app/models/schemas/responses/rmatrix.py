from app.core.schema import BaseSchema
from app.models.types.prefactor_mode import PrefactorMode


class MatrixEntry(BaseSchema):
    """Entry ((i, j), (k, l)) of an R-matrix"""

    row: tuple[int, int]
    col: tuple[int, int]
    re: float
    im: float


class RMatrixValueSchema(BaseSchema):
    N: int
    u: tuple[float, float]
    s: list[tuple[float, float]]
    prefactor_mode: PrefactorMode
    scalar: tuple[float, float]
    entries: list[MatrixEntry]
