"""Matrices over functions of P with trailing e^{Q} shifts.

An entry (f, beta) stands for f(P) e^{Q_beta}; since e^{Q_beta} f(P) =
f(P - beta) e^{Q_beta}, products compose as (f1 f2(P - beta1), beta1 + beta2).
"""

from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from app.core.errors import ChargeMismatch, InvalidIndexPattern
from app.models.domain import DynamicalParam

PFunction = Callable[[DynamicalParam], complex]


def constant(value: complex) -> PFunction:
    """The function of P that is identically value"""
    return lambda P: value


def _move(P: DynamicalParam, shift: tuple[int, ...], sign: int) -> DynamicalParam:
    if not any(shift):
        return P
    return P.shifted(sign * np.array(shift))


@dataclass(frozen=True)
class ShiftedEntry:
    func: PFunction
    shift: tuple[int, ...]

    @classmethod
    def constant(cls, value: complex, N: int) -> "ShiftedEntry":
        return cls(constant(value), (0,) * N)

    def __call__(self, P: DynamicalParam) -> complex:
        return complex(self.func(P))

    def times(self, other: "ShiftedEntry") -> "ShiftedEntry":
        f1, f2, beta = self.func, other.func, self.shift
        shift = tuple(a + b for a, b in zip(self.shift, other.shift))
        return ShiftedEntry(lambda P: f1(P) * f2(_move(P, beta, -1)), shift)

    def plus(self, other: "ShiftedEntry") -> "ShiftedEntry":
        if self.shift != other.shift:
            raise ChargeMismatch(f"adding entries with shifts {self.shift} and {other.shift}")
        f1, f2 = self.func, other.func
        return ShiftedEntry(lambda P: f1(P) + f2(P), self.shift)

    def scaled_left(self, g: PFunction) -> "ShiftedEntry":
        """g(P) f(P) e^{Q_beta}"""
        f = self.func
        return ShiftedEntry(lambda P: g(P) * f(P), self.shift)

    def scaled_right(self, g: PFunction) -> "ShiftedEntry":
        """f(P) e^{Q_beta} g(P)"""
        f, beta = self.func, self.shift
        return ShiftedEntry(lambda P: f(P) * g(_move(P, beta, -1)), self.shift)

    def inverse(self) -> "ShiftedEntry":
        """(f e^{Q_beta})^{-1} = (1 / f(P + beta)) e^{-Q_beta}"""
        f, beta = self.func, self.shift
        return ShiftedEntry(lambda P: 1 / f(_move(P, beta, 1)), tuple(-b for b in beta))

    def flanked(self, left: tuple[int, ...], right: tuple[int, ...]) -> "ShiftedEntry":
        """e^{Q_left} f(P) e^{Q_right}"""
        f = self.func
        shift = tuple(a + b + c for a, b, c in zip(left, self.shift, right))
        return ShiftedEntry(lambda P: f(_move(P, left, -1)), shift)


class ShiftedMatrix:
    """Sparse matrix over labels of the ordered index set"""

    def __init__(self, N: int, entries: dict[tuple[int, int], ShiftedEntry] | None = None):
        self.N = N
        self.entries: dict[tuple[int, int], ShiftedEntry] = dict(entries or {})

    @property
    def labels(self) -> list[int]:
        return list(range(1, self.N + 1)) + [0] + list(range(-self.N, 0))

    @classmethod
    def identity(cls, N: int) -> "ShiftedMatrix":
        matrix = cls(N)
        for a in matrix.labels:
            matrix.entries[(a, a)] = ShiftedEntry.constant(1, N)
        return matrix

    @classmethod
    def diagonal(cls, N: int, values: dict[int, PFunction], shift: tuple[int, ...]) -> "ShiftedMatrix":
        return cls(N, {(a, a): ShiftedEntry(f, shift) for a, f in values.items()})

    def __getitem__(self, key: tuple[int, int]) -> ShiftedEntry | None:
        return self.entries.get(key)

    def __matmul__(self, other: "ShiftedMatrix") -> "ShiftedMatrix":
        if self.N != other.N:
            raise InvalidIndexPattern("rank mismatch in shifted product")
        by_row: dict[int, list[tuple[int, ShiftedEntry]]] = {}
        for (b, c), entry in other.entries.items():
            by_row.setdefault(b, []).append((c, entry))
        result = ShiftedMatrix(self.N)
        for (a, b), left in self.entries.items():
            for c, right in by_row.get(b, []):
                result.add_to((a, c), left.times(right))
        return result

    def add_to(self, key: tuple[int, int], entry: ShiftedEntry) -> None:
        current = self.entries.get(key)
        self.entries[key] = entry if current is None else current.plus(entry)

    def __add__(self, other: "ShiftedMatrix") -> "ShiftedMatrix":
        result = ShiftedMatrix(self.N, self.entries)
        for key, entry in other.entries.items():
            result.add_to(key, entry)
        return result

    def __neg__(self) -> "ShiftedMatrix":
        return self.scaled_left(constant(-1))

    def __sub__(self, other: "ShiftedMatrix") -> "ShiftedMatrix":
        return self + (-other)

    def scaled_left(self, g: PFunction) -> "ShiftedMatrix":
        return ShiftedMatrix(self.N, {k: e.scaled_left(g) for k, e in self.entries.items()})

    def scaled_right(self, g: PFunction) -> "ShiftedMatrix":
        return ShiftedMatrix(self.N, {k: e.scaled_right(g) for k, e in self.entries.items()})

    def scaled_rows(self, g: Callable[[int, DynamicalParam], complex]) -> "ShiftedMatrix":
        """g(a, P) times row a, for functions of P + h with h read on the row"""
        return ShiftedMatrix(
            self.N, {(a, b): e.scaled_left(lambda P, a=a: g(a, P)) for (a, b), e in self.entries.items()}
        )

    def flanked(self, left: tuple[int, ...], right: tuple[int, ...]) -> "ShiftedMatrix":
        return ShiftedMatrix(self.N, {k: e.flanked(left, right) for k, e in self.entries.items()})

    def inverse_diagonal(self) -> "ShiftedMatrix":
        if any(a != b for a, b in self.entries):
            raise InvalidIndexPattern("inverse_diagonal needs a diagonal matrix")
        if len(self.entries) != 2 * self.N + 1:
            raise InvalidIndexPattern("diagonal matrix is singular")
        return ShiftedMatrix(self.N, {k: e.inverse() for k, e in self.entries.items()})

    def evaluate(self, P: DynamicalParam) -> np.ndarray:
        """Function parts at P, rows and columns in the index order"""
        labels = self.labels
        position = {a: i for i, a in enumerate(labels)}
        out = np.zeros((len(labels), len(labels)), dtype=complex)
        for (a, b), entry in self.entries.items():
            out[position[a], position[b]] = entry(P)
        return out

    def shifts(self) -> dict[tuple[int, int], tuple[int, ...]]:
        return {k: e.shift for k, e in self.entries.items()}


def product(factors: Iterable[ShiftedMatrix]) -> ShiftedMatrix:
    factors = list(factors)
    result = factors[0]
    for factor in factors[1:]:
        result = result @ factor
    return result


def associativity_residual(a: ShiftedMatrix, b: ShiftedMatrix, c: ShiftedMatrix, P: DynamicalParam) -> float:
    """Largest entry of (ab)c - a(bc) at P, relative to the product scale"""
    left = ((a @ b) @ c).evaluate(P)
    right = (a @ (b @ c)).evaluate(P)
    scale = max(float(np.max(np.abs(left))), 1e-300)
    return float(np.max(np.abs(left - right))) / scale
