"""Oscillator coefficients as exponential sums in the mode degree.

Every oscillator law is built from q-numbers, powers of q and the nome
factors 1 - p^m, 1 - p*^m. Evaluated on a ``NumericMode`` a law gives the
coefficient at one integer degree; evaluated on a ``SeriesMode`` the same
law gives an ``ExpSum`` sum_i c_i q^{a_i s m}, valid for every m >= 1.
Reciprocals are expanded as geometric series, so a contraction with
m * kappa_m = sum_i c_i lambda_i^m sums to -sum_i c_i log(1 - lambda_i x)
and continues past the radius of convergence of the mode sum.
"""

import math
import numbers
from dataclasses import dataclass
from typing import Protocol

import numpy as np
from loguru import logger

from app.core.errors import DomainError, NonConvergent
from app.core.special_functions import qnum, qnum_plus
from app.models.domain import AlgebraParams

_GRID = 1e9
_FLOOR = 1e-20
_MAX_GEOMETRIC = 2000


class ExpSum:
    """sum_i coeffs[i] * q^{exponents[i] m} as a function of m >= 1"""

    __slots__ = ("exponents", "coeffs", "log_q")

    def __init__(self, exponents, coeffs, log_q: complex):
        self.exponents = np.asarray(exponents, dtype=complex).reshape(-1)
        self.coeffs = np.asarray(coeffs, dtype=complex).reshape(-1)
        self.log_q = complex(log_q)

    @classmethod
    def constant(cls, value: complex, log_q: complex) -> "ExpSum":
        return cls([0j], [value], log_q)._normalized()

    @property
    def size(self) -> int:
        return int(self.coeffs.size)

    def magnitudes(self) -> np.ndarray:
        """|c_i q^{a_i}|, the size of each term at m = 1"""
        return np.abs(self.coeffs) * np.exp((self.exponents * self.log_q).real)

    def _normalized(self) -> "ExpSum":
        """Merge equal exponents and drop terms below the floor"""
        if self.size == 0:
            return self
        keys = np.round(self.exponents.real * _GRID) + 1j * np.round(self.exponents.imag * _GRID)
        _, first, inverse = np.unique(keys, return_index=True, return_inverse=True)
        inverse = np.asarray(inverse).reshape(-1)
        real = np.bincount(inverse, weights=self.coeffs.real, minlength=first.size)
        imag = np.bincount(inverse, weights=self.coeffs.imag, minlength=first.size)
        merged = ExpSum(self.exponents[first], real + 1j * imag, self.log_q)
        keep = merged.magnitudes() > _FLOOR
        return ExpSum(merged.exponents[keep], merged.coeffs[keep], self.log_q)

    def _lift(self, other) -> "ExpSum | None":
        if isinstance(other, ExpSum):
            return other
        if isinstance(other, numbers.Number):
            return ExpSum.constant(complex(other), self.log_q)
        return None

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return ExpSum(
            np.concatenate([self.exponents, other.exponents]),
            np.concatenate([self.coeffs, other.coeffs]),
            self.log_q,
        )._normalized()

    __radd__ = __add__

    def __neg__(self) -> "ExpSum":
        return ExpSum(self.exponents, -self.coeffs, self.log_q)

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, numbers.Number):
            return ExpSum(self.exponents, self.coeffs * complex(other), self.log_q)._normalized()
        if not isinstance(other, ExpSum):
            return NotImplemented
        small, large = (self, other) if self.size <= other.size else (other, self)
        if small.size == 0:
            return ExpSum([], [], self.log_q)
        large_mag = large.magnitudes()
        order = np.argsort(large_mag)
        ascending = large_mag[order]
        exponents: list[np.ndarray] = []
        coeffs: list[np.ndarray] = []
        for exponent, coeff, mag in zip(small.exponents, small.coeffs, small.magnitudes()):
            if mag == 0:
                continue
            start = np.searchsorted(ascending, _FLOOR / mag, side="right")
            chosen = order[start:]
            if chosen.size == 0:
                continue
            exponents.append(exponent + large.exponents[chosen])
            coeffs.append(coeff * large.coeffs[chosen])
        if not exponents:
            return ExpSum([], [], self.log_q)
        return ExpSum(np.concatenate(exponents), np.concatenate(coeffs), self.log_q)._normalized()

    __rmul__ = __mul__

    def reciprocal(self) -> "ExpSum":
        """1/self for one or two terms, as a geometric series in the degree"""
        if self.size == 0:
            raise DomainError("reciprocal of a vanishing exponential sum")
        if self.size == 1:
            return ExpSum(-self.exponents, 1 / self.coeffs, self.log_q)
        if self.size > 2:
            raise DomainError(f"reciprocal of a sum with {self.size} terms")
        growth = (self.exponents * self.log_q).real
        lead, rest = (0, 1) if growth[0] >= growth[1] else (1, 0)
        step = self.exponents[rest] - self.exponents[lead]
        ratio = -self.coeffs[rest] / self.coeffs[lead]
        decay = abs(ratio) * math.exp((step * self.log_q).real)
        if decay >= 1:
            raise NonConvergent(f"geometric expansion ratio {decay:.4g} is not below 1")
        base = abs(1 / self.coeffs[lead]) * math.exp((-self.exponents[lead] * self.log_q).real)
        count = 1
        if decay > 0 and base > _FLOOR:
            count = int(math.ceil(math.log(_FLOOR / base) / math.log(decay))) + 1
        if count > _MAX_GEOMETRIC:
            raise NonConvergent(f"geometric expansion needs {count} terms")
        k = np.arange(max(count, 1))
        return ExpSum(
            -self.exponents[lead] + k * step,
            ratio**k / self.coeffs[lead],
            self.log_q,
        )._normalized()

    def __truediv__(self, other):
        if isinstance(other, numbers.Number):
            return self * (1 / complex(other))
        if not isinstance(other, ExpSum):
            return NotImplemented
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        if not isinstance(other, numbers.Number):
            return NotImplemented
        return self.reciprocal() * complex(other)

    def value(self, m: int) -> complex:
        return complex(np.sum(self.coeffs * np.exp(self.exponents * m * self.log_q)))

    def log_series(self, x: complex) -> complex:
        """sum_{m>=1} self(m) x^m / m continued along the ray from 0 to x"""
        points = np.exp(self.exponents * self.log_q) * x
        if np.any(np.abs(1 - points) < 1e-13):
            raise DomainError(f"x = {x} sits on a branch point of the continued contraction")
        return complex(-np.sum(self.coeffs * np.log(1 - points)))

    def __repr__(self) -> str:
        return f"ExpSum({self.size} terms)"


class ModeVariable(Protocol):
    """Degree variable on which oscillator laws are evaluated"""

    params: AlgebraParams

    def qpow(self, a: complex): ...

    def qnum(self, x: complex): ...

    def qnum_plus(self, x: complex): ...

    def vector(self, entries: list) -> np.ndarray: ...


@dataclass(frozen=True)
class NumericMode:
    """A single integer degree m"""

    m: int
    params: AlgebraParams

    def qpow(self, a: complex) -> complex:
        return self.params.qpow(a * self.m)

    def qnum(self, x: complex) -> complex:
        return qnum(x * self.m, self.params)

    def qnum_plus(self, x: complex) -> complex:
        return qnum_plus(x * self.m, self.params)

    def vector(self, entries: list) -> np.ndarray:
        return np.array(entries, dtype=complex)


@dataclass(frozen=True)
class SeriesMode:
    """The degree s*m for every m >= 1 at once, s = +1 or -1"""

    params: AlgebraParams
    sign: int = 1

    def qpow(self, a: complex) -> ExpSum:
        return ExpSum([self.sign * a], [1 + 0j], self.params.log_q)

    def qnum(self, x: complex) -> ExpSum:
        t = self.params.q - 1 / self.params.q
        return (self.qpow(x) - self.qpow(-x)) / t

    def qnum_plus(self, x: complex) -> ExpSum:
        t = self.params.q - 1 / self.params.q
        return (self.qpow(x) + self.qpow(-x)) / t

    def vector(self, entries: list) -> np.ndarray:
        out = np.empty(len(entries), dtype=object)
        for k, entry in enumerate(entries):
            out[k] = entry if isinstance(entry, ExpSum) else ExpSum.constant(complex(entry), self.params.log_q)
        return out


def _as_series(value, log_q: complex) -> ExpSum:
    return value if isinstance(value, ExpSum) else ExpSum.constant(complex(value), log_q)


def series_bilinear(x: np.ndarray, y: np.ndarray, gram_rows: np.ndarray, log_q: complex) -> ExpSum:
    """sum_ij x_i G_ij y_j over object arrays of exponential sums"""
    x = [_as_series(v, log_q) for v in x]
    y = [_as_series(v, log_q) for v in y]
    total: ExpSum | None = None
    N = len(x)
    for i in range(N):
        if x[i].size == 0:
            continue
        for j in range(N):
            if gram_rows[i][j].size == 0 or y[j].size == 0:
                continue
            term = x[i] * gram_rows[i][j] * y[j]
            total = term if total is None else total + term
    if total is None:
        return ExpSum([], [], log_q)
    logger.debug(f"series bilinear form with {total.size} terms")
    return total


def is_integral(series: ExpSum, tol: float = 1e-8) -> bool:
    """Whether every coefficient is an integer, making the continuation single-valued"""
    return bool(np.all(np.abs(series.coeffs - np.round(series.coeffs.real)) < tol))
