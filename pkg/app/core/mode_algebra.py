"""Boson mode algebra of type B_N as finite coefficient vectors.

A degree-m oscillator is a vector over alpha_{1..N,m}; the commutator of
degree m and -m modes is the bilinear form given by ``gram``.
"""

import cmath
from dataclasses import dataclass
from functools import lru_cache
from enum import Enum

import numpy as np
from loguru import logger

from app.core.errors import DomainError, InvalidIndexPattern, NonConvergent
from app.core.mode_series import ModeVariable, NumericMode, SeriesMode
from app.core.special_functions import qnum, qnum_plus
from app.models.domain import AlgebraParams, ModeVector, TruncationPolicy
from app.models.types.fermion_sector import FermionSector

_ZERO = 1e-14


@dataclass(frozen=True)
class RootData:
    """Simple roots alpha_j = eps_j - eps_{j+1}, alpha_N = eps_N"""

    N: int
    b: np.ndarray

    @classmethod
    def for_rank(cls, N: int) -> "RootData":
        if N < 1:
            raise ValueError(f"rank must be positive, got {N}")
        roots = np.zeros((N, N))
        for j in range(N):
            roots[j, j] = 1.0
            if j + 1 < N:
                roots[j, j + 1] = -1.0
        return cls(N=N, b=roots @ roots.T)

    @property
    def symmetrizer(self) -> np.ndarray:
        d = np.ones(self.N)
        d[-1] = 0.5
        return np.diag(d)

    @property
    def cartan(self) -> np.ndarray:
        """Cartan matrix restricted to 1..N, so that b = D A"""
        return np.linalg.solve(self.symmetrizer, self.b)


def eps_to_alpha(weight: np.ndarray) -> np.ndarray:
    """Coordinates over simple roots of a vector given in the eps basis"""
    return np.cumsum(np.asarray(weight))


def _r_factor(m: int, params: AlgebraParams) -> complex:
    """(1 - p^m)/(1 - p*^m) q^{-cm}"""
    p_m = params.qpow(2 * params.r * m)
    p_star_m = params.qpow(2 * params.r_star * m)
    if abs(1 - p_star_m) < _ZERO:
        raise DomainError(f"1 - p*^{m} vanishes")
    return (1 - p_m) / (1 - p_star_m) * params.qpow(-params.c * m)


def gram(m: int, params: AlgebraParams) -> np.ndarray:
    """G_m(i,j) = [b_ij m][cm]/m (1-p^m)/(1-p*^m) q^{-cm}, read-only"""
    if m == 0:
        raise DomainError("gram is defined for nonzero degree only")
    return _gram_cached(m, params.key)


@lru_cache(maxsize=4096)
def _gram_cached(m: int, key: tuple[int, complex, complex, complex]) -> np.ndarray:
    N, q, r, c = key
    params = AlgebraParams(N=N, q=q, r=r, c=c)
    b = RootData.for_rank(N).b
    scale = qnum(c * m, params) / m * _r_factor(m, params)
    entries = np.array(
        [[qnum(x * m, params) for x in row] for row in b], dtype=complex
    )
    result = entries * scale
    result.setflags(write=False)
    return result


def gram_series(params: AlgebraParams) -> np.ndarray:
    """m * G_m for all m >= 1 as exponential sums, read-only"""
    return _gram_series_cached(params.key)


@lru_cache(maxsize=64)
def _gram_series_cached(key: tuple[int, complex, complex, complex]) -> np.ndarray:
    N, q, r, c = key
    params = AlgebraParams(N=N, q=q, r=r, c=c)
    mode = SeriesMode(params)
    b = RootData.for_rank(N).b
    scale = mode.qnum(c) * (1 - mode.qpow(2 * r)) / (1 - mode.qpow(2 * params.r_star)) * mode.qpow(-c)
    result = np.empty((N, N), dtype=object)
    for i in range(N):
        for j in range(N):
            result[i, j] = mode.qnum(b[i, j]) * scale
    result.setflags(write=False)
    return result


def _check_degree(m: int, params: AlgebraParams) -> None:
    if m == 0:
        raise DomainError("eps modes need nonzero degree")
    if abs(qnum(2 * params.eta * m, params)) < _ZERO:
        raise DomainError(f"[2 eta m] vanishes at m={m}")


def eps_modes(sign: int, j: int, mode: ModeVariable) -> np.ndarray:
    """Coefficients of eps^{+j}, eps^{-j} (sign = +1, -1) or eps^0 (sign = 0) on a degree variable"""
    params = mode.params
    N = params.N
    if sign == 0:
        ratio = mode.qnum(0.5) / mode.qnum(1)
        return (eps_modes(1, N, mode) + eps_modes(-1, N, mode)) * ratio
    if sign not in (1, -1) or not 1 <= j <= N:
        raise InvalidIndexPattern(f"eps label ({sign:+d}, {j}) outside rank {N}")
    eta = params.eta
    entries = [
        mode.qpow(sign * eta) * mode.qnum(k) if k < j else mode.qnum_plus(eta + k) * sign
        for k in range(1, N + 1)
    ]
    scale = mode.qpow(sign * j) * (mode.qnum(eta) / mode.qnum(2 * eta) / mode.qnum(1) / mode.qnum(1))
    return mode.vector(entries) * scale


def eps_coeffs(sign: int, j: int, m: int, params: AlgebraParams) -> np.ndarray:
    """Coefficients of eps^{+j}_m, eps^{-j}_m (sign = +1, -1) or eps^0_m (sign = 0)"""
    _check_degree(m, params)
    return eps_modes(sign, j, NumericMode(m, params))


def eps_vector(sign: int, j: int, m: int, params: AlgebraParams) -> ModeVector:
    return ModeVector(m=m, coeffs=eps_coeffs(sign, j, m, params))


def alpha_coeffs(j: int, N: int) -> np.ndarray:
    unit = np.zeros(N, dtype=complex)
    unit[j - 1] = 1
    return unit


def bilinear(x: np.ndarray, y: np.ndarray, m: int, params: AlgebraParams) -> complex:
    """[X_m, Y_{-m}] for coefficient vectors x, y"""
    return complex(x @ gram(m, params) @ y)


def commutator(X: ModeVector, Y: ModeVector, params: AlgebraParams) -> complex:
    if X.m + Y.m != 0:
        return 0j
    return bilinear(X.coeffs, Y.coeffs, X.m, params)


class CeceCase(str, Enum):
    """The five closed forms for commutators of eps modes"""

    DIAGONAL_SAME = "diagonal_same"
    DIAGONAL_OPPOSITE = "diagonal_opposite"
    OFF_SAME_FORWARD = "off_same_forward"
    OFF_SAME_BACKWARD = "off_same_backward"
    OFF_OPPOSITE = "off_opposite"

    @classmethod
    def classify(cls, sign_x: int, j: int, sign_y: int, k: int) -> "CeceCase":
        if j == k:
            return cls.DIAGONAL_SAME if sign_x == sign_y else cls.DIAGONAL_OPPOSITE
        if sign_x != sign_y:
            return cls.OFF_OPPOSITE
        return cls.OFF_SAME_FORWARD if k > j else cls.OFF_SAME_BACKWARD


def cece_closed(sign_x: int, j: int, sign_y: int, k: int, m: int, params: AlgebraParams) -> complex:
    """[eps^{sign_x j}_m, eps^{sign_y k}_{-m}] from the closed forms"""
    t = params.q - 1 / params.q
    eta = params.eta
    qm = qnum(m, params)
    common = (
        qnum(params.c * m, params)
        * qnum(eta * m, params)
        / (m * qnum(2 * eta * m, params))
        * _r_factor(m, params)
    )
    case = CeceCase.classify(sign_x, j, sign_y, k)
    s = sign_x
    if case is CeceCase.DIAGONAL_SAME:
        return (
            common
            * qnum(2 * (eta + 1) * m, params)
            / (t**2 * qm**3 * qnum((eta + 1) * m, params))
        )
    if case is CeceCase.DIAGONAL_OPPOSITE:
        bracketed = params.qpow(s * (eta + j) * m) * qm + s * params.qpow(
            -s * (j - 1) * m
        ) * qnum_plus(eta * m, params)
        return -s * params.qpow(s * j * m) * common / (qm**3 * t) * bracketed
    if case is CeceCase.OFF_OPPOSITE:
        return -s * params.qpow(s * (eta + j + k) * m) * common / (t * qm**2)
    sgn = 1 if k > j else -1
    return -s * sgn * params.qpow(-s * (sgn * eta + k - j) * m) * common / (t * qm**2)


def mixed_closed(kind: str, sign: int, i: int, j: int, m: int, params: AlgebraParams) -> complex:
    """Closed forms for eps modes against alpha modes and against e_j, f_j.

    alpha: [alpha_{i,m}, eps^{sign j}_{-m}]
    e, f:  coefficient of z^m in [eps^{sign i}_m, e_j(z)] e_j(z)^{-1}
    """
    delta = 1 if i == j else 0
    qmm = params.qpow(m) - params.qpow(-m)
    if kind == "alpha":
        below = 1 if i == j - 1 else 0
        return (
            sign
            * qnum(params.c * m, params)
            / (m * qmm)
            * _r_factor(m, params)
            * (params.qpow(-sign * m) * delta - below)
        )
    above = 1 if i - 1 == j else 0
    bracketed = params.qpow(sign * m) * delta - above
    if kind == "e":
        return sign * _r_factor(m, params) / (m * qmm) * bracketed
    if kind == "f":
        return -sign * bracketed / (m * qmm)
    raise InvalidIndexPattern(f"unknown mixed commutator kind {kind!r}")


def current_coefficient(kind: str, n: int, params: AlgebraParams) -> complex:
    """Oscillator coefficient of alpha_{j,n} z^{-n} in e_j (kind 'e') or f_j (kind 'f')"""
    cn = qnum(params.c * n, params)
    if kind == "e":
        return -1 / cn
    if kind == "f":
        p_n = params.qpow(2 * params.r * n)
        p_star_n = params.qpow(2 * params.r_star * n)
        return (1 - p_star_n) / (1 - p_n) * params.qpow(params.c * n) / cn
    raise InvalidIndexPattern(f"unknown current kind {kind!r}")


def mixed_engine(kind: str, sign: int, i: int, j: int, m: int, params: AlgebraParams) -> complex:
    """The same quantities as ``mixed_closed`` evaluated through the Gram form"""
    N = params.N
    if kind == "alpha":
        return bilinear(alpha_coeffs(i, N), eps_coeffs(sign, j, -m, params), m, params)
    weight = current_coefficient(kind, -m, params)
    return weight * bilinear(eps_coeffs(sign, i, m, params), alpha_coeffs(j, N), m, params)


def alpha_reconstruction(sign: int, j: int, m: int, params: AlgebraParams) -> np.ndarray:
    """alpha_{j,m} rebuilt from eps modes; equals the j-th unit vector"""
    N = params.N
    qm = qnum(m, params)
    t = params.q - 1 / params.q
    if j < N:
        return (
            sign
            * qm**2
            * t
            * (
                eps_coeffs(sign, j, m, params)
                - params.qpow(-sign * m) * eps_coeffs(sign, j + 1, m, params)
            )
        )
    half = params.qpow(m / 2) - params.qpow(-m / 2)
    return (
        qm
        * half
        * (
            params.qpow(-m / 2) * eps_coeffs(1, N, m, params)
            - params.qpow(m / 2) * eps_coeffs(-1, N, m, params)
        )
    )


def _fermion_norm(params: AlgebraParams) -> complex:
    return 1 / (params.qpow(0.5) + params.qpow(-0.5))


def fermion_contraction(
    sector: FermionSector,
    x: complex,
    params: AlgebraParams,
    policy: TruncationPolicy | None = None,
) -> complex:
    """<Psi(z) Psi(w)> as a mode sum in x = w/z"""
    policy = policy if policy is not None else TruncationPolicy.from_settings()
    if abs(x) >= abs(params.q) * policy.ratio_guard:
        raise NonConvergent(
            f"fermion contraction needs |x| < |q|, got |x|={abs(x):.6g}"
        )
    norm = _fermion_norm(params)
    if sector is FermionSector.R:
        total, start = norm, 1.0
    else:
        total, start = 0j, 0.5
    if x == 0:
        return total
    log_x = cmath.log(x)
    for n in range(policy.max_terms):
        mode = start + n
        term = norm * (params.qpow(mode) + params.qpow(-mode)) * cmath.exp(mode * log_x)
        total += term
        if abs(term) < policy.tol:
            return total
    logger.warning(f"fermion {sector.value} sum stalled after {policy.max_terms} terms")
    raise NonConvergent(f"fermion contraction not converged at x={x}")


def fermion_closed(sector: FermionSector, x: complex, params: AlgebraParams) -> complex:
    """Closed forms of the NS and R contractions"""
    q = params.q
    denominator = (1 - q * x) * (1 - x / q)
    if sector is FermionSector.R:
        return _fermion_norm(params) * (1 - x) * (1 + x) / denominator
    root = cmath.exp(0.5 * cmath.log(x)) if x != 0 else 0j
    return root * (1 - x) / denominator


