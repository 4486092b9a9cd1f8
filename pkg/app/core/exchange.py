"""Normal-ordered exponentials and their exchange ratios.

An operator is an oscillator exponential times zero modes
e^{beta} e^{Q_kappa} X^{(gamma, h) + (delta*, P)/r* + (delta, P+h)/r + const},
with X = q^{2(u + offset)}. Reordering A(u_A) B(u_B) into B A produces the
scalar contraction ratio times the zero-mode factor computed here.
"""

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import numpy as np
from loguru import logger

from app.core.errors import ChargeMismatch, NonConvergent
from app.core.mode_algebra import RootData, alpha_coeffs, bilinear, eps_modes, eps_to_alpha, gram_series
from app.core.mode_series import ExpSum, ModeVariable, NumericMode, SeriesMode, is_integral, series_bilinear
from app.core.special_functions import cpow
from app.models.domain import AlgebraParams, TruncationPolicy

OscillatorLaw = Callable[[ModeVariable], np.ndarray]


@dataclass(frozen=True)
class RationalExponent:
    """const + per_r / r + per_r_star / r* with exact rational coefficients"""

    const: Fraction = Fraction(0)
    per_r: Fraction = Fraction(0)
    per_r_star: Fraction = Fraction(0)

    def __add__(self, other: "RationalExponent") -> "RationalExponent":
        return RationalExponent(
            self.const + other.const,
            self.per_r + other.per_r,
            self.per_r_star + other.per_r_star,
        )

    def __neg__(self) -> "RationalExponent":
        return RationalExponent(-self.const, -self.per_r, -self.per_r_star)

    def __sub__(self, other: "RationalExponent") -> "RationalExponent":
        return self + (-other)

    @property
    def is_integral(self) -> bool:
        """No fractional power of the argument survives"""
        return self.per_r == 0 and self.per_r_star == 0 and self.const.denominator == 1

    def value(self, params: AlgebraParams) -> complex:
        return (
            float(self.const)
            + float(self.per_r) / params.r
            + float(self.per_r_star) / params.r_star
        )

    def __str__(self) -> str:
        return f"{self.const} + ({self.per_r})/r + ({self.per_r_star})/r*"


def _pair(a: tuple[Fraction, ...], b: tuple[Fraction, ...]) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


@dataclass(frozen=True)
class ZeroModes:
    """Zero-mode monomial; every vector is in epsilon coordinates"""

    charge: tuple[Fraction, ...]
    hpow: tuple[Fraction, ...]
    ppow_star: tuple[Fraction, ...]
    ppow: tuple[Fraction, ...]
    qshift: tuple[Fraction, ...]
    const: RationalExponent = RationalExponent()
    offset: complex = 0j
    weight_charge: bool = False

    @classmethod
    def trivial(cls, N: int) -> "ZeroModes":
        zero = tuple(Fraction(0) for _ in range(N))
        return cls(zero, zero, zero, zero, zero)

    @property
    def N(self) -> int:
        return len(self.charge)

    def exponent_value(self, P: np.ndarray, h: np.ndarray, params: AlgebraParams) -> complex:
        """Exponent of X at numeric eigenvalues P, h"""
        hp = np.array([float(v) for v in self.hpow])
        dps = np.array([float(v) for v in self.ppow_star])
        dp = np.array([float(v) for v in self.ppow])
        return (
            complex(hp @ h)
            + complex(dps @ P) / params.r_star
            + complex(dp @ (P + h)) / params.r
            + self.const.value(params)
        )

    def value(self, u: complex, P: np.ndarray, h: np.ndarray, params: AlgebraParams) -> complex:
        return cpow(u + self.offset, self.exponent_value(P, h, params), params)


@dataclass(frozen=True)
class OperatorDescriptor:
    """Oscillator law a(m) (coefficient of alpha_{.,m} z^{-m} at argument
    q^{2 osc_offset} z) together with zero modes"""

    name: str
    osc: OscillatorLaw
    zero: ZeroModes
    osc_offset: complex = 0j

    def coefficient(self, m: int, params: AlgebraParams) -> np.ndarray:
        """Coefficient of z^{-m} including the argument shift"""
        return self.osc(NumericMode(m, params)) * params.qpow(-2 * m * self.osc_offset)

    def series_coefficient(self, mode: SeriesMode) -> np.ndarray:
        """The same coefficient for every degree at once"""
        return self.osc(mode) * mode.qpow(-2 * self.osc_offset)


@dataclass(frozen=True)
class ExchangeOutcome:
    """A(u_A) B(u_B) = scalar * B(u_B) A(u_A)"""

    scalar: complex
    residual_charge_ok: bool
    p_independence_residual: float
    exponent_ab: RationalExponent
    exponent_ba: RationalExponent
    sign: int
    oscillator_ratio: complex = field(default=0j)
    continued: bool = False

    @property
    def net_exponent(self) -> RationalExponent | None:
        """Power of z_A/z_B left by the zero modes when both exponents agree"""
        if self.exponent_ab != self.exponent_ba:
            return None
        return self.exponent_ab


def kappa(A: OperatorDescriptor, B: OperatorDescriptor, m: int, params: AlgebraParams) -> complex:
    """[A_m, B_{-m}] with argument shifts folded in"""
    return bilinear(A.coefficient(m, params), B.coefficient(-m, params), m, params)


def growth_rate(A: OperatorDescriptor, B: OperatorDescriptor, params: AlgebraParams) -> float:
    """Tail estimate of |kappa_m|^{1/m}; 0 when the series vanishes"""
    low, high = 12, 20
    k_low = abs(kappa(A, B, low, params))
    k_high = abs(kappa(A, B, high, params))
    if k_high == 0 and k_low == 0:
        return 0.0
    if k_low == 0 or k_high == 0:
        return (max(k_low, k_high)) ** (1 / high)
    return (k_high / k_low) ** (1 / (high - low))


def contraction_log(
    A: OperatorDescriptor,
    B: OperatorDescriptor,
    x: complex,
    params: AlgebraParams,
    policy: TruncationPolicy | None = None,
    rate: float | None = None,
) -> complex:
    """sum_{m>=1} kappa_m x^m"""
    policy = policy if policy is not None else TruncationPolicy.from_settings()
    if x == 0:
        return 0j
    rate = growth_rate(A, B, params) if rate is None else rate
    if rate * abs(x) >= policy.ratio_guard:
        raise NonConvergent(
            f"contraction {A.name}.{B.name}: ratio {rate * abs(x):.4g} exceeds guard"
        )
    total = 0j
    quiet = 0
    power = 1 + 0j
    for m in range(1, policy.max_terms + 1):
        power *= x
        term = kappa(A, B, m, params) * power
        if not cmath.isfinite(term):
            raise NonConvergent(f"contraction {A.name}.{B.name}: non-finite term at m={m}")
        total += term
        quiet = quiet + 1 if abs(term) < policy.tol * max(1.0, abs(total)) else 0
        if quiet >= 3:
            logger.debug(f"contraction {A.name}.{B.name} converged after {m} terms")
            return total
    raise NonConvergent(
        f"contraction {A.name}.{B.name} not converged in {policy.max_terms} terms"
    )


def contraction(
    A: OperatorDescriptor,
    B: OperatorDescriptor,
    x: complex,
    params: AlgebraParams,
    policy: TruncationPolicy | None = None,
) -> complex:
    """exp(sum_{m>=1} kappa_m x^m) with x = z_B / z_A"""
    return cmath.exp(contraction_log(A, B, x, params, policy))


def kappa_series(A: OperatorDescriptor, B: OperatorDescriptor, params: AlgebraParams) -> ExpSum:
    """m * kappa_m for every m >= 1 as one exponential sum"""
    return _kappa_series_cached(A, B, params.key)


@lru_cache(maxsize=256)
def _kappa_series_cached(
    A: OperatorDescriptor, B: OperatorDescriptor, key: tuple[int, complex, complex, complex]
) -> ExpSum:
    N, q, r, c = key
    params = AlgebraParams(N=N, q=q, r=r, c=c)
    a = A.series_coefficient(SeriesMode(params, 1))
    b = B.series_coefficient(SeriesMode(params, -1))
    series = series_bilinear(a, b, gram_series(params), params.log_q)
    if not is_integral(series):
        logger.debug(f"contraction {A.name}.{B.name} has non-integral weights, continuing along the ray")
    return series


def continued_contraction_log(
    A: OperatorDescriptor, B: OperatorDescriptor, x: complex, params: AlgebraParams
) -> complex:
    """sum_{m>=1} kappa_m x^m continued from the disc of convergence along the ray to x"""
    if x == 0:
        return 0j
    return kappa_series(A, B, params).log_series(x)


def cocycle_sign(A: ZeroModes, B: ZeroModes) -> int:
    """e^{beta} e^{gamma} = sign e^{gamma} e^{beta}.

    Root charges follow the bilinear extension over simple roots. A weight
    charge picks up (-1)^{(beta, gamma)} against any charge, with an extra
    (-1)^{|beta|^2 |gamma|^2} when both sides carry weights.
    """
    if A.weight_charge or B.weight_charge:
        exponent = _pair(A.charge, B.charge)
        if A.weight_charge and B.weight_charge:
            exponent += _pair(A.charge, A.charge) * _pair(B.charge, B.charge)
        if exponent.denominator != 1:
            raise ChargeMismatch(f"non-integral cocycle exponent {exponent}")
        return -1 if exponent.numerator % 2 else 1
    N = A.N
    b = RootData.for_rank(N).b
    a = eps_to_alpha(np.array([float(v) for v in A.charge]))
    c = eps_to_alpha(np.array([float(v) for v in B.charge]))
    f = b + np.outer(np.diag(b), np.diag(b))
    exponent = a @ f @ c
    parity = round(exponent)
    if abs(exponent - parity) > 1e-9:
        raise ChargeMismatch(f"non-integral cocycle exponent {exponent}")
    return -1 if parity % 2 else 1


def crossing_exponent(A: ZeroModes, B: ZeroModes) -> RationalExponent:
    """Shift of A's exponent after it moves right past B's charges"""
    return RationalExponent(
        const=_pair(A.hpow, B.charge),
        per_r=_pair(A.ppow, tuple(x + y for x, y in zip(B.charge, B.qshift))),
        per_r_star=_pair(A.ppow_star, B.qshift),
    )


def exchange_ratio(
    A: OperatorDescriptor,
    u_a: complex,
    B: OperatorDescriptor,
    u_b: complex,
    params: AlgebraParams,
    policy: TruncationPolicy | None = None,
    rng: np.random.Generator | None = None,
    continued: bool = False,
) -> ExchangeOutcome:
    """Scalar f with A(u_a) B(u_b) = f B(u_b) A(u_a).

    With ``continued`` both contractions are summed in closed form and
    continued along the ray to x, which also covers pairs whose directed
    series share no annulus of convergence.
    """
    if A.zero.N != B.zero.N or A.zero.N != params.N:
        raise ChargeMismatch(f"rank mismatch between {A.name} and {B.name}")
    x = params.qpow(2 * (u_b - u_a))
    if continued:
        log_ab = continued_contraction_log(A, B, x, params)
        log_ba = continued_contraction_log(B, A, 1 / x, params)
    else:
        log_ab = contraction_log(A, B, x, params, policy)
        log_ba = contraction_log(B, A, 1 / x, params, policy)
    oscillator = cmath.exp(log_ab - log_ba)

    sign = cocycle_sign(A.zero, B.zero)
    exponent_ab = crossing_exponent(A.zero, B.zero)
    exponent_ba = crossing_exponent(B.zero, A.zero)

    rng = rng if rng is not None else np.random.default_rng(0)
    values = [
        _zero_mode_ratio(A, u_a, B, u_b, params, *_random_state(params.N, rng))
        for _ in range(2)
    ]
    spread = abs(values[0] / values[1] - 1)
    symbolic = cpow(u_a + A.zero.offset, exponent_ab.value(params), params) / cpow(
        u_b + B.zero.offset, exponent_ba.value(params), params
    )
    charge_ok = abs(values[0] / symbolic - 1) < 1e-9
    return ExchangeOutcome(
        scalar=sign * oscillator * values[0],
        residual_charge_ok=charge_ok,
        p_independence_residual=float(spread),
        exponent_ab=exponent_ab,
        exponent_ba=exponent_ba,
        sign=sign,
        oscillator_ratio=oscillator,
        continued=continued,
    )


def _random_state(N: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    P = rng.uniform(0.2, 1.3, N) + 1j * rng.uniform(-0.2, 0.2, N)
    h = rng.uniform(0.2, 1.3, N) + 1j * rng.uniform(-0.2, 0.2, N)
    return P, h


def _zero_mode_ratio(
    A: OperatorDescriptor,
    u_a: complex,
    B: OperatorDescriptor,
    u_b: complex,
    params: AlgebraParams,
    P: np.ndarray,
    h: np.ndarray,
) -> complex:
    kappa_a = np.array([float(v) for v in A.zero.qshift])
    kappa_b = np.array([float(v) for v in B.zero.qshift])
    beta_a = np.array([float(v) for v in A.zero.charge])
    beta_b = np.array([float(v) for v in B.zero.charge])
    ab = A.zero.value(u_a, P + kappa_b, h + beta_b, params) * B.zero.value(u_b, P, h, params)
    ba = B.zero.value(u_b, P + kappa_a, h + beta_a, params) * A.zero.value(u_a, P, h, params)
    return ab / ba


def annulus_point(
    A: OperatorDescriptor,
    B: OperatorDescriptor,
    params: AlgebraParams,
    rng: np.random.Generator,
    attempt: int = 0,
) -> tuple[complex, complex]:
    """Spectral parameters (u_A, u_B) whose ratio x = z_B/z_A lies inside
    the common convergence annulus of both directed contractions"""
    rate_ab = growth_rate(A, B, params)
    rate_ba = growth_rate(B, A, params)
    lower = math.log(rate_ba) if rate_ba > 0 else -math.inf
    upper = -math.log(rate_ab) if rate_ab > 0 else math.inf
    if lower >= upper:
        raise NonConvergent(
            f"empty annulus for {A.name}.{B.name}: rates {rate_ab:.4g}, {rate_ba:.4g}"
        )
    width = upper - lower
    margin = min(1.0, width / 4) if math.isfinite(width) else 1.0
    target = min(max(0.0, lower + margin), upper - margin) / (1 + attempt)
    log_q = params.log_q
    jitter = rng.uniform(-0.15, 0.15)
    real = (target / 2 + jitter * log_q.imag) / log_q.real
    u_a = complex(rng.uniform(0.1, 0.9), rng.uniform(-0.05, 0.05))
    return u_a, u_a + complex(real, jitter)


def continuation_point(rng: np.random.Generator) -> tuple[complex, complex]:
    """Spectral parameters for the continued contractions, |Re(u_B - u_A)| in [0.2, 0.45]"""
    u_a = complex(rng.uniform(0.1, 0.9), rng.uniform(-0.05, 0.05))
    step = rng.uniform(0.2, 0.45) * rng.choice([-1.0, 1.0])
    return u_a, u_a + complex(step, rng.uniform(-0.1, 0.1))


# Oscillator laws --------------------------------------------------------


def _k_factor(mode: ModeVariable):
    params = mode.params
    t = params.q - 1 / params.q
    p_m = mode.qpow(2 * params.r)
    return mode.qnum(1) * mode.qnum(1) * t**2 * p_m / (1 - p_m)


def _psi_factor(mode: ModeVariable):
    params = mode.params
    p_m = mode.qpow(2 * params.r)
    return p_m / (1 - p_m) * (params.q - 1 / params.q)


def k_law(sign: int, j: int) -> OscillatorLaw:
    """k_{+j}, k_{-j} (sign = +1, -1) or k_0 (sign = 0)"""

    def law(mode: ModeVariable) -> np.ndarray:
        if sign == 0:
            N = mode.params.N
            kept = eps_modes(1, N, mode) * _k_factor(mode) - alpha_coeffs(N, N) * _psi_factor(mode)
            return kept * mode.qpow(-0.5)
        return eps_modes(sign, j, mode) * _k_factor(mode)

    return law


def psi_law(j: int) -> OscillatorLaw:
    def law(mode: ModeVariable) -> np.ndarray:
        return alpha_coeffs(j, mode.params.N) * _psi_factor(mode)

    return law


def e_law(j: int) -> OscillatorLaw:
    def law(mode: ModeVariable) -> np.ndarray:
        return -alpha_coeffs(j, mode.params.N) / mode.qnum(mode.params.c)

    return law


def f_law(j: int) -> OscillatorLaw:
    def law(mode: ModeVariable) -> np.ndarray:
        params = mode.params
        weight = (1 - mode.qpow(2 * params.r_star)) / (1 - mode.qpow(2 * params.r)) * mode.qpow(params.c)
        return alpha_coeffs(j, params.N) * (weight / mode.qnum(params.c))

    return law


def phi_law(mode: ModeVariable) -> np.ndarray:
    params = mode.params
    weight = (mode.qpow(1) - mode.qpow(-1)) * (1 - mode.qpow(2 * params.r_star)) / (1 - mode.qpow(2 * params.r))
    return eps_modes(-1, 1, mode) * weight


def psi_star_law(mode: ModeVariable) -> np.ndarray:
    return eps_modes(-1, 1, mode) * (mode.qpow(-1) - mode.qpow(1))


# Descriptor builders ----------------------------------------------------


def _eps(j: int, N: int, scale: int = 1) -> tuple[Fraction, ...]:
    out = [Fraction(0)] * N
    if 1 <= j <= N:
        out[j - 1] = Fraction(scale)
    return tuple(out)


def _alpha(j: int, N: int, scale: int = 1) -> tuple[Fraction, ...]:
    out = [Fraction(0)] * N
    out[j - 1] = Fraction(scale)
    if j < N:
        out[j] = Fraction(-scale)
    return tuple(out)


def k_current(sign: int, j: int, params: AlgebraParams, offset: complex = 0j) -> OperatorDescriptor:
    """Bare k_{+j}, k_{-j} or k_0 evaluated at q^{2 offset} z"""
    label = "k0" if sign == 0 else f"k{'+' if sign > 0 else '-'}{j}"
    return OperatorDescriptor(label, k_law(sign, j), ZeroModes.trivial(params.N), offset)


def e_current(j: int, params: AlgebraParams) -> OperatorDescriptor:
    """Modified current E_j at level c"""
    N = params.N
    const = (
        RationalExponent(Fraction(1, 2), Fraction(0), Fraction(1, 2))
        if j == N
        else RationalExponent(per_r_star=Fraction(1))
    )
    zero = ZeroModes(
        charge=_alpha(j, N),
        hpow=_alpha(j, N),
        ppow_star=_alpha(j, N, -1),
        ppow=_eps(0, N),
        qshift=_alpha(j, N, -1),
        const=const,
    )
    return OperatorDescriptor(f"E{j}", e_law(j), zero)


def f_current(j: int, params: AlgebraParams) -> OperatorDescriptor:
    """Modified current F_j at level c"""
    N = params.N
    const = (
        RationalExponent(Fraction(1, 2), Fraction(-1, 2), Fraction(0))
        if j == N
        else RationalExponent(per_r=Fraction(-1))
    )
    zero = ZeroModes(
        charge=_alpha(j, N, -1),
        hpow=_alpha(j, N, -1),
        ppow_star=_eps(0, N),
        ppow=_alpha(j, N),
        qshift=_eps(0, N),
        const=const,
    )
    return OperatorDescriptor(f"F{j}", f_law(j), zero)


def modified_k(sign: int, j: int, params: AlgebraParams) -> OperatorDescriptor:
    """K^+_{+j}, K^+_{-j} (sign = +1, -1) or K^+_0 (sign = 0)"""
    N = params.N
    eta = params.eta
    if sign == 0:
        return OperatorDescriptor("K0", k_law(0, N), ZeroModes.trivial(N), -eta / 2)
    if sign > 0:
        osc_offset = j / 2
        zero = ZeroModes(
            charge=_eps(0, N),
            hpow=_eps(0, N),
            ppow_star=_eps(j, N, -1),
            ppow=_eps(j, N),
            qshift=_eps(j, N, -1),
            offset=j / 2 - params.r / 2,
        )
        return OperatorDescriptor(f"K+{j}", k_law(1, j), zero, osc_offset)
    osc_offset = -j / 2 - eta
    zero = ZeroModes(
        charge=_eps(0, N),
        hpow=_eps(0, N),
        ppow_star=_eps(j, N),
        ppow=_eps(j, N, -1),
        qshift=_eps(j, N),
        offset=-j / 2 - eta - params.r / 2,
    )
    return OperatorDescriptor(f"K-{j}", k_law(-1, j), zero, osc_offset)


def modified_k_label(index: int, params: AlgebraParams) -> OperatorDescriptor:
    """K^+ for an ordered index: j > 0, -j < 0 or 0"""
    if index == 0:
        return modified_k(0, params.N, params)
    return modified_k(1 if index > 0 else -1, abs(index), params)


def type_one_vertex(params: AlgebraParams) -> OperatorDescriptor:
    """Top component Phi_{-1} of the type I vertex operator"""
    N = params.N
    eta = params.eta
    zero = ZeroModes(
        charge=_eps(1, N),
        hpow=_eps(1, N),
        ppow_star=_eps(0, N),
        ppow=_eps(1, N, -1),
        qshift=_eps(0, N),
        offset=-0.5 - eta,
        weight_charge=True,
    )
    return OperatorDescriptor("Phi-1", phi_law, zero, -1.5 - eta)


def type_two_vertex(params: AlgebraParams) -> OperatorDescriptor:
    """Top component Psi*_{-1} of the type II vertex operator"""
    N = params.N
    eta = params.eta
    zero = ZeroModes(
        charge=_eps(1, N, -1),
        hpow=_eps(1, N, -1),
        ppow_star=_eps(1, N),
        ppow=_eps(0, N),
        qshift=_eps(1, N),
        offset=-eta,
        weight_charge=True,
    )
    return OperatorDescriptor("Psi*-1", psi_star_law, zero, -0.5 - eta)


def psikk_residuals(params: AlgebraParams, modes: range = range(1, 7)) -> dict[str, float]:
    """Relative residuals of the psi/k factorizations on oscillator vectors"""
    N = params.N
    residuals: dict[str, float] = {}

    def rel(lhs: np.ndarray, rhs: np.ndarray) -> float:
        scale = max(np.linalg.norm(lhs), np.linalg.norm(rhs), 1e-300)
        return float(np.linalg.norm(lhs - rhs) / scale)

    for m in list(modes) + [-m for m in modes]:
        at = NumericMode(m, params)
        for j in range(1, N):
            psi = psi_law(j)(at)
            plus = k_law(1, j)(at) - params.qpow(-m) * k_law(1, j + 1)(at)
            minus = -k_law(-1, j)(at) + params.qpow(m) * k_law(-1, j + 1)(at)
            residuals[f"psi{j}=k+{j}/k+{j + 1} m={m}"] = rel(psi, plus)
            residuals[f"psi{j}=k-{j + 1}/k-{j} m={m}"] = rel(psi, minus)
        psi_n = psi_law(N)(at)
        k0 = k_law(0, N)(at)
        plus = k_law(1, N)(at) - params.qpow(m / 2) * k0
        minus = -k_law(-1, N)(at) + params.qpow(-m / 2) * k0
        residuals[f"psi{N}=k+{N}/k0 m={m}"] = rel(psi_n, plus)
        residuals[f"psi{N}=k0/k-{N} m={m}"] = rel(psi_n, minus)
    return residuals
