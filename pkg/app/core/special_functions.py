"""Branch-safe q-Pochhammer products, theta functions and brackets.

Every power of q is evaluated as exp(a * log_q) with the principal logarithm
fixed in AlgebraParams, so values are single-valued functions of u.
"""

import cmath
from functools import lru_cache

from loguru import logger

from app.core.config import get_settings
from app.core.errors import DomainError, NonConvergent
from app.models.domain import AlgebraParams, TruncationPolicy


def _policy(policy: TruncationPolicy | None) -> TruncationPolicy:
    return policy if policy is not None else TruncationPolicy.from_settings()


def qpoch1(x: complex, p: complex, policy: TruncationPolicy | None = None) -> complex:
    """(x; p)_inf truncated once |x p^n| < tol"""
    policy = _policy(policy)
    if abs(p) >= 1:
        raise NonConvergent(f"qpoch1 needs |p| < 1, got {abs(p):.6g}")
    if abs(p) >= policy.ratio_guard and x != 0:
        raise NonConvergent(
            f"qpoch1 ratio {abs(p):.6g} exceeds guard {policy.ratio_guard}"
        )
    result = 1 + 0j
    term = complex(x)
    for _ in range(policy.max_terms):
        if abs(term) < policy.tol:
            return result
        result *= 1 - term
        term *= p
    raise NonConvergent(f"qpoch1({x}, {p}) not converged in {policy.max_terms} terms")


def qpoch2(
    x: complex, p1: complex, p2: complex, policy: TruncationPolicy | None = None
) -> complex:
    """(x; p1, p2)_inf as a product of single products over powers of p2"""
    policy = _policy(policy)
    if abs(p1) >= 1 or abs(p2) >= 1:
        raise NonConvergent(
            f"qpoch2 needs |p1|, |p2| < 1, got {abs(p1):.6g}, {abs(p2):.6g}"
        )
    if abs(p2) >= policy.ratio_guard and x != 0:
        raise NonConvergent(
            f"qpoch2 ratio {abs(p2):.6g} exceeds guard {policy.ratio_guard}"
        )
    result = 1 + 0j
    base = complex(x)
    for _ in range(policy.max_terms):
        if abs(base) < policy.tol:
            return result
        result *= qpoch1(base, p1, policy)
        base *= p2
    raise NonConvergent(f"qpoch2({x}) not converged in {policy.max_terms} rows")


def theta_p(z: complex, p: complex, policy: TruncationPolicy | None = None) -> complex:
    """Odd theta function (z;p)(p/z;p)(p;p)"""
    if z == 0:
        raise DomainError("theta_p is undefined at z = 0")
    return qpoch1(z, p, policy) * qpoch1(p / z, p, policy) * qpoch1(p, p, policy)


def theta_sum(z: complex, p: complex, policy: TruncationPolicy | None = None) -> complex:
    """Jacobi triple product series sum_n (-1)^n p^{n(n-1)/2} z^n"""
    policy = _policy(policy)
    if z == 0:
        raise DomainError("theta_sum is undefined at z = 0")
    if abs(p) >= 1:
        raise NonConvergent(f"theta_sum needs |p| < 1, got {abs(p):.6g}")
    total = 1 - z  # n = 0 and n = 1
    quiet = 0
    for n in range(1, policy.max_terms):
        upper = (-1) ** (n + 1) * p ** ((n + 1) * n // 2) * z ** (n + 1)
        lower = (-1) ** n * p ** (n * (n + 1) // 2) * z ** (-n)
        total += upper + lower
        quiet = quiet + 1 if abs(upper) + abs(lower) < policy.tol * max(1.0, abs(total)) else 0
        if quiet >= 2:
            return total
    raise NonConvergent(f"theta_sum({z}, {p}) not converged")


def qnum(x: complex, params: AlgebraParams) -> complex:
    """[x]_q = (q^x - q^{-x}) / (q - q^{-1})"""
    return (params.qpow(x) - params.qpow(-x)) / (params.q - 1 / params.q)


def qnum_plus(x: complex, params: AlgebraParams) -> complex:
    """[x]_+ = (q^x + q^{-x}) / (q - q^{-1})"""
    return (params.qpow(x) + params.qpow(-x)) / (params.q - 1 / params.q)


def cpow(base_u: complex, exponent: complex, params: AlgebraParams) -> complex:
    """z^exponent with z = q^{2u}, evaluated as exp(2 u exponent log q)"""
    return cmath.exp(2 * base_u * exponent * params.log_q)


@lru_cache(maxsize=get_settings().CACHE_SIZE)
def _bracket_cached(
    u: complex,
    key: tuple[int, complex, complex, complex],
    starred: bool,
    policy: TruncationPolicy,
) -> complex:
    N, q, r, c = key
    params = AlgebraParams(N=N, q=q, r=r, c=c)
    r_eff = params.r_star if starred else params.r
    nome = params.p_star if starred else params.p
    z = cmath.exp(2 * u * params.log_q)
    return cmath.exp((u * u / r_eff - u) * params.log_q) * theta_p(z, nome, policy)


def bracket(
    u: complex,
    params: AlgebraParams,
    starred: bool = False,
    policy: TruncationPolicy | None = None,
) -> complex:
    """[u] = q^{u^2/r - u} Theta_p(q^{2u}); the starred variant uses r*, p*"""
    return _bracket_cached(complex(u), params.key, starred, _policy(policy))


def bracket_star(
    u: complex, params: AlgebraParams, policy: TruncationPolicy | None = None
) -> complex:
    return bracket(u, params, starred=True, policy=policy)


def clear_caches() -> None:
    """Drop memoized bracket values"""
    logger.debug(f"clearing bracket cache: {_bracket_cached.cache_info()}")
    _bracket_cached.cache_clear()
