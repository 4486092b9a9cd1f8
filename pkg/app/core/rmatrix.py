"""Dynamical R-matrix of type B_N: ordered indices, coefficient functions,
scalar prefactors, dense assembly and the gauge map to face weights.

Indices run over 1 < 2 < ... < N < 0 < -N < ... < -1. A matrix entry
((a, c), (b, d)) stores the coefficient of E_{a,b} (x) E_{c,d}.
"""

import cmath
import itertools
import warnings

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict

from app.core.errors import BranchWarning, InvalidIndexPattern, PoleError
from app.core.special_functions import bracket, cpow, qpoch2, theta_p
from app.models.domain import AlgebraParams, DynamicalParam, TruncationPolicy
from app.models.schemas.responses.rmatrix import MatrixEntry, RMatrixValueSchema
from app.models.types.coef_kind import CoefKind
from app.models.types.prefactor_kind import PrefactorKind
from app.models.types.prefactor_mode import PrefactorMode

_POLE = 1e-13


# Ordered index set -------------------------------------------------------


def ordered_indices(N: int) -> list[int]:
    return list(range(1, N + 1)) + [0] + list(range(-N, 0))


def pos(j: int, N: int) -> int:
    """Position of j in 1 < ... < N < 0 < -N < ... < -1"""
    if abs(j) > N:
        raise InvalidIndexPattern(f"index {j} outside rank {N}")
    if j > 0:
        return j - 1
    if j == 0:
        return N
    return 2 * N + 1 + j


def precedes(a: int, b: int, N: int) -> bool:
    return pos(a, N) < pos(b, N)


def weight(j: int, N: int) -> np.ndarray:
    """eps_j for j > 0, -eps_|j| for j < 0, 0 for j = 0"""
    w = np.zeros(N, dtype=int)
    if j != 0:
        w[abs(j) - 1] = 1 if j > 0 else -1
    return w


def flat(a: int, c: int, N: int) -> int:
    """Row (or column) of the pair (a, c) in the dense matrix"""
    return pos(a, N) * (2 * N + 1) + pos(c, N)


# Bracket helpers ---------------------------------------------------------


def bracket_quotient(
    numerators: list[complex],
    denominators: list[complex],
    params: AlgebraParams,
    policy: TruncationPolicy | None = None,
    starred: bool = False,
) -> complex:
    """prod [x] over numerators / prod [y] over denominators"""
    value = 1 + 0j
    for y in denominators:
        den = bracket(y, params, starred, policy)
        if abs(den) < _POLE:
            raise PoleError(f"bracket [{y}] vanishes in a denominator")
        value /= den
    for x in numerators:
        value *= bracket(x, params, starred, policy)
    return value


def _limit(index: int, N: int) -> int:
    """Upper end of the m-products; index 0 runs to N"""
    return N if index == 0 else abs(index) - 1


def _chain(
    x: complex,
    sign: int,
    limit: int,
    num_shift: float,
    den_shift: float,
    s: DynamicalParam,
    params: AlgebraParams,
    policy: TruncationPolicy | None,
) -> complex:
    """prod_{m=1}^{limit} [x + sign s_m + num_shift] / [x + sign s_m + den_shift]"""
    numerators = [x + sign * s.lookup(m) + num_shift for m in range(1, limit + 1)]
    denominators = [x + sign * s.lookup(m) + den_shift for m in range(1, limit + 1)]
    return bracket_quotient(numerators, denominators, params, policy)


# G and H -----------------------------------------------------------------


def G_s(j: int, s: DynamicalParam, params: AlgebraParams, policy: TruncationPolicy | None = None) -> complex:
    """G_{s_j} for a nonzero index j"""
    if j == 0:
        raise InvalidIndexPattern("G_s is defined for nonzero indices only")
    x = s.lookup(j)
    numerators = [x + 1]
    denominators = [x]
    for m in range(1, s.N + 1):
        if m == abs(j):
            continue
        sm = s.lookup(m)
        numerators += [x - sm + 1, x + sm + 1]
        denominators += [x - sm, x + sm]
    return bracket_quotient(numerators, denominators, params, policy)


def G_at(x: complex, j: int, s: DynamicalParam, params: AlgebraParams, policy: TruncationPolicy | None = None) -> complex:
    """G_{s_j} with s_j replaced by x; the other components stay fixed"""
    values = list(s.values)
    values[abs(j) - 1] = x if j > 0 else -x
    return G_s(j, DynamicalParam(values=values), params, policy)


def H_s(s: DynamicalParam, params: AlgebraParams, policy: TruncationPolicy | None = None) -> complex:
    eta = params.eta
    total = 0j
    for k in ordered_indices(s.N):
        if k == 0:
            continue
        sk = s.lookup(k)
        total += bracket_quotient([sk + 0.5 + 2 * eta], [sk + 0.5], params, policy) * G_s(k, s, params, policy)
    return total


def G_branch(j: int, s: DynamicalParam, params: AlgebraParams, policy: TruncationPolicy | None = None) -> complex:
    """Two-branch normalizer G_{s_j}(j) entering the gauge F"""
    N = s.N
    x = s.lookup(j)
    if j > 0:
        return _chain(x, -1, j - 1, 1, 0, s, params, policy)
    if j == 0:
        raise InvalidIndexPattern("G_branch is undefined at j = 0")
    k = abs(j)
    numerators = [x + 1]
    denominators = [x]
    for m in range(1, N + 1):
        if m != k:
            numerators.append(x - s.lookup(m) + 1)
            denominators.append(x - s.lookup(m))
    for m in range(k + 1, N + 1):
        numerators.append(x + s.lookup(m) + 1)
        denominators.append(x + s.lookup(m))
    return bracket_quotient(numerators, denominators, params, policy)


# Coefficient functions ---------------------------------------------------


def coef_b(u: complex, sv: complex, params: AlgebraParams, policy: TruncationPolicy | None = None) -> complex:
    return bracket_quotient([sv + 1, sv - 1, u], [sv, sv, u + 1], params, policy)


def coef_bbar(u: complex, params: AlgebraParams, policy: TruncationPolicy | None = None) -> complex:
    return bracket_quotient([u], [u + 1], params, policy)


def coef_c(u: complex, sv: complex, params: AlgebraParams, policy: TruncationPolicy | None = None) -> complex:
    return bracket_quotient([1, sv + u], [sv, u + 1], params, policy)


def coef_cbar(u: complex, sv: complex, params: AlgebraParams, policy: TruncationPolicy | None = None) -> complex:
    return bracket_quotient([1, sv - u], [sv, u + 1], params, policy)


def _d_common(u: complex, x: complex, params: AlgebraParams, policy: TruncationPolicy | None) -> complex:
    eta = params.eta
    return bracket_quotient([u, 1, x + 1 + eta - u], [eta - u, u + 1, x + 1], params, policy)


def coef_d(
    u: complex, j1: int, j2: int, s: DynamicalParam, params: AlgebraParams, policy: TruncationPolicy | None = None
) -> complex:
    """d(u, s_{j1}, s_{j2}) for j1 < j2 in the index order"""
    N = s.N
    if not precedes(j1, j2, N):
        raise InvalidIndexPattern(f"d needs j1 before j2, got ({j1}, {j2})")
    x1, x2 = s.lookup(j1), s.lookup(j2)
    common = _d_common(u, x1 + x2, params, policy)
    if j1 > 0 and j2 >= 0:
        return (
            G_s(j1, s, params, policy)
            * common
            * _chain(x1, -1, j1 - 1, 0, 1, s, params, policy)
            * _chain(x2, -1, _limit(j2, N), 1, 0, s, params, policy)
        )
    if j1 <= 0 and j2 < 0:
        return (
            G_s(j2, s, params, policy)
            * common
            * _chain(x2, 1, abs(j2) - 1, 0, 1, s, params, policy)
            * _chain(x1, 1, _limit(j1, N), 1, 0, s, params, policy)
        )
    return (
        G_s(j1, s, params, policy)
        * G_s(j2, s, params, policy)
        * common
        * _chain(x1, -1, j1 - 1, 0, 1, s, params, policy)
        * _chain(x2, 1, abs(j2) - 1, 0, 1, s, params, policy)
    )


def coef_dbar(
    u: complex, j1: int, j2: int, s: DynamicalParam, params: AlgebraParams, policy: TruncationPolicy | None = None
) -> complex:
    """dbar(u, s_{j1}, s_{j2}) for j1 < j2 in the index order"""
    N = s.N
    if not precedes(j1, j2, N):
        raise InvalidIndexPattern(f"dbar needs j1 before j2, got ({j1}, {j2})")
    x1, x2 = s.lookup(j1), s.lookup(j2)
    common = _d_common(u, x1 + x2, params, policy)
    if j1 > 0 and j2 > 0:
        return (
            G_s(j2, s, params, policy)
            * common
            * _chain(x1, -1, j1 - 1, 1, 0, s, params, policy)
            * _chain(x2, -1, j2 - 1, 0, 1, s, params, policy)
        )
    if j1 < 0 and j2 < 0:
        return (
            G_s(j1, s, params, policy)
            * common
            * _chain(x2, 1, abs(j2) - 1, 1, 0, s, params, policy)
            * _chain(x1, 1, abs(j1) - 1, 0, 1, s, params, policy)
        )
    return (
        common
        * _chain(x1, -1, _limit(j1, N), 1, 0, s, params, policy)
        * _chain(x2, 1, _limit(j2, N), 1, 0, s, params, policy)
    )


def coef_e(u: complex, j: int, s: DynamicalParam, params: AlgebraParams, policy: TruncationPolicy | None = None) -> complex:
    if j == 0:
        return coef_e0(u, s, params, policy)
    eta = params.eta
    x = 2 * s.lookup(j) + 1
    first = bracket_quotient([1, x - u], [u + 1, x], params, policy)
    second = bracket_quotient([u, 1, x + eta - u], [eta - u, u + 1, x], params, policy)
    return first + second * G_s(j, s, params, policy)


def coef_e0(u: complex, s: DynamicalParam, params: AlgebraParams, policy: TruncationPolicy | None = None) -> complex:
    eta = params.eta
    first = bracket_quotient([eta + u, 1, 2 * eta - u], [eta - u, u + 1, 2 * eta], params, policy)
    second = bracket_quotient([u, 1], [u + 1, 2 * eta], params, policy)
    return first - second * H_s(s, params, policy)


def coef(
    kind: CoefKind,
    u: complex,
    indices: tuple[int, ...],
    s: DynamicalParam,
    params: AlgebraParams,
    policy: TruncationPolicy | None = None,
) -> complex:
    """Dispatch on the coefficient kind; b, c, cbar read s_{j1} - s_{j2}"""
    kind = CoefKind(kind)
    if kind is CoefKind.BBAR:
        return coef_bbar(u, params, policy)
    if kind is CoefKind.E0:
        return coef_e0(u, s, params, policy)
    if kind is CoefKind.E:
        (j,) = indices
        return coef_e(u, j, s, params, policy)
    j1, j2 = indices
    if kind is CoefKind.D:
        return coef_d(u, j1, j2, s, params, policy)
    if kind is CoefKind.DBAR:
        return coef_dbar(u, j1, j2, s, params, policy)
    sv = s.lookup(j1) - s.lookup(j2)
    if kind is CoefKind.B:
        return coef_b(u, sv, params, policy)
    if kind is CoefKind.C:
        return coef_c(u, sv, params, policy)
    return coef_cbar(u, sv, params, policy)


# Prefactors --------------------------------------------------------------


def _curly(x: complex, params: AlgebraParams, nome: complex, policy: TruncationPolicy | None) -> complex:
    """{x} = (x; p, xi^2)_inf"""
    return qpoch2(x, nome, params.xi**2, policy)


def _nome(params: AlgebraParams, starred: bool) -> complex:
    return params.p_star if starred else params.p


def rho_tilde(u: complex, params: AlgebraParams, starred: bool = False, policy: TruncationPolicy | None = None) -> complex:
    p = _nome(params, starred)
    z = params.qpow(2 * u)
    xi = params.xi
    q2 = params.qpow(2)

    def c(x: complex) -> complex:
        return _curly(x, params, p, policy)

    upper = c(xi * z) ** 2 * c(xi**2 / q2 * z) * c(q2 * z) / (
        c(xi**2 * z) * c(z) * c(xi * q2 * z) * c(xi / q2 * z)
    )
    lower = (
        c(p * xi**2 / z) * c(p / z) * c(p * xi * q2 / z) * c(p * xi / q2 / z)
    ) / (c(p * xi / z) ** 2 * c(p * xi**2 / q2 / z) * c(p * q2 / z))
    return upper * lower


def rho0(u: complex, params: AlgebraParams, starred: bool = False, policy: TruncationPolicy | None = None) -> complex:
    """q^{-1} z^{1/r} rho_tilde(u)"""
    r = params.r_star if starred else params.r
    return cpow(u, 1 / r, params) / params.q * rho_tilde(u, params, starred, policy)


def c_function(u: complex, params: AlgebraParams, policy: TruncationPolicy | None = None) -> complex:
    z = params.qpow(2 * u)
    xi = params.xi
    q2 = params.qpow(2)

    def th(x: complex) -> complex:
        return theta_p(x, xi**2, policy)

    return th(z) ** 2 * th(xi * q2 * z) * th(xi / q2 * z) / (
        th(xi * z) ** 2 * th(q2 * z) * th(z / q2)
    )


def rho_hat_squared(u: complex, params: AlgebraParams, policy: TruncationPolicy | None = None) -> complex:
    """rho_hat(u)^2 = C(u) rho0(u)^2, free of square roots.

    The constant xi^{-1/r} in front of rho_hat is a gauge constant and is
    dropped: with it rho_hat(u) rho_hat(-u) would equal xi^{-2/r}, not 1.
    """
    return c_function(u, params, policy) * rho0(u, params, policy=policy) ** 2


def rho_hat(u: complex, params: AlgebraParams, policy: TruncationPolicy | None = None) -> complex:
    """C(u)^{1/2} rho0(u) on the principal branch of the root"""
    root = cmath.sqrt(c_function(u, params, policy))
    if abs(root.real) < 1e-8 * abs(root):
        warnings.warn(f"C({u})^(1/2) sits on the branch cut", BranchWarning, stacklevel=2)
    return root * rho0(u, params, policy=policy)


def phi(u: complex, params: AlgebraParams, policy: TruncationPolicy | None = None) -> complex:
    p = params.p
    z = params.qpow(2 * u)
    xi = params.xi
    q2 = params.qpow(2)

    def c(x: complex) -> complex:
        return _curly(x, params, p, policy)

    upper = c(xi**2 * z) * c(z) * c(xi * q2 * z) * c(xi / q2 * z) / (
        c(xi * z) ** 2 * c(xi**2 * q2 * z) * c(z / q2)
    )
    lower = c(p * xi / z) ** 2 * c(p * xi**2 * q2 / z) * c(p / q2 / z) / (
        c(p * xi**2 / z) * c(p / z) * c(p * xi * q2 / z) * c(p * xi / q2 / z)
    )
    return cpow(u, 1 / params.r, params) / params.q * bracket(u - 1, params, policy=policy) * upper * lower


def mu(u: complex, params: AlgebraParams, starred: bool = False, policy: TruncationPolicy | None = None) -> complex:
    r = params.r_star if starred else params.r
    p = _nome(params, starred)
    z = params.qpow(2 * u)
    xi = params.xi
    q2 = params.qpow(2)

    def c(x: complex) -> complex:
        return _curly(x, params, p, policy)

    upper = c(p * xi**2 / q2 * z) * c(p * xi * z) * c(xi * z) * c(q2 * z) / (
        c(p * xi / q2 * z) * c(p * z) * c(xi**2 * z) * c(xi * q2 * z)
    )
    lower = c(p * xi / q2 / z) * c(p / z) * c(xi**2 / z) * c(xi * q2 / z) / (
        c(p * xi**2 / q2 / z) * c(p * xi / z) * c(xi / z) * c(q2 / z)
    )
    return cpow(u, -1 + 1 / r, params) * upper * lower


def chi(u: complex, params: AlgebraParams, policy: TruncationPolicy | None = None) -> complex:
    z = params.qpow(2 * u)
    xi = params.xi
    q2 = params.qpow(2)

    def th(x: complex) -> complex:
        return theta_p(x, xi**2, policy)

    return th(z) * th(xi / q2 * z) / (th(xi * z) * th(xi**2 / q2 * z))


def psi_star_exchange(u: complex, params: AlgebraParams, policy: TruncationPolicy | None = None) -> complex:
    """Scalar of Psi*(u_1) Psi*(u_2) = f(u_1 - u_2) Psi*(u_2) Psi*(u_1) in the level-one realization.

    f(u) = z^{1 + 1/r*} G(z) / G(1/z) with
    G(z) = {xi z}{xi^2 q^-2 z}{p* q^2 z}{p* xi z} / ({z}{xi q^-2 z}{p* xi q^2 z}{p* xi^2 z})
    and brackets over the nomes p*, xi^2. The starred mu differs from it by
    a ratio that is not constant in u, so mu(u, starred=True) is kept only
    as a reference value.
    """
    p = params.p_star
    xi = params.xi
    q2 = params.qpow(2)

    def c(x: complex) -> complex:
        return _curly(x, params, p, policy)

    def g(z: complex) -> complex:
        return c(xi * z) * c(xi**2 / q2 * z) * c(p * q2 * z) * c(p * xi * z) / (
            c(z) * c(xi / q2 * z) * c(p * xi * q2 * z) * c(p * xi**2 * z)
        )

    z = params.qpow(2 * u)
    return cpow(u, 1 + 1 / params.r_star, params) * g(z) / g(1 / z)


def prefactor(kind: PrefactorKind, u: complex, params: AlgebraParams, policy: TruncationPolicy | None = None) -> complex:
    kind = PrefactorKind(kind)
    match kind:
        case PrefactorKind.RHO0:
            return rho0(u, params, policy=policy)
        case PrefactorKind.RHO0_STAR:
            return rho0(u, params, starred=True, policy=policy)
        case PrefactorKind.RHO_TILDE:
            return rho_tilde(u, params, policy=policy)
        case PrefactorKind.RHO_TILDE_STAR:
            return rho_tilde(u, params, starred=True, policy=policy)
        case PrefactorKind.RHO_HAT:
            return rho_hat(u, params, policy)
        case PrefactorKind.CFUN:
            return c_function(u, params, policy)
        case PrefactorKind.MU:
            return mu(u, params, policy=policy)
        case PrefactorKind.MU_STAR:
            return mu(u, params, starred=True, policy=policy)
        case PrefactorKind.CHI:
            return chi(u, params, policy)
        case PrefactorKind.PHI:
            return phi(u, params, policy)


# Assembly ----------------------------------------------------------------


class RMatrixValue(BaseModel):
    """Dense (2N+1)^2 matrix of the bare R-matrix, optionally rescaled"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    N: int
    u: complex
    s: DynamicalParam
    prefactor_mode: PrefactorMode
    matrix: np.ndarray
    scalar: complex = 1 + 0j

    def entry(self, i: int, j: int, k: int, l: int) -> complex:
        """Entry ((i, j), (k, l)), the coefficient of E_{i,k} (x) E_{j,l}"""
        return complex(self.matrix[flat(i, j, self.N), flat(k, l, self.N)])

    def allowed(self, i: int, j: int, k: int, l: int) -> bool:
        N = self.N
        return bool(np.array_equal(weight(i, N) + weight(j, N), weight(k, N) + weight(l, N)))


def assemble(
    u: complex,
    s: DynamicalParam,
    prefactor_mode: PrefactorMode,
    params: AlgebraParams,
    policy: TruncationPolicy | None = None,
) -> RMatrixValue:
    """R-matrix at spectral parameter u and height s"""
    N = params.N
    if s.N != N:
        raise InvalidIndexPattern(f"height has {s.N} components, rank is {N}")
    dim = 2 * N + 1
    M = np.zeros((dim * dim, dim * dim), dtype=complex)

    def put(a: int, c: int, b: int, d: int, value: complex) -> None:
        M[flat(a, c, N), flat(b, d, N)] += value

    indices = ordered_indices(N)
    for j in indices:
        if j != 0:
            put(j, j, j, j, 1)
    bbar = coef_bbar(u, params, policy)
    for x, j1 in enumerate(indices):
        for j2 in indices[x + 1 :]:
            if j2 != -j1:
                sv = s.lookup(j1) - s.lookup(j2)
                put(j1, j2, j1, j2, coef_b(u, sv, params, policy))
                put(j2, j1, j2, j1, bbar)
                put(j1, j2, j2, j1, coef_c(u, sv, params, policy))
                put(j2, j1, j1, j2, coef_cbar(u, sv, params, policy))
            put(-j2, j2, j1, -j1, coef_d(u, j1, j2, s, params, policy))
            put(-j1, j1, j2, -j2, coef_dbar(u, j1, j2, s, params, policy))
    for j in indices:
        put(-j, j, j, -j, coef_e(u, j, s, params, policy))

    scalar = 1 + 0j
    mode = PrefactorMode(prefactor_mode)
    if mode is PrefactorMode.RHO0:
        scalar = rho0(u, params, policy=policy)
        M *= scalar
    elif mode is PrefactorMode.RHO_HAT_SQUARED:
        scalar = rho_hat_squared(u, params, policy)
    logger.debug(f"assembled R-matrix N={N} u={u} mode={mode.value}")
    M.setflags(write=False)
    return RMatrixValue(N=N, u=u, s=s, prefactor_mode=mode, matrix=M, scalar=scalar)


def permutation(N: int) -> np.ndarray:
    """Flip operator on V (x) V"""
    dim = 2 * N + 1
    P = np.zeros((dim * dim, dim * dim))
    for a in range(dim):
        for c in range(dim):
            P[a * dim + c, c * dim + a] = 1
    return P


def weight_mask(N: int) -> np.ndarray:
    """True where weight conservation allows a nonzero entry"""
    dim = 2 * N + 1
    indices = ordered_indices(N)
    mask = np.zeros((dim * dim, dim * dim), dtype=bool)
    for a in indices:
        for c in indices:
            for b in indices:
                for d in indices:
                    if np.array_equal(weight(a, N) + weight(c, N), weight(b, N) + weight(d, N)):
                        mask[flat(a, c, N), flat(b, d, N)] = True
    return mask


# Gauge map ---------------------------------------------------------------


def gauge_F_squared(
    s: DynamicalParam, j: int, params: AlgebraParams, policy: TruncationPolicy | None = None
) -> complex:
    """F(s, s + j^)^2 = G_{s_j} / G_{s_j}(j).

    At j = 0 both factors are read at s_0 = -1/2 with the m-products running
    over 1..N, which gives -prod_m [s_m + 1/2] / [s_m - 1/2].
    """
    if j == 0:
        values = [s.lookup(m) for m in range(1, s.N + 1)]
        return -bracket_quotient([v + 0.5 for v in values], [v - 0.5 for v in values], params, policy)
    return G_s(j, s, params, policy) / G_branch(j, s, params, policy)


def gauge_F(s: DynamicalParam, j: int, params: AlgebraParams, policy: TruncationPolicy | None = None) -> complex:
    """Principal square root of gauge_F_squared"""
    return cmath.sqrt(gauge_F_squared(s, j, params, policy))


def gauge_Ga(a: DynamicalParam, params: AlgebraParams, policy: TruncationPolicy | None = None) -> complex:
    """G_a with the sign factor fixed to 1"""
    values = a.values
    numerators = list(values)
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            numerators += [values[i] - values[j], values[i] + values[j]]
    return bracket_quotient(numerators, [], params, policy)


def face_weight(
    a: DynamicalParam,
    b: DynamicalParam,
    d: DynamicalParam,
    c: DynamicalParam,
    u: complex,
    params: AlgebraParams,
    policy: TruncationPolicy | None = None,
    matrix: RMatrixValue | None = None,
) -> complex:
    """Bare face weight W(a, b; d, c | u) read off R(u, s = a).

    Heights differ by unit weights: b = a + i^, c = b + j^, d = a + l^, c = d + k^.
    The weight is the entry ((k, l), (i, j)), the coefficient of
    E_{k,i} (x) E_{l,j}. Returns 0 when the steps are not unit weights.
    """
    N = params.N
    steps = [unit_step(a, b, N), unit_step(b, c, N), unit_step(a, d, N), unit_step(d, c, N)]
    if any(step is None for step in steps):
        return 0j
    i, j, l, k = steps
    value = matrix if matrix is not None else assemble(u, a, PrefactorMode.NONE, params, policy)
    return value.entry(k, l, i, j)


def unit_step(lower: DynamicalParam, upper: DynamicalParam, N: int) -> int | None:
    """Index j with upper = lower + j^, or None"""
    diff = np.array(upper.values) - np.array(lower.values)
    for j in ordered_indices(N):
        if np.allclose(diff, weight(j, N), atol=1e-12):
            return j
    return None


def to_jmo(
    a: DynamicalParam,
    i: int,
    j: int,
    k: int,
    l: int,
    u: complex,
    params: AlgebraParams,
    policy: TruncationPolicy | None = None,
) -> complex:
    """JMO weight of the face W(a, a + i^; a + l^, a + i^ + j^), rho_hat included"""
    N = params.N
    entry = assemble(u, a, PrefactorMode.NONE, params, policy).entry(k, l, i, j)
    eta = params.eta
    scale = rho_hat(u, params, policy) * bracket_quotient([eta, 1], [eta - u, u + 1], params, policy)
    b = a.shifted(weight(i, N))
    d = a.shifted(weight(l, N))
    ratio = (
        gauge_F(a, i, params, policy)
        * gauge_F(b, j, params, policy)
        / (gauge_F(a, l, params, policy) * gauge_F(d, k, params, policy))
    )
    return entry / (scale * ratio)


# Export ------------------------------------------------------------------


def matrix_to_schema(value: RMatrixValue) -> RMatrixValueSchema:
    """Weight-allowed entries of an assembled matrix in canonical index order"""
    N = value.N
    indices = ordered_indices(N)
    entries = []
    for i, j, k, l in itertools.product(indices, repeat=4):
        if not value.allowed(i, j, k, l):
            continue
        z = value.entry(i, j, k, l)
        entries.append(MatrixEntry(row=(i, j), col=(k, l), re=z.real, im=z.imag))
    return RMatrixValueSchema(
        N=N,
        u=(value.u.real, value.u.imag),
        s=[(v.real, v.imag) for v in value.s.values],
        prefactor_mode=value.prefactor_mode,
        scalar=(value.scalar.real, value.scalar.imag),
        entries=entries,
    )
