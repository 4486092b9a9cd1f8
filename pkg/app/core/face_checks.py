"""Global identities of the R-matrix in face and operator form.

Face weights W(a, b; d, c | u) are the bare entries ((k, l), (i, j)) of
R(u, s = a) for the steps b = a + i^, c = b + j^, d = a + l^; the
prefactor rho_hat enters only through rho_hat_squared so that every
statement with an odd number of square roots is compared squared or up
to a global sign.
"""

import itertools
from dataclasses import dataclass, field

import numpy as np
from loguru import logger

from app.core.rmatrix import (
    G_at,
    G_s,
    RMatrixValue,
    assemble,
    bracket_quotient,
    coef_bbar,
    flat,
    gauge_F_squared,
    gauge_Ga,
    ordered_indices,
    permutation,
    phi,
    rho0,
    rho_hat_squared,
    unit_step,
    weight,
    weight_mask,
)
from app.core.special_functions import bracket
from app.models.domain import AlgebraParams, DynamicalParam, TruncationPolicy
from app.models.types.prefactor_mode import PrefactorMode


@dataclass
class Residual:
    """Largest absolute and relative deviation seen so far"""

    max_abs: float = 0.0
    max_rel: float = 0.0
    skipped: int = 0
    notes: list[str] = field(default_factory=list)

    def add(self, lhs: complex, rhs: complex, scale: float | None = None) -> None:
        diff = abs(lhs - rhs)
        reference = scale if scale is not None else max(abs(lhs), abs(rhs), 1e-300)
        self.max_abs = max(self.max_abs, diff)
        self.max_rel = max(self.max_rel, diff / max(reference, 1e-300))

    def merge(self, other: "Residual") -> None:
        self.max_abs = max(self.max_abs, other.max_abs)
        self.max_rel = max(self.max_rel, other.max_rel)
        self.skipped += other.skipped
        self.notes.extend(other.notes)


class FaceWeights:
    """Memoized bare face weights at fixed rank"""

    def __init__(self, params: AlgebraParams, policy: TruncationPolicy | None = None):
        self.params = params
        self.policy = policy
        self.N = params.N
        self._matrices: dict[tuple[tuple[complex, ...], complex], RMatrixValue] = {}

    def matrix(self, a: DynamicalParam, u: complex) -> RMatrixValue:
        key = (a.values, complex(u))
        if key not in self._matrices:
            self._matrices[key] = assemble(u, a, PrefactorMode.NONE, self.params, self.policy)
        return self._matrices[key]

    def __call__(self, a: DynamicalParam, b: DynamicalParam, d: DynamicalParam, c: DynamicalParam, u: complex) -> complex:
        steps = [unit_step(a, b, self.N), unit_step(b, c, self.N), unit_step(a, d, self.N), unit_step(d, c, self.N)]
        if any(step is None for step in steps):
            return 0j
        i, j, l, k = steps
        return self.matrix(a, u).entry(k, l, i, j)

    def neighbours(self, a: DynamicalParam) -> list[DynamicalParam]:
        return [a.shifted(weight(j, self.N)) for j in ordered_indices(self.N)]

    def between(self, a: DynamicalParam, c: DynamicalParam) -> list[DynamicalParam]:
        """Heights g one unit step from both a and c"""
        return [g for g in self.neighbours(a) if unit_step(g, c, self.N) is not None]

    def f_squared(self, lower: DynamicalParam, upper: DynamicalParam) -> complex:
        """F(lower, upper)^2 for a unit step"""
        return gauge_F_squared(lower, unit_step(lower, upper, self.N), self.params, self.policy)


def _k_factor(u: complex, params: AlgebraParams, policy: TruncationPolicy | None) -> complex:
    """[u][eta - u + 1] / ([u + 1][eta - u])"""
    eta = params.eta
    return bracket_quotient([u, eta - u + 1], [u + 1, eta - u], params, policy)


def _faces(W: FaceWeights, a: DynamicalParam) -> list[tuple[DynamicalParam, DynamicalParam, DynamicalParam]]:
    """Every (b, d, c) closing a face at a"""
    faces = []
    for b in W.neighbours(a):
        for c in W.neighbours(b):
            for d in W.between(a, c):
                faces.append((b, d, c))
    return faces


# Operator-form checks ----------------------------------------------------


def check_r_initial(s: DynamicalParam, params: AlgebraParams, policy: TruncationPolicy | None = None) -> Residual:
    """R(0, s) equals the flip operator"""
    value = assemble(0, s, PrefactorMode.NONE, params, policy)
    result = Residual()
    diff = np.abs(value.matrix - permutation(params.N))
    result.max_abs = result.max_rel = float(np.max(diff))
    return result


def check_weight_conservation(u: complex, s: DynamicalParam, params: AlgebraParams, policy: TruncationPolicy | None = None) -> Residual:
    value = assemble(u, s, PrefactorMode.NONE, params, policy)
    result = Residual()
    forbidden = np.abs(value.matrix[~weight_mask(params.N)])
    result.max_abs = result.max_rel = float(np.max(forbidden)) if forbidden.size else 0.0
    return result


def check_bbar_spread(u: complex, s: DynamicalParam, params: AlgebraParams, policy: TruncationPolicy | None = None) -> Residual:
    """Every bbar slot carries the same s-independent value"""
    N = params.N
    value = assemble(u, s, PrefactorMode.NONE, params, policy)
    target = coef_bbar(u, params, policy)
    result = Residual()
    indices = ordered_indices(N)
    for x, j1 in enumerate(indices):
        for j2 in indices[x + 1 :]:
            if j2 != -j1:
                result.add(value.matrix[flat(j2, j1, N), flat(j2, j1, N)], target)
    return result


def check_g_inversion(s: DynamicalParam, params: AlgebraParams, policy: TruncationPolicy | None = None) -> Residual:
    """G_{s_j - 1} G_{s_-j} = 1 and G_{s_-j - 1} G_{s_j} = 1"""
    result = Residual()
    for j in range(1, params.N + 1):
        for sign in (1, -1):
            jj = sign * j
            lowered = G_at(s.lookup(jj) - 1, jj, s, params, policy)
            result.add(lowered * G_s(-jj, s, params, policy), 1)
    return result


def check_prefactor_phi(u: complex, params: AlgebraParams, policy: TruncationPolicy | None = None) -> Residual:
    """rho0(u) phi(u) = [u + 1]"""
    result = Residual()
    result.add(rho0(u, params, policy=policy) * phi(u, params, policy), bracket(u + 1, params, policy=policy))
    return result


def check_rho_inversion(u: complex, params: AlgebraParams, policy: TruncationPolicy | None = None) -> Residual:
    """(rho_hat(u) rho_hat(-u))^2 = 1 and rho_hat(eta - u)^2 = rho_hat(u)^2 K(u)^2"""
    eta = params.eta
    result = Residual()
    result.add(rho_hat_squared(u, params, policy) * rho_hat_squared(-u, params, policy), 1)
    rhs = rho_hat_squared(u, params, policy) * _k_factor(u, params, policy) ** 2
    result.add(rho_hat_squared(eta - u, params, policy), rhs)
    return result


def _three_slot(blocks: list[np.ndarray], slots: tuple[int, int], dim: int) -> np.ndarray:
    """Embed a two-slot operator in V^{(x)3}; blocks[n] acts when the spectator slot holds position n"""
    out = np.zeros((dim,) * 6, dtype=complex)
    for n, block in enumerate(blocks):
        tensor = block.reshape(dim, dim, dim, dim)
        match slots:
            case (1, 2):
                out[:, :, n, :, :, n] = tensor
            case (1, 3):
                out[:, n, :, :, n, :] = tensor
            case (2, 3):
                out[n, :, :, n, :, :] = tensor
    return out.reshape(dim**3, dim**3)


def check_dybe(
    u1: complex, u2: complex, u3: complex, s: DynamicalParam, params: AlgebraParams, policy: TruncationPolicy | None = None
) -> Residual:
    """R12(u12, s + h3) R13(u13, s) R23(u23, s + h1) = R23(u23, s) R13(u13, s + h2) R12(u12, s).

    A shift by h^(k) makes the operator block diagonal in slot k, each block
    read at s plus the weight sitting in that slot.
    """
    N = params.N
    dim = 2 * N + 1
    indices = ordered_indices(N)
    W = FaceWeights(params, policy)

    def plain(u: complex) -> list[np.ndarray]:
        return [W.matrix(s, u).matrix] * dim

    def lifted(u: complex) -> list[np.ndarray]:
        return [W.matrix(s.shifted(weight(j, N)), u).matrix for j in indices]

    u12, u13, u23 = u1 - u2, u1 - u3, u2 - u3
    lhs = (
        _three_slot(lifted(u12), (1, 2), dim)
        @ _three_slot(plain(u13), (1, 3), dim)
        @ _three_slot(lifted(u23), (2, 3), dim)
    )
    rhs = (
        _three_slot(plain(u23), (2, 3), dim)
        @ _three_slot(lifted(u13), (1, 3), dim)
        @ _three_slot(plain(u12), (1, 2), dim)
    )
    result = Residual()
    scale = float(np.linalg.norm(lhs))
    result.max_abs = float(np.max(np.abs(lhs - rhs)))
    result.max_rel = float(np.linalg.norm(lhs - rhs)) / max(scale, 1e-300)
    logger.debug(f"DYBE N={N}: relative residual {result.max_rel:.3e}")
    return result


# Face-form checks --------------------------------------------------------


def check_reflection(u: complex, a: DynamicalParam, params: AlgebraParams, policy: TruncationPolicy | None = None) -> Residual:
    """W(a,b;d,c) F(a,d)^2 F(d,c)^2 = W(a,d;b,c) F(a,b)^2 F(b,c)^2"""
    W = FaceWeights(params, policy)
    result = Residual()
    for b, d, c in _faces(W, a):
        lhs = W(a, b, d, c, u) * W.f_squared(a, d) * W.f_squared(d, c)
        rhs = W(a, d, b, c, u) * W.f_squared(a, b) * W.f_squared(b, c)
        result.add(lhs, rhs)
    return result


def check_crossing(u: complex, a: DynamicalParam, params: AlgebraParams, policy: TruncationPolicy | None = None) -> Residual:
    """Crossing symmetry compared squared:
    W(a,b;d,c|u)^2 = (F(b,c)F(c,b) / F(a,d)F(d,a))^2 G_b G_d / (G_a G_c) K(u)^2 W(d,a;c,b|eta-u)^2
    """
    eta = params.eta
    W = FaceWeights(params, policy)
    k2 = _k_factor(u, params, policy) ** 2
    result = Residual()
    for b, d, c in _faces(W, a):
        f_ratio = W.f_squared(b, c) * W.f_squared(c, b) / (W.f_squared(a, d) * W.f_squared(d, a))
        g_ratio = gauge_Ga(b, params, policy) * gauge_Ga(d, params, policy) / (
            gauge_Ga(a, params, policy) * gauge_Ga(c, params, policy)
        )
        lhs = W(a, b, d, c, u) ** 2
        rhs = f_ratio * g_ratio * k2 * W(d, a, c, b, eta - u) ** 2
        result.add(lhs, rhs)
    return result


def check_unitarity(u: complex, a: DynamicalParam, params: AlgebraParams, policy: TruncationPolicy | None = None) -> Residual:
    """sum_g W(a,g;d,c|u) W(a,b;g,c|-u) rho_hat(u) rho_hat(-u) = delta_bd, up to the sign of rho_hat(u) rho_hat(-u)"""
    W = FaceWeights(params, policy)
    rho_pair = np.sqrt(complex(rho_hat_squared(u, params, policy) * rho_hat_squared(-u, params, policy)))
    result = Residual()
    signs: set[int] = set()
    for c in {x.values: x for b in W.neighbours(a) for x in W.neighbours(b)}.values():
        middle = W.between(a, c)
        for b, d in itertools.product(middle, middle):
            total = sum(W(a, g, d, c, u) * W(a, b, g, c, -u) for g in middle) * rho_pair
            if b.values == d.values:
                sign = 1 if abs(total - 1) <= abs(total + 1) else -1
                signs.add(sign)
                result.add(total, sign)
            else:
                result.add(total, 0, scale=1.0)
    if len(signs) > 1:
        result.max_abs = result.max_rel = float("inf")
        result.notes.append("no consistent global sign for rho_hat(u) rho_hat(-u)")
    return result


def check_inversion2(u: complex, a: DynamicalParam, params: AlgebraParams, policy: TruncationPolicy | None = None) -> Residual:
    """sum_g G_g W(a,b;d,g|eta-u) W(c,d;b,g|eta+u) K(u) K(-u) is +-G_b G_d / G_a for a = c and 0 otherwise"""
    eta = params.eta
    W = FaceWeights(params, policy)
    kk = _k_factor(u, params, policy) * _k_factor(-u, params, policy)
    result = Residual()
    for b in W.neighbours(a):
        for d in W.neighbours(a):
            for c in W.between(b, d):
                candidates = {x.values: x for x in W.neighbours(b) + W.neighbours(d)}.values()
                terms = [
                    gauge_Ga(g, params, policy) * W(a, b, d, g, eta - u) * W(c, d, b, g, eta + u) * kk
                    for g in candidates
                ]
                total = sum(terms)
                scale = max((abs(t) for t in terms), default=1.0)
                if c.values == a.values:
                    target = gauge_Ga(b, params, policy) * gauge_Ga(d, params, policy) / gauge_Ga(a, params, policy)
                    result.add(total, target if abs(total - target) <= abs(total + target) else -target)
                else:
                    result.add(total, 0, scale=max(scale, 1e-300))
    return result
