"""Exchange relations with closed-form targets.

A relation A(u_A) B(u_B) = f(u_A, u_B) B(u_B) A(u_A) is checked by
sampling points inside the convergence annulus of both contractions and
comparing the engine scalar with f. Pairs with an empty annulus are
sampled on the continued contractions instead. Relations that hold up to
a constant gauge factor must show one constant of the form +-q^{a + b/r + b'/r*}
across at least two samples.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np
from loguru import logger

from app.core.errors import InvalidParameters, NonConvergent
from app.core.exchange import (
    ExchangeOutcome,
    OperatorDescriptor,
    RationalExponent,
    annulus_point,
    continuation_point,
    e_current,
    exchange_ratio,
    f_current,
    k_current,
    modified_k,
    modified_k_label,
    type_one_vertex,
    type_two_vertex,
)
from app.core.rmatrix import bracket_quotient, chi, mu, psi_star_exchange, rho0, rho_tilde
from app.core.special_functions import theta_p
from app.models.domain import AlgebraParams, TruncationPolicy
from app.models.types.relation_family import RelationFamily

Target = Callable[[complex, complex], complex]


@dataclass(frozen=True)
class ExchangeRelation:
    name: str
    family: RelationFamily
    left: OperatorDescriptor
    right: OperatorDescriptor
    target: Target
    gauge: bool | None = None

    @property
    def allows_gauge(self) -> bool:
        """Per-relation override of the family rule"""
        return self.family.allows_gauge_constant if self.gauge is None else self.gauge


@dataclass(frozen=True)
class GaugeFactor:
    """sign * q^{exponent}, the constant left between engine and closed form"""

    sign: int
    exponent: RationalExponent

    def value(self, params: AlgebraParams) -> complex:
        return self.sign * params.qpow(self.exponent.value(params))

    def __str__(self) -> str:
        return f"{'-' if self.sign < 0 else ''}q^({self.exponent})"


@dataclass(frozen=True)
class RelationResult:
    """Outcome of one relation over all sample points"""

    name: str
    family: RelationFamily
    residual: float
    gauge_constant: complex
    p_independence: float
    inverse_residual: float
    charge_ok: bool
    samples: int
    gauge: GaugeFactor | None = None
    continued: bool = False


_GAUGE_MATCH = 1e-6


def identify_gauge(constant: complex, params: AlgebraParams) -> GaugeFactor | None:
    """The simplest +-q^{a + b/r + b'/r*}, a in Z/2 and b, b' in -3..3, matching constant"""
    best: GaugeFactor | None = None
    best_weight = math.inf
    for sign in (1, -1):
        for twice_a in range(-4, 5):
            for per_r in range(-3, 4):
                for per_r_star in range(-3, 4):
                    exponent = RationalExponent(Fraction(twice_a, 2), Fraction(per_r), Fraction(per_r_star))
                    candidate = GaugeFactor(sign, exponent)
                    if abs(constant / candidate.value(params) - 1) >= _GAUGE_MATCH:
                        continue
                    weight = abs(twice_a) + abs(per_r) + abs(per_r_star) + (sign < 0)
                    if weight < best_weight:
                        best, best_weight = candidate, weight
    return best


# Theta helpers -----------------------------------------------------------


def _theta(params: AlgebraParams, policy: TruncationPolicy | None, starred: bool) -> Callable[[complex, complex], complex]:
    """(shift, u) -> Theta_p(q^shift z), z = q^{2u}"""
    nome = params.p_star if starred else params.p

    def th(shift: complex, u: complex) -> complex:
        return theta_p(params.qpow(shift + 2 * u), nome, policy)

    return th


def _rho_tilde_ratio(u: complex, params: AlgebraParams, policy: TruncationPolicy | None) -> complex:
    return rho_tilde(u, params, True, policy) / rho_tilde(u, params, False, policy)


def _rho0_ratio(u: complex, params: AlgebraParams, policy: TruncationPolicy | None) -> complex:
    return rho0(u, params, True, policy) / rho0(u, params, False, policy)


# Families ----------------------------------------------------------------


def kk_relations(params: AlgebraParams, policy: TruncationPolicy | None = None) -> list[ExchangeRelation]:
    """Bare k currents against each other"""
    N, eta = params.N, params.eta
    th = _theta(params, policy, starred=False)
    ths = _theta(params, policy, starred=True)

    def common(u: complex) -> complex:
        return _rho_tilde_ratio(u, params, policy)

    def shifted(u: complex) -> complex:
        return ths(-2, u) * th(0, u) / (ths(0, u) * th(-2, u))

    def plus(j: int) -> OperatorDescriptor:
        return k_current(1, j, params, j / 2)

    def minus_xi(j: int) -> OperatorDescriptor:
        return k_current(-1, j, params, -j / 2 - eta)

    k0_shifted = k_current(0, N, params, (N - 0.5) / 2)
    relations: list[ExchangeRelation] = []
    for j in range(1, N + 1):
        for sign, tag in ((1, "+"), (-1, "-")):
            current = k_current(sign, j, params)
            relations.append(
                ExchangeRelation(f"k{tag}{j}.k{tag}{j}", RelationFamily.KK, current, current, lambda a, b: common(a - b))
            )
    for j in range(1, N + 1):
        for k in range(j + 1, N + 1):
            relations.append(
                ExchangeRelation(
                    f"k+{j}.k+{k}", RelationFamily.KK, plus(j), plus(k), lambda a, b: common(a - b) * shifted(a - b)
                )
            )
            relations.append(
                ExchangeRelation(
                    f"k-{k}.k-{j}",
                    RelationFamily.KK,
                    k_current(-1, k, params, -k / 2),
                    k_current(-1, j, params, -j / 2),
                    lambda a, b: common(a - b) * shifted(a - b),
                )
            )
    for j in range(1, N + 1):
        for k in range(1, N + 1):
            if j != k:
                relations.append(
                    ExchangeRelation(
                        f"k+{j}.k-{k}", RelationFamily.KK, plus(j), minus_xi(k), lambda a, b: common(a - b) * shifted(a - b)
                    )
                )
                continue

            def diagonal(a: complex, b: complex, j: int = j) -> complex:
                u = a - b
                s = 2 * eta
                extra = ths(2 * j - 2 + s, u) * th(2 * j + s, u) / (ths(2 * j + s, u) * th(2 * j - 2 + s, u))
                return common(u) * extra * shifted(u)

            relations.append(ExchangeRelation(f"k+{j}.k-{j}", RelationFamily.KK, plus(j), minus_xi(j), diagonal))

    def k0k0(a: complex, b: complex) -> complex:
        u = a - b
        num = ths(-2, u) * th(2, u) * ths(1, u) * th(-1, u)
        den = ths(2, u) * th(-2, u) * ths(-1, u) * th(1, u)
        return common(u) * num / den

    k0 = k_current(0, N, params)
    relations.append(ExchangeRelation("k0.k0", RelationFamily.KK, k0, k0, k0k0))
    for j in range(1, N + 1):
        relations.append(
            ExchangeRelation(
                f"k+{j}.k0", RelationFamily.KK, plus(j), k0_shifted, lambda a, b: common(a - b) * shifted(a - b)
            )
        )

        def minus_k0(a: complex, b: complex) -> complex:
            u = a - b
            return common(u) * ths(0, u) * th(2, u) / (ths(2, u) * th(0, u))

        relations.append(ExchangeRelation(f"k-{j}.k0", RelationFamily.KK, minus_xi(j), k0_shifted, minus_k0))
    return relations


def kef_relations(params: AlgebraParams, policy: TruncationPolicy | None = None) -> list[ExchangeRelation]:
    """Bare k currents against the e and f currents"""
    N, c = params.N, params.c
    th = _theta(params, policy, starred=False)
    ths = _theta(params, policy, starred=True)
    relations: list[ExchangeRelation] = []

    def unit(a: complex, b: complex) -> complex:
        return 1 + 0j

    for j in range(1, N + 1):
        for sign, tag in ((1, "+"), (-1, "-")):
            k = k_current(sign, j, params)
            for l in range(1, N + 1):
                e, f = e_current(l, params), f_current(l, params)
                if l == j:
                    e_target = lambda a, b, s=sign: ths(-c, a - b) / ths(-c - 2 * s, a - b)
                    f_target = lambda a, b, s=sign: th(-2 * s, a - b) / th(0, a - b)
                elif l == j - 1:
                    e_target = lambda a, b, s=sign: ths(-c - s, a - b) / ths(-c + s, a - b)
                    f_target = lambda a, b, s=sign: th(s, a - b) / th(-s, a - b)
                else:
                    e_target = f_target = unit
                relations.append(ExchangeRelation(f"k{tag}{j}.e{l}", RelationFamily.KEF, k, e, e_target))
                relations.append(ExchangeRelation(f"k{tag}{j}.f{l}", RelationFamily.KEF, k, f, f_target))

    k0 = k_current(0, N, params, (N - 0.5) / 2)
    for l in range(1, N + 1):
        e, f = e_current(l, params), f_current(l, params)
        if l == N:

            def e_target(a: complex, b: complex) -> complex:
                u = a - b
                return ths(-c + N, u) * ths(-c + N - 1, u) / (ths(-c + N - 2, u) * ths(-c + N + 1, u))

            def f_target(a: complex, b: complex) -> complex:
                u = a - b
                return th(N - 2, u) * th(N + 1, u) / (th(N, u) * th(N - 1, u))

        else:
            e_target = f_target = unit
        relations.append(ExchangeRelation(f"k0.e{l}", RelationFamily.KEF, k0, e, e_target))
        relations.append(ExchangeRelation(f"k0.f{l}", RelationFamily.KEF, k0, f, f_target))
    return relations


def rel_kk_relations(params: AlgebraParams, policy: TruncationPolicy | None = None) -> list[ExchangeRelation]:
    """Modified K^+ currents against each other"""
    N, eta = params.N, params.eta

    def q(nums: list[complex], dens: list[complex], starred: bool = False) -> complex:
        return bracket_quotient(nums, dens, params, policy, starred)

    def ratio(u: complex) -> complex:
        return _rho0_ratio(u, params, policy)

    def generic(a: complex, b: complex) -> complex:
        u = a - b
        return ratio(u) * q([u - 1], [u], True) * q([u], [u - 1])

    def inverted(a: complex, b: complex) -> complex:
        # K^+_{-j} K^+_{-l} is K^+_{+l} K^+_{+j} read in the opposite order
        return 1 / generic(b, a)

    relations: list[ExchangeRelation] = []
    for j in range(1, N + 1):
        for sign, tag in ((1, "+"), (-1, "-")):
            current = modified_k(sign, j, params)
            relations.append(
                ExchangeRelation(f"K{tag}{j}.K{tag}{j}", RelationFamily.REL_KK, current, current, lambda a, b: ratio(a - b))
            )
        later = list(range(j + 1, N + 1)) + [0]
        for l in later:
            relations.append(
                ExchangeRelation(
                    f"K+{j}.K+{l}", RelationFamily.REL_KK, modified_k(1, j, params), modified_k_label(l, params), generic
                )
            )
            relations.append(
                ExchangeRelation(
                    f"K-{j}.K-{l}", RelationFamily.REL_KK, modified_k(-1, j, params), modified_k_label(-l, params), inverted
                )
            )

        def opposite(a: complex, b: complex, j: int = j) -> complex:
            u = a - b
            star = q([u + eta + j - 1, u - 1], [u + eta + j, u], True)
            plain = q([u + eta + j, u], [u + eta + j - 1, u - 1])
            return ratio(u) * star * plain

        relations.append(
            ExchangeRelation(f"K+{j}.K-{j}", RelationFamily.REL_KK, modified_k(1, j, params), modified_k(-1, j, params), opposite)
        )
        for l in range(1, N + 1):
            if l != j:
                relations.append(
                    ExchangeRelation(
                        f"K+{j}.K-{l}", RelationFamily.REL_KK, modified_k(1, j, params), modified_k(-1, l, params), generic
                    )
                )

    def k0k0(a: complex, b: complex) -> complex:
        u = a - b
        star = q([u - 1, u + 0.5], [u + 1, u - 0.5], True)
        plain = q([u + 1, u - 0.5], [u - 1, u + 0.5])
        return ratio(u) * star * plain

    k0 = modified_k(0, N, params)
    relations.append(ExchangeRelation("K0.K0", RelationFamily.REL_KK, k0, k0, k0k0))
    return relations


def rel_ek_relations(params: AlgebraParams, policy: TruncationPolicy | None = None) -> list[ExchangeRelation]:
    """Modified K^+ currents against the modified E and F currents"""
    N, eta, c = params.N, params.eta, params.c

    def q(nums: list[complex], dens: list[complex], starred: bool = False) -> complex:
        return bracket_quotient(nums, dens, params, policy, starred)

    def unit(a: complex, b: complex) -> complex:
        return 1 + 0j

    relations: list[ExchangeRelation] = []
    for j in range(1, N + 1):
        plus, minus = modified_k(1, j, params), modified_k(-1, j, params)
        for l in range(1, N + 1):
            e, f = e_current(l, params), f_current(l, params)
            if l == j:
                targets = [
                    (plus, e, lambda a, b, j=j: q([a - b + (j - c) / 2], [a - b + (j - c) / 2 - 1], True)),
                    (minus, e, lambda a, b, j=j: q([a - b - (j + c) / 2 - eta], [a - b - (j + c) / 2 - eta + 1], True)),
                    (plus, f, lambda a, b, j=j: q([a - b + j / 2 - 1], [a - b + j / 2])),
                    (minus, f, lambda a, b, j=j: q([a - b - j / 2 - eta + 1], [a - b - j / 2 - eta])),
                ]
            elif l == j - 1:
                targets = [
                    (plus, e, lambda a, b, j=j: q([a - b + (j - 1 - c) / 2], [a - b + (j - 1 - c) / 2 + 1], True)),
                    (
                        minus,
                        e,
                        lambda a, b, j=j: q([a - b - (j - 1 + c) / 2 - eta], [a - b - (j - 1 + c) / 2 - eta - 1], True),
                    ),
                    (plus, f, lambda a, b, j=j: q([a - b + (j + 1) / 2], [a - b + (j + 1) / 2 - 1])),
                    (minus, f, lambda a, b, j=j: q([a - b - (j + 1) / 2 - eta], [a - b - (j + 1) / 2 - eta + 1])),
                ]
            else:
                targets = [(plus, e, unit), (minus, e, unit), (plus, f, unit), (minus, f, unit)]
            for k, current, target in targets:
                relations.append(ExchangeRelation(f"{k.name}.{current.name}", RelationFamily.REL_EK, k, current, target))

    k0 = modified_k(0, N, params)
    for l in range(1, N + 1):
        e, f = e_current(l, params), f_current(l, params)
        if l == N:

            def e_target(a: complex, b: complex) -> complex:
                u = a - b
                return q([u + (N - c) / 2, u + (N - c - 1) / 2], [u + (N - c) / 2 - 1, u + (N - c + 1) / 2], True)

            def f_target(a: complex, b: complex) -> complex:
                u = a - b
                return q([u + N / 2 - 1, u + (N + 1) / 2], [u + N / 2, u + (N - 1) / 2])

        else:
            e_target = f_target = unit
        relations.append(ExchangeRelation(f"K0.{e.name}", RelationFamily.REL_EK, k0, e, e_target))
        relations.append(ExchangeRelation(f"K0.{f.name}", RelationFamily.REL_EK, k0, f, f_target))
    return relations


def vertex_relations(params: AlgebraParams, policy: TruncationPolicy | None = None) -> list[ExchangeRelation]:
    """Level-one vertex operators against each other, the K^+_{-1} current and E/F"""
    if abs(params.c - 1) > 1e-12:
        raise InvalidParameters(f"vertex operators live at level 1, got c={params.c}")
    N, eta = params.N, params.eta
    phi, psi = type_one_vertex(params), type_two_vertex(params)
    k_minus = modified_k(-1, 1, params)

    def q(nums: list[complex], dens: list[complex], starred: bool = False) -> complex:
        return bracket_quotient(nums, dens, params, policy, starred)

    def unit(a: complex, b: complex) -> complex:
        return 1 + 0j

    relations = [
        ExchangeRelation("Phi.Phi", RelationFamily.VERTEX_BARE, phi, phi, lambda a, b: mu(b - a, params, False, policy)),
        ExchangeRelation(
            "Psi*.Psi*", RelationFamily.VERTEX_BARE, psi, psi, lambda a, b: psi_star_exchange(a - b, params, policy)
        ),
        # chi carries no zero-mode power; the integral monomial q z_B/z_A comes from e^{Q} against X^{P+h}
        ExchangeRelation(
            "Phi.Psi*",
            RelationFamily.VERTEX_BARE,
            phi,
            psi,
            lambda a, b: chi(a - b, params, policy) * params.qpow(1 - 2 * (a - b)),
            gauge=True,
        ),
        ExchangeRelation(
            "Phi.F1",
            RelationFamily.VERTEX_SUFFICIENT,
            phi,
            f_current(1, params),
            lambda a, b: q([a - b - eta], [a - b - eta - 1]),
        ),
        ExchangeRelation(
            "E1.Psi*",
            RelationFamily.VERTEX_SUFFICIENT,
            e_current(1, params),
            psi,
            lambda a, b: q([b - a - eta + 0.5], [b - a - eta - 0.5], True),
        ),
        ExchangeRelation(
            "Phi.K-1",
            RelationFamily.VERTEX_INTERTWINING,
            phi,
            k_minus,
            lambda a, b: rho0(b - a + 0.5, params, False, policy),
        ),
        ExchangeRelation(
            "K-1.Psi*",
            RelationFamily.VERTEX_INTERTWINING,
            k_minus,
            psi,
            lambda a, b: rho0(a - b - 0.5, params, True, policy),
        ),
    ]
    for l in range(1, N + 1):
        relations.append(ExchangeRelation(f"Phi.E{l}", RelationFamily.VERTEX_SUFFICIENT, phi, e_current(l, params), unit))
        relations.append(ExchangeRelation(f"Psi*.F{l}", RelationFamily.VERTEX_SUFFICIENT, psi, f_current(l, params), unit))
        if l >= 2:
            relations.append(ExchangeRelation(f"Phi.F{l}", RelationFamily.VERTEX_SUFFICIENT, phi, f_current(l, params), unit))
            relations.append(ExchangeRelation(f"Psi*.E{l}", RelationFamily.VERTEX_SUFFICIENT, psi, e_current(l, params), unit))
    return relations


REGISTRY: dict[RelationFamily, Callable[[AlgebraParams, TruncationPolicy | None], list[ExchangeRelation]]] = {
    RelationFamily.KK: kk_relations,
    RelationFamily.KEF: kef_relations,
    RelationFamily.REL_KK: rel_kk_relations,
    RelationFamily.REL_EK: rel_ek_relations,
}


def relations_for(family: RelationFamily, params: AlgebraParams, policy: TruncationPolicy | None = None) -> list[ExchangeRelation]:
    family = RelationFamily(family)
    if family in REGISTRY:
        return REGISTRY[family](params, policy)
    return [r for r in vertex_relations(params, policy) if r.family is family]


# Verification ------------------------------------------------------------


def _sample(
    relation: ExchangeRelation,
    params: AlgebraParams,
    policy: TruncationPolicy | None,
    rng: np.random.Generator,
    max_attempts: int,
) -> tuple[complex, complex, ExchangeOutcome, ExchangeOutcome]:
    """One sample point with both orderings, from the annulus when there is one"""
    for attempt in range(max_attempts):
        try:
            u_a, u_b = annulus_point(relation.left, relation.right, params, rng, attempt)
        except NonConvergent as exc:
            logger.debug(f"{relation.name}: {exc}, using the continued contractions")
            break
        try:
            forward = exchange_ratio(relation.left, u_a, relation.right, u_b, params, policy, rng)
            backward = exchange_ratio(relation.right, u_b, relation.left, u_a, params, policy, rng)
        except NonConvergent as exc:
            logger.debug(f"{relation.name}: retrying sample after {exc}")
            continue
        return u_a, u_b, forward, backward
    else:
        logger.debug(f"{relation.name}: no convergent sample in {max_attempts} attempts, continuing")
    u_a, u_b = continuation_point(rng)
    forward = exchange_ratio(relation.left, u_a, relation.right, u_b, params, policy, rng, continued=True)
    backward = exchange_ratio(relation.right, u_b, relation.left, u_a, params, policy, rng, continued=True)
    return u_a, u_b, forward, backward


def verify_relation(
    relation: ExchangeRelation,
    params: AlgebraParams,
    policy: TruncationPolicy | None = None,
    rng: np.random.Generator | None = None,
    samples: int = 3,
    max_attempts: int = 4,
) -> RelationResult:
    """Engine scalar against the closed form at `samples` points"""
    if relation.allows_gauge and samples < 2:
        raise InvalidParameters(f"{relation.name}: a gauge constant needs at least 2 samples, got {samples}")
    rng = rng if rng is not None else np.random.default_rng(0)
    ratios: list[complex] = []
    spread = 0.0
    inverse = 0.0
    charge_ok = True
    continued = False
    for _ in range(samples):
        u_a, u_b, forward, backward = _sample(relation, params, policy, rng, max_attempts)
        ratios.append(forward.scalar / relation.target(u_a, u_b))
        spread = max(spread, forward.p_independence_residual)
        inverse = max(inverse, abs(forward.scalar * backward.scalar - 1))
        charge_ok = charge_ok and forward.residual_charge_ok
        continued = continued or forward.continued

    values = np.array(ratios)
    gauge = identify_gauge(complex(np.mean(values)), params) if relation.allows_gauge else None
    if gauge is not None:
        constant = gauge.value(params)
        residual = float(np.max(np.abs(values / constant - 1)))
    else:
        if relation.allows_gauge:
            logger.warning(f"{relation.name}: constant {np.mean(values):.6g} is not a power of q")
        constant = 1 + 0j
        residual = float(np.max(np.abs(values - 1)))
    logger.debug(f"{relation.name}: residual {residual:.3e}, gauge {gauge}")
    return RelationResult(
        name=relation.name,
        family=relation.family,
        residual=residual,
        gauge_constant=constant,
        p_independence=spread,
        inverse_residual=inverse,
        charge_ok=charge_ok,
        samples=len(ratios),
        gauge=gauge,
        continued=continued,
    )


def verify_family(
    family: RelationFamily,
    params: AlgebraParams,
    policy: TruncationPolicy | None = None,
    rng: np.random.Generator | None = None,
    samples: int = 3,
) -> list[RelationResult]:
    rng = rng if rng is not None else np.random.default_rng(0)
    return [verify_relation(r, params, policy, rng, samples) for r in relations_for(family, params, policy)]
