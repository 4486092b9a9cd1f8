"""The (2N+1)-dimensional dynamical representation at level 0.

Images of the half currents K^+, E^+, F^+ and H^pm are ShiftedMatrix
objects in x = v - u; the Gauss product F K E reproduces the R-matrix
entry by entry.
"""

import numpy as np
from loguru import logger

from app.core.errors import InvalidIndexPattern
from app.core.rmatrix import (
    G_s,
    assemble,
    bracket_quotient,
    coef_bbar,
    coef_c,
    coef_cbar,
    coef_d,
    coef_dbar,
    coef_e,
    coef_e0,
    flat,
    ordered_indices,
    pos,
    precedes,
    rho0,
    weight,
)
from app.core.shifted_matrix import PFunction, ShiftedEntry, ShiftedMatrix, constant, product
from app.models.domain import AlgebraParams, DynamicalParam, TruncationPolicy
from app.models.types.prefactor_mode import PrefactorMode


def _diff(P: DynamicalParam, a: int, b: int) -> complex:
    """P_{ab} = P_a - P_b"""
    return P.lookup(a) - P.lookup(b)


class VectorRepresentation:
    """pi_z at rank N; all images are functions of x = v - u"""

    def __init__(self, params: AlgebraParams, policy: TruncationPolicy | None = None):
        self.params = params
        self.policy = policy
        self.N = params.N
        self.eta = params.eta

    # helpers

    def _q(self, numerators: list[complex], denominators: list[complex]) -> complex:
        return bracket_quotient(numerators, denominators, self.params, self.policy)

    def _eps(self, j: int, scale: int = 1) -> tuple[int, ...]:
        out = [0] * self.N
        if 1 <= j <= self.N:
            out[j - 1] = scale
        return tuple(out)

    def _zero(self) -> tuple[int, ...]:
        return (0,) * self.N

    def _chain(self, pairs: list[tuple[complex, complex]]) -> complex:
        return self._q([a for a, _ in pairs], [b for _, b in pairs])

    # K currents

    def _k_values(self, label: int, x: complex) -> tuple[dict[int, complex], tuple[int, ...]]:
        """Diagonal of K^+_{label} without rho0, and its trailing shift"""
        N, eta = self.N, self.eta
        if abs(label) > N:
            raise InvalidIndexPattern(f"K label {label} outside rank {N}")
        below = self._q([x], [x + 1])
        above = self._q([x - 1], [x])
        values: dict[int, complex] = {}
        if label > 0:
            j = label
            for k in ordered_indices(N):
                if k == j:
                    values[k] = 1
                elif k == -j:
                    values[k] = self._q([x - 1, x + j + eta - 1], [x, x + j + eta])
                elif precedes(k, j, N):
                    values[k] = below
                else:
                    values[k] = above
            shift = self._eps(j, -1)
        elif label < 0:
            j = -label
            for k in ordered_indices(N):
                if k == -j:
                    values[k] = 1
                elif k == j:
                    values[k] = self._q([x, x - j - eta], [x + 1, x - j - eta + 1])
                elif precedes(k, -j, N):
                    values[k] = below
                else:
                    values[k] = above
            shift = self._eps(j)
        else:
            for k in ordered_indices(N):
                if k > 0:
                    values[k] = below
                elif k < 0:
                    values[k] = above
                else:
                    values[k] = self._q([x + 0.5, x - 1], [x - 0.5, x + 1])
            shift = self._zero()
        return values, shift

    def pi_K(self, label: int, x: complex) -> ShiftedMatrix:
        """K^+_{+j} (label j > 0), K^+_{-j} (label -j) or K^+_0 (label 0)"""
        values, shift = self._k_values(label, x)
        scale = rho0(x, self.params, policy=self.policy)
        return ShiftedMatrix.diagonal(self.N, {k: constant(v * scale) for k, v in values.items()}, shift)

    # E and F half currents

    def pi_half(self, kind: str, row: int, col: int, x: complex) -> ShiftedMatrix:
        """E^+_{row,col} (row after col) or F^+_{row,col} (row before col)"""
        N = self.N
        if kind == "E":
            if not precedes(col, row, N):
                raise InvalidIndexPattern(f"E^+_{{{row},{col}}} needs row after col")
            if row >= 0 and col > 0:
                return self._e_upper(row, col, x)
            if row < 0 and col > 0:
                return self._e_mixed(-row, col, x)
            return self._e_lower(-row, -col, x)
        if kind == "F":
            if not precedes(row, col, N):
                raise InvalidIndexPattern(f"F^+_{{{row},{col}}} needs row before col")
            if row > 0 and col >= 0:
                return self._f_upper(row, col, x)
            if row > 0 and col < 0:
                return self._f_mixed(row, -col, x)
            return self._f_lower(-row, -col, x)
        raise InvalidIndexPattern(f"unknown half current {kind!r}")

    def _top(self, l: int) -> int:
        """l with N + 1 standing for 0"""
        return self.N + 1 if l == 0 else l

    def _e_upper(self, l: int, j: int, x: complex) -> ShiftedMatrix:
        """E^+_{l,j}, 1 <= j < l <= N + 1 = 0"""
        eta, top = self.eta, self._top(l)

        def first(P: DynamicalParam) -> complex:
            pjl = _diff(P, j, l)
            return -self._q([x - pjl, 1], [x, pjl])

        def second(P: DynamicalParam) -> complex:
            pjl = _diff(P, j, l)
            value = self._q([x + top - 1 + eta - pjl, 1], [x + top - 1 + eta, pjl])
            return value * self._chain([(_diff(P, j, m) + 1, _diff(P, j, m)) for m in range(j + 1, top)])

        zero = self._zero()
        matrix = ShiftedMatrix(self.N, {(j, l): ShiftedEntry(first, zero), (-l, -j): ShiftedEntry(second, zero)})
        return matrix.flanked(self._eps(l), self._eps(j, -1))

    def _f_upper(self, j: int, l: int, x: complex) -> ShiftedMatrix:
        """F^+_{j,l}, 1 <= j < l <= N + 1 = 0"""
        eta, top = self.eta, self._top(l)

        def first(P: DynamicalParam) -> complex:
            pjl = _diff(P, j, l)
            return self._q([x + pjl, 1], [x, pjl])

        def second(P: DynamicalParam) -> complex:
            pjl = _diff(P, j, l)
            value = self._q([x + top - 1 + eta + pjl, 1], [x + top - 1 + eta, pjl])
            return -value * self._chain([(_diff(P, j, m) - 1, _diff(P, j, m)) for m in range(j + 1, top)])

        zero = self._zero()
        return ShiftedMatrix(self.N, {(l, j): ShiftedEntry(first, zero), (-j, -l): ShiftedEntry(second, zero)})

    def _e_lower_terms(self, j: int, l: int, x: complex) -> tuple[PFunction, PFunction]:
        """Entries (-l, -j) and (j, l) of E^+_{-j,-l} before the flanking shifts"""
        eta, top = self.eta, self._top(l)

        def first(P: DynamicalParam) -> complex:
            plj = _diff(P, -l, -j)
            return -self._q([x - plj, 1], [x, plj])

        def second(P: DynamicalParam) -> complex:
            plj = _diff(P, -l, -j)
            value = self._q([x - j - eta - plj, 1], [x - j - eta, plj])
            return value * self._chain([(_diff(P, -l, -m) + 1, _diff(P, -l, -m)) for m in range(j + 1, top)])

        return first, second

    def _e_lower(self, j: int, l: int, x: complex) -> ShiftedMatrix:
        """E^+_{-j,-l}, 1 <= j < l <= N + 1 = 0"""
        first, second = self._e_lower_terms(j, l, x)
        zero = self._zero()
        matrix = ShiftedMatrix(self.N, {(-l, -j): ShiftedEntry(first, zero), (j, l): ShiftedEntry(second, zero)})
        return matrix.flanked(self._eps(j, -1), self._eps(l))

    def _f_lower_terms(self, l: int, j: int, x: complex) -> tuple[PFunction, PFunction]:
        """Entries (-j, -l) and (l, j) of F^+_{-l,-j}"""
        eta, top = self.eta, self._top(l)
        delta = 1 if l == 0 else 0

        def first(P: DynamicalParam) -> complex:
            plj = _diff(P, -l, -j)
            return self._q([x + plj, 1], [x, plj])

        def second(P: DynamicalParam) -> complex:
            plj = _diff(P, -l, -j) + delta
            value = self._q([x - j - eta + plj, 1], [x - j - eta, plj])
            pairs = [(_diff(P, -l, -m) - 1 + delta, _diff(P, -l, -m) + delta) for m in range(j + 1, top)]
            return -value * self._chain(pairs)

        return first, second

    def _f_lower(self, l: int, j: int, x: complex) -> ShiftedMatrix:
        """F^+_{-l,-j}, 1 <= j < l <= N + 1 = 0"""
        first, second = self._f_lower_terms(l, j, x)
        zero = self._zero()
        return ShiftedMatrix(self.N, {(-j, -l): ShiftedEntry(first, zero), (l, j): ShiftedEntry(second, zero)})

    def _k_slot(self, j: int, x: complex) -> complex:
        """(j, j) entry of K^+_{-j} without rho0"""
        return self._k_values(-j, x)[0][j]

    def _e_corner(self, k: int, j: int, x: complex) -> PFunction:
        """Entry (k, -j) of E^+_{-k,j} before the flanking shifts"""
        N, eta = self.N, self.eta
        if j == k:

            def diagonal(P: DynamicalParam) -> complex:
                pj = P.lookup(j)
                first = -self._q([x - 2 * pj - 1, 1, x - j - eta + 1], [x, 2 * pj + 1, x - j - eta])
                second = G_s(j, P, self.params, self.policy) * self._q(
                    [x - 2 * pj - j - eta, 1], [x - j - eta, 2 * pj + 1]
                )
                pairs = []
                for m in range(1, j):
                    pairs += [(pj + P.lookup(m), pj + P.lookup(m) + 1), (pj - P.lookup(m), pj - P.lookup(m) + 1)]
                return first + second * self._chain(pairs)

            return diagonal
        if j < k:
            return self._e_corner_solved(k, j, x)

        def corner(P: DynamicalParam) -> complex:
            pj = P.lookup(j)
            pjk = pj + P.lookup(k)
            value = self._q([x - k - eta - pjk, 1, pj + 1], [x - k - eta, pjk, pj])
            pairs = [(pj + P.lookup(m) + 1, pj + P.lookup(m)) for m in range(k + 1, N + 1) if m != j]
            pairs += [(pj - P.lookup(m) + 1, pj - P.lookup(m)) for m in range(j + 1, N + 1)]
            return value * self._chain(pairs)

        return corner

    def _e_corner_solved(self, k: int, j: int, x: complex) -> PFunction:
        """Entry (k, -j) of E^+_{-k,j} for j < k.

        A single-term closed form has no pole at x = 0 and cannot match the
        R-matrix here. The entry is fixed instead by the (k, -j) entry of
        pi(L_{-k,j}) = sum_m F_{-k,-m} K_{-m} E_{-m,j}, which must equal
        rho0 d(x, P_j, P_k); every other factor in that sum is known.
        """
        slots = {m: self._k_slot(m, x) for m in range(1, k + 1)}
        couplings = [(m, self._f_lower_terms(k, m, x)[1], self._e_corner(m, j, x)) for m in range(1, k)]

        def corner(P: DynamicalParam) -> complex:
            total = coef_d(x, j, k, P, self.params, self.policy)
            for m, f, e in couplings:
                total -= f(P) * slots[m] * e(P)
            return total / slots[k]

        return corner

    def _e_mixed(self, k: int, j: int, x: complex) -> ShiftedMatrix:
        """E^+_{-k,j} for positive j, k"""
        zero = self._zero()
        corner = ShiftedEntry(self._e_corner(k, j, x), zero)
        if j == k:
            matrix = ShiftedMatrix(self.N, {(j, -j): corner})
            return matrix.flanked(self._eps(j, -1), self._eps(j, -1))

        def first(P: DynamicalParam) -> complex:
            pjk = P.lookup(j) + P.lookup(k)
            return -self._q([x - pjk, 1], [x, pjk])

        matrix = ShiftedMatrix(self.N, {(j, -k): ShiftedEntry(first, zero), (k, -j): corner})
        return matrix.flanked(self._eps(k, -1), self._eps(j, -1))

    def _f_corner(self, j: int, k: int, x: complex) -> PFunction:
        """Entry (-j, k) of F^+_{j,-k}"""
        N, eta = self.N, self.eta
        if j == k:

            def diagonal(P: DynamicalParam) -> complex:
                pj = P.lookup(j)
                first = self._q([x + 2 * pj - 1, 1, x - j - eta + 1], [x, 2 * pj - 1, x - j - eta])
                second = G_s(-j, P, self.params, self.policy) * self._q(
                    [x + 2 * pj - j - eta, 1], [x - j - eta, 2 * pj - 1]
                )
                pairs = []
                for m in range(1, j):
                    pairs += [(pj + P.lookup(m), pj + P.lookup(m) - 1), (pj - P.lookup(m), pj - P.lookup(m) - 1)]
                return first - second * self._chain(pairs)

            return diagonal
        if j < k:
            return self._f_corner_solved(j, k, x)

        def corner(P: DynamicalParam) -> complex:
            pj = P.lookup(j)
            pjk = pj + P.lookup(k)
            value = self._q([x - k - eta + pjk, 1, pj - 1], [x - k - eta, pjk, pj])
            pairs = [(pj + P.lookup(m) - 1, pj + P.lookup(m)) for m in range(k + 1, N + 1) if m != j]
            pairs += [(pj - P.lookup(m) - 1, pj - P.lookup(m)) for m in range(j + 1, N + 1)]
            return -value * self._chain(pairs)

        return corner

    def _f_corner_solved(self, j: int, k: int, x: complex) -> PFunction:
        """Entry (-j, k) of F^+_{j,-k} for j < k, fixed by the (-j, k) entry of
        pi(L_{j,-k}) = sum_l F_{j,-l} K_{-l} E_{-l,-k} against rho0 d(x, P_-k, P_-j)"""
        slots = {l: self._k_slot(l, x) for l in range(1, k + 1)}
        couplings = [(l, self._f_corner(j, l, x), self._e_lower_terms(l, k, x)[1]) for l in range(1, k)]

        def corner(P: DynamicalParam) -> complex:
            total = coef_d(x, -k, -j, P, self.params, self.policy)
            for l, f, e in couplings:
                total -= f(P) * slots[l] * e(P)
            return total / slots[k]

        return corner

    def _f_mixed(self, j: int, k: int, x: complex) -> ShiftedMatrix:
        """F^+_{j,-k} for positive j, k"""
        zero = self._zero()
        corner = ShiftedEntry(self._f_corner(j, k, x), zero)
        if j == k:
            return ShiftedMatrix(self.N, {(-j, j): corner})

        def first(P: DynamicalParam) -> complex:
            pjk = P.lookup(j) + P.lookup(k)
            return self._q([x + pjk, 1], [x, pjk])

        return ShiftedMatrix(self.N, {(-k, j): ShiftedEntry(first, zero), (-j, k): corner})

    # H currents

    def pi_H(self, sign: int, j: int, v: complex, u: complex) -> ShiftedMatrix:
        """H^+_j (sign +1) or H^-_j (sign -1), 1 <= j <= N"""
        N, eta = self.N, self.eta
        if not 1 <= j <= N or sign not in (1, -1):
            raise InvalidIndexPattern(f"H^{sign:+d}_{j} outside rank {N}")
        values: dict[int, complex] = {k: 1 for k in ordered_indices(N)}
        if sign > 0:
            x = v - u - j / 2
            values[j] = self._q([x + 1], [x])
            if j < N:
                values[j + 1] = self._q([x - 1], [x])
                values[-j - 1] = self._q([v - u + eta + j / 2 + 1], [v - u + eta + j / 2])
                values[-j] = self._q([v - u + eta + j / 2 - 1], [v - u + eta + j / 2])
            else:
                values[0] = self._q([x + 1, x - 0.5], [x, x + 0.5])
                values[-N] = self._q([x - 0.5], [x + 0.5])
        else:
            y = u - v + j / 2
            values[j] = self._q([y - 1], [y])
            if j < N:
                values[j + 1] = self._q([y + 1], [y])
                z = u - v - eta - j / 2
                values[-j - 1] = self._q([z - 1], [z])
                values[-j] = self._q([z + 1], [z])
            else:
                values[0] = self._q([y + 0.5, y - 1], [y - 0.5, y])
                values[-N] = self._q([y + 0.5], [y - 0.5])
        alpha = list(self._eps(j, -1))
        if j < N:
            alpha[j] = 1
        return ShiftedMatrix.diagonal(N, {k: constant(v) for k, v in values.items()}, tuple(alpha))

    def h_decomposition_residual(self, sign: int, j: int, v: complex, u: complex, P: DynamicalParam) -> float:
        """pi_H against K_{+j} K_{+(j+1)}^{-1} (K_0 for j = N) at v - j/2, K^- = K^+(v + r)"""
        shift = self.params.r if sign < 0 else 0
        x = v - u - j / 2 + shift
        upper = self.pi_K(j, x)
        lower = self.pi_K(j + 1 if j < self.N else 0, x)
        ratio = upper @ lower.inverse_diagonal()
        target = self.pi_H(sign, j, v, u)
        lhs, rhs = target.evaluate(P), ratio.evaluate(P)
        if target.shifts() != ratio.shifts():
            return float("inf")
        return float(np.max(np.abs(lhs - rhs)) / max(np.max(np.abs(rhs)), 1e-300))

    # Gauss assembly

    def half_currents(self, x: complex) -> tuple[dict[int, ShiftedMatrix], dict[tuple[int, int], ShiftedMatrix], dict[tuple[int, int], ShiftedMatrix]]:
        N = self.N
        labels = ordered_indices(N)
        K = {k: self.pi_K(k, x) for k in labels}
        E: dict[tuple[int, int], ShiftedMatrix] = {}
        F: dict[tuple[int, int], ShiftedMatrix] = {}
        for a in labels:
            for b in labels:
                if precedes(b, a, N):
                    E[(a, b)] = self.pi_half("E", a, b, x)
                    F[(b, a)] = self.pi_half("F", b, a, x)
        return K, E, F

    def assemble_L(self, v: complex, u: complex) -> dict[tuple[int, int], ShiftedMatrix]:
        """pi(L^+_{ij}) = sum_{k after i, j} F_{ik} K_k E_{kj}"""
        N = self.N
        labels = ordered_indices(N)
        K, E, F = self.half_currents(v - u)
        unit = ShiftedMatrix.identity(N)
        L: dict[tuple[int, int], ShiftedMatrix] = {}
        for i in labels:
            for j in labels:
                total = ShiftedMatrix(N)
                start = max(pos(i, N), pos(j, N))
                for k in labels[start:]:
                    left = unit if k == i else F[(i, k)]
                    right = unit if k == j else E[(k, j)]
                    total = total + product([left, K[k], right])
                L[(i, j)] = total
        logger.debug(f"assembled L-operator image for N={N}")
        return L

    def rep_lr_residuals(self, v: complex, u: complex, P: DynamicalParam) -> dict[str, float]:
        """Compare pi(L_{ij})_{kl} with R(v - u, P)[(i,k),(j,l)] including rho0, then up to the (1,1) scale"""
        N = self.N
        labels = ordered_indices(N)
        position = {a: n for n, a in enumerate(labels)}
        L = self.assemble_L(v, u)
        R = assemble(v - u, P, PrefactorMode.RHO0, self.params, self.policy)
        lhs = np.zeros_like(R.matrix)
        shift_ok = True
        for (i, j), image in L.items():
            values = image.evaluate(P)
            expected_shift = tuple(-int(w) for w in weight(j, N))
            for key, shift in image.shifts().items():
                if shift != expected_shift and abs(image[key](P)) > 1e-12:
                    shift_ok = False
            for k in labels:
                for l in labels:
                    lhs[flat(i, k, N), flat(j, l, N)] = values[position[k], position[l]]
        scale = float(np.max(np.abs(R.matrix)))
        exact = float(np.max(np.abs(lhs - R.matrix))) / scale
        anchor = flat(1, 1, N)
        normalized = lhs * (R.matrix[anchor, anchor] / lhs[anchor, anchor])
        return {
            "max_relative": exact,
            "normalized_relative": float(np.max(np.abs(normalized - R.matrix))) / scale,
            "shift_mismatch": 0.0 if shift_ok else 1.0,
        }

    def selected_entries(self, v: complex, u: complex, P: DynamicalParam) -> dict[str, float]:
        """Single entries of pi(L) against the closed-form coefficients times rho0"""
        x = v - u
        params, policy = self.params, self.policy
        L = self.assemble_L(v, u)
        r0 = rho0(x, params, policy=policy)
        checks = {
            "L(-1,1)[1,-1]=e_1": (L[(-1, 1)], (1, -1), coef_e(x, 1, P, params, policy)),
            "L(0,1)[1,0]=cbar": (L[(0, 1)], (1, 0), coef_cbar(x, P.lookup(1) - P.lookup(0), params, policy)),
            "L(-1,0)[1,0]=dbar": (L[(-1, 0)], (1, 0), coef_dbar(x, 1, 0, P, params, policy)),
        }
        residuals: dict[str, float] = {}
        for name, (image, key, target) in checks.items():
            entry = image[key]
            value = entry(P) if entry is not None else 0j
            residuals[name] = abs(value - r0 * target) / max(abs(r0 * target), 1e-300)
        return residuals

    # proof identities

    def proof_identity_residuals(self, x: complex, P: DynamicalParam) -> dict[str, float]:
        """The dbar(u, P_j, P_-j) sum identity for every j and the e_0 sum identity"""
        N, eta, q = self.N, self.eta, self._q
        residuals: dict[str, float] = {}
        for j in range(1, N + 1):
            total = q([x - j - eta], [x - j + 1 - eta])
            for k in range(1, j):
                pjk = P.lookup(-j) - P.lookup(-k)
                term = q([x - k - eta + pjk, x - k - eta - pjk, 1, 1], [x - k - eta, x - k + 1 - eta, pjk, pjk])
                for m in range(k + 1, j):
                    pjm = P.lookup(-j) - P.lookup(-m)
                    term *= q([pjm - 1, pjm + 1], [pjm, pjm])
                total -= term
            rhs = q([x], [x + 1]) * total
            lhs = coef_dbar(x, j, -j, P, self.params, self.policy)
            residuals[f"dbar_j={j}"] = abs(lhs - rhs) / max(abs(rhs), 1e-300)
        total = 0j
        for k in range(1, N + 1):
            pk = P.lookup(k)
            total += q(
                [x - k - eta + 0.5 + pk, x - k - eta + 0.5 - pk, 1, 1],
                [x - k - eta, x - k + 1 - eta, pk + 0.5, pk - 0.5],
            )
        rhs = q([x - 1, x + 0.5], [x + 1, x - 0.5]) - q([x], [x + 1]) * total
        lhs = coef_e0(x, P, self.params, self.policy)
        residuals["e0"] = abs(lhs - rhs) / max(abs(rhs), 1e-300)
        return residuals

    # half-current / K exchange

    def consecutive_pairs(self) -> list[tuple[int, int]]:
        """(a, b) adjacent in the index order, neither being 0 and a != N"""
        labels = ordered_indices(self.N)
        return [
            (a, b)
            for a, b in zip(labels, labels[1:])
            if a != 0 and b != 0 and a != self.N
        ]

    def relbasic_residuals(self, a: int, b: int, u1: complex, u2: complex, u: complex, P: DynamicalParam) -> dict[str, float]:
        """K_b^{-1} E_{b,a} K_b and K_b F_{a,b} K_b^{-1} against their b/c expansions;
        c(w, P_ab) sits right of E, cbar(w, (P + h)_ab) left of F"""
        params, policy = self.params, self.policy
        w = u1 - u2
        bbar = coef_bbar(w, params, policy)
        x1, x2 = u1 - u, u2 - u

        def p_ab(Q: DynamicalParam) -> complex:
            return Q.lookup(a) - Q.lookup(b)

        def h_ab(row: int) -> int:
            return int(np.dot(weight(a, self.N) - weight(b, self.N), weight(row, self.N)))

        K = self.pi_K(b, x1)
        K_inv = K.inverse_diagonal()
        E1, E2 = self.pi_half("E", b, a, x1), self.pi_half("E", b, a, x2)
        F1, F2 = self.pi_half("F", a, b, x1), self.pi_half("F", a, b, x2)

        lhs_e = product([K_inv, E2, K])
        rhs_e = E2.scaled_left(constant(1 / bbar)) - E1.scaled_right(
            lambda Q: coef_c(w, p_ab(Q), params, policy) / bbar
        )
        lhs_f = product([K, F2, K_inv])
        # cbar is a function of P + h standing left of F, so h is read on the row
        rhs_f = F2.scaled_left(constant(1 / bbar)) - F1.scaled_rows(
            lambda row, Q: coef_cbar(w, p_ab(Q) + h_ab(row), params, policy) / bbar
        )
        return {
            f"E({b},{a})": _matrix_residual(lhs_e, rhs_e, P),
            f"F({a},{b})": _matrix_residual(lhs_f, rhs_f, P),
        }


def _matrix_residual(lhs: ShiftedMatrix, rhs: ShiftedMatrix, P: DynamicalParam) -> float:
    left, right = lhs.evaluate(P), rhs.evaluate(P)
    for key, shift in lhs.shifts().items():
        other = rhs[key]
        if other is not None and other.shift != shift:
            return float("inf")
    scale = max(float(np.max(np.abs(left))), float(np.max(np.abs(right))), 1e-300)
    return float(np.max(np.abs(left - right)) / scale)
