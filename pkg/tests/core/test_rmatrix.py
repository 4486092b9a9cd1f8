from typing import Callable

import numpy as np
import pytest

from app.core.errors import InvalidIndexPattern, InvalidParameters
from app.core.rmatrix import (
    G_s,
    assemble,
    bracket_quotient,
    c_function,
    coef,
    coef_d,
    coef_b,
    coef_bbar,
    face_weight,
    flat,
    gauge_F_squared,
    matrix_to_schema,
    ordered_indices,
    permutation,
    pos,
    prefactor,
    precedes,
    rho0,
    rho_hat,
    rho_hat_squared,
    to_jmo,
    unit_step,
    weight,
    weight_mask,
)
from app.models.domain import AlgebraParams, DynamicalParam, TruncationPolicy
from app.models.types.coef_kind import CoefKind
from app.models.types.prefactor_kind import PrefactorKind
from app.models.types.prefactor_mode import PrefactorMode


def test_ordered_indices():
    """Test the order 1 < ... < N < 0 < -N < ... < -1."""
    assert ordered_indices(2) == [1, 2, 0, -2, -1]
    assert [pos(j, 2) for j in ordered_indices(2)] == list(range(5))
    assert precedes(2, 0, 2)
    assert precedes(0, -2, 2)
    assert not precedes(-1, -2, 2)


def test_pos_rejects_out_of_range():
    """Test that indices beyond the rank are refused."""
    with pytest.raises(InvalidIndexPattern):
        pos(3, 2)


def test_weights():
    """Test eps weights of the vector representation."""
    assert list(weight(2, 3)) == [0, 1, 0]
    assert list(weight(-1, 3)) == [-1, 0, 0]
    assert list(weight(0, 3)) == [0, 0, 0]


def test_initial_condition_is_flip(params_n2: AlgebraParams, generic_s: Callable[..., DynamicalParam], policy: TruncationPolicy):
    """Test R(0, s) = P."""
    value = assemble(0, generic_s(params_n2), PrefactorMode.NONE, params_n2, policy)
    assert np.max(np.abs(value.matrix - permutation(2))) < 1e-12


@pytest.mark.parametrize("N", [1, 2, 3])
def test_weight_conservation(N: int, generic_s: Callable[..., DynamicalParam], policy: TruncationPolicy):
    """Test that forbidden entries vanish exactly."""
    params = AlgebraParams(N=N, q=0.45 + 0.05j, r=4.3, c=1.2)
    value = assemble(0.31 + 0.17j, generic_s(params), PrefactorMode.NONE, params, policy)
    assert value.matrix.shape == ((2 * N + 1) ** 2, (2 * N + 1) ** 2)
    assert np.all(value.matrix[~weight_mask(N)] == 0)


def test_bbar_is_independent_of_s(params_n2: AlgebraParams, generic_s: Callable[..., DynamicalParam], policy: TruncationPolicy):
    """Test that every bbar slot holds the same value."""
    u = 0.27 + 0.11j
    value = assemble(u, generic_s(params_n2), PrefactorMode.NONE, params_n2, policy)
    target = coef_bbar(u, params_n2, policy)
    for j1, j2 in [(1, 2), (1, 0), (2, -1), (0, -1), (-2, -1)]:
        assert value.entry(j2, j1, j2, j1) == target


def test_entry_reads_flat_layout(params_n2: AlgebraParams, generic_s: Callable[..., DynamicalParam], policy: TruncationPolicy):
    """Test that entry((i, j), (k, l)) is matrix[flat(i, j), flat(k, l)]."""
    s = generic_s(params_n2)
    u = 0.27 + 0.11j
    value = assemble(u, s, PrefactorMode.NONE, params_n2, policy)
    expected = coef_b(u, s.lookup(1) - s.lookup(2), params_n2, policy)
    assert value.matrix[flat(1, 2, 2), flat(1, 2, 2)] == value.entry(1, 2, 1, 2) == expected


def test_coef_dispatch(params_n2: AlgebraParams, generic_s: Callable[..., DynamicalParam], policy: TruncationPolicy):
    """Test the coef dispatcher against the direct functions."""
    s, u = generic_s(params_n2), 0.2 + 0.3j
    assert coef(CoefKind.BBAR, u, (), s, params_n2, policy) == coef_bbar(u, params_n2, policy)
    assert coef(CoefKind.B, u, (1, 2), s, params_n2, policy) == coef_b(u, s.lookup(1) - s.lookup(2), params_n2, policy)


def test_rho0_prefactor_mode(params_n2: AlgebraParams, generic_s: Callable[..., DynamicalParam], policy: TruncationPolicy):
    """Test that the rho0 mode rescales the bare matrix."""
    s, u = generic_s(params_n2), 0.33 + 0.08j
    bare = assemble(u, s, PrefactorMode.NONE, params_n2, policy)
    scaled = assemble(u, s, PrefactorMode.RHO0, params_n2, policy)
    factor = rho0(u, params_n2, policy=policy)
    assert scaled.scalar == factor
    assert np.allclose(scaled.matrix, bare.matrix * factor, rtol=1e-14, atol=0)


def test_assemble_rejects_rank_mismatch(params_n2: AlgebraParams, policy: TruncationPolicy):
    """Test that a height of the wrong rank is refused."""
    with pytest.raises(InvalidIndexPattern):
        assemble(0.2, DynamicalParam(values=[0.3]), PrefactorMode.NONE, params_n2, policy)


def test_generic_rejects_degenerate_height(params_n2: AlgebraParams):
    """Test that two equal components are rejected."""
    with pytest.raises(InvalidParameters):
        DynamicalParam.generic([0.5 + 0.1j, 0.5 + 0.1j], params_n2)


def test_g_s_rejects_zero_index(params_n2: AlgebraParams, generic_s: Callable[..., DynamicalParam]):
    """Test that G_s needs a nonzero index."""
    with pytest.raises(InvalidIndexPattern):
        G_s(0, generic_s(params_n2), params_n2)


def test_unit_step(params_n2: AlgebraParams, generic_s: Callable[..., DynamicalParam]):
    """Test recovery of the index between adjacent heights."""
    a = generic_s(params_n2)
    assert unit_step(a, a.shifted(weight(-2, 2)), 2) == -2
    assert unit_step(a, a, 2) == 0
    assert unit_step(a, a.shifted(np.array([1, 1])), 2) is None


def test_matrix_to_schema_lists_allowed_entries(params_n1: AlgebraParams, generic_s: Callable[..., DynamicalParam], policy: TruncationPolicy):
    """Test the JSON export of R(0) at N = 1."""
    value = assemble(0, generic_s(params_n1), PrefactorMode.NONE, params_n1, policy)
    schema = matrix_to_schema(value)
    assert len(schema.entries) == int(weight_mask(1).sum())
    flip = {(e.row, e.col) for e in schema.entries if abs(complex(e.re, e.im) - 1) < 1e-12}
    assert flip == {((i, j), (j, i)) for i in ordered_indices(1) for j in ordered_indices(1)}


def test_prefactor_dispatch(params_n2: AlgebraParams, policy: TruncationPolicy):
    """Test that prefactor forwards to the named function."""
    u = 0.23 + 0.11j
    assert prefactor(PrefactorKind.RHO0, u, params_n2, policy) == rho0(u, params_n2, policy=policy)
    assert prefactor("rho_hat", u, params_n2, policy) == pytest.approx(rho_hat(u, params_n2, policy))


def test_rho_hat_squares(params_n2: AlgebraParams, policy: TruncationPolicy):
    """Test that the square root and the square-free form agree."""
    u = 0.41 + 0.07j
    assert rho_hat(u, params_n2, policy) ** 2 == pytest.approx(rho_hat_squared(u, params_n2, policy), rel=1e-12)


def test_face_weight_reads_entry(params_n1: AlgebraParams, generic_s: Callable[..., DynamicalParam], policy: TruncationPolicy):
    """Test W(a, a+1^; a, a+1^) is the entry ((1, 0), (1, 0)) of R(u, a)."""
    u = 0.33 + 0.08j
    a = generic_s(params_n1)
    up = a.shifted(weight(1, 1))
    value = assemble(u, a, PrefactorMode.NONE, params_n1, policy)
    assert face_weight(a, up, a, up, u, params_n1, policy) == pytest.approx(value.entry(1, 0, 1, 0))
    assert face_weight(a, a.shifted(weight(1, 1) * 2), a, up, u, params_n1, policy) == 0


def test_to_jmo_diagonal(params_n2: AlgebraParams, generic_s: Callable[..., DynamicalParam], policy: TruncationPolicy):
    """Test that the gauge ratio cancels on the (1, 1), (1, 1) entry."""
    u = 0.29 + 0.06j
    a = generic_s(params_n2)
    eta = params_n2.eta
    entry = assemble(u, a, PrefactorMode.NONE, params_n2, policy).entry(1, 1, 1, 1)
    scale = rho_hat(u, params_n2, policy) * bracket_quotient([eta, 1], [eta - u, u + 1], params_n2, policy)
    assert to_jmo(a, 1, 1, 1, 1, u, params_n2, policy) == pytest.approx(entry / scale, rel=1e-12)


def test_face_weight_reads_transposed_entry(params_n1: AlgebraParams, generic_s: Callable[..., DynamicalParam], policy: TruncationPolicy):
    """Test W(a, a+1^; a, a) is d(u, s_1, s_0), the entry ((0, 0), (1, -1))."""
    u = 0.33 + 0.08j
    a = generic_s(params_n1)
    up = a.shifted(weight(1, 1))
    expected = coef_d(u, 1, 0, a, params_n1, policy)
    assert face_weight(a, up, a, a, u, params_n1, policy) == pytest.approx(expected, rel=1e-12)


def test_zero_step_gauge(params_n2: AlgebraParams, generic_s: Callable[..., DynamicalParam], policy: TruncationPolicy):
    """Test F(s, s)^2 = -prod_m [s_m + 1/2] / [s_m - 1/2]."""
    s = generic_s(params_n2)
    s1, s2 = s.values
    expected = -bracket_quotient([s1 + 0.5, s2 + 0.5], [s1 - 0.5, s2 - 0.5], params_n2, policy)
    assert gauge_F_squared(s, 0, params_n2, policy) == pytest.approx(expected, rel=1e-12)


def test_c_function_is_trivial_at_rank_one(params_n1: AlgebraParams, params_n2: AlgebraParams, policy: TruncationPolicy):
    """Test C(u) = 1 at N = 1 and C(-u) = C(u) in general."""
    u = 0.37 + 0.09j
    assert c_function(u, params_n1, policy) == pytest.approx(1, rel=1e-10)
    assert c_function(-u, params_n2, policy) == pytest.approx(c_function(u, params_n2, policy), rel=1e-10)


@pytest.mark.parametrize("N", [1, 2])
def test_rho_hat_inverts(N: int, policy: TruncationPolicy):
    """Test rho_hat(u)^2 rho_hat(-u)^2 = 1."""
    params = AlgebraParams(N=N, q=0.45 + 0.05j, r=4.3, c=1.2)
    u = 0.31 + 0.12j
    product = rho_hat_squared(u, params, policy) * rho_hat_squared(-u, params, policy)
    assert product == pytest.approx(1, rel=1e-10)
