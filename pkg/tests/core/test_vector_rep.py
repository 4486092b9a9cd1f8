import numpy as np
import pytest

from app.core.errors import InvalidIndexPattern
from app.core.rmatrix import assemble, flat, rho0
from app.core.vector_rep import VectorRepresentation
from app.models.domain import AlgebraParams, TruncationPolicy
from app.models.types.prefactor_mode import PrefactorMode

X = 0.27 + 0.09j


@pytest.fixture
def rep(params_n2: AlgebraParams, policy: TruncationPolicy) -> VectorRepresentation:
    return VectorRepresentation(params_n2.at_level(0), policy)


def test_consecutive_pairs(params_n1: AlgebraParams, rep: VectorRepresentation):
    """Test the adjacent pairs used by the K exchange identities."""
    assert rep.consecutive_pairs() == [(1, 2), (-2, -1)]
    assert VectorRepresentation(params_n1.at_level(0)).consecutive_pairs() == []


def test_half_current_counts(rep: VectorRepresentation):
    """Test one K per index and one E, F per ordered pair."""
    K, E, F = rep.half_currents(X)
    assert sorted(K) == [-2, -1, 0, 1, 2]
    assert len(E) == len(F) == 10
    assert all(a != b for a, b in E)


def test_pi_k_is_shifted_diagonal(rep: VectorRepresentation):
    """Test that K^+_{+1} is diagonal with a uniform shift and rho0 on its own slot."""
    K = rep.pi_K(1, X)
    assert all(a == b for a, b in K.entries)
    assert set(K.shifts().values()) == {(-1, 0)}
    assert K[(1, 1)](None) == pytest.approx(rho0(X, rep.params, policy=rep.policy))


def test_pi_k_inverts(rep: VectorRepresentation, generic_s):
    """Test K K^{-1} = I at a generic height."""
    P = generic_s(rep.params)
    for label in (2, 0, -1):
        K = rep.pi_K(label, X)
        assert np.allclose((K @ K.inverse_diagonal()).evaluate(P), np.eye(5))


def test_pi_k_rejects_large_label(rep: VectorRepresentation):
    with pytest.raises(InvalidIndexPattern):
        rep.pi_K(3, X)


def test_pi_half_checks_order(rep: VectorRepresentation):
    """Test that E needs row after col and F row before col."""
    with pytest.raises(InvalidIndexPattern):
        rep.pi_half("E", 1, 2, X)
    with pytest.raises(InvalidIndexPattern):
        rep.pi_half("F", 2, 1, X)
    with pytest.raises(InvalidIndexPattern):
        rep.pi_half("G", 2, 1, X)


@pytest.mark.parametrize("params_name", ["params_n1", "params_n2", "params_n3"])
def test_gauss_product_is_the_r_matrix(params_name: str, request, policy: TruncationPolicy, generic_s):
    """Test pi(L_ij)_kl = R(v - u, P) entry by entry, rho0 included."""
    params = request.getfixturevalue(params_name).at_level(0)
    rep = VectorRepresentation(params, policy)
    values = rep.rep_lr_residuals(0.31 + 0.07j, 0.12 - 0.05j, generic_s(params))
    assert values["shift_mismatch"] == 0.0
    assert values["max_relative"] < 1e-10
    assert values["normalized_relative"] < 1e-10


def test_selected_entries(rep: VectorRepresentation, generic_s):
    """Test the e_1, cbar and dbar entries singled out of pi(L)."""
    residuals = rep.selected_entries(0.31 + 0.07j, 0.12 - 0.05j, generic_s(rep.params))
    assert max(residuals.values()) < 1e-10


def test_solved_corner_reaches_d(rep: VectorRepresentation, generic_s):
    """Test the solved corner of E^+_{-2,1} where it feeds the (-2,-1) entry of pi(L_{2,1})."""
    v, u = 0.31 + 0.07j, 0.12 - 0.05j
    P = generic_s(rep.params)
    L = rep.assemble_L(v, u)
    R = assemble(v - u, P, PrefactorMode.RHO0, rep.params, rep.policy).matrix
    assert L[(2, 1)][(-2, -1)](P) == pytest.approx(R[flat(2, -2, 2), flat(1, -1, 2)], rel=1e-10)


def test_relbasic_holds(rep: VectorRepresentation, generic_s):
    """Test the K exchange of E and F for both consecutive pairs at N = 2."""
    P = generic_s(rep.params)
    for a, b in rep.consecutive_pairs():
        residuals = rep.relbasic_residuals(a, b, 0.41 + 0.06j, 0.18 - 0.04j, 0.05 + 0.02j, P)
        assert max(residuals.values()) < 1e-10, residuals


def test_h_decomposition(rep: VectorRepresentation, generic_s):
    """Test pi(H^+-_j) against the K ratios."""
    P = generic_s(rep.params)
    for sign in (1, -1):
        for j in (1, 2):
            assert rep.h_decomposition_residual(sign, j, 0.31 + 0.07j, 0.12 - 0.05j, P) < 1e-10
