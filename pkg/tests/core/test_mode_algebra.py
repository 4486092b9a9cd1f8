import cmath

import numpy as np
import pytest
from pydantic import ValidationError

from app.core.errors import DomainError, NonConvergent
from app.core.mode_algebra import (
    CeceCase,
    RootData,
    cece_closed,
    commutator,
    eps_coeffs,
    eps_to_alpha,
    eps_vector,
    fermion_closed,
    fermion_contraction,
    gram,
)
from app.models.domain import AlgebraParams, ModeVector, TruncationPolicy
from app.models.types.fermion_sector import FermionSector


def test_root_data_gram_form():
    """Test b_ij from the epsilon realization of the simple roots."""
    b = RootData.for_rank(3).b
    assert np.array_equal(b, np.array([[2, -1, 0], [-1, 2, -1], [0, -1, 1]]))


def test_root_data_symmetrization():
    """Test b = D A with d_N = 1/2."""
    roots = RootData.for_rank(3)
    assert np.allclose(roots.symmetrizer @ roots.cartan, roots.b)
    assert roots.cartan[2, 1] == pytest.approx(-2)


def test_root_data_rejects_zero_rank():
    """Test that rank zero is refused."""
    with pytest.raises(ValueError):
        RootData.for_rank(0)


@pytest.mark.parametrize("m", [1, 2, 5])
def test_gram_symmetric_and_odd(m: int, params_n3: AlgebraParams):
    """Test gram(m) is symmetric and gram(-m) = -gram(m)."""
    G = gram(m, params_n3)
    scale = np.max(np.abs(G))
    assert np.max(np.abs(G - G.T)) / scale < 1e-13
    assert np.max(np.abs(gram(-m, params_n3) + G)) / scale < 1e-12


def test_gram_vanishes_off_neighbours(params_n3: AlgebraParams):
    """Test that b_ij = 0 gives a zero gram entry."""
    assert gram(3, params_n3)[0, 2] == 0


def test_gram_rejects_degree_zero(params_n2: AlgebraParams):
    """Test the domain error at m = 0."""
    with pytest.raises(DomainError):
        gram(0, params_n2)


def test_eps_to_alpha():
    """Test simple-root coordinates of eps_1 and eps_2."""
    assert np.array_equal(eps_to_alpha(np.array([1, 0, 0])), [1, 1, 1])
    assert np.array_equal(eps_to_alpha(np.array([0, 1, 0])), [0, 1, 1])


def test_commutator_needs_opposite_degrees(params_n2: AlgebraParams):
    """Test that modes of non-opposite degree commute."""
    X = eps_vector(1, 1, 2, params_n2)
    Y = eps_vector(-1, 2, 3, params_n2)
    assert commutator(X, Y, params_n2) == 0


def test_commutator_antisymmetry(params_n2: AlgebraParams):
    """Test [X_m, Y_-m] = -[Y_-m, X_m]."""
    X = eps_vector(1, 1, 2, params_n2)
    Y = eps_vector(-1, 2, -2, params_n2)
    forward = commutator(X, Y, params_n2)
    backward = commutator(Y, X, params_n2)
    assert abs(forward + backward) / abs(forward) < 1e-12


def test_mode_vector_rejects_degree_zero():
    """Test the validation error for m = 0."""
    with pytest.raises(ValidationError):
        ModeVector(m=0, coeffs=[1, 0])


def test_cece_case_classification():
    """Test the five commutator cases."""
    assert CeceCase.classify(1, 2, 1, 2) is CeceCase.DIAGONAL_SAME
    assert CeceCase.classify(1, 2, -1, 2) is CeceCase.DIAGONAL_OPPOSITE
    assert CeceCase.classify(1, 1, 1, 2) is CeceCase.OFF_SAME_FORWARD
    assert CeceCase.classify(-1, 2, -1, 1) is CeceCase.OFF_SAME_BACKWARD
    assert CeceCase.classify(1, 1, -1, 2) is CeceCase.OFF_OPPOSITE


@pytest.mark.parametrize("sector", list(FermionSector))
def test_fermion_contraction_closed_form(sector: FermionSector, params_n2: AlgebraParams, policy: TruncationPolicy):
    """Test NS and R mode sums against their closed forms."""
    x = 0.2 * cmath.exp(0.3j)
    value = fermion_contraction(sector, x, params_n2, policy)
    closed = fermion_closed(sector, x, params_n2)
    assert abs(value - closed) / abs(closed) < 1e-10


def test_fermion_contraction_outside_disc(params_n2: AlgebraParams, policy: TruncationPolicy):
    """Test that |x| >= |q| is refused."""
    with pytest.raises(NonConvergent):
        fermion_contraction(FermionSector.NS, abs(params_n2.q), params_n2, policy)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_opposite_diagonal_at_rank_one(m: int, params_n1: AlgebraParams):
    """Test the single power of q - 1/q in the opposite diagonal case.

    At N = 1 every eps mode is a multiple of the one alpha mode, so the
    ratio of the opposite and same diagonal commutators is the ratio of the
    two degree -m coefficients. One more factor of q - 1/q would spoil it.
    """
    t = params_n1.q - 1 / params_n1.q
    ratio = cece_closed(1, 1, -1, 1, m, params_n1) / cece_closed(1, 1, 1, 1, m, params_n1)
    expected = eps_coeffs(-1, 1, -m, params_n1)[0] / eps_coeffs(1, 1, -m, params_n1)[0]
    assert abs(ratio - expected) < 1e-8 * abs(expected)
    assert abs(ratio / t - expected) > 1e-3 * abs(expected)


def test_cece_closed_matches_commutator(params_n2: AlgebraParams):
    """Test the closed forms against x G y for every case at N = 2."""
    for sx, j, sy, k in [(1, 1, 1, 1), (-1, 2, 1, 2), (1, 1, 1, 2), (-1, 2, -1, 1), (1, 1, -1, 2)]:
        for m in (1, 2):
            engine = commutator(eps_vector(sx, j, m, params_n2), eps_vector(sy, k, -m, params_n2), params_n2)
            closed = cece_closed(sx, j, sy, k, m, params_n2)
            assert abs(engine - closed) <= 1e-8 * max(1.0, abs(closed))
