import cmath
import math

import pytest

from app.core.errors import DomainError, NonConvergent
from app.core.special_functions import (
    bracket,
    bracket_star,
    cpow,
    qnum,
    qnum_plus,
    qpoch1,
    qpoch2,
    theta_p,
    theta_sum,
)
from app.models.domain import AlgebraParams, TruncationPolicy


def test_qpoch1_trivial_values(policy: TruncationPolicy):
    """Test the empty deformation and the single-factor product."""
    assert qpoch1(0, 0.3, policy) == 1
    assert qpoch1(0.5, 0, policy) == pytest.approx(0.5)


def test_qpoch1_matches_log_sum(policy: TruncationPolicy):
    """Test the product against an exponentiated log series."""
    expected = math.exp(sum(math.log(1 - 0.2 * 0.3**n) for n in range(80)))
    assert abs(qpoch1(0.2, 0.3, policy) - expected) < 1e-14


def test_qpoch1_rejects_unit_nome(policy: TruncationPolicy):
    """Test that |p| >= 1 is refused."""
    with pytest.raises(NonConvergent):
        qpoch1(0.2, 1.0, policy)


def test_qpoch1_respects_ratio_guard():
    """Test that a nome beyond the ratio guard is refused."""
    with pytest.raises(NonConvergent):
        qpoch1(0.2, 0.97, TruncationPolicy(ratio_guard=0.95))


def test_qpoch2_trivial_values(policy: TruncationPolicy):
    """Test qpoch2 at x = 0 and its collapse to qpoch1 at p2 = 0."""
    assert qpoch2(0, 0.2, 0.3, policy) == 1
    assert qpoch2(0.4, 0.25, 0, policy) == pytest.approx(qpoch1(0.4, 0.25, policy), abs=1e-15)


def test_qpoch2_matches_nested_loops(policy: TruncationPolicy):
    """Test the double product against a brute nested loop."""
    expected = 1.0
    for n in range(60):
        for m in range(60):
            expected *= 1 - 0.1 * 0.2**n * 0.3**m
    assert abs(qpoch2(0.1, 0.2, 0.3, policy) - expected) < 1e-14


def test_theta_vanishes_at_one(policy: TruncationPolicy):
    """Test the zero of Theta_p at z = 1."""
    assert theta_p(1, 0.3, policy) == 0


def test_theta_at_zero_nome(policy: TruncationPolicy):
    """Test that Theta_0(z) = 1 - z."""
    z = 0.7 + 0.2j
    assert abs(theta_p(z, 0, policy) - (1 - z)) < 1e-15


def test_theta_rejects_zero_argument(policy: TruncationPolicy):
    """Test the domain error at z = 0."""
    with pytest.raises(DomainError):
        theta_p(0, 0.3, policy)


@pytest.mark.parametrize(
    "p, z",
    [
        (0.3 * cmath.exp(0.4j), 1.2 * cmath.exp(1j)),
        (0.5, 0.7 - 0.4j),
        (-0.2 + 0.1j, 1.9j),
    ],
)
def test_theta_triple_product(p: complex, z: complex, policy: TruncationPolicy):
    """Test product form against the Jacobi series."""
    product = theta_p(z, p, policy)
    series = theta_sum(z, p, policy)
    assert abs(product - series) / abs(series) < 1e-12


def test_theta_quasi_periodicity_and_symmetry(policy: TruncationPolicy):
    """Test Theta_p(pz) = -Theta_p(z)/z and Theta_p(p/z) = Theta_p(z)."""
    p, z = 0.35 * cmath.exp(0.2j), 0.9 + 0.6j
    value = theta_p(z, p, policy)
    assert abs(theta_p(p * z, p, policy) + value / z) / abs(value) < 1e-12
    assert abs(theta_p(p / z, p, policy) - value) / abs(value) < 1e-12


def test_bracket_zero(params_n2: AlgebraParams):
    """Test that [0] = 0."""
    assert bracket(0, params_n2) == 0


@pytest.mark.parametrize("u", [0.31 + 0.12j, -0.7 + 0.05j, 1.4 - 0.2j])
def test_bracket_identities(u: complex, params_n2: AlgebraParams):
    """Test quasi-periodicity and oddness of [u] and [u]*."""
    value = bracket(u, params_n2)
    assert abs(bracket(u + params_n2.r, params_n2) + value) / abs(value) < 1e-12
    assert abs(bracket(-u, params_n2) + value) / abs(value) < 1e-12
    starred = bracket_star(u, params_n2)
    assert abs(bracket_star(u + params_n2.r_star, params_n2) + starred) / abs(starred) < 1e-12
    assert abs(bracket_star(-u, params_n2) + starred) / abs(starred) < 1e-12


def test_bracket_is_deterministic(params_n2: AlgebraParams):
    """Test that identical inputs give bit-identical values."""
    assert bracket(0.42 + 0.1j, params_n2) == bracket(0.42 + 0.1j, params_n2)


def test_cpow_trivial_values(params_n2: AlgebraParams):
    """Test zero exponent, z = 1 and exponent additivity."""
    u = 0.37 - 0.21j
    assert cpow(u, 0, params_n2) == 1
    assert cpow(0, 0.77, params_n2) == 1
    inverse = cpow(u, 1 / params_n2.r, params_n2) * cpow(u, -1 / params_n2.r, params_n2)
    assert abs(inverse - 1) < 1e-14


def test_qnum_values(params_n2: AlgebraParams):
    """Test [1]_q = 1, [0]_q = 0 and [x]_+ against its definition."""
    q = params_n2.q
    assert abs(qnum(1, params_n2) - 1) < 1e-14
    assert qnum(0, params_n2) == 0
    assert abs(qnum_plus(1, params_n2) - (q + 1 / q) / (q - 1 / q)) < 1e-13
