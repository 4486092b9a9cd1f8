from fractions import Fraction

import numpy as np
import pytest
from pytest_mock import MockerFixture

from app.core.errors import InvalidParameters, NonConvergent
from app.core.exchange import ExchangeOutcome, RationalExponent, k_current
from app.core.relations import (
    ExchangeRelation,
    GaugeFactor,
    identify_gauge,
    kef_relations,
    kk_relations,
    rel_ek_relations,
    rel_kk_relations,
    relations_for,
    verify_family,
    verify_relation,
    vertex_relations,
)
from app.models.domain import AlgebraParams, TruncationPolicy
from app.models.types.relation_family import RelationFamily


def _outcome(scalar: complex) -> ExchangeOutcome:
    return ExchangeOutcome(
        scalar=scalar,
        residual_charge_ok=True,
        p_independence_residual=0.0,
        exponent_ab=RationalExponent(),
        exponent_ba=RationalExponent(),
        sign=1,
    )


@pytest.mark.parametrize(
    "build, count",
    [(kk_relations, 15), (kef_relations, 20), (rel_kk_relations, 15), (rel_ek_relations, 20)],
)
def test_relation_enumeration(build, count: int, params_n2: AlgebraParams):
    """Test how many relations each family lists at N = 2."""
    relations = build(params_n2)
    assert len(relations) == count
    assert len({r.name for r in relations}) == count


def test_vertex_relations_need_level_one(params_n2: AlgebraParams):
    """Test that vertex operators are refused away from c = 1."""
    with pytest.raises(InvalidParameters):
        vertex_relations(params_n2)


def test_vertex_families(level_one_params: AlgebraParams):
    """Test the split of vertex relations into families."""
    assert [r.name for r in relations_for(RelationFamily.VERTEX_BARE, level_one_params)] == [
        "Phi.Phi",
        "Psi*.Psi*",
        "Phi.Psi*",
    ]
    assert len(relations_for(RelationFamily.VERTEX_SUFFICIENT, level_one_params)) == 8
    assert len(relations_for(RelationFamily.VERTEX_INTERTWINING, level_one_params)) == 2


def test_gauge_constant_families():
    """Test which families tolerate a constant factor."""
    assert not RelationFamily.KK.allows_gauge_constant
    assert not RelationFamily.KEF.allows_gauge_constant
    assert not RelationFamily.VERTEX_SUFFICIENT.allows_gauge_constant
    assert not RelationFamily.VERTEX_BARE.allows_gauge_constant
    assert RelationFamily.REL_KK.allows_gauge_constant
    assert RelationFamily.REL_EK.allows_gauge_constant
    assert RelationFamily.VERTEX_INTERTWINING.allows_gauge_constant


def test_phi_psi_allows_gauge(level_one_params: AlgebraParams):
    """Test the per-relation override on the bare vertex family."""
    gauged = {r.name for r in vertex_relations(level_one_params) if r.allows_gauge}
    assert gauged == {"Phi.Psi*", "Phi.K-1", "K-1.Psi*"}


def test_identify_gauge(params_n2: AlgebraParams):
    """Test that lattice powers of q are recognised and other constants are not."""
    constant = -params_n2.qpow(0.5 + 1 / params_n2.r - 1 / params_n2.r_star)
    gauge = identify_gauge(constant, params_n2)
    assert gauge == GaugeFactor(-1, RationalExponent(Fraction(1, 2), Fraction(1), Fraction(-1)))
    assert abs(gauge.value(params_n2) - constant) < 1e-14
    assert identify_gauge(1 + 0j, params_n2) == GaugeFactor(1, RationalExponent())
    assert identify_gauge(2 + 0j, params_n2) is None


@pytest.mark.parametrize("family", [RelationFamily.KK, RelationFamily.REL_KK])
def test_verify_relation_gauge_handling(
    family: RelationFamily, params_n2: AlgebraParams, policy: TruncationPolicy, mocker: MockerFixture
):
    """Test that a constant q^{1/r} fails bare families and passes gauge families."""
    mocker.patch("app.core.relations.annulus_point", return_value=(0.1 + 0j, 0.3 + 0j))
    mocker.patch("app.core.relations.exchange_ratio", return_value=_outcome(1 + 0j))
    k = k_current(1, 1, params_n2)
    offset = params_n2.qpow(-1 / params_n2.r)
    relation = ExchangeRelation("k.k", family, k, k, lambda a, b: offset)
    result = verify_relation(relation, params_n2, policy, np.random.default_rng(0), samples=2)
    assert result.inverse_residual == 0
    assert result.samples == 2
    if family.allows_gauge_constant:
        assert result.residual < 1e-14
        assert result.gauge == GaugeFactor(1, RationalExponent(per_r=Fraction(1)))
    else:
        assert result.residual == pytest.approx(abs(1 / offset - 1))
        assert result.gauge is None


def test_off_lattice_constant_fails(params_n2: AlgebraParams, policy: TruncationPolicy, mocker: MockerFixture):
    """Test that a constant outside the q-power lattice is not absorbed."""
    mocker.patch("app.core.relations.annulus_point", return_value=(0.1 + 0j, 0.3 + 0j))
    mocker.patch("app.core.relations.exchange_ratio", return_value=_outcome(1 + 0j))
    k = k_current(1, 1, params_n2)
    relation = ExchangeRelation("k.k", RelationFamily.REL_KK, k, k, lambda a, b: 0.5 + 0j)
    result = verify_relation(relation, params_n2, policy, np.random.default_rng(0), samples=2)
    assert result.gauge is None
    assert result.residual == pytest.approx(1.0)


def test_gauge_needs_two_samples(params_n2: AlgebraParams, policy: TruncationPolicy):
    """Test that a fitted constant is refused on a single sample."""
    k = k_current(1, 1, params_n2)
    relation = ExchangeRelation("k.k", RelationFamily.REL_KK, k, k, lambda a, b: 1 + 0j)
    with pytest.raises(InvalidParameters):
        verify_relation(relation, params_n2, policy, np.random.default_rng(0), samples=1)


def test_empty_annulus_uses_continuation(params_n2: AlgebraParams, policy: TruncationPolicy, mocker: MockerFixture):
    """Test the fallback to continued contractions."""
    mocker.patch("app.core.relations.annulus_point", side_effect=NonConvergent("empty annulus"))
    exchange = mocker.patch("app.core.relations.exchange_ratio", return_value=_outcome(1 + 0j))
    k = k_current(1, 1, params_n2)
    relation = ExchangeRelation("k.k", RelationFamily.KK, k, k, lambda a, b: 1 + 0j)
    result = verify_relation(relation, params_n2, policy, np.random.default_rng(0), samples=1)
    assert result.residual == 0
    assert exchange.call_count == 2
    assert all(call.kwargs["continued"] for call in exchange.call_args_list)


def test_verify_relation_retries(params_n2: AlgebraParams, policy: TruncationPolicy, mocker: MockerFixture):
    """Test that a non-convergent sample is redrawn."""
    annulus = mocker.patch("app.core.relations.annulus_point", return_value=(0.1 + 0j, 0.3 + 0j))
    mocker.patch(
        "app.core.relations.exchange_ratio",
        side_effect=[NonConvergent("too close"), _outcome(1 + 0j), _outcome(1 + 0j)],
    )
    k = k_current(1, 1, params_n2)
    relation = ExchangeRelation("k.k", RelationFamily.KK, k, k, lambda a, b: 1 + 0j)
    result = verify_relation(relation, params_n2, policy, np.random.default_rng(0), samples=1)
    assert result.residual == 0
    assert annulus.call_count == 2
    assert annulus.call_args.args[-1] == 1


def test_verify_relation_gives_up(params_n2: AlgebraParams, policy: TruncationPolicy, mocker: MockerFixture):
    """Test NonConvergent after the last attempt."""
    mocker.patch("app.core.relations.annulus_point", return_value=(0.1 + 0j, 0.3 + 0j))
    mocker.patch("app.core.relations.exchange_ratio", side_effect=NonConvergent("never"))
    k = k_current(1, 1, params_n2)
    relation = ExchangeRelation("k.k", RelationFamily.KK, k, k, lambda a, b: 1 + 0j)
    with pytest.raises(NonConvergent):
        verify_relation(relation, params_n2, policy, np.random.default_rng(0), samples=1, max_attempts=2)


@pytest.mark.parametrize(
    "family",
    [RelationFamily.KK, RelationFamily.KEF, RelationFamily.REL_KK, RelationFamily.REL_EK],
)
def test_current_families_hold(family: RelationFamily, params_n2: AlgebraParams, policy: TruncationPolicy):
    """Test every current relation against its closed form on the real engine."""
    results = verify_family(family, params_n2, policy, np.random.default_rng(3), samples=2)
    for result in results:
        assert result.residual < 1e-8, result.name
        assert result.inverse_residual < 1e-8, result.name
        if family.allows_gauge_constant:
            assert result.gauge is not None, result.name


def test_k_minus_pairs_hold(params_n2: AlgebraParams, policy: TruncationPolicy):
    """Test the K^+_{-j} K^+_{-l} relations, including the pairs with K^+_0."""
    chosen = [r for r in rel_kk_relations(params_n2, policy) if r.name in ("K-1.K-2", "K-1.K0", "K-2.K0")]
    assert len(chosen) == 3
    for relation in chosen:
        result = verify_relation(relation, params_n2, policy, np.random.default_rng(5), samples=2)
        assert result.residual < 1e-8, relation.name


@pytest.mark.parametrize(
    "family",
    [RelationFamily.VERTEX_BARE, RelationFamily.VERTEX_SUFFICIENT, RelationFamily.VERTEX_INTERTWINING],
)
def test_vertex_families_hold(family: RelationFamily, level_one_params: AlgebraParams, policy: TruncationPolicy):
    """Test the level-one vertex relations, continued where no annulus exists."""
    results = verify_family(family, level_one_params, policy, np.random.default_rng(11), samples=2)
    for result in results:
        assert result.residual < 1e-8, result.name
        assert result.inverse_residual < 1e-8, result.name
