from fractions import Fraction

import pytest

from halfloop.cyclotomic import CycNum, root
from halfloop.errors import ValidationError
from halfloop.gaudin import (
    InnerModelSpec,
    OuterModelSpec,
    PoleSum,
    build_B,
    hamiltonians,
    independence_check,
    operator_pairs,
    residue_identity_inner,
    symmetry_generators_inner,
    symmetry_generators_outer,
    verify_commuting,
)
from halfloop.tensor_ops import RepMatrices, SpaceLayout, elementary, identity, permutation


@pytest.mark.parametrize(
    "kwargs, invariant",
    [
        (dict(n=2, N=2, multiplicities=(1, 1), z=(1, 1)), "z-distinct"),
        (dict(n=2, N=2, multiplicities=(1, 1), z=(1, -1)), "z-positive"),
        (dict(n=2, N=2, multiplicities=(1, 2), z=(1, 2)), "multiplicity-sum"),
        (dict(n=3, N=2, multiplicities=(1, 1), z=(1, 2)), "multiplicity-count"),
        (dict(n=0, N=2, multiplicities=(), z=(1, 2)), "n-positive"),
        (dict(n=2, N=2, multiplicities=(1, 1), z=(1, 2), reps=(RepMatrices.fundamental(3, 4), None)), "rep-matches-N"),
    ],
)
def test_inner_validation(kwargs, invariant):
    with pytest.raises(ValidationError) as exc:
        InnerModelSpec(**kwargs)
    assert exc.value.invariant == invariant


@pytest.mark.parametrize(
    "kwargs, invariant",
    [
        (dict(N=3, eta=-1, z=(1, 2)), "eta-even-N"),
        (dict(N=2, eta=0, z=(1, 2)), "eta-sign"),
        (dict(N=2, eta=1, z=(1, 2), K=[[1, 1], [0, 1]]), "K-symmetry"),
        (dict(N=2, eta=1, z=(1, 2), K=[[1, 1], [1, 1]]), "K-invertible"),
        (dict(N=3, eta=1, z=(1, 2), signature=(2, 2)), "signature-sum"),
    ],
)
def test_outer_validation(kwargs, invariant):
    with pytest.raises(ValidationError) as exc:
        OuterModelSpec(**kwargs)
    assert exc.value.invariant == invariant


def test_untwisted_model_is_classic_gaudin():
    # n = 1 with fundamental sites: H_k = sum_{j != k} P_kj / (z_k - z_j)
    z = (Fraction(1), Fraction(2), Fraction(9, 2))
    spec = InnerModelSpec(1, 2, (2,), z)
    lay = SpaceLayout((2, 2, 2))
    for k, H in enumerate(hamiltonians(spec)):
        ref = identity(lay, 4).scale(0)
        for j in range(3):
            if j != k:
                ref = ref + permutation(lay, 4, k, j).scale(CycNum.rational(1 / (z[k] - z[j]), 4))
        assert H == ref


def test_untwisted_hamiltonians_sum_to_zero_and_rank():
    spec = InnerModelSpec(1, 2, (2,), (1, 2, 3))
    r = independence_check(spec)
    assert r.passed and "sum_k H_k = 0" in r.info


def test_polesum_series_and_evaluation():
    spec = InnerModelSpec(2, 2, (1, 1), (1, 2))
    B = build_B(spec)
    # B(u) evaluated at a point equals its partial-fraction sum; the leading 1/u coefficient is the pole sum
    u = CycNum.rational(7, 4)
    total = None
    for (pole, power), X in B.items():
        term = X.scale((u - pole) ** (-power))
        total = term if total is None else total + term
    assert B.evaluate(u) == total
    simple = None
    for (pole, power), X in B.items():
        if power == 1:
            simple = X if simple is None else simple + X
    assert B.series_coeff(0) == simple


def test_polesum_product_matches_pointwise():
    spec = InnerModelSpec(2, 2, (1, 1), (1, 2))
    B = build_B(spec)
    u = CycNum.rational(Fraction(5, 3), 4) + root(4, 1)
    assert (B * B).evaluate(u) == B.evaluate(u) * B.evaluate(u)


def test_symmetry_generator_counts():
    assert len(symmetry_generators_inner(InnerModelSpec(2, 3, (2, 1), (1, 2)))) == 5
    assert len(symmetry_generators_inner(InnerModelSpec(3, 3, (1, 1, 1), (1, 2)))) == 3


def test_commuting_detects_corruption():
    spec = InnerModelSpec(2, 2, (1, 1), (1, 2, 3))
    hams = hamiltonians(spec)
    assert all(c.passed for c in verify_commuting(hams))
    bad = list(hams)
    bad[1] = bad[1] + elementary(bad[1].layout, 4, 0, 0, 1)
    results = verify_commuting(bad)
    failed = [c for c in results if not c.passed]
    assert failed and failed[0].witness.startswith("entry (")


def test_operator_pairs():
    assert operator_pairs(3) == [(0, 1), (0, 2), (1, 2)]
    assert operator_pairs(3, all_pairs=False) == [(0, 1), (1, 2)]
    assert operator_pairs(1) == []


def test_residue_identity_spin1_site():
    spec = InnerModelSpec(2, 2, (1, 1), (1, 2), reps=(None, RepMatrices.symmetric_square(2, 4)))
    assert residue_identity_inner(spec).passed


def test_outer_generators_span():
    from halfloop.tensor_ops import exact_rank

    assert exact_rank(symmetry_generators_outer(OuterModelSpec(2, -1, (1, 2)))) == 3
    assert exact_rank(symmetry_generators_outer(OuterModelSpec(3, 1, (1, 2), signature=(2, 1)))) == 3
    assert exact_rank(symmetry_generators_outer(OuterModelSpec(3, 1, (1, 2)))) == 3
