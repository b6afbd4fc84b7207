from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from halfloop.dunkl import (
    Algebra,
    DunklSpec,
    alg_mul,
    apply_elem,
    commutator,
    dunkl_operator,
    dunkl_operators,
    group_elements,
    perm_sign,
    power_sum,
    rotation,
    transposition,
    verify_commutativity_evaluator,
    verify_dunkl_commutativity,
    wreath_identity,
    wreath_inverse,
    wreath_mul,
)
from halfloop.errors import ValidationError
from halfloop.polyrat import RatFun

ALG = Algebra(DunklSpec(n=3, L=2))
RING = ALG.ring


def words(n, L):
    return st.tuples(
        st.tuples(*[st.integers(0, n - 1)] * L),
        st.permutations(list(range(L))).map(tuple),
    )


def coeffs():
    q1, q2 = RING.q(0), RING.q(1)
    pool = [
        RatFun.const(RING, 1),
        RatFun.from_poly(q1),
        RatFun.from_poly(q2 * q2 - q1),
        RatFun.inv_linear(RING, 0, 1, 1, -ALG.tau(1)),
        RatFun.inv_linear(RING, 1, 1),
        RatFun.from_poly(RING.lam),
    ]
    return st.sampled_from(pool)


elems = st.lists(
    st.tuples(coeffs(), st.tuples(st.integers(0, 1), st.integers(0, 1)), words(3, 2)), min_size=1, max_size=3
).map(lambda ts: sum((ALG.elem({(alpha, w): c}) for c, alpha, w in ts), ALG.zero()))

psis = st.sampled_from(
    [
        RatFun.from_poly(RING.q(0) ** 2 * RING.q(1) + RING.q(1) ** 3),
        RatFun.from_poly(RING.q(0) - RING.q(1).scale(2)) * RatFun.inv_linear(RING, 0, 1),
        RatFun.from_poly(RING.q(1) ** 4),
    ]
)


@pytest.mark.parametrize("kwargs, invariant", [
    (dict(n=0, L=2), "n-positive"),
    (dict(n=2, L=0), "L-positive"),
    (dict(n=2, L=2, eps=0), "eps-sign"),
    (dict(n=2, L=2, N=2, multiplicities=(2, 1)), "multiplicity-sum"),
    (dict(n=2, L=2, mu=[1]), "mu-count"),
])
def test_spec_validation(kwargs, invariant):
    with pytest.raises(ValidationError) as exc:
        DunklSpec(**kwargs)
    assert exc.value.invariant == invariant


def test_default_truncation():
    assert DunklSpec(n=2, L=2).truncation == 3
    assert DunklSpec(n=4, L=2).truncation == 4


@pytest.mark.parametrize("n, L", [(1, 3), (2, 2), (3, 2), (2, 3)])
def test_group_order_and_signs(n, L):
    from math import factorial

    els = list(group_elements(n, L))
    assert len(els) == len(set(els)) == n**L * factorial(L)
    assert sum(perm_sign(pi) for _, pi in els) == 0 or L == 1


@given(words(3, 3), words(3, 3), words(3, 3))
def test_wreath_group_axioms(a, b, c):
    e = wreath_identity(3)
    assert wreath_mul(wreath_mul(a, b, 3), c, 3) == wreath_mul(a, wreath_mul(b, c, 3), 3)
    assert wreath_mul(a, e, 3) == a == wreath_mul(e, a, 3)
    assert wreath_mul(a, wreath_inverse(a, 3), 3) == e


@given(words(3, 2), words(3, 2), psis)
def test_group_action_is_a_homomorphism(w1, w2, f):
    assert ALG.act(wreath_mul(w1, w2, 3), f) == ALG.act(w1, ALG.act(w2, f))
    assert ALG.word(w1) * ALG.word(w2) == ALG.word(wreath_mul(w1, w2, 3))


def test_defining_relations():
    tau = ALG.tau(1)
    hb = ALG.scalar(RatFun.from_poly(RING.hbar))
    minus_i = ALG.scalar(RatFun.const(RING, -ALG.i_unit))
    q1, q2, p1 = ALG.q(0), ALG.q(1), ALG.p(0)
    Q1, X = ALG.Q(0), ALG.X(0, 1)
    assert Q1 * q1 == q1 * Q1 * ALG.scalar(RatFun.const(RING, tau ** -1))
    assert Q1 * q2 == q2 * Q1
    assert Q1 * p1 == p1 * Q1 * ALG.scalar(RatFun.const(RING, tau))
    assert p1 * q1 - q1 * p1 == minus_i * hb
    assert X * q2 == q1 * X
    assert X * X == ALG.scalar(1)
    assert ALG.Q(0) ** 3 == ALG.scalar(1)


@given(elems, elems, elems)
def test_product_associative(a, b, c):
    assert alg_mul(alg_mul(a, b), c) == alg_mul(a, alg_mul(b, c))


@given(elems, elems, psis)
def test_product_matches_composition_on_functions(a, b, psi):
    assert apply_elem(a * b, psi) == apply_elem(a, apply_elem(b, psi))


def test_dunkl_operator_render_and_range():
    d = dunkl_operator(ALG, 1)
    text = d.render()
    assert text.splitlines()[0].endswith("*p1")
    with pytest.raises(IndexError):
        dunkl_operator(ALG, 3)


@pytest.mark.parametrize("n, L", [(1, 2), (2, 2), (3, 2)])
def test_commutativity_small(n, L):
    alg = Algebra(DunklSpec(n=n, L=L))
    assert all(c.passed for c in verify_dunkl_commutativity(alg))
    assert verify_commutativity_evaluator(alg, count=3).passed


def test_corrupted_operator_fails():
    alg = Algebra(DunklSpec(n=2, L=2))
    d1, d2 = dunkl_operators(alg)
    bad = d2 + alg.scalar(RatFun.from_poly(alg.ring.q(0)))
    c = commutator(d1, bad)
    assert not c.is_zero()


def test_first_power_sum_is_hbar_free():
    alg = Algebra(DunklSpec(n=3, L=2, mu="zero"))
    I1 = power_sum(alg, 1)
    h = alg.ring.hbar_index
    assert all(f.num.degree_in(h) <= 0 for f in I1.terms.values())


def test_numeric_parameters():
    alg = Algebra(DunklSpec(n=2, L=2, lam=Fraction(1, 2), mu=[1, 2]))
    assert all(c.passed for c in verify_dunkl_commutativity(alg))
