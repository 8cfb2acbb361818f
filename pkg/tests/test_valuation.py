import pytest
from hypothesis import given
from hypothesis import strategies as st

from ferrand.corpus import lifting_examples
from ferrand.errors import NameClash
from ferrand.valuation import (
    LaurentSquare,
    ValueIdeal,
    compose,
    conductor_chain_suite,
    dvr,
    enumerate_lifts,
    height_two,
    lemma_hypothesis,
    lift_semivaluation,
    principal,
    value_ideal_fg_test,
)

A = height_two()  # v(x) = (0, 1), v(y) = (1, 0)
small = st.integers(-3, 3)
monos = st.tuples(small, small).map(lambda e: A.monomial(x=e[0], y=e[1]))
elems = st.lists(st.tuples(st.tuples(small, small), st.integers(1, 3)), min_size=1, max_size=3).map(
    lambda ts: A.element({e: c for e, c in ts})
)


@given(monos, monos)
def test_value_is_additive(a, b):
    va, vb = a.value(), b.value()
    assert (a * b).value() == (va[0] + vb[0], va[1] + vb[1])


@given(elems, elems)
def test_ultrametric(a, b):
    s = a + b
    if s.is_zero():
        return
    assert s.value() >= min(a.value(), b.value())


@given(st.tuples(small, small))
def test_lex_membership_oracle(e):
    m = A.monomial(x=e[0], y=e[1])
    # value vector (y-exponent, x-exponent), lexicographically non-negative
    assert m.in_ring() == ((e[1], e[0]) >= (0, 0))


@given(st.tuples(st.integers(0, 3), small), st.tuples(st.integers(0, 3), small))
def test_principal_ideals_are_totally_ordered(a, b):
    if a < (0, 0) or b < (0, 0):
        return
    I, J = principal(A, a), principal(A, b)
    assert I.subset_of(J) or J.subset_of(I)
    assert I.subset_of(J) == (a >= b)


def test_conductor_is_not_finitely_generated():
    I = ValueIdeal(A, (1,))
    v = value_ideal_fg_test(I)
    assert not v.finitely_generated and len(v.chain) == 5
    assert value_ideal_fg_test(principal(A, (1, 0))).finitely_generated


def test_compose_rejects_name_clash():
    with pytest.raises(NameClash):
        compose(dvr("x"), dvr("x"))


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_chain_suite(n):
    rep = conductor_chain_suite(n)
    assert len(rep.chain) == n
    for m, w, v, in_next, in_n in rep.chain:
        assert v == (1, -(m + 1)) and in_next and not in_n
    assert rep.kernel_witness.startswith(f"x^-{n + 1}*y")
    assert not rep.unit_injective and not rep.essential_image
    assert rep.components_independent


def test_lifting_examples():
    sq = LaurentSquare()
    outcomes = {}
    for name, R, fx, fy, expect in lifting_examples():
        rep = lift_semivaluation(sq, R, fx, fy)
        outcomes[expect] = (rep, len(enumerate_lifts(R, fx, fy)), lemma_hypothesis(R, fx, fy))
        closed = R.maximal_ideal()
    refuted, count, _ = outcomes["refuted"]
    assert not refuted.lifts and len(refuted.preimage_Y) >= 2 and count == 0
    lifts, count, _ = outcomes["lifts"]
    assert lifts.lifts and lifts.unique and count == 1
    unique, count, hyp = outcomes["unique"]
    assert unique.lifts and count == 1 and hyp
    # the lift meets T only in the closed point
    assert unique.preimage_T == (closed,)
