import pytest
from hypothesis import given
from hypothesis import strategies as st

from ferrand.corpus import poset_cases
from ferrand.errors import FactorizationIncomplete, NotClosedEmbedding
from ferrand.poly import QQ
from ferrand.rings import ring
from ferrand.topology import (
    SpecPoset,
    check_chain_lifting,
    find_homeomorphism,
    is_continuous,
    is_monotone,
    small_t0_spaces,
    spec_points_zero_dim,
    topological_pushout,
    verify_universal_property,
)

CASES = {c.name: c for c in poset_cases()}


def test_small_space_counts():
    # unlabeled posets on 1..4 points: 1, 2, 5, 16
    counts = [0] * 5
    for P in small_t0_spaces(4):
        counts[P.size] += 1
    assert counts[1:] == [1, 2, 5, 16]


@st.composite
def posets(draw):
    n = draw(st.integers(1, 5))
    pts = [f"p{i}" for i in range(n)]
    rels = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=6))
    # orient by index so the result is acyclic
    return SpecPoset(pts, [(pts[i], pts[j]) for i, j in rels if i < j])


@given(posets())
def test_opens_are_up_closed(P):
    for m in P.opens():
        assert P.is_open(m) and P.is_closed(((1 << P.size) - 1) ^ m)
    assert (1 << P.size) - 1 in P.opens() and 0 in P.opens()


@given(posets(), st.data())
def test_continuity_is_monotonicity(P, data):
    Q = SpecPoset(["a", "b"], [("a", "b")])
    f = {p: data.draw(st.sampled_from(["a", "b"])) for p in P.points}
    assert is_continuous(f, P, Q) == is_monotone(f, P, Q)


@pytest.mark.parametrize("name", [n for n in CASES if n != "twelve"])
def test_pushout_cases(name):
    c = CASES[name]
    rep = topological_pushout(c.Y, c.Z, c.T, c.f, c.g, c.reference)
    assert rep.partition_ok and rep.Y_closed_embedding and rep.U_open_embedding
    assert rep.quotient_matches_order is not False
    assert rep.reference_homeomorphic in (None, True)
    assert verify_universal_property(rep, c.Y, c.Z, c.T, c.f, c.g)["holds"]
    if c.open_T:
        assert check_chain_lifting(rep, c.Y, c.Z, c.T, c.f, c.g) == []


def test_node_pushout_is_homeomorphic_to_reference():
    c = CASES["node"]
    rep = topological_pushout(c.Y, c.Z, c.T, c.f, c.g, c.reference)
    assert rep.X.size == 2 and rep.homeomorphism is not None


def test_non_closed_embedding_rejected():
    c = CASES["node"]
    with pytest.raises(NotClosedEmbedding):
        topological_pushout(c.Y, c.Z, SpecPoset(["eta"]), {"eta": "y"}, {"eta": "eta"})


def test_homeomorphism_search():
    P = SpecPoset(["a", "b", "c"], [("a", "b")])
    Q = SpecPoset(["x", "y", "z"], [("z", "y")])
    R = SpecPoset(["x", "y", "z"], [("x", "y"), ("y", "z")])
    assert find_homeomorphism(P, Q) is not None
    assert find_homeomorphism(P, R) is None


def test_spec_of_finite_algebra():
    P, pts = spec_points_zero_dim(ring(QQ, "t", ["t^3 - t"]))
    assert P.size == 3 and all(p.residue_degree == 1 for p in pts)
    with pytest.raises(FactorizationIncomplete):
        spec_points_zero_dim(ring(QQ, "t", ["t^2 + 1"]))
