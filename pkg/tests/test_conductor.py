import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from ferrand.conductor import (
    FiberElement,
    PushoutPresentation,
    build_square,
    check_bicartesian,
    conductor,
    fiber_membership,
    localize_square,
    pair_preimage,
    present_pushout,
)
from ferrand.config import using
from ferrand.corpus import (
    LAURENT_PROBES,
    identity_square,
    laurent_square,
    laurent_text,
    nodal_cubic_candidate,
    nodal_square,
    wrong_candidate,
)
from ferrand.errors import BoundExceeded
from ferrand.poly import GF, QQ
from ferrand.rings import certify_iso, ring, validate_hom

coeff_lists = st.lists(st.integers(-4, 4), min_size=0, max_size=6)


def poly_text(cs, var="t"):
    return " + ".join(f"({c})*{var}^{i}" for i, c in enumerate(cs)) or "0"


@pytest.fixture(scope="module")
def nodal():
    sq = nodal_square(QQ)
    return sq, present_pushout(sq)


def _tame_square():
    B, C = ring(QQ, "x"), ring(QQ, "t")
    K = ring(QQ, "t", ["t^3"])
    return build_square(validate_hom(B, K, ["t^2"]), validate_hom(C, K, ["t"]))


TAME = _tame_square()


@st.composite
def matched(draw):
    b = TAME.B(poly_text(draw(coeff_lists), "x"))
    q = TAME.C(poly_text(draw(coeff_lists)))
    c = TAME.C(b.substitute([TAME.C("t^2")], TAME.C.poly)) + TAME.C("t^3") * q
    return FiberElement.make(TAME, b, c)


@given(matched(), matched(), matched())
def test_fiber_elements_form_a_ring(a, b, c):
    for e in (a + b, a * b, a - c, (a + b) * c, a**2):
        assert e.matched()
    assert (a + b) * c == a * c + b * c
    assert a * b == b * a
    assert (a - a).is_zero()


def test_unmatched_pair_rejected():
    with pytest.raises(ValueError):
        FiberElement.make(TAME, "x", "t")


@given(coeff_lists)
def test_nodal_membership_rule(cs):
    # c lies in A iff c(1) = c(-1)
    sq = nodal_square(QQ)
    t = sympy.Symbol("t")
    expr = sympy.Integer(0) + sum(c * t**i for i, c in enumerate(cs))
    expected = expr.subs(t, 1) == expr.subs(t, -1)
    assert (fiber_membership(sq, poly_text(cs)) is not None) == bool(expected)


@given(coeff_lists)
def test_cusp_membership_rule(cs):
    # k[t^2, t^3]: the coefficient of t vanishes
    C = ring(QQ, "t")
    K = ring(QQ, "t", ["t^2"])
    sq = build_square(validate_hom(ring(QQ, []), K, []), validate_hom(C, K, ["t"]))
    expected = len(cs) < 2 or cs[1] == 0
    assert (fiber_membership(sq, poly_text(cs)) is not None) == expected


def test_conductor_of_node(nodal):
    sq, _ = nodal
    cv = conductor(sq)
    assert [str(g) for g in cv.generators] == ["t^2 - 1"]
    assert all(not e.b for e in cv.elements)


def test_nodal_presentation_is_the_cubic(nodal):
    sq, pres = nodal
    assert pres.A.nvars == 2 and len(pres.A.relations) == 1
    # oracle: the parametrization kills the relation
    t = sympy.Symbol("t")
    x, y = (sympy.sympify(str(p).replace("^", "**")) for p in pres.to_C.images)
    rel = sympy.sympify(str(pres.A.relations[0]).replace("^", "**").replace("a1", "X").replace("a2", "Y"))
    assert sympy.expand(rel.subs({"X": x, "Y": y})) == 0
    cand = nodal_cubic_candidate(sq)
    # explicit mutually inverse maps onto the candidate
    fwd = validate_hom(cand.A, pres.A, [pair_preimage(sq, pres, cand.to_B(g), cand.to_C(g)) for g in cand.A.gens()])
    assert certify_iso(fwd).verify()
    assert check_bicartesian(sq, cand).passed


def test_wrong_candidate_fails_on_generation(nodal):
    sq, _ = nodal
    rep = check_bicartesian(sq, wrong_candidate(sq))
    assert not rep.passed and rep.clause == "c"


def test_degenerate_and_identity_squares():
    Z = ring(QQ, [], ["1"])
    B, C = ring(QQ, "x"), ring(QQ, "y")
    sq = build_square(validate_hom(B, Z, ["0"]), validate_hom(C, Z, ["0"]))
    assert sq.degenerate
    pres = present_pushout(sq)
    assert check_bicartesian(sq, pres).passed
    ident = identity_square(ring(QQ, "t"))
    pres = present_pushout(ident)
    assert pres.A.nvars == 1 and not pres.A.relations


def test_open_complement(nodal):
    sq, pres = nodal
    for g in conductor(sq).elements:
        loc = localize_square(sq, g, pres)
        assert loc.B_zero and loc.A_iso_C.verify()


def test_localize_outside_conductor(nodal):
    sq, pres = nodal
    loc = localize_square(sq, FiberElement.make(sq, 3, "t^2 + 2"), pres)
    assert not loc.in_conductor and not loc.B_zero


def test_prime_field_node():
    sq = nodal_square(GF(5))
    pres = present_pushout(sq)
    assert check_bicartesian(sq, pres).passed


@pytest.mark.parametrize("bound", [4, 8])
def test_laurent_square_has_no_presentation(bound):
    with pytest.raises(BoundExceeded):
        present_pushout(laurent_square(QQ), bound)


@pytest.mark.parametrize("terms", LAURENT_PROBES)
def test_laurent_membership(terms):
    expected = not any(b == 0 and a < 0 for (a, b) in terms)
    sq = laurent_square(QQ)
    assert (fiber_membership(sq, laurent_text(terms)) is not None) == expected


def test_candidate_with_bad_generator(nodal):
    sq, _ = nodal
    N = ring(QQ, "x")
    bad = PushoutPresentation(N, validate_hom(N, sq.B, ["1"]), validate_hom(N, sq.C, ["t"]))
    rep = check_bicartesian(sq, bad)
    assert not rep.passed and rep.clause == "commute"


def test_probe_degree_is_configurable(nodal):
    sq, _ = nodal
    with using(probe_degree=3):
        assert check_bicartesian(sq, nodal_cubic_candidate(sq)).passed
