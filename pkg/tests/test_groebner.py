import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from ferrand.config import using
from ferrand.errors import BoundExceeded
from ferrand.groebner import IdealHandle, eliminate, groebner_basis, intersect, normal_form
from ferrand.poly import GF, GREVLEX, LEX, QQ, PolyRing

R = PolyRing(QQ, ("x", "y", "z"))
SYMS = sympy.symbols("x y z")

small = st.dictionaries(st.tuples(*[st.integers(0, 2)] * 3), st.integers(-3, 3), min_size=1, max_size=3).map(
    lambda d: sum((R.monomial(e, c) for e, c in d.items() if c), R.zero())
)
ideals = st.lists(small, min_size=1, max_size=3)


def sym(p):
    return sum(sympy.Rational(c.numerator, c.denominator) * sympy.Mul(*[s**a for s, a in zip(SYMS, e)])
               for e, c in p.terms.items())


def sympy_basis(gens, order):
    G = sympy.groebner([sym(g) for g in gens if g], *SYMS, order=order)
    return {sympy.expand(g / sympy.Poly(g, *SYMS).LC(order=order)) for g in G.exprs}


@given(ideals)
def test_reduced_basis_matches_sympy(gens):
    if not any(gens):
        assert groebner_basis(gens, ring=R) == []
        return
    ours = {sympy.expand(sym(g)) for g in groebner_basis(gens)}
    assert ours == sympy_basis(gens, "grevlex")


@given(ideals)
def test_lex_basis_matches_sympy(gens):
    if not any(gens):
        return
    ours = {sympy.expand(sym(g)) for g in groebner_basis(gens, LEX)}
    assert ours == sympy_basis(gens, "lex")


@given(ideals, small, st.lists(small, min_size=1, max_size=3))
def test_multiples_reduce_to_zero(gens, p, cofactors):
    I = IdealHandle(R, gens)
    member = sum((c * g for c, g in zip(cofactors, gens)), R.zero())
    assert I.contains(member)
    # normal forms are canonical: p and p + member have the same remainder
    assert normal_form(p, I) == normal_form(p + member, I)


def test_unit_and_zero_ideals():
    assert IdealHandle(R, ["x", "x + 1"]).is_unit()
    assert IdealHandle(R, []).is_zero()


def test_elimination_twisted_cubic():
    # (x - t, y - t^2, z - t^3) ∩ k[x, y, z] is the twisted cubic
    S = PolyRing(QQ, ("t", "x", "y", "z"))
    I = IdealHandle(S, ["x - t", "y - t^2", "z - t^3"])
    E = eliminate(I, ["t"])
    for rel in ("y - x^2", "z - x^3", "x*z - y^2"):
        assert E.contains(S(rel))
    assert not E.contains(S("x"))


def test_intersection():
    I = IdealHandle(R, ["x"])
    J = IdealHandle(R, ["y"])
    assert intersect(I, J) == IdealHandle(R, ["x*y"])


def test_prime_field_basis():
    F = PolyRing(GF(3), ("x", "y"))
    xs = sympy.symbols("x y")
    G = groebner_basis([F("x^3 - x"), F("x*y - 1")])
    ours = {sympy.Poly(sympy.sympify(str(g).replace("^", "**")), *xs, modulus=3).monic() for g in G}
    ref = sympy.groebner([sympy.sympify("x**3 - x"), sympy.sympify("x*y - 1")], *xs, modulus=3, order="grevlex")
    assert ours == {sympy.Poly(e, *xs, modulus=3).monic() for e in ref.exprs}


def test_degree_bound_is_reported():
    gens = [R("x^5*y - z^4"), R("y^6 - x*z^3"), R("x^3*z^2 - y^4")]
    with using(degree_bound=3), pytest.raises(BoundExceeded):
        groebner_basis(gens, GREVLEX)
