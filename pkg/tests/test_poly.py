from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from ferrand.errors import ParseError
from ferrand.poly import GF, QQ, PolyRing, field_from_tag, format_poly, parse_poly

R = PolyRing(QQ, ("x", "y", "z"))
X, Y, Z = sympy.symbols("x y z")

coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=4)
exps = st.tuples(*[st.integers(0, 3)] * 3)
polys = st.dictionaries(exps, coeffs, max_size=5).map(
    lambda d: sum((R.monomial(e, c) for e, c in d.items() if c), R.zero())
)


def to_sympy(p):
    return sympy.expand(sum(sympy.Rational(c.numerator, c.denominator) * X**a * Y**b * Z**d
                            for (a, b, d), c in p.terms.items()))


@given(polys, polys, polys)
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a - a == R.zero()
    assert a * R.one() == a


@given(polys, polys)
def test_product_matches_sympy(a, b):
    assert sympy.expand(to_sympy(a * b) - to_sympy(a) * to_sympy(b)) == 0


@given(polys)
def test_print_parse_round_trip(p):
    assert parse_poly(format_poly(p), R) == p


def test_parse_operators():
    assert parse_poly("(x + y)^2 - 2*x*y", R) == parse_poly("x^2 + y^2", R)
    assert parse_poly("1/2*x - -x", R) == R.monomial((1, 0, 0), Fraction(3, 2))


def test_parse_error_position():
    with pytest.raises(ParseError) as err:
        parse_poly("x + * y", R)
    assert err.value.line == 1 and err.value.column == 5


def test_unknown_variable():
    with pytest.raises(ParseError):
        parse_poly("w + 1", R)


def test_prime_field():
    F5 = PolyRing(GF(5), ("t",))
    t = F5.gen("t")
    assert (t + 1) ** 5 == t**5 + 1
    assert parse_poly("1/2", F5) == F5.const(3)


@pytest.mark.parametrize("tag,char", [("QQ", None), ("Fp:7", 7), ("GF(11)", 11)])
def test_field_tags(tag, char):
    fld = field_from_tag(tag)
    assert (fld == QQ) if char is None else fld.char == char


def test_bad_field_tag():
    with pytest.raises(ValueError):
        field_from_tag("RR")
