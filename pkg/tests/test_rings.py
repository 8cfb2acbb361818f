import pytest
import sympy

from ferrand.errors import NotIsomorphism, NotSurjective, RelationViolated
from ferrand.poly import GF, QQ
from ferrand.rings import (
    certify_iso,
    identity,
    iso_from_images,
    kernel,
    localize,
    product_ring,
    ring,
    section,
    subalgebra_membership,
    tensor_over_base,
    validate_hom,
)

NODE = ring(QQ, "x,y", ["y^2 - x^3 - x^2"])
LINE = ring(QQ, "t")


def test_hom_rejects_bad_images():
    with pytest.raises(RelationViolated):
        validate_hom(NODE, LINE, ["t^2", "t^3"])
    h = validate_hom(NODE, LINE, ["t^2 - 1", "t^3 - t"])
    assert h.verify()


def test_kernel_of_parametrization():
    # implicitization oracle from sympy: eliminate t from (x - t^2 + 1, y - t^3 + t)
    P = ring(QQ, "x,y")
    h = validate_hom(P, LINE, ["t^2 - 1", "t^3 - t"])
    K = kernel(h)
    t, x, y = sympy.symbols("t x y")
    G = sympy.groebner([x - t**2 + 1, y - t**3 + t], t, x, y, order="lex")
    elim = [g for g in G.exprs if t not in g.free_symbols]
    assert len(K.gens) == 1 and len(elim) == 1
    ours = sympy.sympify(str(K.gens[0]).replace("^", "**"))
    assert sympy.simplify(ours / elim[0]).is_constant()


def test_injective_hom_has_zero_kernel():
    h = validate_hom(NODE, LINE, ["t^2 - 1", "t^3 - t"])
    assert kernel(h).is_zero()


def test_localize_inverts():
    L, j = localize(LINE, "t^2 - 1")
    assert L.is_unit(j(LINE("t - 1")))
    assert not L.is_unit(j(LINE("t")))
    inv = L.inverse(j(LINE("t + 1")))
    assert L.equal(inv * j(LINE("t + 1")), L.one())


def test_localize_at_nilpotent_is_zero():
    R = ring(QQ, "t", ["t^2"])
    assert localize(R, "t")[0].is_zero_ring()


def test_section_and_surjectivity():
    h = validate_hom(ring(QQ, "a,b"), LINE, ["t", "t^2"])
    pre = section(h)
    assert LINE.equal(h(pre[0]), LINE("t"))
    with pytest.raises(NotSurjective):
        section(validate_hom(ring(QQ, "a"), LINE, ["t^2"]))


def test_certify_iso_and_witnesses():
    # k[x, y]/(y - x^2) is a polynomial ring in x
    P = ring(QQ, "x,y", ["y - x^2"])
    iso = certify_iso(validate_hom(P, LINE, ["t", "t^2"]))
    assert iso.verify()
    with pytest.raises(NotIsomorphism):
        certify_iso(validate_hom(NODE, LINE, ["t^2 - 1", "t^3 - t"]))
    with pytest.raises(NotIsomorphism):
        iso_from_images(LINE, LINE, ["2*t"], ["t"])


def test_tensor_of_points():
    # k[t]/(t^2 - 1) ⊗_k[t] k[t]/(t - 1) = k
    K = ring(QQ, "t", ["t^2 - 1"])
    P = ring(QQ, "t", ["t - 1"])
    T, _, _ = tensor_over_base(validate_hom(LINE, K, ["t"]), validate_hom(LINE, P, ["t"]))
    assert T.vector_dimension() == 1


def test_product_ring_dimension():
    A = ring(QQ, "a", ["a^2"])
    B = ring(QQ, "b", ["b^3 - b"])
    D, embed = product_ring(A, B)
    assert D.vector_dimension() == 5
    e = embed(1, 0)
    assert D.equal(e * e, e)


def test_subalgebra_membership():
    assert subalgebra_membership(LINE, [LINE("t^2"), LINE("t^3")], LINE("t^5 + t^4")) is not None
    assert subalgebra_membership(LINE, [LINE("t^2"), LINE("t^3")], LINE("t")) is None


def test_identity_and_prime_field():
    F = ring(GF(2), "x", ["x^2 + x"])
    assert identity(F).verify()
    assert F.vector_dimension() == 2
    assert not F.is_unit(F("x"))
