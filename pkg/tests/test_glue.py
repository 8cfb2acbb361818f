import pytest

from ferrand.corpus import (
    etale_examples,
    identity_morphism,
    localization_morphism,
    nodal_square,
    product_projection,
    projective_nodal_cubic,
    refined_nodal_cubic,
)
from ferrand.conductor import FiberElement
from ferrand.errors import CocycleError, NotEtale
from ferrand.glue import (
    check_datum_morphism,
    compare_refinement,
    glue_pushout,
    lift_etale_affine,
    standard_etale,
)
from ferrand.poly import QQ
from ferrand.rings import ring


@pytest.fixture(scope="module")
def glued():
    datum = projective_nodal_cubic(QQ)
    datum.validate()
    return datum, glue_pushout(datum)


def test_charts_and_cocycles(glued):
    _, g = glued
    rings = {c.name: c.presentation.A for c in g.charts}
    # the nodal chart is a plane cubic; the other chart is the punctured line
    assert len(rings["1"].relations) == 1 and rings["1"].relations[0].total_degree() == 3
    assert rings["2"].vector_dimension() is None
    assert all(iso.verify() for iso in g.transition.values())
    assert g.cocycles["C"]


def test_transitions_are_mutually_inverse(glued):
    _, g = glued
    t12, t21 = g.transition[("1", "2")], g.transition[("2", "1")]
    assert t12.forward.images == t21.backward.images


def test_corrupt_cocycle_is_located():
    datum = projective_nodal_cubic(QQ, corrupt=True)
    with pytest.raises(CocycleError) as err:
        glue_pushout(datum)
    assert set(err.value.charts) == {"1", "2"}
    assert err.value.witness


def test_refinement_is_chartwise_isomorphic(glued):
    datum, g = glued
    refined, restriction = refined_nodal_cubic(datum)
    fine = glue_pushout(refined)
    reports = compare_refinement(g, fine, restriction)
    assert [r.chart for r in reports] == ["1", "2a", "2b"]
    assert all(r.iso is not None and r.iso.verify() for r in reports)


@pytest.mark.parametrize("index", range(4))
def test_etale_lifts(index):
    name, pi, Kp = etale_examples(QQ)[index]
    lift = lift_etale_affine(pi, Kp)
    assert lift.base_change_iso.verify(), name
    # the derivative-unit certificate replays in the lifted algebra
    assert lift.algebra.verify() and Kp.verify()
    assert lift.inverted_derivative == (name == "derivative inverted")


def test_non_etale_rejected():
    with pytest.raises(NotEtale):
        standard_etale(ring(QQ, []), "u^2", 1, "u")
    alg = standard_etale(ring(QQ, []), "u^2", 1, "u", invert_derivative=True)
    assert alg.ring.is_zero_ring()


def test_morphisms():
    sq = nodal_square(QQ)
    assert check_datum_morphism(identity_morphism(sq)).accepted
    f = FiberElement.make(sq, 0, "t^3 - t")
    assert check_datum_morphism(localization_morphism(sq, f)).accepted
    rep = check_datum_morphism(product_projection(QQ))
    assert not rep.accepted and rep.clause == "T=TxZZ'"


def test_composite_of_localizations():
    sq = nodal_square(QQ)
    m1 = localization_morphism(sq, FiberElement.make(sq, 0, "t^2 - 1"))
    m2 = localization_morphism(m1.over, FiberElement.make(m1.over, 0, "t"))
    assert check_datum_morphism(m2.compose(m1)).accepted
