import pytest
import sympy

from ferrand.corpus import a_module_corpus, nodal_presentation, patched_corpus, twisted_bundle
from ferrand.errors import NotIsomorphism
from ferrand.modules import (
    PresentedModule,
    adjunction_check,
    fitting_ideal,
    flat_fp_test,
    patch,
    pullback,
    pushforward,
    rank_one_freeness,
)
from ferrand.poly import QQ
from ferrand.rings import ring


@pytest.fixture(scope="module")
def nodal():
    return nodal_presentation(QQ)


def test_fitting_ideal_against_sympy_minors():
    R = ring(QQ, "x,y")
    cols = [["x", "y"], ["y^2", "x + 1"], ["1", "x*y"]]
    M = PresentedModule(R, 2, cols)
    x, y = sympy.symbols("x y")
    mat = sympy.Matrix([[sympy.sympify(c[i].replace("^", "**")) for c in cols] for i in range(2)])
    minors = {sympy.expand(mat[:, [i, j]].det()) for i in range(3) for j in range(i + 1, 3)}
    ours = {sympy.expand(sympy.sympify(str(g).replace("^", "**"))) for g in fitting_ideal(M, 0)}
    assert ours == {m for m in minors if m != 0}


def test_flat_verdicts_on_a_polynomial_ring():
    R = ring(QQ, "x")
    assert flat_fp_test(PresentedModule.free(R, 3)).rank == 3
    v = flat_fp_test(PresentedModule.cyclic(R, ["x"]))
    assert not v.projective
    # R/(x^2 - x) splits off but is not of constant rank over k[x]
    assert not flat_fp_test(PresentedModule.cyclic(R, ["x^2 - x"])).projective


def test_idempotent_summand_is_projective():
    R = ring(QQ, "e", ["e^2 - e"])
    v = flat_fp_test(PresentedModule(R, 2, [["e", "0"], ["0", "1 - e"]]))
    assert v.projective and v.rank == 1


@pytest.mark.parametrize("index", range(7))
def test_a_module_flatness(nodal, index):
    sq, pres = nodal
    name, M, flat = a_module_corpus(pres)[index]
    assert flat_fp_test(M).projective == flat, name


def test_counit_on_patched_corpus(nodal):
    sq, pres = nodal
    corpus = patched_corpus(sq, pres)
    assert len(corpus) >= 10
    for name, M, _ in corpus:
        assert adjunction_check(sq, pres, M, "counit").iso, name


def test_unit_on_flat_and_non_flat(nodal):
    sq, pres = nodal
    for name, M, flat in a_module_corpus(pres):
        rep = adjunction_check(sq, pres, M, "unit")
        if flat:
            assert rep.iso, name
    rep = adjunction_check(sq, pres, PresentedModule.cyclic(pres.A, ["a1"]), "unit")
    assert not rep.iso and rep.witness is not None


@pytest.mark.parametrize("c", [2, 3, -1])
def test_twisted_bundle_projective_not_free(nodal, c):
    sq, pres = nodal
    L = twisted_bundle(sq, c)
    pf = pushforward(sq, L, pres)
    v = flat_fp_test(pf.module)
    assert v.projective and v.rank == 1
    assert rank_one_freeness(L).free is False


def test_trivial_bundle_is_free(nodal):
    sq, _ = nodal
    assert rank_one_freeness(twisted_bundle(sq, 1)).free is True


def test_pullback_pushforward_round_trip(nodal):
    sq, pres = nodal
    F = PresentedModule.free(pres.A, 2)
    P = pullback(sq, pres, F)
    pf = pushforward(sq, P, pres)
    assert flat_fp_test(pf.module).rank == 2


def test_patch_rejects_non_invertible_gluing(nodal):
    sq, _ = nodal
    one = [[sq.K.one()]]
    t = [[sq.K("t + 1")]]
    with pytest.raises(NotIsomorphism):
        patch(sq, PresentedModule.free(sq.B, 1), PresentedModule.free(sq.C, 1), PresentedModule.free(sq.K, 1),
              one, one, t, t)
