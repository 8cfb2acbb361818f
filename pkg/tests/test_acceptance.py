"""The twelve acceptance criteria, one test each, with a PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v`` (the lines appear in the
terminal summary) or directly with ``python3 tests/test_acceptance.py``.
"""

import functools
import sys
import time
import traceback

import sympy

from ferrand.cli import corpus_names, corpus_script
from ferrand.conductor import (
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
    a_module_corpus,
    etale_examples,
    laurent_square,
    laurent_text,
    lifting_examples,
    nodal_presentation,
    nodal_square,
    patched_corpus,
    poset_cases,
    projective_nodal_cubic,
    random_pinchings,
    refined_nodal_cubic,
    standard_squares,
    twisted_bundle,
)
from ferrand.dsl import parse
from ferrand.errors import BoundExceeded
from ferrand.glue import compare_refinement, glue_pushout, lift_etale_affine
from ferrand.modules import adjunction_check, flat_fp_test, pushforward, rank_one_freeness
from ferrand.poly import GF, QQ
from ferrand.rings import iso_from_images, ring
from ferrand.runner import run
from ferrand.topology import topological_pushout, verify_universal_property
from ferrand.valuation import LaurentSquare, conductor_chain_suite, enumerate_lifts, lemma_hypothesis, lift_semivaluation

RESULTS = {}
TITLES = {}


def criterion(number, title):
    TITLES[number] = title

    def wrap(fn):
        @functools.wraps(fn)
        def run_one():
            start = time.perf_counter()
            try:
                fn()
            except BaseException as exc:
                RESULTS[number] = ("FAIL", f"{type(exc).__name__}: {exc}".splitlines()[0][:160])
                raise
            RESULTS[number] = ("PASS", f"{time.perf_counter() - start:.1f}s")

        run_one.criterion = number
        return run_one

    return wrap


def summary_lines():
    out = []
    for n in sorted(TITLES):
        verdict, note = RESULTS.get(n, ("NOT RUN", ""))
        out.append(f"AC-{n:02d} {verdict:7s} {TITLES[n]}" + (f"  ({note})" if note else ""))
    return out


def sym(p):
    return sympy.sympify(str(p).replace("^", "**"))


# --------------------------------------------------------------------------


@criterion(1, "bicartesian identity on the nodal square and 25 random pinchings")
def test_ac01_bicartesian_identity():
    squares = [("nodal", nodal_square(QQ)), ("nodal F5", nodal_square(GF(5)))] + random_pinchings(25, seed=0)
    assert len(squares) == 27
    fields = {sq.C.field for _, sq in squares}
    assert QQ in fields and GF(5) in fields
    for name, sq in squares:
        pres = present_pushout(sq)
        rep = check_bicartesian(sq, pres)
        assert rep.passed, (name, rep.clause, rep.witness)
        assert rep.tensor_iso is not None and rep.tensor_iso.verify(), name


@criterion(2, "the pinched line presents the nodal cubic y^2 = x^3 + x^2")
def test_ac02_nodal_cubic():
    sq, pres = nodal_presentation(QQ)
    N = ring(QQ, "x,y", ["y^2 - x^3 - x^2"])
    # explicit inverse maps: x, y go to the preimages of (0, t^2 - 1), (0, t^3 - t)
    ax = pair_preimage(sq, pres, sq.B.zero(), sq.C("t^2 - 1"))
    ay = pair_preimage(sq, pres, sq.B.zero(), sq.C("t^3 - t"))
    to_N = []
    for img in pres.to_C.images:
        # each generator's C-image written in x = t^2 - 1, y = t^3 - t
        e = fiber_membership(sq, img)
        assert e is not None
        to_N.append(_express_in_xy(img))
    iso = iso_from_images(N, pres.A, [ax, ay], [N(p) for p in to_N])
    assert iso.verify()
    # parametrization oracle
    t = sympy.Symbol("t")
    x, y = t**2 - 1, t**3 - t
    assert sympy.expand(y**2 - x**3 - x**2) == 0
    for rel in pres.A.relations:
        subs = {sympy.Symbol(n): sym(p) for n, p in zip(pres.A.names, pres.to_C.images)}
        assert sympy.expand(sym(rel).subs(subs)) == 0


def _express_in_xy(c):
    """Write an element of k[t^2 - 1, t^3 - t] as a polynomial in x, y (sympy reduction oracle)."""
    t, x, y = sympy.symbols("t x y")
    G = sympy.groebner([x - (t**2 - 1), y - (t**3 - t)], t, x, y, order="lex")
    r = G.reduce(sym(c))[1]
    assert t not in r.free_symbols
    return str(sympy.expand(r)).replace("**", "^")


@criterion(3, "open complement: B_f = 0 and A_f = C_f for every conductor generator")
def test_ac03_open_complement():
    squares = dict(standard_squares())
    squares.update(dict(random_pinchings(6, seed=1)))
    checked = with_generators = 0
    for name, sq in squares.items():
        try:
            pres = present_pushout(sq)
        except BoundExceeded:
            pres = None
        gens = conductor(sq).elements
        with_generators += bool(gens)
        for g in gens:
            loc = localize_square(sq, g, pres)
            assert loc.B_zero, name
            assert loc.A_iso_C, name
            if pres is not None:
                assert loc.A_iso_C.verify(), name
            checked += 1
    # the identity square has conductor zero; every other square contributes
    assert with_generators == len(squares) - 1 and checked >= with_generators


@criterion(4, "the Laurent square has no finite presentation; nine probes decided")
def test_ac04_non_noetherian():
    sq = laurent_square(QQ)
    for bound in (4, 8, 16):
        try:
            present_pushout(sq, bound)
        except BoundExceeded:
            continue
        raise AssertionError(f"bound {bound} produced a presentation")
    assert len(LAURENT_PROBES) == 9
    for terms in LAURENT_PROBES:
        rule = not any(b == 0 and a < 0 for (a, b) in terms)
        assert (fiber_membership(sq, laurent_text(terms)) is not None) == rule, terms


@criterion(5, "adjunctions: counit on patched modules, unit on flat ones, unit kernel x^-(n+1) y")
def test_ac05_adjunctions():
    sq, pres = nodal_presentation(QQ)
    patched = patched_corpus(sq, pres)
    assert len(patched) >= 10 and any(not flat for _, _, flat in patched)
    for name, M, _ in patched:
        assert adjunction_check(sq, pres, M, "counit").iso, name
    flat_modules = [(n, M) for n, M, _ in a_module_corpus(pres) if flat_fp_test(M).projective]
    flat_modules += [(n, pushforward(sq, M, pres).module) for n, M, flat in patched if flat]
    assert len(flat_modules) >= 5
    for name, M in flat_modules:
        assert flat_fp_test(M).projective
        assert adjunction_check(sq, pres, M, "unit").iso, name
    for n in (1, 2, 3):
        rep = conductor_chain_suite(n)
        assert not rep.unit_injective
        assert rep.kernel_witness == f"x^-{n + 1}*y + I_{n}"
        assert rep.kernel_witness_value == (1, -(n + 1))


@criterion(6, "pullback and pushforward are inverse on flat objects; twisted bundles are not free")
def test_ac06_equivalence():
    sq, pres = nodal_presentation(QQ)
    for name, M, _ in a_module_corpus(pres):
        if flat_fp_test(M).projective:
            assert adjunction_check(sq, pres, M, "unit").iso, name
    for c in (2, 3, -1, 1):
        L = twisted_bundle(sq, c)
        assert adjunction_check(sq, pres, L, "counit").iso
        N = pushforward(sq, L, pres).module
        v = flat_fp_test(N)
        assert v.projective and v.rank == 1
        assert adjunction_check(sq, pres, N, "unit").iso
        assert rank_one_freeness(L).free is (c == 1)


@criterion(7, "conductor chain suite: strict chain, stable components, not in the essential image")
def test_ac07_pathology():
    for n in range(1, 6):
        rep = conductor_chain_suite(n)
        assert [m for m, *_ in rep.chain] == list(range(1, n + 1))
        assert all(in_next and not in_n for _, _, _, in_next, in_n in rep.chain)
        assert rep.components_independent
        assert rep.pushforward == "A' = A/I = B"
        assert not rep.unit_injective and not rep.essential_image
        assert rep.conductor_fg["finitely_generated"] is False


@criterion(8, "topological pushouts: quotient topology, partition and universal property")
def test_ac08_topology():
    cases = poset_cases()
    assert max(c.Z.size + c.Y.size for c in cases) >= 12
    for c in cases:
        rep = topological_pushout(c.Y, c.Z, c.T, c.f, c.g, c.reference)
        assert rep.partition_ok and rep.Y_closed_embedding and rep.U_open_embedding, c.name
        assert rep.quotient_matches_order is not False, c.name
        assert rep.reference_homeomorphic in (None, True), c.name
        u = verify_universal_property(rep, c.Y, c.Z, c.T, c.f, c.g)
        assert u["holds"] and u["test_spaces"] == 24, c.name


@criterion(9, "semivaluation lifting: refutation, unique lift, and no second lift by enumeration")
def test_ac09_lifting():
    sq = LaurentSquare()
    seen = set()
    for name, R, fx, fy, expect in lifting_examples():
        rep = lift_semivaluation(sq, R, fx, fy)
        lifts = enumerate_lifts(R, fx, fy, bound=3)
        if expect == "refuted":
            assert not rep.lifts and len(rep.preimage_Y) >= 2 and not lifts
        else:
            assert rep.lifts and rep.unique and len(lifts) == 1
            assert lifts[0] == rep.lift["x^-1"]
        if expect == "unique":
            assert lemma_hypothesis(R, fx, fy) and rep.preimage_T == (R.maximal_ideal(),)
        seen.add(expect)
    assert seen == {"refuted", "lifts", "unique"}


@criterion(10, "etale lifting: base change along pi is K', derivative certificates replay")
def test_ac10_etale():
    inverted = 0
    for name, pi, Kp in etale_examples(QQ):
        lift = lift_etale_affine(pi, Kp)
        assert lift.base_change_iso is not None and lift.base_change_iso.verify(), name
        assert lift.algebra.verify() and Kp.verify(), name
        inverted += lift.inverted_derivative
    assert inverted == 1


@criterion(11, "gluing: the projective nodal cubic glues and a refinement agrees chart by chart")
def test_ac11_gluing():
    datum = projective_nodal_cubic(QQ)
    datum.validate()
    g = glue_pushout(datum)
    assert all(c.presentation is not None for c in g.charts)
    assert all(iso.verify() for iso in g.transition.values())
    refined, restriction = refined_nodal_cubic(datum)
    fine = glue_pushout(refined)
    reports = compare_refinement(g, fine, restriction)
    assert len(reports) == 3 and all(r.iso is not None and r.iso.verify() for r in reports)


@criterion(12, "determinism: the full script corpus gives byte-identical reports twice")
def test_ac12_determinism():
    names = corpus_names()
    assert len(names) >= 8

    def full_run():
        out = []
        for name in names:
            with using(degree_bound=64, probe_degree=8, seed=0):
                rep = run(parse(corpus_script(name)))
            assert rep.exit_code == 0, (name, [r.human() for r in rep.records if r.verdict == "FAIL"])
            out.append(rep.to_json().encode())
        return out

    assert full_run() == full_run()


if __name__ == "__main__":
    failed = 0
    for fn in [v for k, v in sorted(globals().items()) if k.startswith("test_ac")]:
        try:
            fn()
        except BaseException:
            failed += 1
            traceback.print_exc()
    print("\n".join(summary_lines()))
    sys.exit(1 if failed else 0)
