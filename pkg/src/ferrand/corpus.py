"""Example corpus shared by the tests, the acceptance suite and the CLI scripts."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .conductor import FiberElement, PushoutPresentation, build_square, localize_square, present_pushout
from .glue import Chart, ChartedPushoutDatum, DatumMorphism, Overlap, standard_etale
from .modules import PresentedModule, patch, pullback
from .poly import GF, QQ
from .rings import ring, validate_hom
from .topology import SpecPoset
from .valuation import compose, dvr

FIELDS = {"QQ": QQ, "F5": GF(5)}


# --------------------------------------------------------------------------
# Squares


def nodal_square(field=QQ):
    """Pinch {t = 1, t = -1} of the affine line to a point: B = k, C = k[t], K = k[t]/(t^2 - 1)."""
    k = ring(field, [])
    C = ring(field, "t")
    K = ring(field, "t", ["t^2 - 1"])
    return build_square(validate_hom(k, K, []), validate_hom(C, K, [K.gen("t")]))


def nodal_cubic_candidate(square):
    """k[x,y]/(y^2 - x^3 - x^2) with x -> t^2 - 1, y -> t^3 - t and x, y -> 0 in B."""
    N = ring(square.C.field, "x,y", ["y^2 - x^3 - x^2"])
    return PushoutPresentation(
        N, validate_hom(N, square.B, ["0", "0"]), validate_hom(N, square.C, ["t^2 - 1", "t^3 - t"])
    )


def wrong_candidate(square):
    """k[x] with x -> t^2 - 1: misses t^3 - t."""
    W = ring(square.C.field, "x")
    return PushoutPresentation(W, validate_hom(W, square.B, ["0"]), validate_hom(W, square.C, ["t^2 - 1"]))


def identity_square(C):
    ident = validate_hom(C, C, list(C.gens()))
    return build_square(ident, ident)


def laurent_square(field=QQ):
    """B = k[x] -> K = k[x, 1/x] <- C = k[x, 1/x, y] with y -> 0; xi stands for 1/x."""
    B = ring(field, "x")
    K = ring(field, "x,xi", ["x*xi - 1"])
    C = ring(field, "x,xi,y", ["x*xi - 1"])
    return build_square(validate_hom(B, K, ["x"]), validate_hom(C, K, ["x", "xi", "0"]))


# Laurent polynomials in x, y as {(x-exponent, y-exponent): coefficient}
LAURENT_PROBES = (
    {(-1, 1): 1, (2, 0): 1},
    {(-1, 0): 1},
    {(-7, 1): 1},
    {(0, 0): 1},
    {(3, 0): 1, (1, 1): 1},
    {(-1, 0): 1, (0, 1): 1},
    {(-2, 2): 1, (1, 0): 1},
    {(1, 0): 1, (-3, 0): 2},
    {(-5, 1): 1, (-1, 3): 1, (0, 0): -1},
)


def laurent_text(terms):
    """Text over the variables x, xi, y of the Laurent-square C."""
    parts = []
    for (a, b), c in sorted(terms.items()):
        mono = []
        if a > 0:
            mono.append(f"x^{a}")
        elif a < 0:
            mono.append(f"xi^{-a}")
        if b:
            mono.append(f"y^{b}")
        parts.append(f"({c})" + "".join("*" + m for m in mono))
    return " + ".join(parts) or "0"


def random_pinching(rng, field):
    """A random finite pinching of k[t] with a small K.

    Kinds: several points to one point, three points to two (B = k x k via an
    idempotent), a double point to a point, and an isomorphic β.
    """
    C = ring(field, "t")
    t = C.poly.gen(0)
    pool = list(range(-3, 4)) if field == QQ else list(range(field.char))
    kind = rng.choice(["points", "points", "idempotent", "fat", "iso"])
    if kind == "fat":
        r = rng.choice(pool)
        K = ring(field, "t", [(t - field(r)) ** 2])
        B = ring(field, [])
        return kind, build_square(validate_hom(B, K, []), validate_hom(C, K, ["t"]))
    if kind == "iso":
        r = rng.choice(pool)
        K = ring(field, "t", [(t - field(r)) ** 2])
        B = ring(field, "s", ["s^2"])
        return kind, build_square(validate_hom(B, K, [K(t - field(r))]), validate_hom(C, K, ["t"]))
    m = 3 if kind == "idempotent" else rng.choice([2, 3])
    roots = rng.sample(pool, m)
    poly = C.poly.one()
    for r in roots:
        poly = poly * (t - field(r))
    K = ring(field, "t", [poly])
    if kind == "points":
        B = ring(field, [])
        return kind, build_square(validate_hom(B, K, []), validate_hom(C, K, ["t"]))
    subset = roots[:1]
    e = C.poly.zero()
    for ri in subset:
        term = C.poly.one()
        for rj in roots:
            if rj != ri:
                term = (term * (t - field(rj))).scale(field.inv(field(ri) - field(rj)))
        e = e + term
    B = ring(field, "s", ["s^2 - s"])
    return kind, build_square(validate_hom(B, K, [K(e)]), validate_hom(C, K, ["t"]))


def random_pinchings(count=25, seed=0):
    """``count`` squares alternating between QQ and F5, from a seeded generator."""
    rng = random.Random(seed)
    out = []
    for i in range(count):
        field = QQ if i % 2 == 0 else GF(5)
        out.append(random_pinching(rng, field))
    return out


def standard_squares():
    """Named squares whose conductor generators all give open-complement checks."""
    C = ring(QQ, "t")
    return {
        "nodal": nodal_square(QQ),
        "nodal_F5": nodal_square(GF(5)),
        "identity": identity_square(C),
        "laurent": laurent_square(QQ),
    }


# --------------------------------------------------------------------------
# Modules over the nodal square


def twisted_bundle(square, c):
    """(K; k, k[t]) with alpha = 1 and beta multiplying the t = -1 coordinate by c."""
    c = Fraction(c)
    K = square.K
    u = K(f"{(1 + c) / 2} + {(1 - c) / 2}*t")
    ui = K(f"{(1 + 1 / c) / 2} + {(1 - 1 / c) / 2}*t")
    one = K.one()
    return patch(
        square,
        PresentedModule.free(square.B, 1),
        PresentedModule.free(square.C, 1),
        PresentedModule.free(K, 1),
        [[one]],
        [[one]],
        [[u]],
        [[ui]],
        name=f"twisted c={c}",
    )


def a_module_corpus(pres):
    """Finitely presented modules over the presented nodal ring, with flatness expectations."""
    A = pres.A
    return [
        ("A", PresentedModule.free(A, 1), True),
        ("A^2", PresentedModule.free(A, 2), True),
        ("A/(a1)", PresentedModule.cyclic(A, ["a1"]), False),
        ("A/(a1^2)", PresentedModule.cyclic(A, ["a1^2"]), False),
        ("A/(a1,a2)", PresentedModule.cyclic(A, ["a1", "a2"]), False),
        ("A/(a2)", PresentedModule.cyclic(A, ["a2"]), False),
        ("A/(a1 - a2)", PresentedModule.cyclic(A, ["a1 - a2"]), False),
    ]


def patched_corpus(square, pres):
    """At least ten finitely presented patched modules over the nodal square."""
    B, C, K = square.B, square.C, square.K
    out = [(f"pullback {name}", pullback(square, pres, M), flat) for name, M, flat in a_module_corpus(pres)]
    for c in (2, 3, -1):
        out.append((f"twisted c={c}", twisted_bundle(square, c), True))
    zero_B = PresentedModule(B, 1, [[B.one()]])
    zero_K = PresentedModule(K, 1, [[K.one()]])
    one = [[K.one()]]
    # skyscrapers of C away from the pinched points: M_T = 0
    for root in ("0", "2"):
        MZ = PresentedModule.cyclic(C, [f"t - {root}"])
        out.append((f"skyscraper t={root}", patch(square, zero_B, MZ, zero_K, one, one, one, one), False))
    MZ = PresentedModule.cyclic(C, ["(t - 2)^2"])
    out.append(("fat skyscraper t=2", patch(square, zero_B, MZ, zero_K, one, one, one, one), False))
    return out


# --------------------------------------------------------------------------
# Finite spectral models


@dataclass(frozen=True)
class PosetCase:
    name: str
    Y: SpecPoset
    Z: SpecPoset
    T: SpecPoset
    f: dict
    g: dict
    reference: SpecPoset | None = None
    open_T: bool = False


def _curve(generic, closed):
    return SpecPoset([generic] + list(closed), [(generic, p) for p in closed])


def poset_cases():
    cases = []
    # node: two closed points of a curve sent to one point
    Z = _curve("eta", ["p1", "p2"])
    T = SpecPoset(["p1", "p2"])
    Y = SpecPoset(["y"])
    ref = SpecPoset(["e", "n"], [("e", "n")])
    cases.append(PosetCase("node", Y, Z, T, {"p1": "y", "p2": "y"}, {"p1": "p1", "p2": "p2"}, ref))
    # empty T: disjoint union
    Z2 = _curve("eta", ["p"])
    ref2 = SpecPoset(["y", "e", "q"], [("e", "q")])
    cases.append(PosetCase("disjoint", Y, Z2, SpecPoset([]), {}, {}, ref2))
    # f = id: X = Z
    T3 = SpecPoset(["p"])
    cases.append(PosetCase("identity", T3, Z2, T3, {"p": "p"}, {"p": "p"}, SpecPoset(["e", "q"], [("e", "q")])))
    # node with extra closed points
    Z4 = _curve("eta", ["p1", "p2", "q1", "q2"])
    ref4 = SpecPoset(["e", "n", "r1", "r2"], [("e", "n"), ("e", "r1"), ("e", "r2")])
    cases.append(PosetCase("node+2", Y, Z4, T, {"p1": "y", "p2": "y"}, {"p1": "p1", "p2": "p2"}, ref4))
    # composition: T = generic point of a DVR, closed point of another DVR
    Yd = SpecPoset(["gY", "s"], [("gY", "s")])
    Zd = SpecPoset(["gZ", "t"], [("gZ", "t")])
    Td = SpecPoset(["t"])
    refd = SpecPoset(["a", "b", "c"], [("a", "b"), ("b", "c")])
    cases.append(PosetCase("composition", Yd, Zd, Td, {"t": "gY"}, {"t": "t"}, refd, open_T=True))
    # plane pinched along a curve: a line with two points folded onto a point
    Zs = SpecPoset(
        ["xi", "L", "M", "a", "b", "c", "d"],
        [("xi", "L"), ("xi", "M"), ("L", "a"), ("L", "b"), ("M", "c"), ("M", "d"), ("M", "a")],
    )
    Ts = SpecPoset(["L", "a", "b"], [("L", "a"), ("L", "b")])
    Ys = SpecPoset(["l", "o"], [("l", "o")])
    cases.append(PosetCase("fold", Ys, Zs, Ts, {"L": "l", "a": "o", "b": "o"}, {"L": "L", "a": "a", "b": "b"}))
    # twelve points: two curves through shared points, one pinched to a point
    Zl = SpecPoset(
        ["xi", "C1", "C2", "p1", "p2", "p3", "q1", "q2", "q3", "r"],
        [("xi", "C1"), ("xi", "C2"), ("C1", "p1"), ("C1", "p2"), ("C1", "p3"), ("C2", "q1"), ("C2", "q2"), ("C2", "q3"),
         ("C1", "r"), ("C2", "r")],
    )
    Tl = SpecPoset(["p1", "p2"])
    Yl = SpecPoset(["y1", "y2", "y3", "y4"], [("y1", "y2"), ("y3", "y4")])
    cases.append(PosetCase("twelve", Yl, Zl, Tl, {"p1": "y2", "p2": "y4"}, {"p1": "p1", "p2": "p2"}))
    return cases


# --------------------------------------------------------------------------
# Valuation lifting examples


def lifting_examples():
    """(name, R, fx, fy, expectation) on the height-two ring k[u, w] with |w| << |u|."""
    R = compose(dvr("u"), dvr("w"))
    return [
        ("x to a non-unit", R, R.monomial(u=1), R.monomial(w=1), "refuted"),
        ("x to a unit", R, R.const(2), R.monomial(u=1), "lifts"),
        ("closed-point hypothesis", R, R.const(1), R.monomial(u=1), "unique"),
    ]


# --------------------------------------------------------------------------
# Gluing: the projective nodal cubic


def _loc_C(square, f):
    return localize_square(square, f).square.C


def projective_nodal_cubic(field=QQ, corrupt=False):
    """Two charts: the pinched line around t = ±1, and P^1 minus {±1} in the coordinate u = 1/t."""
    sq1 = nodal_square(field)
    Z = ring(field, [], ["1"])
    C2 = ring(field, "u,w", ["w*(u^2 - 1) - 1"])
    sq2 = build_square(validate_hom(Z, Z, []), validate_hom(C2, Z, [Z.zero(), Z.zero()]))
    f1 = FiberElement.make(sq1, 0, "t^3 - t")
    f2 = FiberElement.make(sq2, 0, "u")
    L1, L2 = _loc_C(sq1, f1), _loc_C(sq2, f2)
    if corrupt:
        phi12 = validate_hom(L1, L2, [L2("-s"), L2("u^3*w")])
    else:
        phi12 = validate_hom(L1, L2, [L2("s"), L2("-u^3*w")])
    phi21 = validate_hom(L2, L1, [L1("(t^2 - 1)*s"), L1("-t^3*s"), L1("t")])
    return ChartedPushoutDatum(
        [Chart("1", sq1), Chart("2", sq2)],
        [Overlap("1", "2", f1, f2, {"C": phi12}), Overlap("2", "1", f2, f1, {"C": phi21})],
    )


def refined_nodal_cubic(datum):
    """Split chart 2 into D(u) and D(u - 2); returns (refined datum, restriction map)."""
    sq1, sq2 = datum.chart("1").square, datum.chart("2").square
    f2a = FiberElement.make(sq2, 0, "u")
    f2b = FiberElement.make(sq2, 0, "u - 2")
    s2a = localize_square(sq2, f2a).square
    s2b = localize_square(sq2, f2b).square
    g1a, ga1 = FiberElement.make(sq1, 0, "t^3 - t"), FiberElement.make(s2a, 0, "1")
    g1b, gb1 = FiberElement.make(sq1, 0, "(t^3 - t)*(2*t - 1)"), FiberElement.make(s2b, 0, "u")
    gab, gba = FiberElement.make(s2a, 0, "u - 2"), FiberElement.make(s2b, 0, "u")
    A, B = _loc_C(sq1, g1a), _loc_C(s2a, ga1)
    m1a = validate_hom(A, B, [B("s"), B("-u^3*w")])
    ma1 = validate_hom(B, A, [A("(t^2 - 1)*s"), A("-t^3*s"), A("t"), A("1")])
    A, B = _loc_C(sq1, g1b), _loc_C(s2b, gb1)
    m1b = validate_hom(A, B, [B("s1"), B("u^4*w*s")])
    mb1 = validate_hom(
        B, A, [A("(t^2 - 1)*(2*t - 1)*s"), A("-t^3*(2*t - 1)*s"), A("-(t^4 - t^2)*s"), A("t")]
    )
    A, B = _loc_C(s2a, gab), _loc_C(s2b, gba)
    mab = validate_hom(A, B, [B("u"), B("w"), B("s1"), B("s")])
    mba = validate_hom(B, A, [A("u"), A("w"), A("s1"), A("s")])
    refined = ChartedPushoutDatum(
        [Chart("1", sq1), Chart("2a", s2a), Chart("2b", s2b)],
        [
            Overlap("1", "2a", g1a, ga1, {"C": m1a}),
            Overlap("2a", "1", ga1, g1a, {"C": ma1}),
            Overlap("1", "2b", g1b, gb1, {"C": m1b}),
            Overlap("2b", "1", gb1, g1b, {"C": mb1}),
            Overlap("2a", "2b", gab, gba, {"C": mab}),
            Overlap("2b", "2a", gba, gab, {"C": mba}),
        ],
    )
    return refined, {"1": ("1", None), "2a": ("2", f2a), "2b": ("2", f2b)}


# --------------------------------------------------------------------------
# Étale lifting and morphisms of data


def etale_examples(field=QQ):
    """(name, pi, K') pairs; the last one needs the derivative inverted after lifting."""
    C = ring(field, "t")
    K = ring(field, [])
    pi = validate_hom(C, K, [K.zero()])
    out = [
        ("identity etale", pi, standard_etale(K, "u", 1, "u")),
        ("split u^2 - u", pi, standard_etale(K, "u^2 - u", 1, "u")),
        ("cubic roots of unity", pi, standard_etale(K, "u^2 + u + 1", 1, "u")),
    ]
    # over K = k x k, u^2 = t makes u a unit; over k[t] it does not
    Kt = ring(field, "t", ["t^2 - 1"])
    pit = validate_hom(C, Kt, [Kt.gen("t")])
    out.append(("derivative inverted", pit, standard_etale(Kt, "u^2 - t", 1, "u")))
    return out


def _inclusion(R, S):
    return validate_hom(R, S, [S.poly.gen(i) for i in range(R.nvars)])


def identity_morphism(square):
    ident = lambda R: validate_hom(R, R, list(R.gens()))  # noqa: E731
    return DatumMorphism(square, square, ident(square.B), ident(square.C), ident(square.K))


def localization_morphism(square, f):
    sq = localize_square(square, f).square
    return DatumMorphism(
        square, sq, _inclusion(square.B, sq.B), _inclusion(square.C, sq.C), _inclusion(square.K, sq.K)
    )


def product_projection(field=QQ):
    """First projection of the nodal datum times itself, as ring maps into the product datum."""
    sq = nodal_square(field)
    k = sq.B
    CC = ring(field, "t1,t2")
    KK = ring(field, "t1,t2", ["t1^2 - 1", "t2^2 - 1"])
    sqP = build_square(validate_hom(k, KK, []), validate_hom(CC, KK, list(KK.gens())))
    return DatumMorphism(
        sq, sqP, validate_hom(k, k, []), validate_hom(sq.C, CC, [CC("t1")]), validate_hom(sq.K, KK, [KK("t1")])
    )


def nodal_presentation(field=QQ):
    sq = nodal_square(field)
    return sq, present_pushout(sq)

