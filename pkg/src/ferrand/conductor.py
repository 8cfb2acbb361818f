"""Conductor squares B -> K <- C with C ->> K and their fiber product A = B x_K C.

A is intrinsic: its elements are matched pairs (b, c) with beta(b) = pi(c).
Finite presentations of A are optional, and only ever returned together with
a certificate that they present A exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .config import limits
from .errors import BoundExceeded, Cancelled, MixedContext, NotIsomorphism, NotSurjective, RelationViolated
from .poly import MPoly, fresh_names
from .rings import (
    GraphIdeal,
    PresentedRing,
    RingHom,
    _exponents,
    certify_iso,
    kernel,
    localize,
    product_ring,
    section,
    tensor_over_base,
    validate_hom,
)


class FerrandData:
    """beta: B -> K and a surjection pi: C ->> K, with a section of pi on generators."""

    def __init__(self, beta, pi, pi_section):
        self.beta = beta
        self.pi = pi
        self.B = beta.source
        self.C = pi.source
        self.K = pi.target
        self.pi_section = tuple(pi_section)
        self._beta_graph = None
        self._conductor = None
        self._beta_injective = None

    def __repr__(self):
        return f"FerrandData(B={self.B.to_text()}, C={self.C.to_text()}, K={self.K.to_text()})"

    @property
    def degenerate(self):
        """K = 0, in which case A = B x C."""
        return self.K.is_zero_ring()

    def beta_graph(self):
        if self._beta_graph is None:
            self._beta_graph = GraphIdeal(self.K, list(self.beta.images), znames=fresh_names("b", self.B.nvars, self.K.names))
        return self._beta_graph

    def beta_injective(self):
        if self._beta_injective is None:
            self._beta_injective = kernel(self.beta).is_zero() if not self.B.is_zero_ring() else True
        return self._beta_injective

    def lift_to_C(self, k):
        """A preimage in C of the K-element ``k`` (normal-form representative)."""
        k = self.K.poly(k)
        if not self.K.nvars:
            return self.C.nf(self.C.poly.const(k.constant_coeff()))
        return self.C.nf(k.substitute(list(self.pi_section), self.C.poly))

    def element(self, b, c):
        return FiberElement.make(self, b, c)

    def one(self):
        return FiberElement(self, self.B.one(), self.C.one())

    def zero(self):
        return FiberElement(self, self.B.zero(), self.C.zero())


def build_square(beta, pi):
    """Validate a Ferrand diagram and certify that pi is surjective.

    Raises NotSurjective when a K-generator provably has no preimage and
    BoundExceeded when the search hit the degree cap.
    """
    if beta.target.poly != pi.target.poly or beta.target.ideal.groebner() != pi.target.ideal.groebner():
        raise MixedContext("beta and pi must share the target K")
    return FerrandData(beta, pi.__class__(pi.source, beta.target, pi.images, pi.certificate), section(pi))


@dataclass(frozen=True)
class FiberElement:
    """A matched pair (b, c): beta(b) and pi(c) have the same normal form in K."""

    square: FerrandData = dc_field(repr=False, compare=False)
    b: MPoly
    c: MPoly

    @classmethod
    def make(cls, square, b, c):
        b, c = square.B(b), square.C(c)
        diff = square.K.nf(square.beta(b) - square.pi(c))
        if diff:
            raise ValueError(f"({b}, {c}) is not matched: beta(b) - pi(c) = {diff}")
        return cls(square, b, c)

    def matched(self):
        return not self.square.K.nf(self.square.beta(self.b) - self.square.pi(self.c))

    def _lift(self, other):
        if isinstance(other, FiberElement):
            return other
        return FiberElement(self.square, self.square.B(other), self.square.C(other))

    def __add__(self, other):
        o = self._lift(other)
        return FiberElement(self.square, self.square.B.nf(self.b + o.b), self.square.C.nf(self.c + o.c))

    __radd__ = __add__

    def __neg__(self):
        return FiberElement(self.square, -self.b, -self.c)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __mul__(self, other):
        o = self._lift(other)
        return FiberElement(self.square, self.square.B.nf(self.b * o.b), self.square.C.nf(self.c * o.c))

    __rmul__ = __mul__

    def __pow__(self, n):
        out = self.square.one()
        for _ in range(n):
            out = out * self
        return out

    def is_zero(self):
        return not self.b and not self.c

    def to_text(self):
        return f"({self.b}, {self.c})"


def fiber_membership(square, c):
    """The matched pair (b, c) if pi(c) lies in beta(B), else None."""
    c = square.C(c)
    q = square.beta_graph().express(square.pi(c))
    if q is None:
        return None
    B = square.B
    b = B.nf(MPoly(B.poly, q.terms)) if B.nvars else B.nf(B.poly.const(q.constant_coeff()))
    return FiberElement(square, b, c)


@dataclass(frozen=True)
class ConductorView:
    generators: tuple  # C-elements generating ker(pi)
    elements: tuple  # the same as FiberElements (0, c)

    def to_text(self):
        return "(" + ", ".join(map(str, self.generators)) + ")"


def conductor(square):
    """ker(pi) with its generators as matched pairs (0, c)."""
    if square._conductor is None:
        gens = tuple(kernel(square.pi).gens)
        elems = tuple(FiberElement.make(square, square.B.zero(), g) for g in gens)
        for e in elems:
            assert not e.b and e.matched()
        square._conductor = ConductorView(gens, elems)
    return square._conductor


# --------------------------------------------------------------------------
# Presentations of A


@dataclass(frozen=True)
class PushoutPresentation:
    A: PresentedRing
    to_B: RingHom
    to_C: RingHom
    certificate: object = None

    def pair(self, a):
        return (self.to_B(a), self.to_C(a))


@dataclass(frozen=True)
class BicartesianReport:
    passed: bool
    clause: str | None
    witness: object
    exhaustive: bool
    tensor_iso: object = None
    notes: tuple = ()

    def to_dict(self):
        w = self.witness
        if isinstance(w, tuple):
            w = [str(x) for x in w]
        elif w is not None:
            w = str(w)
        return {
            "verdict": "PASS" if self.passed else "FAIL",
            "clause": self.clause,
            "witness": w,
            "exhaustive": self.exhaustive,
        }


class _ImageTest:
    """Membership of matched pairs in the subalgebra of A generated by given pairs."""

    def __init__(self, square, pairs):
        self.square = square
        self.fast = square.beta_injective()
        self.pairs = list(pairs)
        if self.fast:
            # A embeds in C; the C-component determines the pair
            self.graph = GraphIdeal(square.C, [c for _, c in self.pairs])
        else:
            self.D, self.embed = product_ring(square.B, square.C)
            self.graph = GraphIdeal(self.D, [self.embed(b, c) for b, c in self.pairs])
        self._cgraph = None

    def add(self, b, c):
        self.pairs.append((b, c))
        self.graph = self.graph.extend(c if self.fast else self.embed(b, c))
        self._cgraph = None

    def contains(self, b, c):
        if self.fast:
            return self.graph.express(c) is not None
        return self.graph.express(self.embed(b, c)) is not None

    def relations(self):
        return self.graph.relations_among()

    def c_graph(self):
        """Graph ideal of the C-components, used for module-finiteness of C over A'."""
        if self.fast:
            return self.graph
        if self._cgraph is None:
            self._cgraph = GraphIdeal(self.square.C, [c for _, c in self.pairs])
        return self._cgraph


def _exhaustive_gap(square, test):
    """None if the generated subalgebra A' is all of A, else a reason/witness.

    A' = A iff A' ->> B and (0, I) ⊆ A'.  The second condition reduces to
    finitely many checks (0, k_j m_l) when C is module-finite over A' with
    module generators m_l; it is vacuous when the conductor is zero.
    """
    cond = conductor(square)
    if not cond.generators:
        return None
    mods = test.c_graph().finite_module_generators()
    if mods is None:
        return ("not-module-finite", None)
    zero = square.B.zero()
    for k in cond.generators:
        for m in mods:
            c = square.C.nf(k * m)
            if not test.contains(zero, c):
                return ("conductor-multiple", c)
    return None


def _b_surjective(square, to_B):
    try:
        section(to_B)
    except NotSurjective as exc:
        return exc.witness
    return None


def check_bicartesian(square, cand):
    """PASS iff the candidate presents A and B ⊗_A C ≅ K; FAIL names the first violated clause.

    (a) the induced map B ⊗_{A_pres} C -> K is an isomorphism;
    (b) every generator of A_pres maps to a matched pair and A_pres embeds in B x C;
    (c) matched pairs probed from C (monomials up to the probe degree plus
        conductor multiples) lie in the image of A_pres.

    The report is exhaustive when (c) is backed by the finite criterion of
    ``_exhaustive_gap``; otherwise it only covers the probes.
    """
    B, C, K = square.B, square.C, square.K
    A = cand.A
    for a in A.gens():
        if K.nf(square.beta(cand.to_B(a)) - square.pi(cand.to_C(a))):
            return BicartesianReport(False, "commute", a, False)
    # (a)
    T, iB, iC = tensor_over_base(cand.to_B, cand.to_C)
    induced = validate_hom(T, K, list(square.beta.images) + list(square.pi.images))
    try:
        tensor_iso = certify_iso(induced)
    except NotIsomorphism as exc:
        kind, w = exc.witness
        return BicartesianReport(False, "a", (kind, w), False)
    # (b)
    pairs = []
    for a in A.gens():
        b, c = cand.to_B(a), cand.to_C(a)
        if K.nf(square.beta(b) - square.pi(c)):
            return BicartesianReport(False, "b", (b, c), False)
        pairs.append((b, c))
    test = _ImageTest(square, pairs)
    rel = [MPoly(A.poly, r.terms) for r in test.relations()]
    for r in rel:
        if A.nf(r):
            return BicartesianReport(False, "b", ("kernel", A.nf(r)), False)
    # (c)
    w = _b_surjective(square, cand.to_B)
    if w is not None:
        return BicartesianReport(False, "c", ("B-not-hit", w), False)
    cond = conductor(square)
    probe = limits().probe_degree
    for exp in _standard_monomials(C, probe):
        m = C.poly.monomial(exp)
        pair = fiber_membership(square, m)
        if pair is not None and not test.contains(pair.b, pair.c):
            return BicartesianReport(False, "c", (pair.b, pair.c), False)
        for k in cond.generators:
            c = C.nf(k * m)
            if not test.contains(B.zero(), c):
                return BicartesianReport(False, "c", (B.zero(), c), False)
    gap = _exhaustive_gap(square, test)
    if gap is not None and gap[0] == "conductor-multiple":
        return BicartesianReport(False, "c", (B.zero(), gap[1]), False)
    return BicartesianReport(True, None, None, gap is None, tensor_iso)


def _standard_monomials(R, max_degree):
    return R.standard_monomials(max_degree)


def present_pushout(square, degree_bound=None, cancel=None):
    """Search for a verified finite presentation of A.

    Candidates, in order: lifts of the B-generators, then for each standard
    monomial m of C in degree-lex order the accepted pair (b, m) and the
    conductor multiples (0, k_j m).  A candidate is kept only if it is not
    already in the generated subalgebra.  The search stops at the first
    generator set certified to generate A, and raises BoundExceeded when none
    is found among monomials of degree <= ``degree_bound``.
    """
    if degree_bound is None:
        degree_bound = limits().probe_degree
    B, C, K = square.B, square.C, square.K
    cond = conductor(square)
    test = _ImageTest(square, [])

    def offer(b, c):
        if not b and not c:
            return False
        if cancel is not None and cancel.is_set():
            raise Cancelled("present_pushout cancelled")
        if test.contains(b, c):
            return False
        test.add(b, c)
        return True

    for bgen in B.gens():
        offer(bgen, square.lift_to_C(square.beta(bgen)))
    done = _b_generated(square, test) and _exhaustive_gap(square, test) is None
    for d in range(degree_bound + 1):
        if done:
            break
        for exp in _layer(C, d):
            m = C.poly.monomial(exp)
            changed = False
            pair = fiber_membership(square, m)
            if pair is not None:
                changed |= offer(pair.b, pair.c)
            for k in cond.generators:
                changed |= offer(B.zero(), C.nf(k * m))
            if changed and _exhaustive_gap(square, test) is None:
                done = True
                break
    if not done:
        raise BoundExceeded(
            f"no verified presentation with generators from C-monomials of degree <= {degree_bound}",
            degree_bound,
        )
    return _assemble(square, test)


def _b_generated(square, test):
    return all(test.contains(b, square.lift_to_C(square.beta(b))) for b in square.B.gens()) or not square.B.nvars


def _layer(R, d):
    lms = R.ideal.leading_monomials()
    out = [e for e in _exponents(R.nvars, d) if not any(all(a <= b for a, b in zip(lm, e)) for lm in lms)]
    return sorted(out, reverse=True)


def _assemble(square, test):
    B, C = square.B, square.C
    names = fresh_names("a", len(test.pairs) + 1, ())[1:] if test.pairs else []
    rels = [MPoly(_poly(B.field, names), r.terms) for r in test.relations()]
    A = PresentedRing(B.field, names, rels)
    to_B = validate_hom(A, B, [b for b, _ in test.pairs])
    to_C = validate_hom(A, C, [c for _, c in test.pairs])
    cand = PushoutPresentation(A, to_B, to_C)
    report = check_bicartesian(square, cand)
    if not (report.passed and report.exhaustive):
        raise AssertionError(f"internal: assembled presentation failed verification: {report}")
    return PushoutPresentation(A, to_B, to_C, report)


def _poly(field, names):
    from .poly import PolyRing

    return PolyRing(field, names)


def pair_preimage(square, pres, b, c):
    """The element of A_pres mapping to the matched pair (b, c), or None."""
    test = _ImageTest(square, [(pres.to_B(a), pres.to_C(a)) for a in pres.A.gens()])
    q = test.graph.express(c if test.fast else test.embed(b, c))
    if q is None:
        return None
    A = pres.A
    if not A.nvars:
        return A.nf(A.poly.const(q.constant_coeff()))
    return A.nf(MPoly(A.poly, q.terms))


# --------------------------------------------------------------------------
# Localization


@dataclass(frozen=True)
class LocalizedSquare:
    square: FerrandData
    element: FiberElement
    in_conductor: bool
    B_zero: bool
    K_zero: bool
    A_iso_C: object  # RingIso when a presentation was supplied, else the probe count
    presentation: object = None

    def to_dict(self):
        return {
            "in_conductor": self.in_conductor,
            "B_f_zero": self.B_zero,
            "K_f_zero": self.K_zero,
            "A_f_iso_C_f": bool(self.A_iso_C),
            "A_f_iso_kind": "certified" if self.presentation is not None else "probed",
        }


def localize_square(square, f, presentation=None):
    """(B_f, C_f, K_f) with induced maps; for f in the conductor also certify A_f ≅ C_f.

    With a presentation of A the isomorphism A_f -> C_f is certified by
    explicit inverse homomorphisms.  Without one the map (b, c)/f^n -> c/f^n
    is injective by construction, and surjectivity is replayed on probes
    c = (0, f c) / f.
    """
    if not isinstance(f, FiberElement):
        raise TypeError("localize_square needs a FiberElement")
    B, C, K = square.B, square.C, square.K
    fK = square.pi(f.c)
    Bf, jB = localize(B, f.b)
    Cf, jC = localize(C, f.c)
    Kf, jK = localize(K, fK)
    sK = Kf.poly.gen(Kf.nvars - 1)
    beta_f = validate_hom(Bf, Kf, [jK(p) for p in square.beta.images] + [sK])
    pi_f = validate_hom(Cf, Kf, [jK(p) for p in square.pi.images] + [sK])
    sq = build_square(beta_f, pi_f)
    in_cond = not f.b
    bz, kz = Bf.is_zero_ring(), Kf.is_zero_ring()
    iso = None
    if in_cond:
        if presentation is not None:
            iso = _certify_Af_Cf(square, presentation, f, Cf)
        else:
            iso = _probe_Af_Cf(square, f, Cf)
    return LocalizedSquare(sq, f, in_cond, bz, kz, iso, presentation)


def _certify_Af_Cf(square, pres, f, Cf):
    fA = pair_preimage(square, pres, f.b, f.c)
    if fA is None:
        raise ValueError("f is not in the image of the presentation")
    A = pres.A
    Af, _ = localize(A, fA)
    sC = Cf.poly.gen(Cf.nvars - 1)
    emb = list(range(square.C.nvars))
    h = validate_hom(Af, Cf, [p.embed(Cf.poly, emb) for p in pres.to_C.images] + [sC])
    return certify_iso(h)


def _probe_Af_Cf(square, f, Cf):
    """Replay c = ((0, f c) / f) on the standard monomials of C up to the probe degree."""
    C = square.C
    sC = Cf.poly.gen(Cf.nvars - 1)
    emb = list(range(C.nvars))
    count = 0
    for exp in C.standard_monomials(limits().probe_degree):
        m = C.poly.monomial(exp)
        pair = FiberElement.make(square, square.B.zero(), C.nf(f.c * m))
        back = Cf.nf(pair.c.embed(Cf.poly, emb) * sC - m.embed(Cf.poly, emb))
        if back:
            return 0
        count += 1
    return count
