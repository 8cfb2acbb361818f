"""Gluing affine pushout data along explicit overlaps, étale lifting, and morphisms of data.

Charts are conductor squares.  An overlap between charts i and j is a pair of
matched elements f_i, f_j and an isomorphism of the localized squares, given
componentwise on B, C and K.  Nothing is inferred: every map is supplied and
then checked, and the cocycle condition is tested on generators in the ring
of the triple overlap.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .conductor import (
    FiberElement,
    PushoutPresentation,
    localize_square,
    pair_preimage,
    present_pushout,
)
from .errors import BoundExceeded, CocycleError, NotEtale, NotIsomorphism
from .poly import MPoly, fresh_names
from .rings import PresentedRing, RingIso, certify_iso, localize, section, tensor_over_base, validate_hom

COMPONENTS = ("B", "C", "K")


@dataclass
class Chart:
    name: str
    square: object
    presentation: PushoutPresentation | None = None


@dataclass
class Overlap:
    """Chart i restricted to D(f_i) is identified with chart j restricted to D(f_j).

    ``maps`` sends a component name to a RingHom R_i[1/f_i] -> R_j[1/f_j];
    a component may be omitted when both localizations are the zero ring.
    """

    i: str
    j: str
    f_i: FiberElement
    f_j: FiberElement
    maps: dict


def _component(square, comp):
    return {"B": square.B, "C": square.C, "K": square.K}[comp]


def _comp_elem(square, f, comp):
    if comp == "B":
        return f.b
    if comp == "C":
        return f.c
    return square.pi(f.c)


def _embed_into(L, p, positions):
    return L.nf(p.embed(L.poly, positions))


def _apply(h, p):
    """Apply h (source R[s]) to a polynomial p written over R only."""
    n = len(p.ring.names)
    return h(p.embed(h.source.poly, list(range(n))))


def check_cocycles(rings, elems, maps, label=""):
    """Test phi_jk o phi_ij = phi_ik on every triple of charts, and phi_ji o phi_ij = id.

    ``rings[i]`` is a PresentedRing, ``elems[(i, j)]`` the element of rings[i]
    cutting out the overlap with j, and ``maps[(i, j)]`` a RingHom
    rings[i][1/elems[i, j]] -> rings[j][1/elems[j, i]] or None when both
    sides are zero.  Returns the list of checked triples.
    """
    checked = []
    names = list(rings)
    for i in names:
        for j in names:
            if i == j or (i, j) not in elems:
                continue
            for k in names:
                if k == j or (j, k) not in elems or (k != i and (i, k) not in elems):
                    continue
                _check_triple(rings, elems, maps, i, j, k, label)
                checked.append((i, j, k))
    return checked


def _check_triple(rings, elems, maps, i, j, k, label):
    Ri, Rk = rings[i], rings[k]
    if k == i:
        L, _ = localize(Ri, elems[(i, j)])
    else:
        L1, _ = localize(Rk, elems[(k, j)])
        L, _ = localize(L1, L1.poly(elems[(k, i)].embed(L1.poly, list(range(Rk.nvars)))))
    if L.is_zero_ring():
        return
    phi_ij, phi_jk = maps.get((i, j)), maps.get((j, k))
    phi_ik = maps.get((i, k)) if k != i else None
    if phi_ij is None or phi_jk is None or (k != i and phi_ik is None):
        raise CocycleError(i, j, k, f"{label} map missing over a nonempty triple overlap")
    n = Rk.nvars
    Rj = rings[j]
    first = list(range(n + 1))
    if k != i:
        f_ji = elems[(j, i)]
        inv = L.inverse(_embed_into(L, _apply(phi_jk, f_ji), first))
        if inv is None:
            raise CocycleError(i, j, k, f"{label} overlap element of {j} with {i} is not a unit on the triple overlap")
        imgs = [_embed_into(L, phi_jk.images[v], first) for v in range(Rj.nvars)] + [inv]
        rhs_pos = list(range(n)) + [n + 1]
    for r, x in enumerate(Ri.gens()):
        y = phi_ij.images[r]
        if k == i:
            lhs = phi_jk(y)
            rhs = L.nf(x.embed(L.poly, list(range(n))))
        else:
            lhs = L.nf(y.substitute(imgs, L.poly))
            rhs = _embed_into(L, phi_ik.images[r], rhs_pos)
        if L.nf(lhs - rhs):
            raise CocycleError(i, j, k, f"{label}:{Ri.names[r]}")


@dataclass
class ChartedPushoutDatum:
    charts: list
    overlaps: list

    def chart(self, name):
        for c in self.charts:
            if c.name == name:
                return c
        raise KeyError(name)

    def _overlap_map(self):
        return {(o.i, o.j): o for o in self.overlaps}

    def validate(self):
        """Maps are homomorphisms between the right localizations, compatible with beta and pi."""
        for o in self.overlaps:
            si, sj = self.chart(o.i).square, self.chart(o.j).square
            for comp in COMPONENTS:
                Li, _ = localize(_component(si, comp), _comp_elem(si, o.f_i, comp))
                Lj, _ = localize(_component(sj, comp), _comp_elem(sj, o.f_j, comp))
                h = o.maps.get(comp)
                if h is None:
                    if not (Li.is_zero_ring() and Lj.is_zero_ring()):
                        raise ValueError(f"overlap {o.i}->{o.j}: {comp} map missing on nonzero rings")
                    continue
                if h.source != Li or h.target != Lj:
                    raise ValueError(f"overlap {o.i}->{o.j}: {comp} map has the wrong rings")
                validate_hom(h.source, h.target, list(h.images))
            self._check_commutes(o, si, sj)

    def _check_commutes(self, o, si, sj):
        hB, hC, hK = (o.maps.get(c) for c in COMPONENTS)
        if hK is None:
            return
        sqi = localize_square(si, o.f_i).square
        sqj = localize_square(sj, o.f_j).square
        for h, left, right in ((hB, sqi.beta, sqj.beta), (hC, sqi.pi, sqj.pi)):
            if h is None:
                continue
            for x in h.source.gens():
                if hK.target.nf(hK(left(x)) - right(h(x))):
                    raise ValueError(f"overlap {o.i}->{o.j} does not commute with the square maps at {x}")

    def cocycle_certificates(self):
        out = {}
        for comp in COMPONENTS:
            rings = {c.name: _component(c.square, comp) for c in self.charts}
            elems, maps = {}, {}
            for o in self.overlaps:
                elems[(o.i, o.j)] = _comp_elem(self.chart(o.i).square, o.f_i, comp)
                maps[(o.i, o.j)] = o.maps.get(comp)
            out[comp] = check_cocycles(rings, elems, maps, comp)
        return out


@dataclass
class GluedChart:
    name: str
    presentation: PushoutPresentation | None
    intrinsic_reason: str | None = None


@dataclass
class GluedPushout:
    datum: ChartedPushoutDatum
    charts: list
    transition: dict  # (i, j) -> RingIso on presented A-charts
    cocycles: dict
    A_cocycles: list = field(default_factory=list)

    def chart(self, name):
        for c in self.charts:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self):
        return {
            "charts": [
                {
                    "name": c.name,
                    "presented": c.presentation is not None,
                    "ring": c.presentation.A.to_text() if c.presentation else None,
                }
                for c in self.charts
            ],
            "transitions": sorted(f"{i}->{j}" for i, j in self.transition),
            "cocycle_triples": {k: len(v) for k, v in self.cocycles.items()},
            "A_cocycle_triples": len(self.A_cocycles),
        }


def _transport(maps, src, sqj, pj, label):
    """Send the generators of a presented A-chart through componentwise maps into another."""
    images = []
    for a in src.A.gens():
        b = maps["B"](src.to_B(a)) if maps.get("B") is not None else sqj.B.zero()
        c = maps["C"](src.to_C(a)) if maps.get("C") is not None else sqj.C.zero()
        pre = pair_preimage(sqj, pj, b, c)
        if pre is None:
            raise NotIsomorphism(f"transported map {label} leaves A", witness=("cokernel", a))
        images.append(pre)
    return validate_hom(src.A, pj.A, images)


def localized_presentation(square, pres, f):
    """Presentation of A_f from one of A, as a presentation of the localized square."""
    loc = localize_square(square, f)
    sq = loc.square
    fA = pair_preimage(square, pres, f.b, f.c)
    if fA is None:
        raise ValueError("f is not in the image of the presentation")
    Af, _ = localize(pres.A, fA)
    to_B = validate_hom(
        Af, sq.B, [p.embed(sq.B.poly, list(range(square.B.nvars))) for p in pres.to_B.images] + [sq.B.poly.gen(sq.B.nvars - 1)]
    )
    to_C = validate_hom(
        Af, sq.C, [p.embed(sq.C.poly, list(range(square.C.nvars))) for p in pres.to_C.images] + [sq.C.poly.gen(sq.C.nvars - 1)]
    )
    return sq, PushoutPresentation(Af, to_B, to_C, ("localized", fA)), fA


def glue_pushout(datum, degree_bound=None):
    """Check the datum, present each chart's pushout when possible, and transport the gluing.

    Charts whose pushout cannot be presented within the degree bound stay
    intrinsic; gluing maps touching them are not transported.
    """
    datum.validate()
    cocycles = datum.cocycle_certificates()
    charts = []
    for c in datum.charts:
        pres = c.presentation
        reason = None
        if pres is None:
            try:
                pres = present_pushout(c.square, degree_bound=degree_bound)
            except BoundExceeded as exc:
                reason = str(exc)
        charts.append(GluedChart(c.name, pres, reason))
    glued = GluedPushout(datum, charts, {}, cocycles)
    homs, loc = {}, {}
    for o in datum.overlaps:
        ci, cj = glued.chart(o.i), glued.chart(o.j)
        if ci.presentation is None or cj.presentation is None:
            continue
        _, pi_, fAi = localized_presentation(datum.chart(o.i).square, ci.presentation, o.f_i)
        sqj, pj_, _ = localized_presentation(datum.chart(o.j).square, cj.presentation, o.f_j)
        homs[(o.i, o.j)] = _transport(o.maps, pi_, sqj, pj_, f"{o.i}->{o.j}")
        loc[(o.i, o.j)] = fAi
    for (i, j), h in homs.items():
        back = homs.get((j, i))
        if back is not None:
            iso = RingIso(h, back)
            if not iso.verify():
                raise NotIsomorphism(f"gluing maps {i}->{j} and {j}->{i} are not mutually inverse")
        else:
            iso = certify_iso(h)
        glued.transition[(i, j)] = iso
    presented = {c.name: c.presentation.A for c in charts if c.presentation is not None}
    maps = {k: iso.forward for k, iso in glued.transition.items()}
    glued.A_cocycles = check_cocycles(presented, loc, maps, "A")
    return glued


@dataclass(frozen=True)
class RefinementReport:
    chart: str
    coarse_chart: str
    iso: object

    def to_dict(self):
        return {"chart": self.chart, "restricts": self.coarse_chart, "isomorphic": self.iso is not None}


def compare_refinement(coarse, fine, restriction):
    """Certify each fine chart's A against the localized coarse chart.

    ``restriction[fine_name] = (coarse_name, f)`` where the fine chart's square
    is the coarse square localized at the matched element f, or f is None when
    the two charts coincide.
    """
    reports = []
    for name, (cname, f) in restriction.items():
        csq = coarse.datum.chart(cname).square
        cpres = coarse.chart(cname).presentation
        fsq = fine.datum.chart(name).square
        fpres = fine.chart(name).presentation
        if cpres is None or fpres is None:
            raise BoundExceeded(f"chart {name} or {cname} has no presentation")
        if f is not None:
            csq, cpres, _ = localized_presentation(csq, cpres, f)
        ident = {"B": _identity_onto(cpres.to_B.target, fsq.B), "C": _identity_onto(cpres.to_C.target, fsq.C)}
        fwd = _transport(ident, cpres, fsq, fpres, f"{cname}->{name}")
        inv = {"B": _identity_onto(fsq.B, csq.B), "C": _identity_onto(fsq.C, csq.C)}
        iso = RingIso(fwd, _transport(inv, fpres, csq, cpres, f"{name}->{cname}"))
        if not iso.verify():
            raise NotIsomorphism(f"chart {name} does not restrict {cname}")
        reports.append(RefinementReport(name, cname, iso))
    return reports


def _identity_onto(R, S):
    if R != S:
        raise ValueError(f"refined chart ring {S.to_text()} differs from {R.to_text()}")
    return validate_hom(R, S, list(S.gens()))


# --------------------------------------------------------------------------
# Standard étale algebras


def _derivative(p, idx):
    out = {}
    for e, c in p.terms.items():
        if e[idx]:
            ne = list(e)
            ne[idx] -= 1
            out[tuple(ne)] = p.ring.field(c * e[idx])
    return MPoly(p.ring, {e: c for e, c in out.items() if c})


@dataclass(frozen=True)
class StdEtaleAlgebra:
    """R[t, w] / (J_R, f(t), w·g(t) - 1) with f monic in t and f' a unit."""

    base: PresentedRing
    ring: PresentedRing
    structure: object  # RingHom base -> ring
    f: MPoly  # over base.poly extended by t
    g: MPoly
    var: str
    inv_var: str
    derivative_inverse: MPoly

    def verify(self):
        """Replay f' · derivative_inverse = 1 and the structure map."""
        n = self.base.nvars
        df = _derivative(self.f, n).embed(self.ring.poly, list(range(n + 1)))
        return self.structure.verify() and self.ring.equal(df * self.derivative_inverse, self.ring.one())

    def to_text(self):
        return f"{self.base.to_text()}[{self.var}, {self.inv_var}]/({self.f}, {self.inv_var}*({self.g}) - 1)"


def _monic_in(p, idx):
    deg = p.degree_in(idx)
    if deg <= 0:
        return False
    lead = [c for e, c in p.terms.items() if e[idx] == deg]
    lead_e = [e for e, c in p.terms.items() if e[idx] == deg]
    return len(lead) == 1 and lead[0] == p.ring.field(1) and sum(lead_e[0]) == deg


def standard_etale(base, f, g=1, var="t", inv_var=None, invert_derivative=False):
    """Build R[t]_g / (f) as a presented ring.

    ``f`` and ``g`` are polynomials (or text) over base's variables plus
    ``var``.  With ``invert_derivative`` g is replaced by g·f' first, which
    always makes the algebra étale.  Raises NotEtale when f' is not a unit.
    """
    if var in base.names:
        raise ValueError(f"variable {var} already used by the base ring")
    inv_var = inv_var or fresh_names("w", 1, list(base.names) + [var])[0]
    R1 = base.poly.extend([var])
    f, g = R1(f), R1(g)
    n = base.nvars
    if not _monic_in(f, n):
        raise ValueError(f"{f} is not monic in {var}")
    df = _derivative(f, n)
    if invert_derivative:
        g = g * df
    big = R1.extend([inv_var])
    pos = list(range(n + 1))
    w = big.gen(n + 1)
    rels = [r.embed(big, list(range(n))) for r in base.relations]
    rels += [f.embed(big, pos), w * g.embed(big, pos) - 1]
    S = PresentedRing(base.field, big.names, rels)
    inv = S.inverse(df.embed(big, pos))
    if inv is None:
        raise NotEtale(f"derivative {df} is not a unit")
    h = validate_hom(base, S, [big.gen(i) for i in range(n)])
    return StdEtaleAlgebra(base, S, h, f, g, var, inv_var, inv)


@dataclass(frozen=True)
class EtaleLift:
    algebra: StdEtaleAlgebra
    base_change_iso: object  # RingIso C' ⊗_C K -> K'
    inverted_derivative: bool

    def to_dict(self):
        return {
            "ring": self.algebra.ring.to_text(),
            "inverted_derivative": self.inverted_derivative,
            "base_change_iso": self.base_change_iso is not None,
        }


def lift_etale_affine(pi, Kp):
    """Lift a standard étale K-algebra K' along the surjection pi: C ->> K.

    Coefficients of f and g are lifted through a section of pi.  When the
    lifted f' is not already a unit, g is multiplied by f'.  The result is
    certified by an explicit isomorphism C' ⊗_C K ≅ K'.
    """
    C, K = pi.source, pi.target
    if Kp.base.poly != K.poly:
        raise ValueError("K' must be an algebra over the target of pi")
    sec = section(pi)
    n, m = K.nvars, C.nvars
    var = Kp.var if Kp.var not in C.names else fresh_names(Kp.var, 1, C.names)[0]
    inv_var = Kp.inv_var if Kp.inv_var not in list(C.names) + [var] else fresh_names("w", 1, list(C.names) + [var])[0]
    C1 = C.poly.extend([var])
    lift_imgs = [p.embed(C1, list(range(m))) for p in sec] + [C1.gen(m)]
    F = Kp.f.substitute(lift_imgs, C1)
    G = Kp.g.substitute(lift_imgs, C1)
    inverted = False
    try:
        Cp = standard_etale(C, F, G, var, inv_var)
    except NotEtale:
        Cp = standard_etale(C, F, G, var, inv_var, invert_derivative=True)
        inverted = True
    T, _, _ = tensor_over_base(Cp.structure, pi)
    S = Kp.ring
    t_img, w_img = S.poly.gen(n), S.poly.gen(n + 1)
    if inverted:
        dF = _derivative(Kp.f, n).embed(S.poly, list(range(n + 1)))
        w_img = S.nf(w_img * S.inverse(dF))
    images = [Kp.structure(pi(x)) for x in C.gens()] + [t_img, w_img]
    images += [Kp.structure(x) for x in K.gens()]
    iso = certify_iso(validate_hom(T, S, images))
    return EtaleLift(Cp, iso, inverted)


# --------------------------------------------------------------------------
# Morphisms of pushout data


@dataclass(frozen=True)
class DatumMorphism:
    """Ring maps from the square (B; C; K) to (B'; C'; K').

    Geometrically this is a morphism of pushout data from the primed datum to
    the unprimed one.
    """

    base: object
    over: object
    hB: object
    hC: object
    hK: object

    def compose(self, inner):
        """self after inner: inner goes base -> middle, self goes middle -> over."""
        return DatumMorphism(
            inner.base, self.over, self.hB.compose(inner.hB), self.hC.compose(inner.hC), self.hK.compose(inner.hK)
        )


@dataclass(frozen=True)
class MorphismReport:
    accepted: bool
    clause: str | None
    witness: object

    def to_dict(self):
        w = self.witness
        if isinstance(w, tuple):
            w = [str(x) for x in w]
        return {"accepted": self.accepted, "clause": self.clause, "witness": None if w is None else w}


def _cartesian(h_side, h_map, hK, over_map, K_target):
    """Certify that the induced map K ⊗_X X' -> K' is an isomorphism."""
    T, _, _ = tensor_over_base(h_side, h_map)
    images = [hK(x) for x in h_side.target.gens()] + [over_map(x) for x in h_map.target.gens()]
    return certify_iso(validate_hom(T, K_target, images))


def check_datum_morphism(m):
    """Accept a morphism of pushout data when both faces of the cube are cartesian."""
    sq, sq2 = m.base, m.over
    K2 = sq2.K
    for h, left, right, label in ((m.hB, sq.beta, sq2.beta, "beta"), (m.hC, sq.pi, sq2.pi, "pi")):
        for x in h.source.gens():
            diff = K2.nf(m.hK(left(x)) - right(h(x)))
            if diff:
                return MorphismReport(False, f"commutes-{label}", ("noncommuting", x))
    isos = {}
    for label, side, hmap, over_map in (("T=TxZZ'", sq.pi, m.hC, sq2.pi), ("T=TxYY'", sq.beta, m.hB, sq2.beta)):
        try:
            isos[label] = _cartesian(side, hmap, m.hK, over_map, K2)
        except NotIsomorphism as exc:
            return MorphismReport(False, label, exc.witness)
    return MorphismReport(True, None, None)
