"""Finitely presented commutative algebras and certified homomorphisms."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import MixedContext, NotIsomorphism, NotSurjective, RelationViolated
from .groebner import IdealHandle, buchberger, _ideal_key, _to_vec, _from_vec, reduce_by
from .poly import GREVLEX, MPoly, PolyRing, QQ, elimination_order, fresh_names, format_poly


class PresentedRing:
    """k[x_1..x_n] / (relations).

    Elements are MPoly values in ``self.poly``; the canonical representative of
    a class is its normal form for grevlex.  Presentations are never
    simplified implicitly.
    """

    def __init__(self, field, names, relations=(), name=None):
        self.poly = PolyRing(field, names)
        rels = [self.poly(r) for r in relations]
        self.relations = tuple(r for r in rels if r)
        self.ideal = IdealHandle(self.poly, self.relations)
        self.name = name

    @classmethod
    def over(cls, poly, relations=(), name=None):
        return cls(poly.field, poly.names, relations, name)

    @property
    def field(self):
        return self.poly.field

    @property
    def names(self):
        return self.poly.names

    @property
    def nvars(self):
        return self.poly.nvars

    def __repr__(self):
        return f"PresentedRing({self.to_text()})"

    def to_text(self):
        base = f"{'QQ' if self.field.char == 0 else f'Fp:{self.field.char}'}[{','.join(self.names)}]"
        if self.relations:
            base += " / (" + ", ".join(map(str, self.relations)) + ")"
        return base

    def __eq__(self, other):
        if not isinstance(other, PresentedRing):
            return NotImplemented
        return self.poly == other.poly and self.ideal.groebner() == other.ideal.groebner()

    def __hash__(self):
        return hash(self.poly)

    # -- elements ---------------------------------------------------------
    def __call__(self, value):
        return self.nf(self.poly(value))

    def nf(self, p):
        if p.ring != self.poly:
            raise MixedContext(f"{p.ring} is not {self.poly}")
        return self.ideal.reduce(p)

    def gens(self):
        return [self.nf(g) for g in self.poly.gens()]

    def gen(self, name):
        return self.nf(self.poly.gen(name))

    def one(self):
        return self.nf(self.poly.one())

    def zero(self):
        return self.poly.zero()

    def is_zero(self, p):
        return not self.nf(p)

    def equal(self, a, b):
        return not self.nf(a - b)

    def is_zero_ring(self):
        return self.ideal.is_unit()

    def ideal_of(self, gens):
        """Preimage in the polynomial ring of the ideal generated by ``gens``."""
        return IdealHandle(self.poly, tuple(self.poly(g) for g in gens) + self.relations)

    def contains(self, gens, p):
        """Is ``p`` in the ideal of this ring generated by ``gens``?"""
        return self.ideal_of(gens).contains(self.poly(p))

    def is_unit(self, p):
        return self.ideal_of([p]).is_unit()

    def inverse(self, p):
        """Inverse of ``p`` as a ring element, or None if ``p`` is not a unit."""
        big = self.poly.extend(fresh_names("u", 1, self.names))
        n = self.nvars
        u = big.gen(n)
        pe = self.poly(p).embed(big, list(range(n)))
        gens = [r.embed(big, list(range(n))) for r in self.relations] + [u * pe - 1]
        ideal = IdealHandle(big, gens)
        if ideal.is_unit():
            return self.zero() if self.is_zero_ring() else None
        order = elimination_order(big.nvars, [n])
        w = ideal.reduce(u, order)
        if n in w.support_vars():
            return None
        return self.nf(MPoly(self.poly, {e[:n]: c for e, c in w.terms.items()}))

    def standard_monomials(self, max_degree):
        """Exponents of grevlex-standard monomials up to ``max_degree``, degree-lex ascending."""
        lms = self.ideal.leading_monomials()
        out = []
        for d in range(max_degree + 1):
            for exp in _exponents(self.nvars, d):
                if not any(all(a <= b for a, b in zip(lm, exp)) for lm in lms):
                    out.append(exp)
        return out

    def vector_dimension(self, cap=10_000):
        """k-dimension when finite (every variable has a pure-power leading monomial), else None."""
        lms = self.ideal.leading_monomials()
        if self.is_zero_ring():
            return 0
        for i in range(self.nvars):
            if not any(lm[i] > 0 and sum(lm) == lm[i] for lm in lms):
                return None
        count = 0
        d = 0
        while True:
            layer = [e for e in _exponents(self.nvars, d)
                     if not any(all(a <= b for a, b in zip(lm, e)) for lm in lms)]
            if not layer:
                return count
            count += len(layer)
            if count > cap:
                return None
            d += 1


def _exponents(n, d):
    """All exponent vectors of length n and total degree d, in lex descending order."""
    if n == 0:
        if d == 0:
            yield ()
        return
    for first in range(d, -1, -1):
        for rest in _exponents(n - 1, d - first):
            yield (first,) + rest


def ring(text_or_field, names=None, relations=(), name=None):
    """Convenience constructor: ``ring(QQ, "x,y", ["y^2 - x^3"])``."""
    if isinstance(names, str):
        names = [n.strip() for n in names.split(",") if n.strip()]
    return PresentedRing(text_or_field, names or (), relations, name)


# --------------------------------------------------------------------------
# Homomorphisms


@dataclass(frozen=True)
class RingHom:
    """Generator images plus a replayable certificate that every source relation maps to 0."""

    source: PresentedRing
    target: PresentedRing
    images: tuple
    certificate: tuple = ()

    def __call__(self, p):
        p = self.source.poly(p)
        if not self.images:
            return self.target.nf(self.target.poly.const(p.constant_coeff()))
        return self.target.nf(p.substitute(list(self.images), self.target.poly))

    def verify(self):
        for rel, _ in self.certificate:
            if self(rel):
                return False
        return len(self.certificate) == len(self.source.relations)

    def compose(self, inner):
        """self ∘ inner."""
        if inner.target.poly != self.source.poly:
            raise MixedContext("cannot compose: codomain/domain mismatch")
        return validate_hom(inner.source, self.target, [self(p) for p in inner.images])

    def to_text(self):
        return ", ".join(f"{n} -> {p}" for n, p in zip(self.source.names, self.images))

    def __repr__(self):
        return f"RingHom({{{self.to_text()}}})"


def validate_hom(source, target, images):
    """Certified homomorphism source -> target, or RelationViolated for the first bad relation."""
    if len(images) != source.nvars:
        raise ValueError(f"need {source.nvars} generator images, got {len(images)}")
    imgs = tuple(target(p) for p in images)
    if source.field != target.field:
        raise MixedContext("homomorphism between rings over different fields")
    cert = []
    draft = RingHom(source, target, imgs)
    for rel in source.relations:
        rem = draft(rel)
        if rem:
            raise RelationViolated(rel, rem)
        cert.append((rel, rem))
    return RingHom(source, target, imgs, tuple(cert))


def identity(R):
    return validate_hom(R, R, R.poly.gens())


def kernel(h):
    """Generators of ker(h) as an ideal of the source (reduced modulo the source relations)."""
    graph = GraphIdeal(h.target, list(h.images), source_relations=h.source.relations)
    gens = graph.relations_among()
    src = h.source
    out = []
    seen = set()
    for g in gens:
        g = MPoly(src.poly, g.terms)
        r = src.nf(g)
        if r and r not in seen:
            seen.add(r)
            out.append(r)
    out = minimal_ideal_generators(src, out)
    return IdealHandle(src.poly, out)


def minimal_ideal_generators(R, gens):
    """Drop generators already in the ideal of the others (scan in order)."""
    kept = list(gens)
    i = 0
    while i < len(kept):
        others = kept[:i] + kept[i + 1:]
        if others and R.contains(others, kept[i]):
            kept.pop(i)
        else:
            i += 1
    return kept


def tensor_over_base(f, g, names=None):
    """B ⊗_A C for f: A -> B, g: A -> C; returns (ring, coprojection B, coprojection C)."""
    if f.source.poly != g.source.poly:
        raise MixedContext("tensor_over_base needs a common source")
    B, C = f.target, g.target
    if B.field != C.field:
        raise MixedContext("tensor of rings over different fields")
    cnames = list(C.names)
    clash = set(B.names) & set(cnames)
    if clash:
        taken = set(B.names) | set(cnames)
        for i, n in enumerate(cnames):
            if n in clash:
                new = fresh_names(n + "_", 1, taken)[0]
                taken.add(new)
                cnames[i] = new
    names = names or list(B.names) + cnames
    big = PolyRing(B.field, names)
    nb = B.nvars
    bpos = list(range(nb))
    cpos = list(range(nb, nb + C.nvars))
    rels = [r.embed(big, bpos) for r in B.relations]
    rels += [r.embed(big, cpos) for r in C.relations]
    for fb, gc in zip(f.images, g.images):
        rels.append(fb.embed(big, bpos) - gc.embed(big, cpos))
    T = PresentedRing(B.field, names, rels)
    iB = validate_hom(B, T, [T.poly.gen(i) for i in bpos])
    iC = validate_hom(C, T, [T.poly.gen(i) for i in cpos])
    return T, iB, iC


def localize(R, f, var=None):
    """R[s]/(s·f - 1) with the canonical map R -> R_f."""
    f = R.poly(f)
    var = var or fresh_names("s", 1, R.names)[0]
    big = R.poly.extend([var])
    n = R.nvars
    pos = list(range(n))
    s = big.gen(n)
    rels = [r.embed(big, pos) for r in R.relations] + [s * f.embed(big, pos) - 1]
    L = PresentedRing(R.field, big.names, rels)
    return L, validate_hom(R, L, [big.gen(i) for i in pos])


def product_ring(B, C):
    """B × C presented with an idempotent e: (b, c) <-> e·b + (1 - e)·c.

    Returns (D, embed) where ``embed(b, c)`` gives the element of D.
    """
    cnames = list(C.names)
    taken = set(B.names)
    for i, n in enumerate(cnames):
        if n in taken:
            cnames[i] = fresh_names(n + "_", 1, taken | set(cnames))[0]
        taken.add(cnames[i])
    ename = fresh_names("e", 1, taken)[0]
    names = list(B.names) + cnames + [ename]
    big = PolyRing(B.field, names)
    nb, nc = B.nvars, C.nvars
    bpos, cpos = list(range(nb)), list(range(nb, nb + nc))
    e = big.gen(nb + nc)
    rels = [e * e - e]
    rels += [(1 - e) * big.gen(i) for i in bpos]
    rels += [e * big.gen(i) for i in cpos]
    rels += [e * r.embed(big, bpos) for r in B.relations]
    rels += [(1 - e) * r.embed(big, cpos) for r in C.relations]
    D = PresentedRing(B.field, names, rels)

    def embed(b, c):
        return D.nf(e * B.poly(b).embed(big, bpos) + (1 - e) * C.poly(c).embed(big, cpos))

    return D, embed


# --------------------------------------------------------------------------
# Graph ideals: subalgebra membership, sections, module-finiteness


class GraphIdeal:
    """J_R + (z_i - g_i) in k[x, z] under an order eliminating the x-variables of R.

    Used to decide whether an element of R lies in the subalgebra k[g_1..g_m]
    (normal form free of x), to read off relations among the g_i, and to test
    whether R is module-finite over that subalgebra.
    """

    def __init__(self, R, images, source_relations=(), znames=None, _basis=None):
        self.R = R
        self.images = [R.nf(R.poly(g)) for g in images]
        m = len(self.images)
        self.znames = list(znames) if znames else fresh_names("z", m, R.names)
        self.big = PolyRing(R.field, list(R.names) + self.znames)
        n = R.nvars
        self.n = n
        self.xpos = list(range(n))
        self.order = elimination_order(self.big.nvars, range(n)) if m and n else GREVLEX
        self.key = _ideal_key(self.order)
        self.source_relations = tuple(source_relations)
        if _basis is not None:
            self.basis = _basis
            return
        gens = [r.embed(self.big, self.xpos) for r in R.relations]
        for i, g in enumerate(self.images):
            gens.append(self.big.gen(n + i) - g.embed(self.big, self.xpos))
        zpos = list(range(n, n + m))
        for r in self.source_relations:
            gens.append(r.embed(self.big, zpos))
        self.basis = self._compute([_to_vec(g) for g in gens if g])

    def _compute(self, vecs, known=()):
        if not vecs and not known:
            return []
        out = buchberger(vecs, self.key, self.R.field, is_ideal=True, known_basis=known)
        return [_from_vec(d, self.big) for d in out]

    def extend(self, image, zname=None):
        """A new GraphIdeal with one more generator, reusing this Groebner basis."""
        zname = zname or fresh_names("z", 1, set(self.R.names) | set(self.znames))[0]
        new = GraphIdeal.__new__(GraphIdeal)
        new.R = self.R
        new.images = self.images + [self.R.nf(self.R.poly(image))]
        new.znames = self.znames + [zname]
        new.big = PolyRing(self.R.field, list(self.R.names) + new.znames)
        new.n = self.n
        new.xpos = self.xpos
        new.order = elimination_order(new.big.nvars, range(self.n)) if self.n else GREVLEX
        new.key = _ideal_key(new.order)
        new.source_relations = self.source_relations
        N = new.big.nvars
        known = [
            {(0, e + (0,)): c for e, c in g.terms.items()} for g in self.basis
        ]
        g = new.big.gen(N - 1) - new.images[-1].embed(new.big, self.xpos)
        # the old basis stays a Groebner basis: both orders agree on monomials free of the new z
        new.basis = new._compute([_to_vec(g)], known)
        return new

    def _reduce(self, p):
        if not self.basis:
            return p
        r = reduce_by(_to_vec(p), [_to_vec(g) for g in self.basis], self.key, self.R.field)
        return _from_vec(r, self.big)

    @property
    def zring(self):
        return PolyRing(self.R.field, self.znames)

    def express(self, element):
        """Polynomial q in the z-variables with q(g) = element in R, or None."""
        e = self.R.poly(element).embed(self.big, self.xpos)
        r = self._reduce(e)
        if any(e[: self.n] != (0,) * self.n for e in r.terms):
            return None
        return MPoly(self.zring, {e[self.n:]: c for e, c in r.terms.items()})

    def relations_among(self):
        """Generators of the ideal of relations among the g_i (in the z-variables)."""
        out = []
        for g in self.basis:
            if all(not any(e[: self.n]) for e in g.terms):
                out.append(MPoly(self.zring, {e[self.n:]: c for e, c in g.terms.items()}))
        return out

    def is_unit(self):
        return len(self.basis) == 1 and self.basis[0].is_constant()

    def finite_module_generators(self):
        """x-monomials generating R as a module over k[g], or None when R is not module-finite.

        Criterion: every x-variable is a pure power of some leading monomial
        (for the elimination order), and then the standard x-monomials are
        finitely many.
        """
        if self.is_unit():
            return []
        lms = [g.leading(self.order)[0] for g in self.basis]
        pure = [lm[: self.n] for lm in lms if not any(lm[self.n:])]
        for i in range(self.n):
            if not any(p[i] > 0 and sum(p) == p[i] for p in pure):
                return None
        out = []
        d = 0
        while True:
            layer = [e for e in _exponents(self.n, d) if not any(all(a <= b for a, b in zip(p, e)) for p in pure)]
            if not layer:
                break
            out.extend(sorted(layer))
            d += 1
        return [MPoly(self.R.poly, {e: self.R.field.one}) for e in out]

    def module_coordinates(self, element, generators):
        """Coefficients (polys in z) of ``element`` on the standard x-monomials ``generators``."""
        e = self.R.poly(element).embed(self.big, self.xpos)
        r = self._reduce(e)
        index = {next(iter(g.terms)): i for i, g in enumerate(generators)}
        coords = [dict() for _ in generators]
        for exp, c in r.terms.items():
            i = index.get(exp[: self.n])
            if i is None:
                return None
            coords[i][exp[self.n:]] = c
        return [MPoly(self.zring, t) for t in coords]


def section(h):
    """Preimages (source elements) of every target generator, certifying surjectivity.

    Raises NotSurjective when a generator provably has no preimage and
    BoundExceeded when the Groebner computation hits the degree cap.
    """
    graph = GraphIdeal(h.target, list(h.images), znames=fresh_names("w", h.source.nvars, h.target.names))
    pre = []
    for name, y in zip(h.target.names, h.target.poly.gens()):
        q = graph.express(y)
        if q is None:
            raise NotSurjective(f"target generator {name} is not in the image", witness=y)
        pre.append(h.source.nf(MPoly(h.source.poly, q.terms)))
    return pre


def subalgebra_membership(R, generators, element):
    """q with q(generators) = element in R, or None."""
    graph = GraphIdeal(R, generators)
    return graph.express(element)


@dataclass(frozen=True)
class RingIso:
    """Mutually inverse homomorphisms, with a replayable composite check."""

    forward: RingHom
    backward: RingHom

    def verify(self):
        if not (self.forward.verify() and self.backward.verify()):
            return False
        A, B = self.forward.source, self.forward.target
        for x in A.gens():
            if not A.equal(self.backward(self.forward(x)), x):
                return False
        for y in B.gens():
            if not B.equal(self.forward(self.backward(y)), y):
                return False
        return True

    def inverse(self):
        return RingIso(self.backward, self.forward)


def certify_iso(h):
    """RingIso for h, or NotIsomorphism carrying a witness element.

    The witness is a target generator outside the image (not surjective) or a
    nonzero source element in the kernel (not injective).
    """
    try:
        pre = section(h)
    except NotSurjective as exc:
        raise NotIsomorphism("not surjective", witness=("cokernel", exc.witness)) from None
    try:
        back = validate_hom(h.target, h.source, pre)
    except RelationViolated as exc:
        raise NotIsomorphism("not injective", witness=("kernel", exc.remainder)) from None
    for x in h.source.gens():
        diff = h.source.nf(x - back(h(x)))
        if diff:
            raise NotIsomorphism("not injective", witness=("kernel", diff))
    iso = RingIso(h, back)
    return iso


def iso_from_images(A, B, forward_images, backward_images):
    """Validate both directions and the composites; raises NotIsomorphism on failure."""
    iso = RingIso(validate_hom(A, B, forward_images), validate_hom(B, A, backward_images))
    if not iso.verify():
        raise NotIsomorphism("composites are not the identity")
    return iso


def hom_text(h):
    return "{ " + ", ".join(f"{n} -> {format_poly(p)}" for n, p in zip(h.source.names, h.images)) + " }"
