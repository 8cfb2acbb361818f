"""Buchberger's algorithm for ideals and submodules of free modules.

The engine works on "vectors": dicts mapping ``(position, exponent)`` to a
coefficient.  Ideals are the rank-one case (position always 0).  Module term
orders are plain key functions on ``(position, exponent)``.
"""

from __future__ import annotations

import heapq
import threading

from .config import limits
from .errors import BoundExceeded, Cancelled, MixedContext
from .poly import GREVLEX, MPoly, MonomialOrder, PolyRing, elimination_order


# --------------------------------------------------------------------------
# Module orders


class ModuleOrder:
    """A term order on ``(position, exponent)`` pairs.

    ``kind`` is ``"pot"`` (position over term, lower position larger),
    ``"top"`` (term over position), or ``"custom"`` with an explicit key.
    """

    __slots__ = ("kind", "order", "key", "tag")

    def __init__(self, kind, order=GREVLEX, key=None, tag=None):
        self.kind = kind
        self.order = order
        if kind == "pot":
            okey = order.key
            self.key = lambda m: (-m[0],) + okey(m[1])
        elif kind == "top":
            okey = order.key
            self.key = lambda m: okey(m[1]) + (-m[0],)
        elif kind == "custom":
            self.key = key
        else:
            raise ValueError(kind)
        self.tag = (kind, order, tag)

    def __eq__(self, other):
        return isinstance(other, ModuleOrder) and self.tag == other.tag

    def __hash__(self):
        return hash(self.tag)


def _ideal_key(order):
    okey = order.key
    return lambda m: okey(m[1])


# --------------------------------------------------------------------------
# Core engine


class _Element:
    __slots__ = ("lm", "tail", "sugar", "active")

    def __init__(self, lm, tail, sugar):
        self.lm = lm
        self.tail = tail  # list of (mono, coeff), lm excluded, coefficient of lm is 1
        self.sugar = sugar
        self.active = True

    def as_dict(self, one):
        d = dict(self.tail)
        d[self.lm] = one
        return d


def _divides(a, b):
    return a[0] == b[0] and all(x <= y for x, y in zip(a[1], b[1]))


def _quot(b, a):
    return tuple(y - x for x, y in zip(a[1], b[1]))


def _shift(m, exp):
    return (m[0], tuple(x + y for x, y in zip(m[1], exp)))


def _lcm(a, b):
    return (a[0], tuple(max(x, y) for x, y in zip(a[1], b[1])))


def _deg(m):
    return sum(m[1])


class _Reducer:
    def __init__(self, field, key):
        self.field = field
        self.key = key
        self.red = field.reduce
        self._neg = {}
        self.by_pos = {}

    def negkey(self, m):
        k = self._neg.get(m)
        if k is None:
            k = tuple(-v for v in self.key(m))
            self._neg[m] = k
        return k

    def add(self, elem):
        self.by_pos.setdefault(elem.lm[0], []).append(elem)

    def find(self, m):
        for g in self.by_pos.get(m[0], ()):
            if g.active and all(x <= y for x, y in zip(g.lm[1], m[1])):
                return g
        return None

    def reduce(self, poly, full=True):
        """Remainder of ``poly`` (dict) by the active elements; returns a dict."""
        red = self.red
        p = dict(poly)
        heap = [(self.negkey(m), m) for m in p]
        heapq.heapify(heap)
        rem = {}
        while heap:
            _, m = heapq.heappop(heap)
            c = p.get(m)
            if c is None:
                continue
            g = self.find(m)
            del p[m]
            if g is None:
                rem[m] = c
                if not full:
                    for mm, cc in p.items():
                        rem[mm] = cc
                    return rem
                continue
            q = _quot(m, g.lm)
            for gm, gc in g.tail:
                nm = (gm[0], tuple(x + y for x, y in zip(gm[1], q)))
                v = red(p.get(nm, 0) - c * gc)
                if v:
                    if nm not in p:
                        heapq.heappush(heap, (self.negkey(nm), nm))
                    p[nm] = v
                else:
                    p.pop(nm, None)
        return rem


def _make_element(poly, key, field, sugar=None):
    lm = max(poly, key=key)
    inv = field.inv(poly[lm])
    red = field.reduce
    tail = sorted(
        ((m, red(c * inv)) for m, c in poly.items() if m != lm),
        key=lambda t: key(t[0]),
        reverse=True,
    )
    if sugar is None:
        sugar = max(_deg(m) for m in poly)
    return _Element(lm, tail, sugar)


def buchberger(polys, key, field, *, is_ideal, degree_bound=None, cancel=None, known_basis=()):
    """Reduced Groebner basis of the vectors ``polys`` (dicts) for the order ``key``.

    ``known_basis`` may hold a reduced Groebner basis (same order) of a
    subideal; pairs among its elements are never formed.  Returns a list of
    dicts, each with leading coefficient 1, sorted by leading monomial
    descending.
    """
    if degree_bound is None:
        degree_bound = limits().degree_bound
    red = field.reduce
    one = field.one
    reducer = _Reducer(field, key)
    basis = []
    pairs = []  # heap of (lcm key asc, sugar, i, j, lcm): normal selection strategy
    counter = 0

    def insert(poly, sugar):
        nonlocal counter
        h = _make_element(poly, key, field, sugar)
        if _deg(h.lm) > degree_bound:
            raise BoundExceeded(f"Groebner basis element of degree {_deg(h.lm)} exceeds bound {degree_bound}", degree_bound)
        idx = len(basis)
        # Gebauer-Moeller update
        cand = []
        for i, g in enumerate(basis):
            if g.active and g.lm[0] == h.lm[0]:
                cand.append((i, _lcm(g.lm, h.lm)))
        keep = []
        for n, (i, L) in enumerate(cand):
            coprime = is_ideal and all(min(a, b) == 0 for a, b in zip(basis[i].lm[1], h.lm[1]))
            if coprime:
                keep.append((i, L, True))
                continue
            dominated = False
            for m2, (j, L2) in enumerate(cand):
                if m2 != n and _divides(L2, L) and (L2 != L or m2 < n):
                    dominated = True
                    break
            if not dominated:
                keep.append((i, L, False))
        # chain criterion on old pairs
        new_heap = []
        for entry in pairs:
            _, _, i, j, L = entry
            if _divides(h.lm, L) and _lcm(basis[i].lm, h.lm) != L and _lcm(basis[j].lm, h.lm) != L:
                continue
            new_heap.append(entry)
        # keep one pair per distinct lcm; drop coprime (product criterion)
        seen = set()
        for i, L, coprime in keep:
            if L in seen:
                continue
            seen.add(L)
            if coprime:
                continue
            g = basis[i]
            s = max(g.sugar + _deg(L) - _deg(g.lm), sugar + _deg(L) - _deg(h.lm))
            counter += 1
            new_heap.append((tuple(key(L)), s, i, idx, L))
        heapq.heapify(new_heap)
        pairs[:] = new_heap
        for g in basis:
            if g.active and _divides(h.lm, g.lm):
                g.active = False
        basis.append(h)
        reducer.add(h)

    for p in known_basis:
        insert(p, max(_deg(m) for m in p))
    pairs.clear()

    start = []
    for p in polys:
        if p:
            start.append(p)
    start.sort(key=lambda p: key(max(p, key=key)))
    for p in start:
        r = reducer.reduce(p)
        if r:
            insert(r, max(_deg(m) for m in p))

    while pairs:
        if cancel is not None and cancel.is_set():
            raise Cancelled("Groebner computation cancelled")
        _, s, i, j, L = heapq.heappop(pairs)
        if _deg(L) > degree_bound:
            raise BoundExceeded(f"S-pair of degree {_deg(L)} exceeds bound {degree_bound}", degree_bound)
        gi, gj = basis[i], basis[j]
        qi, qj = _quot(L, gi.lm), _quot(L, gj.lm)
        sp = {}
        for m, c in gi.tail:
            sp[_shift(m, qi)] = c
        for m, c in gj.tail:
            nm = _shift(m, qj)
            v = red(sp.get(nm, 0) - c)
            if v:
                sp[nm] = v
            else:
                sp.pop(nm, None)
        if not sp:
            continue
        r = reducer.reduce(sp)
        if r:
            insert(r, s)

    active = [g for g in basis if g.active]
    # interreduce tails
    final = _Reducer(field, key)
    for g in active:
        final.add(g)
    out = []
    for g in active:
        g.active = False
        tail = final.reduce(dict(g.tail))
        g.active = True
        d = dict(tail)
        d[g.lm] = one
        out.append(d)
    out.sort(key=lambda d: key(max(d, key=key)), reverse=True)
    return out


def reduce_by(poly, basis, key, field):
    """Full remainder of the vector ``poly`` by a Groebner basis (list of monic dicts)."""
    r = _Reducer(field, key)
    for d in basis:
        r.add(_make_element(d, key, field))
    return r.reduce(poly)


# --------------------------------------------------------------------------
# Conversions


def _to_vec(p, pos=0):
    return {(pos, e): c for e, c in p.terms.items()}


def _from_vec(d, ring, pos=0):
    return MPoly(ring, {e: c for (q, e), c in d.items() if q == pos})


def _check_ring(polys):
    rings = {p.ring for p in polys}
    if len(rings) > 1:
        raise MixedContext(f"generators over different rings: {sorted(map(repr, rings))}")
    return rings.pop() if rings else None


# --------------------------------------------------------------------------
# Ideals

_gb_cache = {}
_gb_lock = threading.Lock()


def groebner_basis(gens, order=GREVLEX, ring=None, cancel=None):
    """Reduced Groebner basis, monic, sorted by leading monomial descending."""
    gens = list(gens)
    ring = _check_ring(gens) or ring
    if ring is None:
        return []
    if any(g.ring != ring for g in gens):
        raise MixedContext("generator ring mismatch")
    nonzero = [g for g in gens if g]
    if not nonzero:
        return []
    bound = limits().degree_bound
    cache_key = (ring, order, frozenset(frozenset(g.terms.items()) for g in nonzero), bound)
    with _gb_lock:
        hit = _gb_cache.get(cache_key)
    if hit is not None:
        return list(hit)
    out = buchberger(
        [_to_vec(g) for g in nonzero], _ideal_key(order), ring.field,
        is_ideal=True, degree_bound=bound, cancel=cancel,
    )
    result = tuple(_from_vec(d, ring) for d in out)
    with _gb_lock:
        result = _gb_cache.setdefault(cache_key, result)
    return list(result)


class IdealHandle:
    """An ideal given by generators, with per-order cached reduced Groebner bases."""

    def __init__(self, ring, gens=()):
        gens = tuple(ring(g) for g in gens)
        self.ring = ring
        self.gens = gens
        self._gb = {}
        self._lock = threading.Lock()

    def __repr__(self):
        return f"IdealHandle({self.ring!r}, [{', '.join(map(str, self.gens))}])"

    def groebner(self, order=GREVLEX):
        with self._lock:
            hit = self._gb.get(order)
        if hit is None:
            hit = tuple(groebner_basis(self.gens, order, ring=self.ring))
            with self._lock:
                hit = self._gb.setdefault(order, hit)
        return list(hit)

    def reduce(self, p, order=GREVLEX):
        p = self.ring(p)
        basis = self.groebner(order)
        if not basis:
            return p
        r = reduce_by(_to_vec(p), [_to_vec(g) for g in basis], _ideal_key(order), self.ring.field)
        return _from_vec(r, self.ring)

    def contains(self, p):
        return not self.reduce(p)

    def is_unit(self):
        basis = self.groebner()
        return len(basis) == 1 and basis[0].is_constant()

    def is_zero(self):
        return not self.groebner()

    def __add__(self, other):
        if isinstance(other, IdealHandle):
            other = other.gens
        return IdealHandle(self.ring, self.gens + tuple(self.ring(g) for g in other))

    def __eq__(self, other):
        if not isinstance(other, IdealHandle) or other.ring != self.ring:
            return NotImplemented
        return self.groebner() == other.groebner()

    def __hash__(self):
        return hash((self.ring, tuple(self.groebner())))

    def leading_monomials(self, order=GREVLEX):
        return [g.leading(order)[0] for g in self.groebner(order)]


def normal_form(p, ideal, order=GREVLEX):
    """Unique remainder of ``p`` modulo the ideal; zero iff ``p`` is a member."""
    if isinstance(ideal, (list, tuple)):
        ideal = IdealHandle(p.ring, ideal)
    if ideal.ring != p.ring:
        raise MixedContext(f"{p.ring} vs {ideal.ring}")
    return ideal.reduce(p, order)


def eliminate(ideal, drop_vars):
    """Generators of ideal ∩ k[remaining variables], via a block order with dropped variables first."""
    ring = ideal.ring
    drop = {ring.index(v) if isinstance(v, str) else v for v in drop_vars}
    if not drop:
        return IdealHandle(ring, ideal.gens)
    order = elimination_order(ring.nvars, drop)
    basis = ideal.groebner(order)
    kept = [g for g in basis if not (g.support_vars() & drop)]
    return IdealHandle(ring, kept)


def intersect(ideal_a, ideal_b):
    """I ∩ J via elimination of an auxiliary variable: (tI + (1 - t)J) ∩ k[x]."""
    ring = ideal_a.ring
    if ideal_b.ring != ring:
        raise MixedContext("intersect over different rings")
    big = ring.extend([_aux_name(ring)])
    n = ring.nvars
    pos = list(range(n))
    t = big.gen(n)
    gens = [t * g.embed(big, pos) for g in ideal_a.gens]
    gens += [(1 - t) * g.embed(big, pos) for g in ideal_b.gens]
    elim = eliminate(IdealHandle(big, gens), [n])
    back = [MPoly(ring, {e[:n]: c for e, c in g.terms.items()}) for g in elim.gens]
    return IdealHandle(ring, back)


def _aux_name(ring):
    name = "_t"
    while name in ring.names:
        name += "_"
    return name


# --------------------------------------------------------------------------
# Modules


def module_groebner(vectors, ring, order, cancel=None):
    """Reduced Groebner basis of a submodule of ring^n.

    ``vectors`` are lists of MPoly; ``order`` a ModuleOrder.  Returns monic
    dicts keyed by ``(position, exponent)``.
    """
    vecs = []
    for v in vectors:
        d = {}
        for pos, p in enumerate(v):
            if p.ring != ring:
                raise MixedContext("module entries over different rings")
            for e, c in p.terms.items():
                d[(pos, e)] = c
        if d:
            vecs.append(d)
    if not vecs:
        return []
    return buchberger(vecs, order.key, ring.field, is_ideal=False, cancel=cancel)


def vec_to_dict(v):
    d = {}
    for pos, p in enumerate(v):
        for e, c in p.terms.items():
            d[(pos, e)] = c
    return d


def dict_to_vec(d, ring, n):
    parts = [dict() for _ in range(n)]
    for (pos, e), c in d.items():
        parts[pos][e] = c
    return [MPoly(ring, t) for t in parts]


def syzygy_matrix(matrix, relations=()):
    """Columns generating the syzygies of the columns of ``matrix`` (a list of rows).

    ``relations`` optionally generate an ideal J; syzygies are then computed
    over the quotient ring (entries reduced modulo J).  Returns a list of rows
    (m rows, one column per syzygy).
    """
    n = len(matrix)
    m = len(matrix[0]) if n else 0
    entries = [p for row in matrix for p in row] + list(relations)
    ring = _check_ring(entries)
    if ring is None:
        return [[] for _ in range(m)]
    zero = ring.zero()
    rel = [g for g in relations if g]
    vectors = []
    for j in range(m):
        v = [matrix[i][j] for i in range(n)] + [zero] * m
        v[n + j] = ring.one()
        vectors.append(v)
    for g in rel:
        for i in range(n):
            v = [zero] * (n + m)
            v[i] = g
            vectors.append(v)
    order = ModuleOrder("pot")
    basis = module_groebner(vectors, ring, order)
    ideal = IdealHandle(ring, rel)
    syz = []
    for d in basis:
        lm = max(d, key=order.key)
        if lm[0] < n:
            continue
        vec = dict_to_vec(d, ring, n + m)[n:]
        if rel:
            vec = [ideal.reduce(p) for p in vec]
        if any(vec):
            syz.append(vec)
    return [[s[i] for s in syz] for i in range(m)]


def lift_to_generators(target, generators, ring, relations=()):
    """Coefficients a with Σ a_i·generators[i] ≡ target modulo J·ring^n, or None.

    Vectors are lists of MPoly of equal length n; J is generated by ``relations``.
    """
    n = len(target)
    k = len(generators)
    zero = ring.zero()
    rel = [g for g in relations if g]
    vectors = []
    for i, g in enumerate(generators):
        v = list(g) + [zero] * k
        v[n + i] = ring.one()
        vectors.append(v)
    for r in rel:
        for i in range(n):
            v = [zero] * (n + k)
            v[i] = r
            vectors.append(v)
    order = ModuleOrder("pot")
    basis = module_groebner(vectors, ring, order)
    rem = reduce_by(vec_to_dict(list(target) + [zero] * k), basis, order.key, ring.field)
    vec = dict_to_vec(rem, ring, n + k)
    if any(vec[:n]):
        return None
    return [-p for p in vec[n:]]
