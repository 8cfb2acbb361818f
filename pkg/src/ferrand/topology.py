"""Finite spectral spaces as specialization posets, and their pushouts.

Convention: ``x ~> y`` means y lies in the closure of x (x generizes to y).
Open sets are closed under generization; closed sets under specialization.
Subsets are bitmasks over the point list.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations, product

import sympy

from .errors import FactorizationIncomplete, NotClosedEmbedding, NotContinuous, NotZeroDimensional
from .groebner import eliminate
from .poly import MPoly
from .rings import PresentedRing

MAX_EXACT_POINTS = 16


class SpecPoset:
    """A finite T0 space given by its specialization order."""

    def __init__(self, points, relations=(), opens=None, labels=None):
        self.points = tuple(points)
        self.index = {p: i for i, p in enumerate(self.points)}
        if len(self.index) != len(self.points):
            raise ValueError("duplicate point names")
        n = len(self.points)
        up = [1 << i for i in range(n)]  # up[i]: bitmask of points j with i ~> j
        for a, b in relations:
            up[self.index[a]] |= 1 << self.index[b]
        changed = True
        while changed:
            changed = False
            for i in range(n):
                acc = up[i]
                for j in range(n):
                    if acc >> j & 1:
                        acc |= up[j]
                if acc != up[i]:
                    up[i] = acc
                    changed = True
        self.spec = tuple(up)
        self.labels = dict(labels or {})
        for i in range(n):
            for j in range(i + 1, n):
                if up[i] >> j & 1 and up[j] >> i & 1:
                    raise ValueError(f"not T0: {self.points[i]} and {self.points[j]} specialize to each other")
        self._opens = frozenset(opens) if opens is not None else None

    def __repr__(self):
        return f"SpecPoset({list(self.points)}, {self.relation_list()})"

    @property
    def size(self):
        return len(self.points)

    def leq(self, a, b):
        """a ~> b."""
        return bool(self.spec[self.index[a]] >> self.index[b] & 1)

    def relation_list(self):
        """Covering relations a ~> b (a != b), sorted."""
        out = []
        n = self.size
        for i in range(n):
            for j in range(n):
                if i != j and self.spec[i] >> j & 1:
                    # skip if there is k strictly between
                    if not any(k not in (i, j) and self.spec[i] >> k & 1 and self.spec[k] >> j & 1 for k in range(n)):
                        out.append((self.points[i], self.points[j]))
        return sorted(out)

    def is_open(self, mask):
        if self._opens is not None:
            return mask in self._opens
        # closed under generization: if j in U and i ~> j then i in U
        for i in range(self.size):
            if not mask >> i & 1 and self.spec[i] & mask:
                return False
        return True

    def opens(self):
        if self._opens is not None:
            return self._opens
        if self.size > MAX_EXACT_POINTS:
            raise ValueError("too many points for exact open-set enumeration")
        return frozenset(m for m in range(1 << self.size) if self.is_open(m))

    def closure(self, mask):
        out = 0
        for i in range(self.size):
            if mask >> i & 1:
                out |= self.spec[i]
        return out

    def is_closed(self, mask):
        return self.closure(mask) == mask

    def mask(self, pts):
        m = 0
        for p in pts:
            m |= 1 << self.index[p]
        return m

    def subset(self, mask):
        return [p for i, p in enumerate(self.points) if mask >> i & 1]

    def to_text(self):
        rel = ", ".join(f"{a} > {b}" for a, b in self.relation_list())
        isolated = [p for p in self.points if not any(p in r for r in self.relation_list())]
        parts = [rel] if rel else []
        parts += isolated
        return "{" + ", ".join(parts) + "}"


def poset_from_opens(points, opens):
    """Finite topology given by opens; returns the SpecPoset with the explicit open family."""
    points = list(points)
    n = len(points)
    rel = []
    for i in range(n):
        for j in range(n):
            # i ~> j iff every open containing j contains i
            if i != j and all(U >> i & 1 for U in opens if U >> j & 1):
                rel.append((points[i], points[j]))
    return SpecPoset(points, rel, opens=opens)


def _preimage(mapping, src, tgt, mask):
    out = 0
    for p in src.points:
        if mask >> tgt.index[mapping[p]] & 1:
            out |= 1 << src.index[p]
    return out


def is_continuous(mapping, src, tgt):
    return all(src.is_open(_preimage(mapping, src, tgt, U)) for U in tgt.opens())


def is_monotone(mapping, src, tgt):
    return all(
        tgt.leq(mapping[a], mapping[b]) for a in src.points for b in src.points if src.leq(a, b)
    )


def check_closed_embedding(g, T, Z):
    img = [g[t] for t in T.points]
    if len(set(img)) != len(img):
        raise NotClosedEmbedding("not injective")
    if not Z.is_closed(Z.mask(img)):
        raise NotClosedEmbedding(f"image {sorted(img)} is not closed")
    for a in T.points:
        for b in T.points:
            if T.leq(a, b) != Z.leq(g[a], g[b]):
                raise NotClosedEmbedding(f"not a homeomorphism onto its image at ({a}, {b})")


@dataclass
class PushoutTopReport:
    X: SpecPoset
    qY: dict
    qZ: dict
    partition_ok: bool
    Y_closed_embedding: bool
    U_open_embedding: bool
    quotient_matches_order: bool | None
    reference_homeomorphic: bool | None = None
    homeomorphism: dict | None = None
    universal: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "points": list(self.X.points),
            "specializations": [list(r) for r in self.X.relation_list()],
            "partition": self.partition_ok,
            "Y_closed_embedding": self.Y_closed_embedding,
            "complement_open_embedding": self.U_open_embedding,
            "quotient_matches_order_topology": self.quotient_matches_order,
            "reference_homeomorphic": self.reference_homeomorphic,
            "universal_property": self.universal,
        }


def topological_pushout(Y, Z, T, f, g, reference=None):
    """|Y| ⊔_{|T|} |Z| with the literal quotient topology.

    Points of X are the points of Y and of Z not in g(T).  The report
    certifies the partition |X| = |Y| ⊔ |Z \\ T|, that Y -> X is a closed
    embedding, and that Z \\ T -> X is an open embedding.
    """
    for t in T.points:
        if t not in f or t not in g:
            raise ValueError(f"maps must be defined on every point of T (missing {t})")
    if not is_continuous(f, T, Y):
        raise NotContinuous("f: T -> Y is not continuous")
    check_closed_embedding(g, T, Z)
    gT = {g[t]: t for t in T.points}
    U = [z for z in Z.points if z not in gT]
    names = []
    qY, qZ = {}, {}
    taken = set()

    def name(p, tag):
        n = p if p not in taken else f"{p}@{tag}"
        taken.add(n)
        return n

    for y in Y.points:
        qY[y] = name(y, "Y")
        names.append(qY[y])
    for z in U:
        qZ[z] = name(z, "Z")
        names.append(qZ[z])
    for z, t in gT.items():
        qZ[z] = qY[f[t]]
    n = len(names)
    idx = {p: i for i, p in enumerate(names)}
    # order generated by the images of both specialization orders
    gen_rel = [(qY[a], qY[b]) for a in Y.points for b in Y.points if a != b and Y.leq(a, b)]
    gen_rel += [(qZ[a], qZ[b]) for a in Z.points for b in Z.points if a != b and Z.leq(a, b) and qZ[a] != qZ[b]]
    if n <= MAX_EXACT_POINTS:
        opens = []
        for m in range(1 << n):
            pY = sum(1 << Y.index[y] for y in Y.points if m >> idx[qY[y]] & 1)
            pZ = sum(1 << Z.index[z] for z in Z.points if m >> idx[qZ[z]] & 1)
            if Y.is_open(pY) and Z.is_open(pZ):
                opens.append(m)
        X = poset_from_opens(names, frozenset(opens))
        order_X = SpecPoset(names, gen_rel)
        matches = X.opens() == order_X.opens()
    else:
        X = SpecPoset(names, gen_rel)
        matches = None
    ymask = X.mask(qY.values())
    umask = X.mask(qZ[z] for z in U)
    partition = (ymask & umask) == 0 and (ymask | umask) == (1 << n) - 1 and len(names) == Y.size + len(U)
    y_closed = X.is_closed(ymask) and _subspace_matches(Y, X, qY)
    u_open = X.is_open(umask) and _subspace_matches(
        SpecPoset(U, [(a, b) for a in U for b in U if a != b and Z.leq(a, b)]), X, {z: qZ[z] for z in U}
    )
    rep = PushoutTopReport(X, qY, qZ, partition, y_closed, u_open, matches)
    if reference is not None:
        h = find_homeomorphism(X, reference)
        rep.reference_homeomorphic = h is not None
        rep.homeomorphism = h
    return rep


def _subspace_matches(S, X, emb):
    """S -> X is a homeomorphism onto its image with the subspace topology."""
    for a in S.points:
        for b in S.points:
            if S.leq(a, b) != X.leq(emb[a], emb[b]):
                return False
    return True


def find_homeomorphism(P, Q):
    if P.size != Q.size:
        return None
    for perm in permutations(Q.points):
        h = dict(zip(P.points, perm))
        if all(P.leq(a, b) == Q.leq(h[a], h[b]) for a in P.points for b in P.points):
            return h
    return None


# --------------------------------------------------------------------------
# Universal property, brute force


def small_t0_spaces(max_points=4):
    """All T0 finite spaces (partial orders) with 1..max_points points, one per isomorphism class."""
    out = []
    for n in range(1, max_points + 1):
        pts = [f"w{i}" for i in range(n)]
        pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
        seen = []
        for r in range(len(pairs) + 1):
            for rel in combinations(pairs, r):
                relset = set(rel)
                if any((j, i) in relset for i, j in rel):
                    continue
                # transitive already
                if any((i, k) not in relset for i, j in rel for j2, k in rel if j == j2 and i != k):
                    continue
                P = SpecPoset(pts, [(pts[i], pts[j]) for i, j in rel])
                if any(find_homeomorphism(P, Q) for Q in seen):
                    continue
                seen.append(P)
        out.extend(seen)
    return out


def verify_universal_property(report, Y, Z, T, f, g, test_spaces=None):
    """For each test space W: compatible continuous pairs (a, b) correspond to exactly one continuous X -> W.

    q: Y ⊔ Z -> X is surjective, so a compatible pair determines at most one
    set map h; the enumeration walks over all h with h∘qY and h∘qZ continuous
    (these are exactly the compatible pairs) and checks h itself is continuous.
    """
    X = report.X
    if test_spaces is None:
        test_spaces = small_t0_spaces(4)
    preY = {}
    for y in Y.points:
        preY.setdefault(report.qY[y], []).append(("Y", y))
    for z in Z.points:
        preY.setdefault(report.qZ[z], []).append(("Z", z))
    surjective = set(preY) == set(X.points)
    # generating constraints: monotonicity of h∘qY and h∘qZ
    cons = set()
    for a in Y.points:
        for b in Y.points:
            if a != b and Y.leq(a, b):
                cons.add((report.qY[a], report.qY[b]))
    for a in Z.points:
        for b in Z.points:
            if a != b and Z.leq(a, b):
                cons.add((report.qZ[a], report.qZ[b]))
    order = list(X.points)
    pos = {p: i for i, p in enumerate(order)}
    by_last = [[] for _ in order]
    for a, b in cons:
        by_last[max(pos[a], pos[b])].append((a, b))
    pairs_total = 0
    failures = []
    for W in test_spaces:
        wpts = W.points
        count = 0
        h = {}

        def rec(i):
            nonlocal count
            if i == len(order):
                count += 1
                if not is_continuous(h, X, W):
                    failures.append((W.to_text(), dict(h)))
                return
            p = order[i]
            for w in wpts:
                h[p] = w
                if all(W.leq(h[a], h[b]) for a, b in by_last[i]):
                    rec(i + 1)
            del h[p]

        rec(0)
        pairs_total += count
    return {
        "test_spaces": len(test_spaces),
        "compatible_pairs": pairs_total,
        "quotient_surjective": surjective,
        "failures": len(failures),
        "holds": surjective and not failures,
    }


def check_chain_lifting(report, Y, Z, T, f, g):
    """For y in Y below a point z of Z \\ T in X, some t in T has y ⪯ t ⪯ z.

    Only meaningful when f: T -> Y is an open embedding.  Returns the list of
    violating (y, z) pairs.
    """
    X = report.X
    gT = {g[t] for t in T.points}
    bad = []
    for z in Z.points:
        if z in gT:
            continue
        for y in Y.points:
            if X.leq(report.qZ[z], report.qY[y]):
                ok = any(Z.leq(z, g[t]) and Y.leq(f[t], y) for t in T.points)
                if not ok:
                    bad.append((y, z))
    return bad


def is_open_embedding(f, T, Y):
    img = [f[t] for t in T.points]
    if len(set(img)) != len(img) or not Y.is_open(Y.mask(img)):
        return False
    return all(T.leq(a, b) == Y.leq(f[a], f[b]) for a in T.points for b in T.points)


# --------------------------------------------------------------------------
# Points of zero-dimensional rings


@dataclass(frozen=True)
class SpecPoint:
    name: str
    ideal: tuple  # generators in the ring's polynomial ring
    residue_degree: int


def spec_points_zero_dim(R):
    """Discrete poset of maximal ideals of a finite-dimensional algebra R.

    Each variable's eliminant is factored (sympy ``factor_list``, over QQ or
    modulo p); every combination of irreducible factors that gives a proper
    ideal is a point.  When some factor has degree > 1 the points are still
    returned inside FactorizationIncomplete, each with the dimension of its
    residue ring.
    """
    dim = R.vector_dimension()
    if dim is None:
        raise NotZeroDimensional(f"{R.to_text()} is not finite-dimensional over its field")
    if dim == 0:
        return SpecPoset([]), []
    if R.nvars == 0:
        return SpecPoset(["(0)"]), [SpecPoint("(0)", (), 1)]
    factors = []
    incomplete = False
    for i in range(R.nvars):
        fs = _factor_eliminant(R, i)
        incomplete |= any(f.total_degree() > 1 for f in fs)
        factors.append(fs)
    points = []
    for combo in product(*factors):
        I = R.ideal_of(list(combo))
        if I.is_unit():
            continue
        Q = PresentedRing(R.field, R.names, list(R.relations) + list(combo))
        name = "(" + ", ".join(map(str, combo)) + ")"
        points.append(SpecPoint(name, tuple(I.groebner()), Q.vector_dimension()))
    P = SpecPoset([p.name for p in points])
    if incomplete:
        raise FactorizationIncomplete("an irreducible factor of degree > 1 appeared", points=(P, points))
    return P, points


def _factor_eliminant(R, i):
    """Monic irreducible factors of the generator of R-ideal ∩ k[x_i]."""
    others = [j for j in range(R.nvars) if j != i]
    elim = eliminate(R.ideal, others) if others else R.ideal
    uni = [g for g in elim.groebner() if g.support_vars() <= {i}]
    u = min(uni, key=lambda p: p.total_degree())
    x = sympy.Symbol(R.names[i])
    coeffs = [0] * (u.total_degree() + 1)
    for e, c in u.terms.items():
        coeffs[e[i]] = c
    expr = sum(_sym_coeff(c, R) * x ** k for k, c in enumerate(coeffs) if c)
    if R.field.char:
        poly = sympy.Poly(expr, x, modulus=R.field.char)
    else:
        poly = sympy.Poly(expr, x, domain="QQ")
    out = []
    for fac, _mult in poly.factor_list()[1]:
        lc = fac.LC()
        terms = {}
        for (k,), c in fac.terms():
            e = [0] * R.nvars
            e[i] = k
            if R.field.char:
                val = R.field(int(c) * pow(int(lc) % R.field.char, -1, R.field.char))
            else:
                q = sympy.Rational(c) / sympy.Rational(lc)
                val = Fraction(int(q.p), int(q.q))
            if val:
                terms[tuple(e)] = val
        out.append(MPoly(R.poly, terms))
    return out


def _sym_coeff(c, R):
    if R.field.char:
        return sympy.Integer(int(c))
    return sympy.Rational(c.numerator, c.denominator)
