"""Finitely presented modules and Milnor patching over a conductor square."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .errors import NoPresentation, NotConstantRank, NotIsomorphism
from .groebner import (
    IdealHandle,
    ModuleOrder,
    buchberger,
    dict_to_vec,
    lift_to_generators,
    module_groebner,
    reduce_by,
    syzygy_matrix,
    vec_to_dict,
)
from .poly import GREVLEX, MPoly
from .rings import GraphIdeal, validate_hom

_POT = ModuleOrder("pot")


class PresentedModule:
    """R^n / (relation columns).  Elements are lists of n ring elements."""

    def __init__(self, ring, ngens, relations=()):
        self.ring = ring
        self.ngens = ngens
        rels = []
        for col in relations:
            col = [ring(p) for p in col]
            if len(col) != ngens:
                raise ValueError("relation length does not match the number of generators")
            if any(col):
                rels.append(tuple(col))
        self.relations = tuple(rels)
        self._basis = None

    def __repr__(self):
        return f"PresentedModule({self.ring.to_text()}, {self.ngens} gens, {len(self.relations)} relations)"

    @classmethod
    def free(cls, ring, n):
        return cls(ring, n)

    @classmethod
    def cyclic(cls, ring, ideal_gens):
        """R / (ideal_gens)."""
        return cls(ring, 1, [[g] for g in ideal_gens])

    def zero_vector(self):
        return [self.ring.zero()] * self.ngens

    def basis_vector(self, i):
        v = self.zero_vector()
        v[i] = self.ring.one()
        return v

    def _gb(self):
        if self._basis is None:
            R = self.ring
            vecs = [list(c) for c in self.relations]
            for r in R.relations:
                for i in range(self.ngens):
                    v = [R.poly.zero()] * self.ngens
                    v[i] = r
                    vecs.append(v)
            self._basis = module_groebner(vecs, R.poly, _POT) if vecs else []
        return self._basis

    def nf(self, v):
        v = [self.ring.poly(p) for p in v]
        if not self._gb():
            return [self.ring.nf(p) for p in v]
        r = reduce_by(vec_to_dict(v), self._gb(), _POT.key, self.ring.field)
        return dict_to_vec(r, self.ring.poly, self.ngens)

    def is_zero(self, v):
        return not any(self.nf(v))

    def is_zero_module(self):
        return all(self.is_zero(self.basis_vector(i)) for i in range(self.ngens))

    def matrix(self):
        """Presentation matrix as rows (ngens x nrelations)."""
        return [[c[i] for c in self.relations] for i in range(self.ngens)]

    def base_change(self, h):
        """M ⊗_R S along h: R -> S."""
        if h.source.poly != self.ring.poly:
            raise ValueError("base change along a map from a different ring")
        return PresentedModule(h.target, self.ngens, [[h(p) for p in c] for c in self.relations])

    def to_text(self):
        cols = "; ".join("(" + ", ".join(map(str, c)) + ")" for c in self.relations)
        return f"{self.ring.to_text()}^{self.ngens} / [{cols}]"


def _combine(R, cols, coeffs, n):
    out = [R.poly.zero()] * n
    for col, a in zip(cols, coeffs):
        if a:
            for i in range(n):
                out[i] = out[i] + a * col[i]
    return [R.nf(p) for p in out]


def express(target, gens, module):
    """Coefficients a with Σ a_s gens[s] = target in ``module``, or None."""
    R = module.ring
    n = module.ngens
    gens = [list(g) for g in gens]
    cols = gens + [list(c) for c in module.relations]
    if not cols:
        return [] if module.is_zero(target) else None
    coeffs = lift_to_generators(list(target), cols, R.poly, R.relations)
    if coeffs is None:
        return None
    return [R.nf(a) for a in coeffs[: len(gens)]]


@dataclass(frozen=True)
class ModuleHom:
    """Images of the source generators, as target vectors."""

    source: PresentedModule
    target: PresentedModule
    columns: tuple

    def __call__(self, v):
        return self.target.nf(_combine(self.target.ring, self.columns, v, self.target.ngens))

    def well_defined(self):
        return all(self.target.is_zero(self(c)) for c in self.source.relations)

    def compose(self, inner):
        return ModuleHom(inner.source, self.target, tuple(tuple(self(c)) for c in inner.columns))


def module_hom(source, target, columns):
    cols = tuple(tuple(target.nf(c)) for c in columns)
    h = ModuleHom(source, target, cols)
    if len(cols) != source.ngens:
        raise ValueError("need one image per source generator")
    if not h.well_defined():
        raise ValueError("module map does not respect the source relations")
    return h


@dataclass(frozen=True)
class ModuleIso:
    forward: ModuleHom
    backward: ModuleHom

    def verify(self):
        M, N = self.forward.source, self.forward.target
        if not (self.forward.well_defined() and self.backward.well_defined()):
            return False
        for i in range(M.ngens):
            e = M.basis_vector(i)
            if not M.is_zero([a - b for a, b in zip(self.backward(self.forward(e)), e)]):
                return False
        for j in range(N.ngens):
            e = N.basis_vector(j)
            if not N.is_zero([a - b for a, b in zip(self.forward(self.backward(e)), e)]):
                return False
        return True


def certify_module_iso(h):
    """ModuleIso for h, or NotIsomorphism with a cokernel or kernel witness."""
    M, N = h.source, h.target
    R = M.ring
    back = []
    for j in range(N.ngens):
        e = N.basis_vector(j)
        a = express(e, h.columns, N)
        if a is None:
            raise NotIsomorphism("not surjective", witness=("cokernel", e))
        back.append(a)
    for v in kernel_vectors(h):
        if not M.is_zero(v):
            raise NotIsomorphism("not injective", witness=("kernel", M.nf(v)))
    inv = ModuleHom(N, M, tuple(tuple(M.nf(c)) for c in back))
    iso = ModuleIso(h, inv)
    if not iso.verify():
        raise NotIsomorphism("composites are not the identity")
    return iso


def kernel_vectors(h):
    """Generators (source vectors) of the preimage of the target relations."""
    M, N = h.source, h.target
    R = M.ring
    if not M.ngens:
        return []
    if not N.ngens:
        return [M.basis_vector(i) for i in range(M.ngens)]
    cols = [list(c) for c in h.columns] + [list(c) for c in N.relations]
    mat = [[cols[k][i] for k in range(len(cols))] for i in range(N.ngens)]
    syz = syzygy_matrix(mat, R.relations)
    out = []
    nsyz = len(syz[0]) if syz else 0
    for s in range(nsyz):
        v = [R.nf(syz[i][s]) for i in range(M.ngens)]
        if any(v):
            out.append(v)
    return out


def submodule_presentation(gens, module):
    """Presentation R^s / rel of the submodule generated by ``gens`` inside ``module``."""
    R = module.ring
    s = len(gens)
    if s == 0:
        return PresentedModule(R, 0)
    cols = [list(g) for g in gens] + [list(c) for c in module.relations]
    if not module.ngens:
        return PresentedModule(R, s, [[R.one() if i == j else R.zero() for i in range(s)] for j in range(s)])
    mat = [[cols[k][i] for k in range(len(cols))] for i in range(module.ngens)]
    syz = syzygy_matrix(mat, R.relations)
    rels = []
    nsyz = len(syz[0]) if syz else 0
    for t in range(nsyz):
        v = [R.nf(syz[i][t]) for i in range(s)]
        if any(v):
            rels.append(v)
    return PresentedModule(R, s, rels)


# --------------------------------------------------------------------------
# Fitting ideals


def _det(rows, R):
    n = len(rows)
    if n == 0:
        return R.one()
    if n == 1:
        return rows[0][0]
    total = R.poly.zero()
    for j in range(n):
        a = rows[0][j]
        if not a:
            continue
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = a * _det(minor, R)
        total = total + term if j % 2 == 0 else total - term
    return R.nf(total)


def fitting_ideal(M, j):
    """Fitt_j(M): ideal of (n - j)-minors of the presentation matrix (as polynomial-ring generators)."""
    R = M.ring
    size = M.ngens - j
    if size <= 0:
        return [R.one()]
    mat = M.matrix()
    ncols = len(M.relations)
    if size > ncols:
        return []
    gens = []
    for rows in combinations(range(M.ngens), size):
        for cols in combinations(range(ncols), size):
            d = _det([[mat[r][c] for c in cols] for r in rows], R)
            if d:
                gens.append(d)
    return gens


@dataclass(frozen=True)
class FlatVerdict:
    projective: bool
    rank: int | None
    failing_index: int | None = None
    failing_ideal: tuple = ()

    def to_dict(self):
        if self.projective:
            return {"verdict": "projective", "rank": self.rank}
        return {
            "verdict": "not flat+fp",
            "fitting_index": self.failing_index,
            "fitting_ideal": [str(g) for g in self.failing_ideal],
        }


def flat_fp_test(M):
    """Projective of constant rank r iff Fitt_{r-1} = 0 and Fitt_r = (1).

    Raises NotConstantRank when M is projective with locally varying rank
    (every Fitting ideal idempotent, but no single r works).
    """
    R = M.ring
    if R.is_zero_ring():
        return FlatVerdict(True, 0)
    ideals = [R.ideal_of(fitting_ideal(M, j)) for j in range(M.ngens + 1)]
    r = next(j for j, I in enumerate(ideals) if I.is_unit())
    if r == 0 or ideals[r - 1].is_zero() or _zero_mod(R, ideals[r - 1]):
        return FlatVerdict(True, r)
    bad = ideals[r - 1]
    gens = tuple(g for g in (R.nf(g) for g in bad.gens[: len(bad.gens) - len(R.relations)]) if g)
    if all(_idempotent(R, I) for I in ideals):
        raise NotConstantRank(f"Fitting ideal {r - 1} is a proper nonzero idempotent ideal", ideal=gens)
    return FlatVerdict(False, None, r - 1, gens)


def _zero_mod(R, I):
    return all(not R.nf(g) for g in I.gens)


def _idempotent(R, I):
    gens = [g for g in I.gens if R.nf(g)]
    if not gens:
        return True
    sq = R.ideal_of([a * b for a in gens for b in gens])
    return all(sq.contains(g) for g in gens)


# --------------------------------------------------------------------------
# Restriction of scalars along a module-finite map


class FiniteAlgebra:
    """S as a module over A via a module-finite h: A -> S.

    ``generators`` are monomials m_l of S with S = Σ A·m_l, ``coords`` writes an
    element of S on them, and ``syzygies`` present S as an A-module.
    """

    def __init__(self, h):
        self.h = h
        A, S = h.source, h.target
        self.A, self.S = A, S
        self.graph = GraphIdeal(S, list(h.images), source_relations=A.relations, znames=_znames(A, S))
        gens = self.graph.finite_module_generators()
        if gens is None:
            raise NoPresentation(f"{S.to_text()} is not module-finite over {A.to_text()}")
        self.generators = gens
        self.syzygies = self._syzygies()

    def _to_A(self, q):
        return self.A.nf(MPoly(self.A.poly, q.terms))

    def coords(self, s):
        c = self.graph.module_coordinates(s, self.generators)
        return [self._to_A(q) for q in c]

    def coords_vec(self, v):
        out = []
        for p in v:
            out.extend(self.coords(p))
        return out

    def _syzygies(self):
        """A-relations among the m_l, by module elimination of the S-variables."""
        g = self.graph
        n, big = g.n, g.big
        r = len(self.generators)
        if r == 0:
            return []
        xkey = GREVLEX.key

        def key(m):
            pos, e = m
            return (pos == 0,) + xkey(e[:n]) + (-pos,) + xkey(e[n:])

        vecs = []
        for l, m in enumerate(self.generators):
            d = {(0, e + (0,) * (big.nvars - n)): c for e, c in m.terms.items()}
            d[(l + 1, (0,) * big.nvars)] = self.S.field.one
            vecs.append(d)
        for p in g.basis:
            vecs.append({(0, e): c for e, c in p.terms.items()})
        basis = buchberger(vecs, key, self.S.field, is_ideal=False)
        out = []
        for d in basis:
            lm = max(d, key=key)
            if lm[0] == 0 or any(lm[1][:n]):
                continue
            vec = [dict() for _ in range(r)]
            for (pos, e), c in d.items():
                vec[pos - 1][e[n:]] = c
            v = [self.A.nf(MPoly(self.A.poly, t)) for t in vec]
            if any(v):
                out.append(v)
        return out

    def restrict(self, M):
        """M (an S-module) as an A-module, generators m_l·e_i at index i*r + l."""
        r, n = len(self.generators), M.ngens
        A = self.A
        rels = []
        for i in range(n):
            for syz in self.syzygies:
                v = [A.zero()] * (r * n)
                v[i * r:(i + 1) * r] = syz
                rels.append(v)
        for col in M.relations:
            for m in self.generators:
                rels.append(self.coords_vec([self.S.nf(m * p) for p in col]))
        return PresentedModule(A, r * n, rels)

    def element(self, M, index):
        """The S-vector behind restricted generator ``index``."""
        r = len(self.generators)
        i, l = divmod(index, r)
        v = M.zero_vector()
        v[i] = self.generators[l]
        return v

    def from_coords(self, M, coords):
        """Inverse of coords_vec: Σ h(a) m_l e_i."""
        r = len(self.generators)
        out = M.zero_vector()
        for idx, a in enumerate(coords):
            if a:
                i, l = divmod(idx, r)
                out[i] = out[i] + self.h(a) * self.generators[l]
        return [self.S.nf(p) for p in out]


def _znames(A, S):
    taken = set(S.names)
    if not (set(A.names) & taken):
        return list(A.names)
    return [f"{n}_" for n in A.names] if not ({f"{n}_" for n in A.names} & taken) else None


# --------------------------------------------------------------------------
# Patched modules


@dataclass(frozen=True)
class PatchedModule:
    """(M_T; M_Y, M_Z) with alpha: M_Y ⊗ K -> M_T and beta: M_Z ⊗ K -> M_T, inverses stored."""

    square: object
    MY: PresentedModule
    MZ: PresentedModule
    MT: PresentedModule
    alpha: tuple
    alpha_inv: tuple
    beta: tuple
    beta_inv: tuple
    name: str = ""

    def alpha_iso(self):
        src = self.MY.base_change(self.square.beta)
        return ModuleIso(ModuleHom(src, self.MT, self.alpha), ModuleHom(self.MT, src, self.alpha_inv))

    def beta_iso(self):
        src = self.MZ.base_change(self.square.pi)
        return ModuleIso(ModuleHom(src, self.MT, self.beta), ModuleHom(self.MT, src, self.beta_inv))

    def verify(self):
        return self.alpha_iso().verify() and self.beta_iso().verify()


def patch(square, MY, MZ, MT, alpha, alpha_inv, beta, beta_inv, name=""):
    """Build and verify a patched module; raises NotIsomorphism if a gluing map is not invertible."""
    K = square.K
    a = tuple(tuple(MT.nf([K(p) for p in c])) for c in alpha)
    b = tuple(tuple(MT.nf([K(p) for p in c])) for c in beta)
    fY = MY.base_change(square.beta)
    fZ = MZ.base_change(square.pi)
    ai = tuple(tuple(fY.nf([K(p) for p in c])) for c in alpha_inv)
    bi = tuple(tuple(fZ.nf([K(p) for p in c])) for c in beta_inv)
    M = PatchedModule(square, MY, MZ, MT, a, ai, b, bi, name)
    if not M.alpha_iso().verify():
        raise NotIsomorphism("alpha is not an isomorphism with the stored inverse")
    if not M.beta_iso().verify():
        raise NotIsomorphism("beta is not an isomorphism with the stored inverse")
    return M


def _identity_cols(R, n):
    return tuple(tuple(R.one() if i == j else R.zero() for i in range(n)) for j in range(n))


def pullback(square, presentation, M):
    """(M ⊗ B, M ⊗ C, M ⊗ K) with identity gluings.

    ``presentation`` may be None for a free module over the intrinsic ring,
    given as an int rank.
    """
    if presentation is None:
        if not isinstance(M, int):
            raise NoPresentation("only free modules can be pulled back from the intrinsic ring")
        n = M
        MY, MZ, MT = (PresentedModule(R, n) for R in (square.B, square.C, square.K))
    else:
        MY = M.base_change(presentation.to_B)
        MZ = M.base_change(presentation.to_C)
        MT = MY.base_change(square.beta)
        n = M.ngens
    ident = _identity_cols(square.K, n)
    return PatchedModule(square, MY, MZ, MT, ident, ident, ident, ident)


@dataclass
class MatchedPairModule:
    """φ_*(M) = M_Y ×_{M_T} M_Z; optionally with a presentation over a presentation of A."""

    patched: PatchedModule
    presentation: object = None  # PushoutPresentation
    module: PresentedModule | None = None
    pairs: list | None = None  # generator i <-> (y_i, z_i)
    _restr: tuple | None = None

    def is_matched(self, y, z):
        P = self.patched
        sq = P.square
        ay = ModuleHom(P.MY.base_change(sq.beta), P.MT, P.alpha)([sq.beta(p) for p in y])
        bz = ModuleHom(P.MZ.base_change(sq.pi), P.MT, P.beta)([sq.pi(p) for p in z])
        return P.MT.is_zero([a - b for a, b in zip(ay, bz)])

    def pair_of(self, coeffs):
        """(y, z) for the A-combination Σ coeffs_s · generator_s."""
        pres = self.presentation
        P = self.patched
        y = P.MY.zero_vector()
        z = P.MZ.zero_vector()
        for a, (ys, zs) in zip(coeffs, self.pairs):
            b, c = pres.to_B(a), pres.to_C(a)
            y = [p + b * q for p, q in zip(y, ys)]
            z = [p + c * q for p, q in zip(z, zs)]
        return P.MY.nf(y), P.MZ.nf(z)


def pushforward(square, M, presentation=None, minimize=True):
    """Matched pairs M_Y ×_{M_T} M_Z, presented over ``presentation`` when one is given."""
    out = MatchedPairModule(M, presentation)
    if presentation is None:
        return out
    A = presentation.A
    to_K = validate_hom(A, square.K, [square.beta(b) for b in presentation.to_B.images])
    fY, fZ, fT = FiniteAlgebra(presentation.to_B), FiniteAlgebra(presentation.to_C), FiniteAlgebra(to_K)
    RY, RZ, RT = fY.restrict(M.MY), fZ.restrict(M.MZ), fT.restrict(M.MT)
    alpha = ModuleHom(M.MY.base_change(square.beta), M.MT, M.alpha)
    beta = ModuleHom(M.MZ.base_change(square.pi), M.MT, M.beta)
    cols = []
    for idx in range(RY.ngens):
        y = fY.element(M.MY, idx)
        cols.append(fT.coords_vec(alpha([square.beta(p) for p in y])))
    for idx in range(RZ.ngens):
        z = fZ.element(M.MZ, idx)
        cols.append(fT.coords_vec([-p for p in beta([square.pi(q) for q in z])]))
    total = RY.ngens + RZ.ngens
    F = ModuleHom(PresentedModule(A, total), RT, tuple(tuple(c) for c in cols))
    ker = kernel_vectors(F)
    ambient = PresentedModule(A, total, [list(c) + [A.zero()] * RZ.ngens for c in RY.relations]
                              + [[A.zero()] * RY.ngens + list(c) for c in RZ.relations])
    gens = [v for v in ker if not ambient.is_zero(v)]
    if minimize:
        gens = _minimize(gens, ambient)
    module = submodule_presentation(gens, ambient)
    pairs = []
    for v in gens:
        y = fY.from_coords(M.MY, v[: RY.ngens])
        z = fZ.from_coords(M.MZ, v[RY.ngens:])
        pairs.append((M.MY.nf(y), M.MZ.nf(z)))
    out.module = module
    out.pairs = pairs
    out._restr = (fY, fZ, ambient, gens)
    for y, z in pairs:
        assert out.is_matched(y, z)
    return out


def _minimize(gens, ambient):
    kept = list(gens)
    i = len(kept) - 1
    while i >= 0:
        others = kept[:i] + kept[i + 1:]
        if express(kept[i], others, ambient) is not None:
            kept.pop(i)
        i -= 1
    return kept


# --------------------------------------------------------------------------
# Adjunctions


@dataclass(frozen=True)
class AdjunctionReport:
    direction: str
    iso: bool
    witness: object = None
    components: tuple = ()

    def to_dict(self):
        w = self.witness
        if w is not None:
            kind, vec = w
            w = [kind, [str(p) for p in vec]] if isinstance(vec, (list, tuple)) else [kind, str(vec)]
        return {"direction": self.direction, "isomorphism": self.iso, "witness": w}


def counit_check(square, presentation, M):
    """φ*φ_*(M) -> M, certified componentwise over B and C."""
    pf = pushforward(square, M, presentation)
    N = pf.module
    comps = []
    for side, to, target, idx in (("Y", presentation.to_B, M.MY, 0), ("Z", presentation.to_C, M.MZ, 1)):
        src = N.base_change(to)
        h = ModuleHom(src, target, tuple(tuple(target.nf(p[idx])) for p in pf.pairs))
        try:
            comps.append(certify_module_iso(h))
        except NotIsomorphism as exc:
            return AdjunctionReport("counit", False, exc.witness)
    return AdjunctionReport("counit", True, None, tuple(comps))


def unit_check(square, presentation, M):
    """M -> φ_*φ*(M) for an A-module M over the presentation."""
    P = pullback(square, presentation, M)
    pf = pushforward(square, P, presentation)
    fY, fZ, ambient, gens = pf._restr
    A = presentation.A
    cols = []
    for i in range(M.ngens):
        y = P.MY.basis_vector(i)
        z = P.MZ.basis_vector(i)
        v = fY.coords_vec(y) + fZ.coords_vec(z)
        a = express(v, gens, ambient)
        if a is None:
            return AdjunctionReport("unit", False, ("not-matched", v)), pf
        cols.append(a)
    h = ModuleHom(M, pf.module, tuple(tuple(pf.module.nf(c)) for c in cols))
    try:
        iso = certify_module_iso(h)
    except NotIsomorphism as exc:
        return AdjunctionReport("unit", False, exc.witness), pf
    return AdjunctionReport("unit", True, None, (iso,)), pf


def adjunction_check(square, presentation, obj, direction):
    if direction == "counit":
        return counit_check(square, presentation, obj)
    if direction == "unit":
        return unit_check(square, presentation, obj)[0]
    raise ValueError(f"unknown direction {direction!r}")


# --------------------------------------------------------------------------
# Freeness of rank-one patched modules


@dataclass(frozen=True)
class FreenessVerdict:
    free: bool | None
    method: str
    detail: str = ""

    def to_dict(self):
        return {"free": self.free, "method": self.method, "detail": self.detail}


def rank_one_freeness(M, search_degree=2):
    """Is the rank-one patched module (K; B, C) with gluings (alpha, beta) free over A?

    φ_*(M) is free iff some generator u_Y of M_Y and u_Z of M_Z are matched,
    i.e. beta(u_B)·alpha = pi(u_C)·beta for units u_B of B, u_C of C.  When B and
    C are polynomial rings their units are the nonzero constants, so freeness
    holds iff alpha·beta^-1 is a nonzero constant of K.  Otherwise units of B
    and C are searched among elements of degree <= ``search_degree`` and a
    negative answer is reported as undecided.
    """
    sq = M.square
    if not (M.MY.ngens == M.MZ.ngens == M.MT.ngens == 1) or M.MY.relations or M.MZ.relations or M.MT.relations:
        raise ValueError("rank_one_freeness needs the free rank-one components (B, C, K)")
    K = sq.K
    ratio = K.nf(M.alpha[0][0] * M.beta_inv[0][0])
    if not sq.B.relations and not sq.C.relations:
        const = ratio.is_constant() and bool(ratio)
        return FreenessVerdict(const, "units-are-constants", f"alpha/beta = {ratio}")
    from .rings import _exponents

    def units(R):
        out = []
        for d in range(search_degree + 1):
            for e in _exponents(R.nvars, d):
                m = R.nf(R.poly.monomial(e))
                if m and R.is_unit(m):
                    out.append(m)
        return out

    for ub in units(sq.B):
        for uc in units(sq.C):
            x = K.nf(sq.beta(ub) * ratio - sq.pi(uc))
            if not x:
                return FreenessVerdict(True, "unit-search", f"u_B = {ub}, u_C = {uc}")
    return FreenessVerdict(None, "unit-search", f"no matched unit pair up to degree {search_degree}")
