"""Valuation rings with value group Z^r under the lexicographic order.

Elements are finite combinations of Laurent monomials in named generators,
each generator carrying a value vector.  The value of a monomial is the sum
of its generators' values; the value of a sum is the lex-minimum over terms.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .errors import NameClash, NotAValuation


def _add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _scale(n, a):
    return tuple(n * x for x in a)


def _is_nonneg(v):
    return all(x == 0 for x in v) or next(x for x in v if x) > 0


def _rank_of(vectors):
    """Rank over Q by fraction Gaussian elimination."""
    rows = [[Fraction(x) for x in v] for v in vectors]
    rank, col = 0, 0
    ncols = len(rows[0]) if rows else 0
    while rank < len(rows) and col < ncols:
        piv = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                f = rows[i][col] / rows[rank][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
        col += 1
    return rank


class LexValuationRing:
    """Elements of k(generators) with non-negative value in Z^r, lex order, first coordinate most significant."""

    def __init__(self, rank, generators, residue=()):
        self.rank = rank
        self.names = tuple(n for n, _ in generators)
        self.values = tuple(tuple(v) for _, v in generators)
        self.residue = tuple(residue)
        if len(set(self.names)) != len(self.names):
            raise NameClash(f"duplicate generator names {self.names}")
        for v in self.values:
            if len(v) != rank:
                raise ValueError(f"value vector {v} does not have length {rank}")
        if self.values and _rank_of(self.values) != len(self.values):
            raise ValueError("generator values are not independent; the value map would not be injective on monomials")

    def __repr__(self):
        gens = ", ".join(f"{n}: {v}" for n, v in zip(self.names, self.values))
        return f"LexValuationRing(rank={self.rank}, {{{gens}}})"

    @property
    def height(self):
        return self.rank

    def zero_value(self):
        return (0,) * self.rank

    def monomial(self, **exps):
        e = tuple(exps.get(n, 0) for n in self.names)
        return MonomialElement(self, {e: Fraction(1)})

    def element(self, terms):
        return MonomialElement(self, {tuple(e): Fraction(c) for e, c in terms.items() if c})

    def const(self, c):
        return MonomialElement(self, {(0,) * len(self.names): Fraction(c)} if c else {})

    def value_of(self, exp):
        v = self.zero_value()
        for a, gv in zip(exp, self.values):
            if a:
                v = _add(v, _scale(a, gv))
        return v

    def contains_value(self, v):
        return _is_nonneg(v)

    def primes(self):
        """The r + 1 primes P_0 = 0 ⊂ P_1 ⊂ ... ⊂ P_r = m as ValueIdeals."""
        out = [ValueIdeal(self, None)]
        for j in range(1, self.rank + 1):
            out.append(ValueIdeal(self, (0,) * (j - 1) + (1,)))
        return out

    def maximal_ideal(self):
        return self.primes()[-1]


@dataclass(frozen=True)
class MonomialElement:
    ring: LexValuationRing
    terms: dict

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __eq__(self, other):
        return isinstance(other, MonomialElement) and self.terms == other.terms

    def is_zero(self):
        return not self.terms

    def value(self):
        """Lex-minimum of the term values; None for zero (value infinity)."""
        if not self.terms:
            return None
        return min(self.ring.value_of(e) for e in self.terms)

    def in_ring(self):
        v = self.value()
        return v is None or _is_nonneg(v)

    def is_unit(self):
        v = self.value()
        return v is not None and not any(v)

    def __add__(self, other):
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return MonomialElement(self.ring, out)

    def __neg__(self):
        return MonomialElement(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = _add(e1, e2)
                s = out.get(e, 0) + c1 * c2
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return MonomialElement(self.ring, out)

    def __pow__(self, n):
        if len(self.terms) == 1:
            (e, c), = self.terms.items()
            return MonomialElement(self.ring, {_scale(n, e): c ** n})
        if n < 0:
            raise ValueError("only monomials have negative powers")
        out = self.ring.const(1)
        for _ in range(n):
            out = out * self
        return out

    def to_text(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, key=self.ring.value_of):
            c = self.terms[e]
            mono = "*".join(n if a == 1 else f"{n}^{a}" for n, a in zip(self.ring.names, e) if a)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts)

    __str__ = to_text


def dvr(name, residue=()):
    """A height-one ring with uniformizer ``name``."""
    return LexValuationRing(1, [(name, (1,))], residue)


def compose(lower, upper):
    """Rank r1 + r2 ring: the upper block of coordinates is the most significant."""
    clash = set(lower.names) & set(upper.names)
    if clash:
        raise NameClash(f"generator names {sorted(clash)} appear in both rings")
    r1, r2 = lower.rank, upper.rank
    gens = [(n, (0,) * r2 + v) for n, v in zip(lower.names, lower.values)]
    gens += [(n, v + (0,) * r1) for n, v in zip(upper.names, upper.values)]
    return LexValuationRing(r1 + r2, gens, lower.residue + upper.residue)


# --------------------------------------------------------------------------
# Ideals


@dataclass(frozen=True)
class ValueIdeal:
    """Values {v : v[:k] >= cut} with cut of length k (k = rank: principal); None means the zero ideal."""

    ring: LexValuationRing
    cut: tuple | None

    def __post_init__(self):
        if self.cut is None:
            return
        cut = tuple(self.cut)
        if not _is_nonneg(cut):
            raise ValueError(f"cut {cut} is not a non-negative value")
        if not any(cut):
            cut = (0,) * self.ring.rank  # the unit ideal
        object.__setattr__(self, "cut", cut)

    def contains_value(self, v):
        if v is None:
            return True
        if self.cut is None:
            return False
        k = len(self.cut)
        return _is_nonneg(v) and tuple(v[:k]) >= self.cut

    def contains(self, elem):
        return all(self.contains_value(self.ring.value_of(e)) for e in elem.terms) if elem.terms else True

    def subset_of(self, other):
        if self.cut is None:
            return True
        if other.cut is None:
            return False
        k, l = len(self.cut), len(other.cut)
        m = min(k, l)
        if self.cut[:m] != other.cut[:m]:
            return self.cut[:m] > other.cut[:m]
        if k >= l:
            return True
        # self is {v[:k] >= a}, other is finer: self contains values with v[k] arbitrarily small
        return False

    def is_unit(self):
        return self.cut is not None and not any(self.cut)

    def radical(self):
        """P_{j+1} where j is the first nonzero coordinate of the cut; R itself for the unit ideal."""
        if self.cut is None:
            return ValueIdeal(self.ring, None)
        nz = [i for i, x in enumerate(self.cut) if x]
        if not nz:
            return self
        return self.ring.primes()[nz[0] + 1]

    def is_prime(self):
        return self in self.ring.primes()

    def to_text(self):
        if self.cut is None:
            return "(0)"
        if len(self.cut) == self.ring.rank:
            return f"{{v >= {self.cut}}}"
        return f"{{v[:{len(self.cut)}] >= {self.cut}}}"


def union_of(ring, cuts):
    """Finite union of cut ideals; ideals of a valuation ring are totally ordered, so it is the largest."""
    ideals = [ValueIdeal(ring, c) for c in cuts]
    best = ideals[0]
    for I in ideals[1:]:
        if best.subset_of(I):
            best = I
    return best


@dataclass(frozen=True)
class FGVerdict:
    finitely_generated: bool
    generators: tuple = ()
    chain: tuple = ()

    def to_dict(self):
        if self.finitely_generated:
            return {"finitely_generated": True, "minimal_generator_values": [list(v) for v in self.generators]}
        return {"finitely_generated": False, "chain_values": [list(v) for v in self.chain]}


def value_ideal_fg_test(I, chain_length=5):
    """Finitely generated iff the value set has a minimum; otherwise a strictly increasing chain of principal subideals."""
    if I.cut is None:
        return FGVerdict(True, ())
    r, k = I.ring.rank, len(I.cut)
    if k == r:
        return FGVerdict(True, (I.cut,))
    chain = tuple(I.cut + (-n,) + (0,) * (r - k - 1) for n in range(1, chain_length + 1))
    return FGVerdict(False, (), chain)


def principal(ring, value):
    return ValueIdeal(ring, tuple(value))


# --------------------------------------------------------------------------
# Semivaluation lifting on the square k[x] -> k[x^±1] <- k[x^±1, y]


@dataclass(frozen=True)
class LaurentSquare:
    """A = k[x] + y·k[x^±1, y]; B = k[x], C = A[1/x] = k[x^±1, y], K = k[x^±1], conductor y·C.

    A morphism Spec R -> Spec A is recorded by the images of x and y in R,
    given as monomial elements (y may map to 0).
    """

    x: str = "x"
    y: str = "y"


@dataclass(frozen=True)
class LiftReport:
    lifts: bool
    unique: bool | None
    preimage_Y: tuple  # primes of R (as ValueIdeals) in f^-1(Y)
    preimage_T: tuple = ()
    witness: str = ""
    lift: dict | None = None

    def to_dict(self):
        return {
            "lifts": self.lifts,
            "unique": self.unique,
            "preimage_Y_size": len(self.preimage_Y),
            "preimage_Y": [I.to_text() for I in self.preimage_Y],
            "preimage_T": [I.to_text() for I in self.preimage_T],
            "witness": self.witness,
        }


def _check_assignment(R, fx, fy):
    for name, el in (("x", fx), ("y", fy)):
        if el.ring is not R:
            raise NotAValuation(f"image of {name} lives in a different ring")
        if len(el.terms) > 1:
            raise NotAValuation(f"image of {name} must be a monomial in this category")
    vx = fx.value()
    if vx is None or not _is_nonneg(vx):
        raise NotAValuation(f"x must map to a nonzero element of R, got value {vx}")
    vy = fy.value()
    if vy is None:
        return vx, None
    # x^m y lies in A for every integer m
    if any(vx):
        j = next(i for i, a in enumerate(vx) if a)
        if not (tuple(vy[:j]) > (0,) * j):
            raise NotAValuation(f"x^m*y has negative value for m << 0 (v(x) = {vx}, v(y) = {vy})")
    elif not _is_nonneg(vy):
        raise NotAValuation(f"y maps outside R (value {vy})")
    return vx, vy


def _preimage(R, ideal):
    """Primes of R containing ``ideal``."""
    return tuple(P for P in R.primes() if ideal.subset_of(P))


def conductor_extension(R, vx, vy):
    """The ideal f*(I)·R generated by the values of f*(x^m y), m ∈ Z."""
    if vy is None:
        return ValueIdeal(R, None)
    if not any(vx):
        return ValueIdeal(R, tuple(vy))
    j = next(i for i, a in enumerate(vx) if a)
    return ValueIdeal(R, tuple(vy[:j]))


def lift_semivaluation(square, R, fx, fy):
    """Lift f: Spec R -> X (x ↦ fx, y ↦ fy) through Z = Spec C, or refute.

    A lift exists iff f*x is a unit.  If it is not, the radical of f*(I)·R is a
    prime strictly inside (f*x) ⊆ m_R, so f^-1(Y) has at least two points.
    """
    vx, vy = _check_assignment(R, fx, fy)
    IR = conductor_extension(R, vx, vy)
    pre_Y = _preimage(R, IR)
    if any(vx):
        rad = IR.radical()
        m = R.maximal_ideal()
        witness = (
            f"f*x = {fx} has value {vx} > 0, so x is not inverted; "
            f"rad(f*I) = {rad.to_text()} is prime and strictly inside (f*x) = {principal(R, vx).to_text()}, "
            f"so f^-1(Y) contains {rad.to_text()} and {m.to_text()}"
        )
        assert rad != m and rad.subset_of(principal(R, vx))
        return LiftReport(False, None, pre_Y, (), witness)
    # x invertible: g sends x^-1 to the inverse monomial
    inv = fx ** -1
    yT = ValueIdeal(R, None) if vy is None else principal(R, vy)
    pre_T = _preimage(R, yT)
    lift = {"x": fx, "x^-1": inv, "y": fy}
    return LiftReport(True, True, pre_Y, pre_T, f"x^-1 -> {inv}", lift)


def enumerate_lifts(R, fx, fy, bound=3):
    """Brute force: all monomial images w of x^-1 with exponents in [-bound, bound] making g a lift of f."""
    out = []
    ngen = len(R.names)
    for exps in product(range(-bound, bound + 1), repeat=ngen):
        for c in (Fraction(1), Fraction(-1), Fraction(1, 2), Fraction(2)):
            w = MonomialElement(R, {tuple(exps): c})
            if not w.in_ring():
                continue
            if (fx * w) == R.const(1):
                out.append(w)
    return out


def lemma_hypothesis(R, fx, fy):
    """R has non-zero height and f^-1(Y) is exactly the closed point."""
    vx, vy = _check_assignment(R, fx, fy)
    pre = _preimage(R, conductor_extension(R, vx, vy))
    return R.rank > 0 and pre == (R.maximal_ideal(),)


def lift_on_product(square, factors):
    """Finite product of valuation rings of positive height with f^-1(Y) among the closed points.

    ``factors`` is a list of (R, fx, fy).  Returns one LiftReport per factor.
    """
    out = []
    for R, fx, fy in factors:
        if R.rank == 0:
            raise ValueError("isolated point: a factor of height zero")
        vx, vy = _check_assignment(R, fx, fy)
        pre = _preimage(R, conductor_extension(R, vx, vy))
        if any(P != R.maximal_ideal() for P in pre):
            raise ValueError("preimage of Y is not contained in the closed points")
        out.append(lift_semivaluation(square, R, fx, fy))
    return out


# --------------------------------------------------------------------------
# The height-two composition and its conductor chain


@dataclass(frozen=True)
class ChainSuiteReport:
    n: int
    chain: tuple  # (n, witness text, witness value, in I_{n+1}, not in I_n)
    components: dict
    components_independent: bool
    pushforward: str
    unit_injective: bool
    kernel_witness: str
    kernel_witness_value: tuple
    essential_image: bool
    conductor_fg: dict
    notes: tuple

    def to_dict(self):
        return {
            "n": self.n,
            "chain": [
                {"n": m, "witness": w, "value": list(v), "in_I_next": a, "in_I_n": b}
                for m, w, v, a, b in self.chain
            ],
            "components": self.components,
            "components_independent_of_n": self.components_independent,
            "pushforward_of_pullback": self.pushforward,
            "unit_injective": self.unit_injective,
            "unit_kernel_witness": self.kernel_witness,
            "unit_kernel_witness_value": list(self.kernel_witness_value),
            "in_essential_image": self.essential_image,
            "conductor": self.conductor_fg,
            "notes": list(self.notes),
        }


def height_two():
    """A = B ×_K C with B = k[x]_(x), C = k(x)[y]_(y): v(x) = (0,1), v(y) = (1,0)."""
    return compose(dvr("x"), dvr("y"))


def _components(n):
    """Base change of A/I_n to B, C, K computed on value sets.

    I_n·B: the image of I_n ⊆ I in B = A/I is 0.  I_n·C = x^-n·y·C = y·C, since x
    is a unit in C.  I_n·K = 0 as y maps to 0.
    """
    A = height_two()
    In = principal(A, (1, -n))
    I = ValueIdeal(A, (1,))
    assert In.subset_of(I)
    in_B = "0" if In.subset_of(I) else "?"
    # in C the first coordinate is the y-adic value; x-adic value is forgotten
    in_C = "y*C"
    return {"K": "K/(0) = K", "B": f"B/({in_B}) = B", "C": f"C/({in_C}) = K"}


def conductor_chain_suite(n):
    """Report on A/I_n for the height-two ring A, I_n = x^-n·y·A, I = ∪ I_n = y·C."""
    if n < 1:
        raise ValueError("n must be positive")
    A = height_two()
    I = ValueIdeal(A, (1,))
    chain = []
    for m in range(1, n + 1):
        Im, Inext = principal(A, (1, -m)), principal(A, (1, -(m + 1)))
        w = A.monomial(x=-(m + 1), y=1)
        v = w.value()
        assert Im.subset_of(Inext) and not Inext.subset_of(Im)
        chain.append((m, w.to_text(), v, Inext.contains(w), Im.contains(w)))
    comps = {m: _components(m) for m in range(1, n + 1)}
    independent = len({tuple(sorted(c.items())) for c in comps.values()}) == 1
    In = principal(A, (1, -n))
    w = A.monomial(x=-(n + 1), y=1)
    # unit A/I_n -> φ_*φ*(A/I_n) = B ×_K K = B = A/I; its kernel is I/I_n
    unit_injective = I.subset_of(In)
    witness_in_kernel = I.contains(w) and not In.contains(w)
    assert witness_in_kernel and not unit_injective
    # cyclic modules A/I and A/I_n have annihilators I and I_n; these differ, so no isomorphism,
    # and with the counit isomorphism A/I_n ≅ φ_*(M) would force A/I_n ≅ φ_*φ*(A/I_n) = A/I
    in_image = I == In
    notes = (
        "chain asserted as strictly increasing I_n ⊊ I_{n+1} (a reading choice; see the decisions ledger)",
        "A/I is not finitely presented since I is not finitely generated",
    )
    return ChainSuiteReport(
        n,
        tuple(chain),
        _components(n),
        independent,
        "A' = A/I = B",
        unit_injective,
        f"{w.to_text()} + I_{n}",
        w.value(),
        in_image,
        value_ideal_fg_test(I).to_dict(),
        notes,
    )
