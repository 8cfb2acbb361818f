"""Exact multivariate polynomials over QQ or a prime field.

Polynomials are immutable maps from exponent tuples to nonzero coefficients.
Term order only matters for printing and for Groebner computations, so it is
passed explicitly wherever it is needed.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache

from .errors import MixedContext, ParseError


class QQField:
    char = 0
    zero = Fraction(0)
    one = Fraction(1)

    def __call__(self, value):
        if isinstance(value, Fraction):
            return value
        return Fraction(value)

    def reduce(self, c):
        return c

    def inv(self, c):
        if not c:
            raise ZeroDivisionError("inverse of zero")
        return 1 / Fraction(c)

    def text(self, c):
        return str(c)

    def __eq__(self, other):
        return isinstance(other, QQField)

    def __hash__(self):
        return hash("QQ")

    def __repr__(self):
        return "QQ"


class PrimeField:
    def __init__(self, p):
        p = int(p)
        if p < 2 or p >= 2**31 or any(p % d == 0 for d in range(2, int(p**0.5) + 1)):
            raise ValueError(f"{p} is not a prime below 2^31")
        self.char = p
        self.zero = 0
        self.one = 1

    def __call__(self, value):
        if isinstance(value, Fraction):
            return value.numerator * pow(value.denominator, -1, self.char) % self.char
        return int(value) % self.char

    def reduce(self, c):
        return c % self.char

    def inv(self, c):
        if c % self.char == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(c, -1, self.char)

    def text(self, c):
        return str(c)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.char == self.char

    def __hash__(self):
        return hash(("Fp", self.char))

    def __repr__(self):
        return f"Fp:{self.char}"


QQ = QQField()


def GF(p):
    return PrimeField(p)


def field_from_tag(tag):
    """Parse ``QQ`` or ``Fp:<p>`` (also ``GF(p)``)."""
    tag = tag.strip()
    if tag in ("QQ", "Q"):
        return QQ
    m = re.fullmatch(r"(?:Fp:|GF\(|F_?)(\d+)\)?", tag)
    if m:
        return PrimeField(int(m.group(1)))
    raise ValueError(f"unknown field tag {tag!r}")


# --------------------------------------------------------------------------
# Monomial orders


class MonomialOrder:
    """grevlex, lex, or a block order.

    A block order is given as a tuple of index tuples; each block is compared
    by grevlex and earlier blocks dominate.  ``key(exp)`` returns a flat tuple
    of ints, larger key meaning larger monomial.
    """

    __slots__ = ("kind", "blocks", "key")

    def __init__(self, kind="grevlex", blocks=None):
        if kind not in ("grevlex", "lex", "block"):
            raise ValueError(f"unknown order {kind!r}")
        self.kind = kind
        self.blocks = tuple(tuple(b) for b in blocks) if blocks is not None else None
        if kind == "block" and not self.blocks:
            raise ValueError("block order needs blocks")
        self.key = _make_key(kind, self.blocks)

    def __eq__(self, other):
        return isinstance(other, MonomialOrder) and (self.kind, self.blocks) == (other.kind, other.blocks)

    def __hash__(self):
        return hash((self.kind, self.blocks))

    def __repr__(self):
        if self.kind == "block":
            return f"block{self.blocks}"
        return self.kind


def _grevlex_key(exp):
    return (sum(exp),) + tuple(-e for e in reversed(exp))


def _make_key(kind, blocks):
    if kind == "lex":
        return tuple
    if kind == "grevlex":
        return _grevlex_key

    def key(exp):
        out = ()
        for idx in blocks:
            out += _grevlex_key([exp[i] for i in idx])
        return out

    return key


GREVLEX = MonomialOrder("grevlex")
LEX = MonomialOrder("lex")


def block_order(*sizes):
    """Contiguous blocks of the given sizes, first block dominating."""
    blocks, start = [], 0
    for size in sizes:
        blocks.append(tuple(range(start, start + size)))
        start += size
    return MonomialOrder("block", blocks)


def elimination_order(nvars, drop):
    """Block order with the variables in ``drop`` (indices) dominating the rest."""
    drop = tuple(sorted(drop))
    rest = tuple(i for i in range(nvars) if i not in set(drop))
    blocks = [b for b in (drop, rest) if b]
    return MonomialOrder("block", blocks) if len(blocks) > 1 else GREVLEX


# --------------------------------------------------------------------------
# Rings and polynomials


class PolyRing:
    """k[x_1, ..., x_n] with named variables."""

    __slots__ = ("field", "names", "nvars", "_index", "_hash")

    def __init__(self, field, names):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        self.field = field
        self.names = names
        self.nvars = len(names)
        self._index = {n: i for i, n in enumerate(names)}
        self._hash = hash((field, names))

    def __eq__(self, other):
        return isinstance(other, PolyRing) and self.field == other.field and self.names == other.names

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"{self.field!r}[{','.join(self.names)}]"

    def index(self, name):
        return self._index[name]

    def zero(self):
        return MPoly(self, {})

    def one(self):
        return self.const(1)

    def const(self, c):
        c = self.field(c)
        return MPoly(self, {(0,) * self.nvars: c} if c else {})

    def gen(self, name_or_index):
        i = name_or_index if isinstance(name_or_index, int) else self._index[name_or_index]
        exp = [0] * self.nvars
        exp[i] = 1
        return MPoly(self, {tuple(exp): self.field.one})

    def gens(self):
        return [self.gen(i) for i in range(self.nvars)]

    def monomial(self, exp, c=1):
        c = self.field(c)
        return MPoly(self, {tuple(exp): c} if c else {})

    def __call__(self, value):
        """Coerce an int, Fraction, string, or same-ring polynomial."""
        if isinstance(value, MPoly):
            if value.ring != self:
                raise MixedContext(f"{value.ring} vs {self}")
            return value
        if isinstance(value, str):
            return parse_poly(value, self)
        return self.const(value)

    def extend(self, new_names):
        return PolyRing(self.field, self.names + tuple(new_names))


class MPoly:
    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring, terms):
        self.ring = ring
        self.terms = terms
        self._hash = None

    # -- basic queries -------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_coeff(self):
        return self.terms.get((0,) * self.ring.nvars, self.ring.field.zero)

    def total_degree(self):
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, i):
        return max((e[i] for e in self.terms), default=-1)

    def support_vars(self):
        used = set()
        for e in self.terms:
            used.update(i for i, a in enumerate(e) if a)
        return used

    def leading(self, order=GREVLEX):
        """(exponent, coefficient) of the leading term."""
        exp = max(self.terms, key=order.key)
        return exp, self.terms[exp]

    def sorted_terms(self, order=GREVLEX):
        return sorted(self.terms.items(), key=lambda t: order.key(t[0]), reverse=True)

    def monic(self, order=GREVLEX):
        if not self.terms:
            return self
        _, c = self.leading(order)
        return self.scale(self.ring.field.inv(c))

    # -- arithmetic ----------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, MPoly):
            if other.ring != self.ring:
                raise MixedContext(f"{self.ring} vs {other.ring}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        red = self.ring.field.reduce
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = red(out.get(e, 0) + c)
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return MPoly(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        red = self.ring.field.reduce
        return MPoly(self.ring, {e: red(-c) for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def scale(self, c):
        c = self.ring.field(c)
        if not c:
            return self.ring.zero()
        red = self.ring.field.reduce
        return MPoly(self.ring, {e: red(v * c) for e, v in self.terms.items()})

    def mul_term(self, exp, c):
        red = self.ring.field.reduce
        return MPoly(
            self.ring,
            {tuple(a + b for a, b in zip(e, exp)): red(v * c) for e, v in self.terms.items()},
        )

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        red = self.ring.field.reduce
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MPoly(self.ring, {e: v for e, v in ((e, red(v)) for e, v in out.items()) if v})

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a non-negative int")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __truediv__(self, c):
        if isinstance(c, MPoly):
            if not c.is_constant() or not c:
                raise ZeroDivisionError("only division by nonzero constants")
            c = c.constant_coeff()
        return self.scale(self.ring.field.inv(self.ring.field(c)))

    def __eq__(self, other):
        if isinstance(other, MPoly):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == self.ring.const(other).terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    # -- substitution ----------------------------------------------------
    def substitute(self, images, target=None):
        """Evaluate with variable i replaced by ``images[i]`` (polynomials in ``target``)."""
        if target is None:
            target = images[0].ring if images else self.ring
        result = target.zero()
        powers = [dict() for _ in images]
        for e, c in self.terms.items():
            term = target.const(c)
            for i, a in enumerate(e):
                if a:
                    cache = powers[i]
                    if a not in cache:
                        cache[a] = images[i] ** a
                    term = term * cache[a]
            result = result + term
        return result

    def embed(self, target, positions):
        """Re-index variables: variable i of self becomes variable positions[i] of target."""
        n = target.nvars
        out = {}
        for e, c in self.terms.items():
            new = [0] * n
            for i, a in enumerate(e):
                if a:
                    new[positions[i]] += a
            out[tuple(new)] = c
        return MPoly(target, out)

    # -- text ----------------------------------------------------------
    def to_text(self, order=GREVLEX):
        return format_poly(self, order)

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"MPoly({format_poly(self)!r})"


def format_poly(p, order=GREVLEX):
    """Canonical text: terms descending in ``order``, reduced fractions, explicit exponents."""
    if not p.terms:
        return "0"
    names = p.ring.names
    parts = []
    for exp, c in p.sorted_terms(order):
        mono = "*".join(n if a == 1 else f"{n}^{a}" for n, a in zip(names, exp) if a)
        neg = p.ring.field.char == 0 and c < 0
        mag = -c if neg else c
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag}*{mono}"
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)


# --------------------------------------------------------------------------
# Parsing

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_']*)|(\*\*|[-+*/^()]))")


def _tokenize(text):
    pos = 0
    tokens = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos:pos + 1]!r}", 1, pos + 1)
        start = m.start(m.lastindex)
        if m.group(1):
            tokens.append(("num", m.group(1), start))
        elif m.group(2):
            tokens.append(("name", m.group(2), start))
        else:
            op = "^" if m.group(3) == "**" else m.group(3)
            tokens.append(("op", op, start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _PolyParser:
    def __init__(self, text, ring):
        self.ring = ring
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, expected):
        kind, val, pos = self.peek()
        what = "end of input" if kind == "end" else repr(val)
        raise ParseError(f"unexpected {what}", 1, pos + 1, expected)

    def parse(self):
        p = self.expr()
        if self.peek()[0] != "end":
            self.fail(["operator"])
        return p

    def expr(self):
        sign = 1
        if self.peek()[:2] in (("op", "-"), ("op", "+")):
            sign = -1 if self.take()[1] == "-" else 1
        acc = self.term()
        if sign < 0:
            acc = -acc
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self):
        acc = self.factor()
        while True:
            tok = self.peek()
            if tok[:2] == ("op", "*"):
                self.take()
                acc = acc * self.factor()
            elif tok[:2] == ("op", "/"):
                self.take()
                den = self.factor()
                if not den.is_constant() or not den:
                    raise ParseError("division by a non-constant", 1, tok[2] + 1)
                acc = acc / den
            elif tok[0] in ("num", "name") or tok[:2] == ("op", "("):
                acc = acc * self.factor()  # juxtaposition, e.g. 2x
            else:
                return acc

    def factor(self):
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            kind, val, pos = self.take()
            if kind != "num":
                self.i -= 1
                self.fail(["exponent"])
            base = base ** int(val)
        return base

    def atom(self):
        kind, val, pos = self.peek()
        if kind == "num":
            self.take()
            return self.ring.const(int(val))
        if kind == "name":
            self.take()
            if val not in self.ring._index:
                raise ParseError(f"unknown variable {val!r}", 1, pos + 1, self.ring.names)
            return self.ring.gen(val)
        if (kind, val) == ("op", "("):
            self.take()
            inner = self.expr()
            if self.peek()[:2] != ("op", ")"):
                self.fail(["')'"])
            self.take()
            return inner
        if (kind, val) == ("op", "-"):
            self.take()
            return -self.factor()
        self.fail(["number", "variable", "'('"])


def parse_poly(text, ring):
    return _PolyParser(text, ring).parse()


@lru_cache(maxsize=None)
def fresh_name(base, taken):
    """First of base, base1, base2, ... not in the frozenset ``taken``."""
    if base not in taken:
        return base
    i = 1
    while f"{base}{i}" in taken:
        i += 1
    return f"{base}{i}"


def fresh_names(base, count, taken):
    taken = set(taken)
    out = []
    for _ in range(count):
        name = fresh_name(base, frozenset(taken))
        out.append(name)
        taken.add(name)
    return out
