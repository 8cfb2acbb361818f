"""Script language: tokenizer, LL(1) parser with line/column diagnostics, canonical printer.

A script is a sequence of ``;``-terminated statements.  Declarations bind a
name (rings, homs, squares, modules, valuation rings, posets, topological
pushouts, chart complexes, étale algebras); commands run a check and
produce one report record.  Names must be declared before use.  Polynomial
expressions are kept as a small syntax tree so that printing and re-parsing
a canonical script gives back the same tree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import ParseError, UndeclaredName

KEYWORDS = frozenset(
    "ring hom square module valring poset toppush charts overlap etale check present glue lift suite "
    "conductor member localize pushforward expect".split()
)
DECLARATIONS = ("ring", "hom", "square", "module", "valring", "poset", "toppush", "charts", "overlap", "etale")
OUTCOMES = ("pass", "fail", "bound")

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>#[^\n]*)"
    r"|(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>->|\*\*|[;=\[\](){},:~+\-*/^>])"
)


class ScriptSyntaxError(ParseError):
    """Malformed script text; carries the 1-based line, column and expected tokens."""


@dataclass(frozen=True)
class Token:
    kind: str  # int, name, op, end
    value: str
    line: int
    col: int


def tokenize(text):
    out = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ScriptSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        val = m.group()
        if kind == "nl":
            line, col = line + 1, 1
        else:
            if kind not in ("ws", "comment"):
                out.append(Token(kind, "^" if val == "**" else val, line, col))
            col += len(val)
        pos = m.end()
    out.append(Token("end", "", line, col))
    return out


# --------------------------------------------------------------------------
# Expressions: ("num", "3") ("var", "x") ("neg", e) ("add"|"sub"|"mul"|"div", a, b) ("pow", e, n)

_PREC = {"add": 1, "sub": 1, "mul": 2, "div": 2, "neg": 3, "pow": 4, "num": 5, "var": 5}


def expr_text(e):
    kind = e[0]
    if kind in ("num", "var"):
        return e[1]
    if kind == "neg":
        inner = expr_text(e[1])
        return f"-{inner}" if _PREC[e[1][0]] > _PREC["neg"] else f"-({inner})"
    if kind == "pow":
        base = expr_text(e[1])
        if _PREC[e[1][0]] <= _PREC["pow"]:
            base = f"({base})"
        return f"{base}^{e[2]}"
    op = {"add": " + ", "sub": " - ", "mul": "*", "div": "/"}[kind]
    p = _PREC[kind]
    left = expr_text(e[1])
    # a leading minus would swallow the whole product
    if _PREC[e[1][0]] < p or (e[1][0] == "neg" and kind in ("mul", "div")):
        left = f"({left})"
    right = expr_text(e[2])
    # the parser groups to the left, so a same-level right operand keeps its parentheses
    if _PREC[e[2][0]] <= p:
        right = f"({right})"
    return left + op + right


def expr_names(e):
    if e[0] == "var":
        return {e[1]}
    if e[0] == "num":
        return set()
    out = set()
    for sub in e[1:]:
        if isinstance(sub, tuple):
            out |= expr_names(sub)
    return out


# --------------------------------------------------------------------------
# Statements


@dataclass(frozen=True)
class Statement:
    kind: str
    name: str | None
    args: tuple
    expect: str | None = None
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)

    @property
    def is_declaration(self):
        return self.kind in DECLARATIONS


@dataclass(frozen=True)
class Script:
    statements: tuple = ()

    @property
    def declarations(self):
        return tuple(s for s in self.statements if s.is_declaration)

    def __len__(self):
        return len(self.statements)


class Parser:
    def __init__(self, text):
        self.tokens = tokenize(text)
        self.i = 0
        self.declared = set()

    # -- token helpers
    def peek(self, k=0):
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def at(self, value):
        t = self.peek()
        return t.kind in ("op", "name") and t.value == value

    def take(self):
        t = self.tokens[self.i]
        self.i += 1
        return t

    def fail(self, expected):
        t = self.peek()
        what = "end of input" if t.kind == "end" else repr(t.value)
        raise ScriptSyntaxError(f"unexpected {what}", t.line, t.col, expected)

    def expect(self, value, label=None):
        if not self.at(value):
            self.fail([label or repr(value)])
        return self.take()

    def ident(self, label="name"):
        t = self.peek()
        if t.kind != "name" or t.value in KEYWORDS:
            self.fail([label])
        return self.take().value

    def ref(self, label="name"):
        """A previously declared name."""
        t = self.peek()
        name = self.ident(label)
        if name not in self.declared:
            raise UndeclaredName(f"undeclared name {name!r}", t.line, t.col, [label])
        return name

    def integer(self, label="integer"):
        if self.peek().kind != "int":
            self.fail([label])
        return int(self.take().value)

    def comma_list(self, item, close):
        out = []
        if self.at(close):
            return out
        out.append(item())
        while self.at(","):
            self.take()
            out.append(item())
        return out

    # -- expressions
    def expr(self):
        if self.at("-"):
            self.take()
            acc = ("neg", self.term())
        else:
            if self.at("+"):
                self.take()
            acc = self.term()
        while self.at("+") or self.at("-"):
            op = "add" if self.take().value == "+" else "sub"
            acc = (op, acc, self.term())
        return acc

    def term(self):
        acc = self.factor()
        while self.at("*") or self.at("/"):
            op = "mul" if self.take().value == "*" else "div"
            acc = (op, acc, self.factor())
        return acc

    def factor(self):
        if self.at("-"):
            self.take()
            return ("neg", self.factor())
        base = self.atom()
        if self.at("^"):
            self.take()
            sign = -1 if self.at("-") and self.take() else 1
            base = ("pow", base, sign * self.integer("exponent"))
        return base

    def atom(self):
        t = self.peek()
        if t.kind == "int":
            return ("num", self.take().value)
        if t.kind == "name" and t.value not in KEYWORDS:
            return ("var", self.take().value)
        if self.at("("):
            self.take()
            e = self.expr()
            self.expect(")", "')'")
            return e
        self.fail(["number", "variable", "'('"])

    def pair(self):
        self.expect("(", "'('")
        b = self.expr()
        self.expect(",", "','")
        c = self.expr()
        self.expect(")", "')'")
        return (b, c)

    # -- statements
    def parse(self):
        stmts = []
        while self.peek().kind != "end":
            stmts.append(self.statement())
        return Script(tuple(stmts))

    def statement(self):
        t = self.peek()
        if t.kind != "name" or t.value not in KEYWORDS or t.value == "expect":
            self.fail(["statement keyword"])
        kw = self.take().value
        kind, name, args = getattr(self, "s_" + kw)()
        expect = None
        if self.at("expect"):
            self.take()
            tok = self.peek()
            if tok.kind != "name" or tok.value not in OUTCOMES:
                self.fail(list(OUTCOMES))
            expect = self.take().value
        self.expect(";", "';'")
        if kind in DECLARATIONS and name is not None and kind != "overlap":
            self.declared.add(name)
        return Statement(kind, name, args, expect, t.line, t.col)

    def s_ring(self):
        name = self.ident("ring name")
        self.expect("=", "'='")
        if self.at("localize"):
            self.take()
            self.expect("(", "'('")
            base = self.ref("ring name")
            self.expect(",", "','")
            e = self.expr()
            self.expect(")", "')'")
            return "ring", name, ("localize", base, e)
        if self.at("part"):
            self.take()
            self.expect("(", "'('")
            sq = self.ref("square name")
            self.expect(",", "','")
            comp = self.ident("B, C or K")
            if comp not in ("B", "C", "K"):
                self.i -= 1
                self.fail(["B", "C", "K"])
            self.expect(")", "')'")
            return "ring", name, ("part", sq, comp)
        if self.at("presented"):
            self.take()
            self.expect("(", "'('")
            sq = self.ref("square name")
            self.expect(")", "')'")
            return "ring", name, ("presented", sq)
        fld = self.field_tag()
        self.expect("[", "'['")
        names = tuple(self.comma_list(lambda: self.ident("variable"), "]"))
        self.expect("]", "']'")
        rels = ()
        if self.at("/"):
            self.take()
            self.expect("(", "'('")
            rels = tuple(self.comma_list(self.expr, ")"))
            self.expect(")", "')'")
        return "ring", name, ("poly", fld, names, rels)

    def field_tag(self):
        t = self.peek()
        if t.kind == "name" and t.value in ("QQ", "k"):
            return self.take().value
        if t.kind == "name" and t.value == "GF":
            self.take()
            self.expect("(", "'('")
            p = self.integer("prime")
            self.expect(")", "')'")
            return f"GF({p})"
        self.fail(["QQ", "GF", "k", "localize", "part", "presented"])

    def s_hom(self):
        name = self.ident("hom name")
        self.expect(":", "':'")
        src = self.ref("source name")
        self.expect("->", "'->'")
        tgt = self.ref("target name")
        self.expect("{", "'{'")

        def item():
            v = self.ident("variable")
            self.expect("->", "'->'")
            return (v, self.expr())

        images = tuple(self.comma_list(item, "}"))
        self.expect("}", "'}'")
        return "hom", name, (src, tgt, images)

    def s_square(self):
        name = self.ident("square name")
        self.expect("=", "'='")
        if self.at("localize"):
            self.take()
            self.expect("(", "'('")
            sq = self.ref("square name")
            self.expect("at", "'at'")
            p = self.pair()
            self.expect(")", "')'")
            return "square", name, ("localize", sq, p)
        self.expect("pushout", "'pushout' or 'localize'")
        self.expect("(", "'('")
        beta = self.ref("hom name")
        self.expect(",", "','")
        pi = self.ref("hom name")
        self.expect(")", "')'")
        return "square", name, ("pushout", beta, pi)

    def matrix(self):
        self.expect("[", "'['")

        def col():
            self.expect("[", "'['")
            c = tuple(self.comma_list(self.expr, "]"))
            self.expect("]", "']'")
            return c

        cols = tuple(self.comma_list(col, "]"))
        self.expect("]", "']'")
        return cols

    def s_module(self):
        name = self.ident("module name")
        self.expect("over", "'over'")
        over = self.ref("ring or square name")
        self.expect("=", "'='")
        t = self.peek()
        if self.at("free"):
            self.take()
            self.expect("(", "'('")
            n = self.integer("rank")
            self.expect(")", "')'")
            return "module", name, (over, "free", n)
        if self.at("cyclic"):
            self.take()
            self.expect("(", "'('")
            gens = tuple(self.comma_list(self.expr, ")"))
            self.expect(")", "')'")
            return "module", name, (over, "cyclic", gens)
        if self.at("pullback"):
            self.take()
            self.expect("(", "'('")
            m = self.ref("module name")
            self.expect(")", "')'")
            return "module", name, (over, "pullback", m)
        if self.at("patch"):
            self.take()
            self.expect("(", "'('")
            my = self.ref("module name")
            self.expect(",", "','")
            mz = self.ref("module name")
            self.expect(",", "','")
            mt = self.ref("module name")
            self.expect(";", "';'")
            alpha = self.matrix()
            self.expect(",", "','")
            beta = self.matrix()
            self.expect(")", "')'")
            return "module", name, (over, "patch", (my, mz, mt, alpha, beta))
        del t
        self.fail(["free", "cyclic", "pullback", "patch"])

    def valexpr(self):
        if self.at("dvr"):
            self.take()
            return ("dvr", self.ident("uniformizer"))
        if self.at("compose"):
            self.take()
            self.expect("(", "'('")
            lo = self.valexpr()
            self.expect(",", "','")
            hi = self.valexpr()
            self.expect(")", "')'")
            return ("compose", lo, hi)
        self.fail(["dvr", "compose"])

    def s_valring(self):
        name = self.ident("valuation ring name")
        self.expect("=", "'='")
        return "valring", name, (self.valexpr(),)

    def s_poset(self):
        name = self.ident("poset name")
        self.expect("=", "'='")
        self.expect("{", "'{'")

        def item():
            a = self.ident("point")
            if self.at(">"):
                self.take()
                return (a, self.ident("point"))
            return (a,)

        items = tuple(self.comma_list(item, "}"))
        self.expect("}", "'}'")
        return "poset", name, items

    def point_map(self):
        self.expect("{", "'{'")

        def item():
            a = self.ident("point")
            self.expect("->", "'->'")
            return (a, self.ident("point"))

        items = tuple(self.comma_list(item, "}"))
        self.expect("}", "'}'")
        return items

    def s_toppush(self):
        name = self.ident("name")
        self.expect("=", "'='")
        self.expect("push", "'push'")
        self.expect("(", "'('")
        Y = self.ref("poset name")
        self.expect(",", "','")
        Z = self.ref("poset name")
        self.expect(",", "','")
        T = self.ref("poset name")
        self.expect(";", "';'")
        f = self.point_map()
        self.expect(",", "','")
        g = self.point_map()
        self.expect(")", "')'")
        ref = None
        if self.at("reference"):
            self.take()
            ref = self.ref("poset name")
        return "toppush", name, (Y, Z, T, f, g, ref)

    def s_charts(self):
        name = self.ident("chart complex name")
        self.expect("=", "'='")
        self.expect("[", "'['")
        items = tuple(self.comma_list(lambda: self.ref("square name"), "]"))
        self.expect("]", "']'")
        return "charts", name, items

    def s_overlap(self):
        D = self.ref("chart complex name")
        self.expect("(", "'('")
        i = self.ref("square name")
        self.expect(",", "','")
        j = self.ref("square name")
        self.expect(")", "')'")
        self.expect("=", "'='")
        sides = []
        for k in range(2):
            if k:
                self.expect("~", "'~'")
            self.expect("loc", "'loc'")
            self.expect("(", "'('")
            s = self.ref("square name")
            self.expect("at", "'at'")
            sides.append((s, self.pair()))
            self.expect(")", "')'")
        self.expect("via", "'via'")
        h = self.ref("hom name")
        return "overlap", D, (i, j, sides[0], sides[1], h)

    def s_etale(self):
        name = self.ident("name")
        self.expect("=", "'='")
        self.expect("std", "'std'")
        self.expect("(", "'('")
        base = self.ref("ring name")
        self.expect(",", "','")
        var = self.ident("variable")
        self.expect(",", "','")
        f = self.expr()
        self.expect(",", "','")
        g = self.expr()
        self.expect(")", "')'")
        return "etale", name, (base, var, f, g)

    # -- commands
    def s_conductor(self):
        return "conductor", None, (self.ref("square name"),)

    def s_present(self):
        sq = self.ref("square name")
        bound = None
        if self.at("bound"):
            self.take()
            bound = self.integer("bound")
        return "present", None, (sq, bound)

    def s_member(self):
        sq = self.ref("square name")
        return "member", None, (sq, self.expr())

    def s_localize(self):
        sq = self.ref("square name")
        self.expect("at", "'at'")
        return "localize", None, (sq, self.pair())

    def s_pushforward(self):
        return "pushforward", None, (self.ref("module name"),)

    def s_glue(self):
        return "glue", None, (self.ref("chart complex name"),)

    def s_lift(self):
        if self.at("etale"):
            self.take()
            E = self.ref("etale algebra name")
            self.expect("along", "'along'")
            return "lift_etale", None, (E, self.ref("hom name"))
        if self.at("valuation"):
            self.take()
            V = self.ref("valuation ring name")
            self.expect("(", "'('")
            fx = self.expr()
            self.expect(",", "','")
            fy = self.expr()
            self.expect(")", "')'")
            return "lift_valuation", None, (V, fx, fy)
        self.fail(["etale", "valuation"])

    def s_suite(self):
        which = self.ident("suite name")
        if which not in ("chain", "pinching"):
            self.i -= 1
            self.fail(["chain", "pinching"])
        n = None
        if self.at("n"):
            self.take()
            self.expect("=", "'='")
            n = self.integer()
        return "suite", None, (which, n)

    def s_check(self):
        t = self.peek()
        kind = self.ident("check kind")
        if kind == "bicartesian":
            sq = self.ref("square name")
            self.expect("(", "'('")
            hb = self.ref("hom name")
            self.expect(",", "','")
            hc = self.ref("hom name")
            self.expect(")", "')'")
            return "check", None, ("bicartesian", sq, hb, hc)
        if kind == "adjunction":
            d = self.ident("unit or counit")
            if d not in ("unit", "counit"):
                self.i -= 1
                self.fail(["unit", "counit"])
            return "check", None, ("adjunction", d, self.ref("module name"))
        if kind in ("flat", "free"):
            return "check", None, (kind, self.ref("module name"))
        if kind == "universal":
            return "check", None, ("universal", self.ref("pushout name"))
        if kind == "morphism":
            src = self.ref("square name")
            self.expect("->", "'->'")
            dst = self.ref("square name")
            self.expect("(", "'('")
            hs = [self.ref("hom name")]
            for _ in range(2):
                self.expect(",", "','")
                hs.append(self.ref("hom name"))
            self.expect(")", "')'")
            return "check", None, ("morphism", src, dst, tuple(hs))
        if kind == "refinement":
            fine = self.ref("chart complex name")
            self.expect("of", "'of'")
            coarse = self.ref("chart complex name")
            self.expect("{", "'{'")

            def item():
                a = self.ref("square name")
                self.expect("->", "'->'")
                b = self.ref("square name")
                p = None
                if self.at("at"):
                    self.take()
                    p = self.pair()
                return (a, b, p)

            items = tuple(self.comma_list(item, "}"))
            self.expect("}", "'}'")
            return "check", None, ("refinement", fine, coarse, items)
        self.i -= 1
        del t
        self.fail(["bicartesian", "adjunction", "flat", "free", "universal", "morphism", "refinement"])


def parse(text):
    """Parse a script; raises ScriptSyntaxError or UndeclaredName with line and column."""
    return Parser(text).parse()


# --------------------------------------------------------------------------
# Canonical printer


def _pair(p):
    return f"({expr_text(p[0])}, {expr_text(p[1])})"


def _matrix(m):
    return "[" + ", ".join("[" + ", ".join(expr_text(e) for e in col) + "]" for col in m) + "]"


def _val(v):
    return f"dvr {v[1]}" if v[0] == "dvr" else f"compose({_val(v[1])}, {_val(v[2])})"


def _pmap(items):
    return "{" + ", ".join(f"{a} -> {b}" for a, b in items) + "}"


def statement_text(s):
    a = s.args
    k = s.kind
    if k == "ring":
        if a[0] == "localize":
            body = f"localize({a[1]}, {expr_text(a[2])})"
        elif a[0] == "part":
            body = f"part({a[1]}, {a[2]})"
        elif a[0] == "presented":
            body = f"presented({a[1]})"
        else:
            body = f"{a[1]}[{', '.join(a[2])}]"
            if a[3]:
                body += " / (" + ", ".join(expr_text(e) for e in a[3]) + ")"
        text = f"ring {s.name} = {body}"
    elif k == "hom":
        imgs = ", ".join(f"{v} -> {expr_text(e)}" for v, e in a[2])
        text = f"hom {s.name}: {a[0]} -> {a[1]} {{{imgs}}}"
    elif k == "square":
        if a[0] == "localize":
            text = f"square {s.name} = localize({a[1]} at {_pair(a[2])})"
        else:
            text = f"square {s.name} = pushout({a[1]}, {a[2]})"
    elif k == "module":
        over, how, body = a
        if how == "free":
            rhs = f"free({body})"
        elif how == "cyclic":
            rhs = "cyclic(" + ", ".join(expr_text(e) for e in body) + ")"
        elif how == "pullback":
            rhs = f"pullback({body})"
        else:
            my, mz, mt, alpha, beta = body
            rhs = f"patch({my}, {mz}, {mt}; {_matrix(alpha)}, {_matrix(beta)})"
        text = f"module {s.name} over {over} = {rhs}"
    elif k == "valring":
        text = f"valring {s.name} = {_val(a[0])}"
    elif k == "poset":
        text = f"poset {s.name} = {{" + ", ".join(" > ".join(it) for it in a) + "}"
    elif k == "toppush":
        Y, Z, T, f, g, ref = a
        text = f"toppush {s.name} = push({Y}, {Z}, {T}; {_pmap(f)}, {_pmap(g)})"
        if ref:
            text += f" reference {ref}"
    elif k == "charts":
        text = f"charts {s.name} = [{', '.join(a)}]"
    elif k == "overlap":
        i, j, (si, pi), (sj, pj), h = a
        text = f"overlap {s.name}({i}, {j}) = loc({si} at {_pair(pi)}) ~ loc({sj} at {_pair(pj)}) via {h}"
    elif k == "etale":
        text = f"etale {s.name} = std({a[0]}, {a[1]}, {expr_text(a[2])}, {expr_text(a[3])})"
    elif k == "conductor":
        text = f"conductor {a[0]}"
    elif k == "present":
        text = f"present {a[0]}" + (f" bound {a[1]}" if a[1] is not None else "")
    elif k == "member":
        text = f"member {a[0]} {expr_text(a[1])}"
    elif k == "localize":
        text = f"localize {a[0]} at {_pair(a[1])}"
    elif k == "pushforward":
        text = f"pushforward {a[0]}"
    elif k == "glue":
        text = f"glue {a[0]}"
    elif k == "lift_etale":
        text = f"lift etale {a[0]} along {a[1]}"
    elif k == "lift_valuation":
        text = f"lift valuation {a[0]} ({expr_text(a[1])}, {expr_text(a[2])})"
    elif k == "suite":
        text = f"suite {a[0]}" + (f" n = {a[1]}" if a[1] is not None else "")
    elif k == "check":
        c = a[0]
        if c == "bicartesian":
            text = f"check bicartesian {a[1]} ({a[2]}, {a[3]})"
        elif c == "adjunction":
            text = f"check adjunction {a[1]} {a[2]}"
        elif c in ("flat", "free", "universal"):
            text = f"check {c} {a[1]}"
        elif c == "morphism":
            text = f"check morphism {a[1]} -> {a[2]} ({', '.join(a[3])})"
        else:
            items = ", ".join(f"{x} -> {y}" + (f" at {_pair(p)}" if p else "") for x, y, p in a[3])
            text = f"check refinement {a[1]} of {a[2]} {{{items}}}"
    else:  # pragma: no cover - parser never produces other kinds
        raise ValueError(k)
    if s.expect:
        text += f" expect {s.expect}"
    return text + ";"


def print_script(script):
    return "".join(statement_text(s) + "\n" for s in script.statements)
