"""Execute parsed scripts against the library and assemble deterministic reports."""

from __future__ import annotations

import json
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .conductor import (
    FiberElement,
    PushoutPresentation,
    build_square,
    check_bicartesian,
    conductor,
    fiber_membership,
    localize_square,
    present_pushout,
)
from .config import limits
from .dsl import expr_text, statement_text
from .errors import BoundExceeded, FerrandError
from .glue import (
    Chart,
    ChartedPushoutDatum,
    DatumMorphism,
    Overlap,
    check_datum_morphism,
    compare_refinement,
    glue_pushout,
    lift_etale_affine,
    standard_etale,
)
from .modules import (
    PatchedModule,
    PresentedModule,
    adjunction_check,
    flat_fp_test,
    patch,
    pullback,
    pushforward,
    rank_one_freeness,
)
from .poly import QQ, field_from_tag
from .rings import PresentedRing, localize, validate_hom
from .topology import SpecPoset, topological_pushout, verify_universal_property
from .valuation import (
    LaurentSquare,
    compose,
    conductor_chain_suite,
    dvr,
    enumerate_lifts,
    lemma_hypothesis,
    lift_semivaluation,
)

SCHEMA = 1

# functional anchors: which property of the construction a command exercises
ANCHORS = {
    "conductor": "conductor:kernel-of-pi",
    "present": "pushout:presentation-bicartesian",
    "member": "pushout:fiber-membership",
    "localize": "pushout:open-complement",
    "pushforward": "modules:matched-pairs",
    "glue": "glue:cocycle-coherence",
    "lift_etale": "glue:etale-lift",
    "lift_valuation": "valuation:semivaluation-lift",
    "suite:chain": "valuation:conductor-chain",
    "suite:pinching": "pushout:random-pinchings",
    "check:bicartesian": "pushout:bicartesian",
    "check:adjunction:unit": "modules:adjunction-unit",
    "check:adjunction:counit": "modules:adjunction-counit",
    "check:flat": "modules:fitting-projectivity",
    "check:free": "modules:rank-one-freeness",
    "check:universal": "topology:pushout-universal-property",
    "check:morphism": "glue:cartesian-morphism",
    "check:refinement": "glue:refinement-invariance",
    "declare": "script:declaration",
}

OPERATIONS = {
    "conductor": "conductor",
    "present": "present_pushout",
    "member": "fiber_membership",
    "localize": "localize_square",
    "pushforward": "pushforward",
    "glue": "glue_pushout",
    "lift_etale": "lift_etale_affine",
    "lift_valuation": "lift_semivaluation",
    "suite:chain": "conductor_chain_suite",
    "suite:pinching": "present_pushout",
    "check:bicartesian": "check_bicartesian",
    "check:adjunction:unit": "adjunction_check",
    "check:adjunction:counit": "adjunction_check",
    "check:flat": "flat_fp_test",
    "check:free": "rank_one_freeness",
    "check:universal": "verify_universal_property",
    "check:morphism": "check_datum_morphism",
    "check:refinement": "compare_refinement",
}


class ScriptError(FerrandError):
    """A well-formed script refers to objects of the wrong kind or shape."""


def jsonable(x):
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = [jsonable(v) for v in x]
        return sorted(items, key=str) if isinstance(x, (set, frozenset)) else items
    if x is None or isinstance(x, (bool, int, str)):
        return x
    if isinstance(x, float):
        return str(Fraction(x))
    return str(x)


# --------------------------------------------------------------------------
# Environment


@dataclass
class AModule:
    module: PresentedModule
    square: str  # square whose presented ring carries the module


@dataclass
class PatchedEntry:
    module: PatchedModule
    square: str


@dataclass
class ChartComplex:
    squares: list
    overlaps: list = field(default_factory=list)
    glued: object = None


@dataclass
class Env:
    field: object
    values: dict = field(default_factory=dict)
    kinds: dict = field(default_factory=dict)
    presentations: dict = field(default_factory=dict)  # square name -> PushoutPresentation
    presented_rings: dict = field(default_factory=dict)  # ring name -> square name
    lock: threading.RLock = field(default_factory=threading.RLock)

    def get(self, name, *kinds):
        if name not in self.values:
            raise ScriptError(f"{name} is unavailable (its declaration failed)")
        if kinds and self.kinds[name] not in kinds:
            raise ScriptError(f"{name} is a {self.kinds[name]}, expected {' or '.join(kinds)}")
        return self.values[name]

    def bind(self, name, kind, value):
        self.values[name] = value
        self.kinds[name] = kind

    def presentation(self, sq_name):
        """The presentation of A found under the probe degree; a BoundExceeded is cached too."""
        with self.lock:
            if sq_name not in self.presentations:
                try:
                    self.presentations[sq_name] = present_pushout(self.get(sq_name, "square"))
                except BoundExceeded as exc:
                    self.presentations[sq_name] = exc
            hit = self.presentations[sq_name]
        if isinstance(hit, BoundExceeded):
            raise hit
        return hit

    def presentation_or_none(self, sq_name):
        try:
            return self.presentation(sq_name)
        except BoundExceeded:
            return None


def _elem(R, e):
    return R(expr_text(e))


def _pair(sq, p):
    return FiberElement.make(sq, _elem(sq.B, p[0]), _elem(sq.C, p[1]))


def _field(env, tag):
    if tag == "k":
        return env.field
    if tag == "QQ":
        return QQ
    return field_from_tag(tag)


def _invert_matrix(R, cols, relations=()):
    """Inverse of a square matrix (given by columns) over R, modulo extra relations for a cyclic module."""
    n = len(cols)
    if any(len(c) != n for c in cols):
        raise ScriptError("gluing matrices must be square")
    if relations:
        if n != 1:
            raise ScriptError("non-free gluing needs rank one")
        R = PresentedRing(R.field, R.names, tuple(R.relations) + tuple(relations))
    m = [[R.nf(cols[j][i]) for j in range(n)] for i in range(n)]  # row-major

    def det(rows):
        if len(rows) == 1:
            return rows[0][0]
        total = R.zero()
        for j, a in enumerate(rows[0]):
            if a:
                minor = [r[:j] + r[j + 1:] for r in rows[1:]]
                term = a * det(minor)
                total = total + term if j % 2 == 0 else total - term
        return R.nf(total)

    d = det(m)
    dinv = R.inverse(d)
    if dinv is None:
        raise ScriptError(f"gluing matrix is not invertible (determinant {d})")
    if n == 1:
        return [[dinv]]
    inv_rows = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [r[:j] + r[j + 1:] for k, r in enumerate(m) if k != i]
            cof = det(minor)
            inv_rows[j][i] = R.nf(dinv * cof if (i + j) % 2 == 0 else -(dinv * cof))
    return [[inv_rows[i][j] for i in range(n)] for j in range(n)]


# --------------------------------------------------------------------------
# Declarations


def declare(env, s):
    a = s.args
    k = s.kind
    if k == "ring":
        if a[0] == "poly":
            fld = _field(env, a[1])
            R = PresentedRing(fld, a[2], [], s.name)
            rels = [_elem(R, e) for e in a[3]]
            env.bind(s.name, "ring", PresentedRing(fld, a[2], rels, s.name))
        elif a[0] == "localize":
            R = env.get(a[1], "ring")
            env.bind(s.name, "ring", localize(R, _elem(R, a[2]))[0])
        elif a[0] == "part":
            sq = env.get(a[1], "square")
            env.bind(s.name, "ring", {"B": sq.B, "C": sq.C, "K": sq.K}[a[2]])
        else:
            env.bind(s.name, "ring", env.presentation(a[1]).A)
            env.presented_rings[s.name] = a[1]
    elif k == "hom":
        src, tgt = env.get(a[0], "ring"), env.get(a[1], "ring")
        given = dict(a[2])
        extra = set(given) - set(src.names)
        if extra:
            raise ScriptError(f"{sorted(extra)} are not generators of {a[0]}")
        images = [tgt(expr_text(given[n])) if n in given else tgt.zero() for n in src.names]
        env.bind(s.name, "hom", validate_hom(src, tgt, images))
    elif k == "square":
        if a[0] == "pushout":
            env.bind(s.name, "square", build_square(env.get(a[1], "hom"), env.get(a[2], "hom")))
        else:
            sq = env.get(a[1], "square")
            env.bind(s.name, "square", localize_square(sq, _pair(sq, a[2])).square)
    elif k == "module":
        _declare_module(env, s)
    elif k == "valring":
        env.bind(s.name, "valring", _valring(a[0]))
    elif k == "poset":
        pts, rels = [], []
        for it in a:
            for p in it:
                if p not in pts:
                    pts.append(p)
            if len(it) == 2:
                rels.append(it)
        env.bind(s.name, "poset", SpecPoset(pts, rels))
    elif k == "toppush":
        Y, Z, T, f, g, ref = a
        env.bind(
            s.name,
            "toppush",
            {
                "Y": env.get(Y, "poset"),
                "Z": env.get(Z, "poset"),
                "T": env.get(T, "poset"),
                "f": dict(f),
                "g": dict(g),
                "reference": env.get(ref, "poset") if ref else None,
            },
        )
    elif k == "charts":
        for n in a:
            env.get(n, "square")
        env.bind(s.name, "charts", ChartComplex(list(a)))
    elif k == "overlap":
        D = env.get(s.name, "charts")
        i, j, (si, pi), (sj, pj), h = a
        if (si, sj) != (i, j):
            raise ScriptError(f"overlap {i},{j} localizes {si} and {sj}")
        if i not in D.squares or j not in D.squares:
            raise ScriptError(f"{i} and {j} must be charts of {s.name}")
        sqi, sqj = env.get(i, "square"), env.get(j, "square")
        D.overlaps.append(Overlap(i, j, _pair(sqi, pi), _pair(sqj, pj), {"C": env.get(h, "hom")}))
        D.glued = None
    elif k == "etale":
        base, var, f, g = a
        env.bind(s.name, "etale", standard_etale(env.get(base, "ring"), expr_text(f), expr_text(g), var))
    else:  # pragma: no cover
        raise ScriptError(f"unknown declaration {k}")


def _valring(v):
    if v[0] == "dvr":
        return dvr(v[1])
    return compose(_valring(v[1]), _valring(v[2]))


def _declare_module(env, s):
    over, how, body = s.args
    kind = env.kinds.get(over)
    if kind == "ring":
        R = env.get(over, "ring")
        if how == "free":
            M = PresentedModule.free(R, body)
        elif how == "cyclic":
            M = PresentedModule.cyclic(R, [expr_text(e) for e in body])
        else:
            raise ScriptError(f"{how} needs a square, not a ring")
        sq = env.presented_rings.get(over)
        env.bind(s.name, "module", AModule(M, sq) if sq else M)
        return
    sq = env.get(over, "square")
    if how == "free":
        env.bind(s.name, "module", PatchedEntry(pullback(sq, None, body), over))
    elif how == "pullback":
        src = env.get(body, "module")
        if not isinstance(src, AModule) or src.square != over:
            raise ScriptError(f"{body} is not a module over the presented ring of {over}")
        env.bind(s.name, "module", PatchedEntry(pullback(sq, env.presentation(over), src.module), over))
    elif how == "patch":
        my, mz, mt, alpha, beta = body
        MY, MZ, MT = (env.get(n, "module") for n in (my, mz, mt))
        for M, R, side in ((MY, sq.B, "B"), (MZ, sq.C, "C"), (MT, sq.K, "K")):
            if not isinstance(M, PresentedModule) or M.ring != R:
                raise ScriptError(f"patch component over {side} must be a module over part({over}, {side})")
        K = sq.K
        a = [[K(expr_text(e)) for e in col] for col in alpha]
        b = [[K(expr_text(e)) for e in col] for col in beta]
        rels = [r[0] for r in MT.relations] if MT.ngens == 1 else ()
        ai = _invert_matrix(K, a, rels)
        bi = _invert_matrix(K, b, rels)
        env.bind(s.name, "module", PatchedEntry(patch(sq, MY, MZ, MT, a, ai, b, bi, s.name), over))
    else:
        raise ScriptError(f"{how} needs a ring, not a square")


# --------------------------------------------------------------------------
# Commands: each returns (outcome, result dict)


def _ok(flag):
    return "pass" if flag else "fail"


def cmd_conductor(env, s):
    sq = env.get(s.args[0], "square")
    cv = conductor(sq)
    return "pass", {"generators": [str(g) for g in cv.generators], "pairs": [e.to_text() for e in cv.elements]}


def _presentation_result(sq, pres):
    rep = check_bicartesian(sq, pres)
    out = {
        "ring": pres.A.to_text(),
        "to_B": pres.to_B.to_text(),
        "to_C": pres.to_C.to_text(),
        "bicartesian": rep.to_dict(),
    }
    if rep.tensor_iso is not None:
        out["tensor_iso_verified"] = bool(rep.tensor_iso.verify())
    return rep.passed, out


def cmd_present(env, s):
    name, bound = s.args
    sq = env.get(name, "square")
    pres = env.presentation(name) if bound is None else present_pushout(sq, bound)
    ok, out = _presentation_result(sq, pres)
    return _ok(ok), out


def cmd_member(env, s):
    sq = env.get(s.args[0], "square")
    c = _elem(sq.C, s.args[1])
    e = fiber_membership(sq, c)
    return _ok(e is not None), {"element": str(c), "member": e is not None, "pair": e.to_text() if e else None}


def cmd_localize(env, s):
    name, p = s.args
    sq = env.get(name, "square")
    f = _pair(sq, p)
    loc = localize_square(sq, f, env.presentation_or_none(name))
    out = loc.to_dict()
    out.update({"element": f.to_text(), "B_f": loc.square.B.to_text(), "C_f": loc.square.C.to_text(),
                "K_f": loc.square.K.to_text()})
    ok = (not loc.in_conductor) or (loc.B_zero and bool(loc.A_iso_C))
    return _ok(ok), out


def _patched(env, name):
    M = env.get(name, "module")
    if not isinstance(M, PatchedEntry):
        raise ScriptError(f"{name} is not a patched module")
    return M


def cmd_pushforward(env, s):
    P = _patched(env, s.args[0])
    sq = env.get(P.square, "square")
    pres = env.presentation(P.square)
    pf = pushforward(sq, P.module, pres)
    return "pass", {"module": pf.module.to_text(), "generators": len(pf.pairs),
                    "pairs": [[[str(p) for p in y], [str(p) for p in z]] for y, z in pf.pairs]}


def _datum(env, name):
    D = env.get(name, "charts")
    squares = {n: env.get(n, "square") for n in D.squares}
    return D, ChartedPushoutDatum([Chart(n, squares[n]) for n in D.squares], list(D.overlaps))


def _glued(env, name):
    with env.lock:
        D, datum = _datum(env, name)
        if D.glued is None:
            datum.validate()
            D.glued = glue_pushout(datum)
        return D.glued


def cmd_glue(env, s):
    g = _glued(env, s.args[0])
    return "pass", g.to_dict()


def cmd_lift_etale(env, s):
    E = env.get(s.args[0], "etale")
    pi = env.get(s.args[1], "hom")
    lift = lift_etale_affine(pi, E)
    out = lift.to_dict()
    out["algebra"] = E.to_text()
    out["derivative_certificate"] = lift.algebra.verify()
    ok = lift.base_change_iso is not None and lift.base_change_iso.verify() and out["derivative_certificate"]
    return _ok(ok), out


def _monomial_value(R, e):
    kind = e[0]
    if kind == "num":
        return R.const(Fraction(e[1]))
    if kind == "var":
        if e[1] not in R.names:
            raise ScriptError(f"{e[1]} is not a generator of the valuation ring")
        return R.monomial(**{e[1]: 1})
    if kind == "neg":
        return -_monomial_value(R, e[1])
    if kind == "pow":
        return _monomial_value(R, e[1]) ** e[2]
    a, b = _monomial_value(R, e[1]), _monomial_value(R, e[2])
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    return a * (b ** -1)


def cmd_lift_valuation(env, s):
    R = env.get(s.args[0], "valring")
    fx, fy = (_monomial_value(R, e) for e in s.args[1:])
    rep = lift_semivaluation(LaurentSquare(), R, fx, fy)
    out = rep.to_dict()
    if rep.lifts:
        out["lemma_hypothesis"] = lemma_hypothesis(R, fx, fy)
        out["enumerated_lifts"] = len(enumerate_lifts(R, fx, fy))
        if out["enumerated_lifts"] != 1:
            return "fail", out
    return _ok(rep.lifts), out


def cmd_suite(env, s):
    which, n = s.args
    if which == "chain":
        rep = conductor_chain_suite(n or 3)
        ok = (
            not rep.unit_injective
            and not rep.essential_image
            and rep.components_independent
            and all(a and not b for _, _, _, a, b in rep.chain)
        )
        return _ok(ok), rep.to_dict()
    from .corpus import random_pinchings

    out = []
    ok = True
    for name, sq in random_pinchings(n or 25, limits().seed):
        passed, res = _presentation_result(sq, present_pushout(sq))
        ok = ok and passed
        out.append({"name": name, "ring": res["ring"], "verdict": res["bicartesian"]["verdict"]})
    return _ok(ok), {"squares": out, "count": len(out)}


def check_bicartesian_cmd(env, s):
    _, sq_name, hb, hc = s.args
    sq = env.get(sq_name, "square")
    hB, hC = env.get(hb, "hom"), env.get(hc, "hom")
    if hB.source != hC.source:
        raise ScriptError(f"{hb} and {hc} must share their source")
    rep = check_bicartesian(sq, PushoutPresentation(hB.source, hB, hC))
    return _ok(rep.passed), rep.to_dict()


def check_adjunction(env, s):
    _, direction, name = s.args
    M = env.get(name, "module")
    if direction == "counit":
        if not isinstance(M, PatchedEntry):
            raise ScriptError("the counit is checked on patched modules")
        sq_name, obj = M.square, M.module
    else:
        if not isinstance(M, AModule):
            raise ScriptError("the unit is checked on modules over a presented ring")
        sq_name, obj = M.square, M.module
    rep = adjunction_check(env.get(sq_name, "square"), env.presentation(sq_name), obj, direction)
    return _ok(rep.iso), rep.to_dict()


def check_flat(env, s):
    M = env.get(s.args[1], "module")
    if isinstance(M, AModule):
        M = M.module
    elif isinstance(M, PatchedEntry):
        M = pushforward(env.get(M.square, "square"), M.module, env.presentation(M.square)).module
    v = flat_fp_test(M)
    return _ok(v.projective), v.to_dict()


def check_free(env, s):
    P = _patched(env, s.args[1])
    v = rank_one_freeness(P.module)
    return ("bound" if v.free is None else _ok(v.free)), v.to_dict()


def check_universal(env, s):
    X = env.get(s.args[1], "toppush")
    rep = topological_pushout(X["Y"], X["Z"], X["T"], X["f"], X["g"], X["reference"])
    rep.universal = verify_universal_property(rep, X["Y"], X["Z"], X["T"], X["f"], X["g"])
    ok = (
        rep.partition_ok
        and rep.Y_closed_embedding
        and rep.U_open_embedding
        and rep.quotient_matches_order is not False
        and rep.reference_homeomorphic is not False
        and rep.universal["holds"]
    )
    return _ok(ok), rep.to_dict()


def check_morphism(env, s):
    _, a, b, hs = s.args
    m = DatumMorphism(env.get(a, "square"), env.get(b, "square"), *(env.get(h, "hom") for h in hs))
    rep = check_datum_morphism(m)
    return _ok(rep.accepted), rep.to_dict()


def check_refinement(env, s):
    _, fine, coarse, items = s.args
    gf, gc = _glued(env, fine), _glued(env, coarse)
    Df, Dc = env.get(fine, "charts"), env.get(coarse, "charts")
    restriction = {}
    for a, b, p in items:
        if a not in Df.squares or b not in Dc.squares:
            raise ScriptError(f"{a} -> {b} does not relate charts of {fine} and {coarse}")
        restriction[a] = (b, _pair(env.get(b, "square"), p) if p else None)
    reports = compare_refinement(gc, gf, restriction)
    ok = all(r.iso is not None for r in reports)
    return _ok(ok), {"charts": [r.to_dict() for r in reports]}


COMMANDS = {
    "conductor": cmd_conductor,
    "present": cmd_present,
    "member": cmd_member,
    "localize": cmd_localize,
    "pushforward": cmd_pushforward,
    "glue": cmd_glue,
    "lift_etale": cmd_lift_etale,
    "lift_valuation": cmd_lift_valuation,
    "suite": cmd_suite,
}
CHECKS = {
    "bicartesian": check_bicartesian_cmd,
    "adjunction": check_adjunction,
    "flat": check_flat,
    "free": check_free,
    "universal": check_universal,
    "morphism": check_morphism,
    "refinement": check_refinement,
}


def command_key(s):
    if s.kind == "suite":
        return f"suite:{s.args[0]}"
    if s.kind == "check":
        if s.args[0] == "adjunction":
            return f"check:adjunction:{s.args[1]}"
        return f"check:{s.args[0]}"
    return s.kind


def _execute(env, s):
    """(outcome, result) for a statement; exceptions are folded into the outcome."""
    try:
        if s.is_declaration:
            declare(env, s)
            return "pass", {}
        fn = CHECKS[s.args[0]] if s.kind == "check" else COMMANDS[s.kind]
        return fn(env, s)
    except ScriptError as exc:
        return "error", {"error": "ScriptError", "message": str(exc)}
    except BoundExceeded as exc:
        return "bound", {"error": "BoundExceeded", "message": str(exc), "bound": exc.bound}
    except (FerrandError, ValueError) as exc:
        out = {"error": type(exc).__name__, "message": str(exc)}
        w = getattr(exc, "witness", None)
        if w is not None:
            out["witness"] = jsonable(w)
        if getattr(exc, "charts", None):
            out["charts"] = list(exc.charts)
        return "fail", out


# --------------------------------------------------------------------------
# Reports


@dataclass(frozen=True)
class Record:
    index: int
    line: int
    statement: str
    operation: str
    anchor: str
    expected: str
    outcome: str
    verdict: str
    result: dict

    def to_dict(self):
        return {
            "index": self.index,
            "line": self.line,
            "statement": self.statement,
            "operation": self.operation,
            "anchor": self.anchor,
            "expected": self.expected,
            "outcome": self.outcome,
            "verdict": self.verdict,
            "result": jsonable(self.result),
        }

    def human(self):
        detail = ""
        if "error" in self.result:
            detail = f"  [{self.result['error']}: {self.result['message']}]"
        return f"{self.verdict} line {self.line}: {self.statement}  ({self.outcome}, expected {self.expected}){detail}"


@dataclass
class Report:
    metadata: dict
    records: list = field(default_factory=list)
    complete: bool = True

    def to_dict(self):
        fails = sum(r.verdict == "FAIL" for r in self.records)
        return {
            "schema": SCHEMA,
            "metadata": self.metadata,
            "complete": self.complete,
            "summary": {"records": len(self.records), "pass": len(self.records) - fails, "fail": fails},
            "records": [r.to_dict() for r in self.records],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    @property
    def exit_code(self):
        if any(r.outcome == "bound" and r.expected != "bound" for r in self.records):
            return 3
        if any(r.verdict == "FAIL" for r in self.records):
            return 1
        return 0


def _record(index, s, outcome, result):
    expected = s.expect or "pass"
    if s.is_declaration:
        key, op = "declare", f"declare:{s.kind}"
    else:
        key = command_key(s)
        op = OPERATIONS[key]
    verdict = "PASS" if outcome == expected else "FAIL"
    return Record(index, s.line, statement_text(s), op, ANCHORS[key], expected, outcome, verdict, result)


def field_tag(fld):
    return "QQ" if fld == QQ else f"Fp:{fld.char}"


def run(script, field=None, fail_fast=False, parallel=False, echo=None):
    """Execute ``script`` under the active limits; returns a Report.

    Declarations run in order.  Commands always get a record; declarations
    only when they fail or carry an explicit ``expect``.  With ``parallel`` the commands between two declarations run on
    a thread pool; records are still assembled in script order.
    """
    fld = field or QQ
    lim = limits()
    report = Report({"field": field_tag(fld), "degree_bound": lim.degree_bound,
                     "probe_degree": lim.probe_degree, "seed": lim.seed})
    env = Env(fld)
    stmts = list(script.statements)

    def emit(index, s, outcome, result):
        if s.is_declaration and s.expect is None and outcome == "pass":
            return False
        r = _record(index, s, outcome, result)
        report.records.append(r)
        if echo:
            echo(r.human())
        return fail_fast and r.verdict == "FAIL"

    i = 0
    while i < len(stmts):
        s = stmts[i]
        if s.is_declaration or not parallel:
            if emit(i, s, *_execute(env, s)):
                report.complete = i == len(stmts) - 1
                return report
            i += 1
            continue
        j = i
        while j < len(stmts) and not stmts[j].is_declaration:
            j += 1
        batch = stmts[i:j]
        ctx = lim

        def job(st, _ctx=ctx):
            from .config import using

            with using(degree_bound=_ctx.degree_bound, probe_degree=_ctx.probe_degree, seed=_ctx.seed):
                return _execute(env, st)

        with ThreadPoolExecutor() as pool:
            results = list(pool.map(job, batch))
        for k, (st, res) in enumerate(zip(batch, results)):
            if emit(i + k, st, *res):
                report.complete = i + k == len(stmts) - 1
                return report
        i = j
    return report


__all__ = ["ANCHORS", "SCHEMA", "Record", "Report", "field_tag", "jsonable", "run"]
