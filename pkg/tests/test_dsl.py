import pytest
from hypothesis import given
from hypothesis import strategies as st

from ferrand.cli import corpus_names, corpus_script
from ferrand.dsl import Parser, ScriptSyntaxError, expr_text, parse, print_script, statement_text
from ferrand.errors import ParseError, UndeclaredName

leaves = st.one_of(
    st.integers(0, 30).map(lambda n: ("num", str(n))),
    st.sampled_from(["x", "y", "t", "a1"]).map(lambda v: ("var", v)),
)


def _grow(children):
    return st.one_of(
        children.map(lambda e: ("neg", e)),
        st.tuples(st.sampled_from(["add", "sub", "mul", "div"]), children, children),
        st.tuples(children, st.integers(-3, 5)).map(lambda p: ("pow", p[0], p[1])),
    )


exprs = st.recursive(leaves, _grow, max_leaves=8)


def parse_expr(text):
    p = Parser(text)
    e = p.expr()
    assert p.peek().kind == "end"
    return e


@given(exprs)
def test_expression_round_trip(e):
    assert parse_expr(expr_text(e)) == e


@given(exprs)
def test_statement_round_trip(e):
    text = f"ring R = QQ[x, y, t, a1];\nring K = QQ[t] / ({expr_text(e)});\n"
    s = parse(text)
    assert parse(print_script(s)) == s


def test_empty_script():
    assert len(parse("")) == 0
    assert len(parse("# only a comment\n\n")) == 0


def test_nodal_script_has_nine_declarations():
    assert len(parse(corpus_script("nodal")).declarations) == 9


@pytest.mark.parametrize("name", corpus_names())
def test_corpus_round_trip(name):
    s = parse(corpus_script(name))
    text = print_script(s)
    assert parse(text) == s
    assert print_script(parse(text)) == text


def test_missing_target_reports_end_of_input():
    with pytest.raises(ScriptSyntaxError) as err:
        parse("ring R = QQ[x];\nhom h: R -> ")
    assert (err.value.line, err.value.column) == (2, 13)
    assert err.value.expected == ("target name",)
    assert "end of input" in str(err.value)


def test_undeclared_name_position():
    with pytest.raises(UndeclaredName) as err:
        parse("ring R = QQ[x];\nsquare S = pushout(beta, pi);")
    assert (err.value.line, err.value.column) == (2, 20)


def test_expected_set_for_bad_keyword():
    with pytest.raises(ParseError) as err:
        parse("rings R = QQ[x];")
    assert err.value.expected == ("statement keyword",)


def test_keywords_are_not_names():
    with pytest.raises(ParseError):
        parse("ring check = QQ[x];")


def test_bad_character():
    with pytest.raises(ScriptSyntaxError) as err:
        parse("ring R = QQ[x] $;")
    assert err.value.column == 16


def test_expect_suffix_and_canonical_text():
    s = parse("ring k = k[];ring C=k[t];ring K=k[t]/(t^2);hom b:k->K{};hom p:C->K{t->t};"
              "square S=pushout(b,p);member S t expect fail;")
    last = s.statements[-1]
    assert last.expect == "fail"
    assert statement_text(last) == "member S t expect fail;"


def test_spans_do_not_affect_equality():
    a = parse("ring R = QQ[x];")
    b = parse("\n\n   ring R = QQ[x];")
    assert a == b and a.statements[0].line != b.statements[0].line
