import random

import pytest
from hypothesis import given, settings, strategies as st

from fuzzgen import ProgramGen
from revsearch import ParseError, parse, pretty
from revsearch.corpus import CORPUS_DIR
from revsearch.parser import parse_expr, parse_stmts, tokenize
from revsearch.pretty import expr_text
from revsearch.syntax import (
    BinOp, Call, If, Index, Local, Loop, Neg, Num, Param, Procedure, Program, Size,
    Swap, Uncall, Update, Var,
)

FIG2 = """procedure srch1(int r[], int n, int k, int i)
  from i = 0 loop
    i += 1
  until r[i] = k
"""

CORPUS = sorted(CORPUS_DIR.glob("*.jns"))


def test_fig2_structure():
    program = parse(FIG2)
    assert program.names() == ["srch1"]
    proc = program["srch1"]
    assert proc.params == (Param("r", True), Param("n"), Param("k"), Param("i"))
    assert proc.body == (Loop(
        BinOp("=", Var("i"), Num(0)),
        (Update(Var("i"), "+=", Num(1)),),
        BinOp("=", Index("r", Var("i")), Var("k")),
    ),)


def test_empty_input():
    assert parse("") == Program(())
    assert parse("  // only a comment\n") == Program(())
    assert pretty(Program(())) == ""


def test_update_of_self_parses():
    assert parse_stmts("x += x") == (Update(Var("x"), "+=", Var("x")),)


def test_pretty_contains_until():
    assert "until r[i] = k" in pretty(parse(FIG2))


def test_layout_and_comments_are_ignored():
    one_line = "procedure srch1(int r[],int n,int k,int i) from i=0 loop i+=1 until r[i]=k // done"
    assert parse(one_line) == parse(FIG2)


def test_figure_statement_forms():
    body = parse_stmts("""
        local int t = next[l]
          l ^= prev[t]^t
        delocal int t = l
        u <=> m
        if l = size(head)-1 then l ^= size(head)-1 else f ^= 1 uncall srch2(head,next,prev,k,l) fi f != 1
        call log2ceil(n, len)
    """)
    local, swap, cond, call = body
    assert isinstance(local, Local) and local.final == Var("l")
    assert local.body == (Update(Var("l"), "^=", BinOp("^", Index("prev", Var("t")), Var("t"))),)
    assert swap == Swap(Var("u"), Var("m"))
    assert cond.orelse[1] == Uncall("srch2", ("head", "next", "prev", "k", "l"))
    assert cond.test == BinOp("=", Var("l"), BinOp("-", Size("head"), Num(1)))
    assert call == Call("log2ceil", ("n", "len"))


# golden parses pinning the precedence table
@pytest.mark.parametrize("text, tree", [
    ("-2 ** 2", Neg(BinOp("**", Num(2), Num(2)))),
    ("2 ** 3 ** 2", BinOp("**", Num(2), BinOp("**", Num(3), Num(2)))),
    ("-a * b", BinOp("*", Neg(Var("a")), Var("b"))),
    ("a + b * c", BinOp("+", Var("a"), BinOp("*", Var("b"), Var("c")))),
    ("a ^ b & c", BinOp("^", Var("a"), BinOp("&", Var("b"), Var("c")))),
    ("a - b - c", BinOp("-", BinOp("-", Var("a"), Var("b")), Var("c"))),
    ("a + b = c | d", BinOp("=", BinOp("+", Var("a"), Var("b")), BinOp("|", Var("c"), Var("d")))),
    ("a = b && c < d || e", BinOp("||", BinOp("&&", BinOp("=", Var("a"), Var("b")),
                                              BinOp("<", Var("c"), Var("d"))), Var("e"))),
    ("(l&(2**i)) = 0", BinOp("=", BinOp("&", Var("l"), BinOp("**", Num(2), Var("i"))), Num(0))),
    ("l + (u-l)/2", BinOp("+", Var("l"), BinOp("/", BinOp("-", Var("u"), Var("l")), Num(2)))),
    ("2 ** -v", BinOp("**", Num(2), Neg(Var("v")))),
])
def test_precedence(text, tree):
    assert parse_expr(text) == tree
    assert parse_expr(expr_text(tree)) == tree


def test_operator_tokens_use_longest_match():
    texts = [t.text for t in tokenize("a<=>b c<=d e^=f g^h i**j k&&l m||n")]
    assert "<=>" in texts and "<=" in texts and "^=" in texts and "**" in texts
    assert "&&" in texts and "||" in texts


@pytest.mark.parametrize("source, expected", [
    ("procedure p(int x) x = 1", "'+='"),
    ("procedure p(int x) if x then skip", "'fi'"),
    ("procedure p(int x) local int t = 0 skip delocal int u = 0", "'t'"),
    ("procedure p(int x) from x loop skip", "'until'"),
    ("procedure (int x) skip", "identifier"),
    ("procedure p(int x) x += ", "integer"),
])
def test_parse_errors_carry_span_and_expected(source, expected):
    with pytest.raises(ParseError) as err:
        parse(source)
    assert expected in err.value.expected
    assert err.value.span.line == 1


def test_error_location_on_later_line():
    with pytest.raises(ParseError) as err:
        parse("procedure p(int x)\n  x += 1\n  x $ 2\n")
    assert (err.value.span.line, err.value.span.column) == (3, 5)


def test_oversized_literal():
    with pytest.raises(ParseError):
        parse_expr(str(2 ** 63))
    assert parse_expr(str(2 ** 63 - 1)) == Num(2 ** 63 - 1)


def test_spans_nest():
    program = parse(FIG2)
    proc = program["srch1"]
    loop = proc.body[0]
    inner = loop.body[0]
    assert proc.span.offset <= loop.span.offset
    assert loop.span.offset + loop.span.length <= proc.span.offset + proc.span.length
    assert loop.span.offset <= inner.span.offset
    assert inner.span.offset + inner.span.length <= loop.span.offset + loop.span.length
    assert FIG2[inner.span.offset:inner.span.offset + inner.span.length] == "i += 1"


@pytest.mark.parametrize("path", CORPUS, ids=lambda p: p.name)
def test_corpus_round_trip(path):
    program = parse(path.read_text())
    text = pretty(program)
    assert parse(text) == program
    assert pretty(parse(text)) == text


def test_generated_programs_round_trip():
    rng = random.Random(11)
    for _ in range(300):
        program = ProgramGen(rng, risky=True).program()
        assert parse(pretty(program)) == program


NAMES = st.sampled_from(["a", "b", "k", "len", "m"])
OPS = st.sampled_from(["+", "-", "*", "/", "%", "**", "&", "|", "^", "=", "!=", "<", "<=",
                       ">", ">=", "&&", "||"])


def _extend(children):
    return st.one_of(
        st.builds(Neg, children),
        st.builds(BinOp, OPS, children, children),
        st.builds(Index, NAMES, children),
    )


EXPRS = st.recursive(
    st.one_of(st.builds(Num, st.integers(0, 2 ** 63 - 1)), st.builds(Var, NAMES),
              st.builds(Size, NAMES)),
    _extend, max_leaves=12)


@settings(max_examples=300)
@given(EXPRS)
def test_expression_round_trip(e):
    assert parse_expr(expr_text(e)) == e


def test_round_trip_of_hand_built_program():
    proc = Procedure("p", (Param("x"), Param("a", True)), (
        If(BinOp("<", Var("x"), Num(3)), (Update(Index("a", Var("x")), "-=", Num(1)),), (),
           BinOp("<", Var("x"), Num(3))),
    ))
    program = Program((proc,))
    assert "else" not in pretty(program)
    assert parse(pretty(program)) == program
