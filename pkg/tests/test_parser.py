import random

import pytest

from dualgrad.errors import DgParseError
from dualgrad.parser import parse, parse_type
from dualgrad.progen import random_program
from dualgrad.syntax import (
    BOOL, REAL, App, Cons, Fst, Lam, Let, LitI, LitR, NilE, Pair, Par, Prim,
    Sign, Snd, TFun, TList, TProd, TSum, UnitE, Var, expr_to_src,
)


def test_fig1_shape():
    e = parse(r"\(p: (R, R)). let z: R = fst(p) + snd(p) in fst(p) * z")
    assert isinstance(e, Lam)
    assert e.anno == TProd(REAL, REAL)
    body = e.body
    assert isinstance(body, Let)
    assert body.bound == Prim("add", [Fst(Var("p")), Snd(Var("p"))])
    assert body.body == Prim("mul", [Fst(Var("p")), Var("z")])


def test_real_literal():
    assert parse("1.5") == LitR(1.5)
    assert parse("2") == LitR(2.0)
    assert parse("1e3") == LitR(1000.0)


def test_int_literal():
    assert parse("42i") == LitI(42)
    with pytest.raises(DgParseError):
        parse("4.2i")


def test_par_syntax():
    e = parse("par(sin(x), cos(x))")
    assert e == Par(Prim("sin", [Var("x")]), Prim("cos", [Var("x")]))


def test_precedence():
    assert parse("1.0 + 2.0 * 3.0") == Prim(
        "add", [LitR(1.0), Prim("mul", [LitR(2.0), LitR(3.0)])])
    assert parse("1.0 - 2.0 - 3.0") == Prim(
        "sub", [Prim("sub", [LitR(1.0), LitR(2.0)]), LitR(3.0)])
    assert parse("-x * y") == Prim("mul", [Prim("neg", [Var("x")]), Var("y")])
    # cons is right-associative and binds looser than arithmetic
    e = parse("1.0 + 2.0 :: 3.0 :: []@R")
    assert e == Cons(Prim("add", [LitR(1.0), LitR(2.0)]),
                     Cons(LitR(3.0), NilE(REAL)))


def test_application_juxtaposition():
    assert parse("f x y") == App(App(Var("f"), Var("x")), Var("y"))
    assert parse("go (0.0, p)") == App(Var("go"), Pair(LitR(0.0), Var("p")))


def test_unit_pair_group():
    assert parse("()") == UnitE()
    assert parse("(x)") == Var("x")
    assert parse("(x, ())") == Pair(Var("x"), UnitE())


def test_types():
    assert parse_type("R -> R -> R") == TFun(REAL, TFun(REAL, REAL))
    assert parse_type("(R, R) -> R") == TFun(TProd(REAL, REAL), REAL)
    assert parse_type("[R]") == TList(REAL)
    assert parse_type("R + ()") == TSum(REAL, parse_type("()"))
    assert parse_type("Bool") == BOOL


def test_sign_case_caselist():
    e = parse("case sign(x) { inl a -> 0.0; inr b -> 1.0 }")
    assert e.scrut == Sign(Var("x"))
    e = parse("caselist xs { [] -> 0.0; h :: t -> h }")
    assert e.hname == "h" and e.tname == "t"


def test_parse_errors_positioned():
    with pytest.raises(DgParseError) as exc:
        parse("let x: R = 1.0")
    assert "1:" in str(exc.value) or "expected" in str(exc.value)
    with pytest.raises(DgParseError):
        parse("1.0 +")
    with pytest.raises(DgParseError):
        parse("fst 3.0")  # fst requires parentheses


def test_comments_ignored():
    e = parse("# a comment\n1.0 # trailing\n")
    assert e == LitR(1.0)


@pytest.mark.parametrize("seed", range(120))
def test_roundtrip_generated(seed):
    rng = random.Random(seed)
    prog, _x = random_program(rng)
    assert parse(expr_to_src(prog)) == prog


@pytest.mark.parametrize("name", [
    "fig1.dg", "chain3.dg", "geo_loop.dg", "dot4.dg", "partial_order.dg",
    "mixed_sum.dg", "rotquat_scalar.dg", "sumlist.dg",
])
def test_roundtrip_corpus(name):
    from helpers import PROGRAM_DIR
    ast = parse((PROGRAM_DIR / name).read_text())
    assert parse(expr_to_src(ast)) == ast
