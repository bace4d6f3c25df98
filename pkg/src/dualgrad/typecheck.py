"""Typechecker: annotates every node with its type, enforces the
first-order restriction on the top-level program signature."""
from __future__ import annotations

from .errors import DgTypeError
from .syntax import (
    BOOL, INT, REAL, UNIT,
    App, Case, CaseList, Cons, Expr, Fst, Inl, Inr, Lam, Let, LetRec, LitI,
    LitR, NilE, OPS, Pair, Par, Prim, Sign, Snd, TFun, TList, TProd, TSum,
    Ty, UnitE, Var, is_first_order, type_to_src,
)


def typecheck(e: Expr, env: dict[str, Ty] | None = None) -> Ty:
    """Infer and annotate the type of ``e`` under ``env``."""
    ty = _check(e, env or {})
    return ty


def check_program(e: Expr) -> tuple[Ty, Ty]:
    """Typecheck a whole program: a lambda with first-order domain/codomain.

    Returns (domain, codomain).
    """
    ty = typecheck(e)
    if not isinstance(e, Lam) or not isinstance(ty, TFun):
        raise DgTypeError("a program must be a top-level lambda", getattr(e, "pos", None))
    if not is_first_order(ty.dom) or not is_first_order(ty.cod):
        raise DgTypeError(
            f"higher-order top-level type {type_to_src(ty)}: the program "
            "signature must not contain function arrows", e.pos)
    return ty.dom, ty.cod


def _fail(e, msg):
    raise DgTypeError(msg, getattr(e, "pos", None))


def _expect(e, got: Ty, want: Ty, what: str):
    if got != want:
        _fail(e, f"{what}: expected {type_to_src(want)}, got {type_to_src(got)}")


def _check(e: Expr, env: dict[str, Ty]) -> Ty:
    cls = e.__class__
    if cls is Var:
        ty = env.get(e.name)
        if ty is None:
            _fail(e, f"unbound variable {e.name!r}")
    elif cls is LitR:
        ty = REAL
    elif cls is LitI:
        ty = INT
    elif cls is UnitE:
        ty = UNIT
    elif cls is Pair:
        ty = TProd(_check(e.fst, env), _check(e.snd, env))
    elif cls is Fst:
        t = _check(e.arg, env)
        if not isinstance(t, TProd):
            _fail(e, f"fst of non-pair type {type_to_src(t)}")
        ty = t.fst
    elif cls is Snd:
        t = _check(e.arg, env)
        if not isinstance(t, TProd):
            _fail(e, f"snd of non-pair type {type_to_src(t)}")
        ty = t.snd
    elif cls is App:
        tf = _check(e.fn, env)
        ta = _check(e.arg, env)
        if not isinstance(tf, TFun):
            _fail(e, f"application of non-function type {type_to_src(tf)}")
        _expect(e, ta, tf.dom, "function argument")
        ty = tf.cod
    elif cls is Lam:
        ty = TFun(e.anno, _check(e.body, {**env, e.name: e.anno}))
    elif cls is Let:
        tb = _check(e.bound, env)
        _expect(e, tb, e.anno, f"let binding of {e.name!r}")
        ty = _check(e.body, {**env, e.name: e.anno})
    elif cls is LetRec:
        fty = TFun(e.dom, e.cod)
        tb = _check(e.fbody, {**env, e.fname: fty, e.xname: e.dom})
        _expect(e, tb, e.cod, f"letrec body of {e.fname!r}")
        ty = _check(e.body, {**env, e.fname: fty})
    elif cls is Prim:
        op = OPS[e.op]
        if len(e.args) != op.arity:
            _fail(e, f"{e.op} expects {op.arity} arguments")
        for a in e.args:
            _expect(a, _check(a, env), REAL, f"argument of {e.op}")
        ty = REAL
    elif cls is Inl:
        if not isinstance(e.anno, TSum):
            _fail(e, f"inl annotation must be a sum type, got {type_to_src(e.anno)}")
        _expect(e, _check(e.arg, env), e.anno.left, "inl payload")
        ty = e.anno
    elif cls is Inr:
        if not isinstance(e.anno, TSum):
            _fail(e, f"inr annotation must be a sum type, got {type_to_src(e.anno)}")
        _expect(e, _check(e.arg, env), e.anno.right, "inr payload")
        ty = e.anno
    elif cls is Case:
        ts = _check(e.scrut, env)
        if not isinstance(ts, TSum):
            _fail(e, f"case scrutinee has non-sum type {type_to_src(ts)}")
        tl = _check(e.lbody, {**env, e.lname: ts.left})
        tr = _check(e.rbody, {**env, e.rname: ts.right})
        _expect(e, tr, tl, "case branches must agree")
        ty = tl
    elif cls is Sign:
        _expect(e, _check(e.arg, env), REAL, "sign argument")
        ty = BOOL
    elif cls is NilE:
        ty = TList(e.anno)
    elif cls is Cons:
        th = _check(e.head, env)
        tt = _check(e.tail, env)
        if not isinstance(tt, TList):
            _fail(e, f"cons tail has non-list type {type_to_src(tt)}")
        _expect(e, th, tt.elem, "cons head")
        ty = tt
    elif cls is CaseList:
        ts = _check(e.scrut, env)
        if not isinstance(ts, TList):
            _fail(e, f"caselist scrutinee has non-list type {type_to_src(ts)}")
        tn = _check(e.nilbody, env)
        tc = _check(e.consbody,
                    {**env, e.hname: ts.elem, e.tname: ts})
        _expect(e, tc, tn, "caselist branches must agree")
        ty = tn
    elif cls is Par:
        ty = TProd(_check(e.left, env), _check(e.right, env))
    else:
        raise AssertionError(f"unknown expr {e!r}")
    e.ty = ty
    return ty
