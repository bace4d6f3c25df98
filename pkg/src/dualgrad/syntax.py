"""AST, types, and the primitive-operation table for the .dg source language.

The language is a small strict (call-by-value) functional language with
reals, integers, units, pairs, sums, functions, a built-in list type, a
``sign`` test, and a binary parallel-pair construct ``par(s, t)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field


# --------------------------------------------------------------------------
# Types

class Ty:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class TReal(Ty):
    pass


@dataclass(frozen=True, slots=True)
class TInt(Ty):
    pass


@dataclass(frozen=True, slots=True)
class TUnit(Ty):
    pass


@dataclass(frozen=True, slots=True)
class TProd(Ty):
    fst: Ty
    snd: Ty


@dataclass(frozen=True, slots=True)
class TSum(Ty):
    left: Ty
    right: Ty


@dataclass(frozen=True, slots=True)
class TFun(Ty):
    dom: Ty
    cod: Ty


@dataclass(frozen=True, slots=True)
class TList(Ty):
    elem: Ty


REAL = TReal()
INT = TInt()
UNIT = TUnit()
BOOL = TSum(UNIT, UNIT)


def is_first_order(ty: Ty) -> bool:
    """True if the type contains no function arrows (wrapper-legal)."""
    stack = [ty]
    while stack:
        t = stack.pop()
        if isinstance(t, TFun):
            return False
        if isinstance(t, TProd):
            stack.append(t.fst)
            stack.append(t.snd)
        elif isinstance(t, TSum):
            stack.append(t.left)
            stack.append(t.right)
        elif isinstance(t, TList):
            stack.append(t.elem)
    return True


def type_to_src(ty: Ty, prec: int = 0) -> str:
    """Render a type in surface syntax. prec: 0 = fun, 1 = sum, 2 = atom."""
    if isinstance(ty, TFun):
        s = f"{type_to_src(ty.dom, 1)} -> {type_to_src(ty.cod, 0)}"
        return f"({s})" if prec > 0 else s
    if isinstance(ty, TSum):
        s = f"{type_to_src(ty.left, 2)} + {type_to_src(ty.right, 1)}"
        return f"({s})" if prec > 1 else s
    if isinstance(ty, TReal):
        return "R"
    if isinstance(ty, TInt):
        return "Z"
    if isinstance(ty, TUnit):
        return "()"
    if isinstance(ty, TProd):
        return f"({type_to_src(ty.fst)}, {type_to_src(ty.snd)})"
    if isinstance(ty, TList):
        return f"[{type_to_src(ty.elem)}]"
    raise AssertionError(f"unknown type {ty!r}")


# --------------------------------------------------------------------------
# Primitive operations
#
# Each op carries its value function and the tuple of partial derivatives
# evaluated at the argument point (the ``d * d(op)/dx_i`` scaling factors
# with d = 1).  All value functions follow IEEE semantics: no Python
# exceptions at singular points, inf/nan instead.

_INF = math.inf
_NAN = math.nan


def _ieee_div(a: float, b: float) -> float:
    try:
        return a / b
    except ZeroDivisionError:
        if a == 0.0 or a != a:
            return _NAN
        return math.copysign(_INF, a) * math.copysign(1.0, b)


def _ieee_log(a: float) -> float:
    if a > 0.0:
        return math.log(a)
    if a == 0.0:
        return -_INF
    return _NAN


def _ieee_sqrt(a: float) -> float:
    return math.sqrt(a) if a >= 0.0 else _NAN


def _ieee_exp(a: float) -> float:
    try:
        return math.exp(a)
    except OverflowError:
        return _INF


def _ieee_sin(a: float) -> float:
    try:
        return math.sin(a)
    except ValueError:
        return _NAN


def _ieee_cos(a: float) -> float:
    try:
        return math.cos(a)
    except ValueError:
        return _NAN


@dataclass(frozen=True, slots=True)
class Op:
    name: str
    arity: int
    fn: object          # (float, ...) -> float
    partials: object    # (float, ...) -> tuple of d(op)/dx_i at the point


OPS: dict[str, Op] = {
    op.name: op
    for op in [
        Op("add", 2, lambda a, b: a + b, lambda a, b: (1.0, 1.0)),
        Op("sub", 2, lambda a, b: a - b, lambda a, b: (1.0, -1.0)),
        Op("mul", 2, lambda a, b: a * b, lambda a, b: (b, a)),
        Op("div", 2, _ieee_div,
           lambda a, b: (_ieee_div(1.0, b), _ieee_div(-a, b * b))),
        Op("neg", 1, lambda a: -a, lambda a: (-1.0,)),
        Op("sin", 1, _ieee_sin, lambda a: (_ieee_cos(a),)),
        Op("cos", 1, _ieee_cos, lambda a: (-_ieee_sin(a),)),
        Op("exp", 1, _ieee_exp, lambda a: (_ieee_exp(a),)),
        Op("log", 1, _ieee_log, lambda a: (_ieee_div(1.0, a),)),
        Op("sqrt", 1, _ieee_sqrt,
           lambda a: (_ieee_div(0.5, _ieee_sqrt(a)),)),
    ]
}

INFIX_OPS = {"add": "+", "sub": "-", "mul": "*", "div": "/"}
PREFIX_FUN_OPS = ("sin", "cos", "exp", "log", "sqrt")


# --------------------------------------------------------------------------
# Expressions
#
# ``pos`` is a (line, col) source location; ``ty`` is filled in by the
# typechecker.  Neither participates in structural equality, so that
# parse(pretty_print(e)) == e.

@dataclass(eq=True, slots=True)
class Expr:
    pass


@dataclass(eq=True, slots=True)
class Var(Expr):
    name: str
    pos: object = field(default=None, compare=False, repr=False)
    ty: object = field(default=None, compare=False, repr=False)


@dataclass(eq=True, slots=True)
class LitR(Expr):
    value: float
    pos: object = field(default=None, compare=False, repr=False)
    ty: object = field(default=None, compare=False, repr=False)


@dataclass(eq=True, slots=True)
class LitI(Expr):
    value: int
    pos: object = field(default=None, compare=False, repr=False)
    ty: object = field(default=None, compare=False, repr=False)


@dataclass(eq=True, slots=True)
class UnitE(Expr):
    pos: object = field(default=None, compare=False, repr=False)
    ty: object = field(default=None, compare=False, repr=False)


@dataclass(eq=True, slots=True)
class Pair(Expr):
    fst: Expr
    snd: Expr
    pos: object = field(default=None, compare=False, repr=False)
    ty: object = field(default=None, compare=False, repr=False)


@dataclass(eq=True, slots=True)
class Fst(Expr):
    arg: Expr
    pos: object = field(default=None, compare=False, repr=False)
    ty: object = field(default=None, compare=False, repr=False)


@dataclass(eq=True, slots=True)
class Snd(Expr):
    arg: Expr
    pos: object = field(default=None, compare=False, repr=False)
    ty: object = field(default=None, compare=False, repr=False)


@dataclass(eq=True, slots=True)
class App(Expr):
    fn: Expr
    arg: Expr
    pos: object = field(default=None, compare=False, repr=False)
    ty: object = field(default=None, compare=False, repr=False)


@dataclass(eq=True, slots=True)
class Lam(Expr):
    name: str
    anno: Ty
    body: Expr
    pos: object = field(default=None, compare=False, repr=False)
    ty: object = field(default=None, compare=False, repr=False)


@dataclass(eq=True, slots=True)
class Let(Expr):
    name: str
    anno: Ty
    bound: Expr
    body: Expr
    pos: object = field(default=None, compare=False, repr=False)
    ty: object = field(default=None, compare=False, repr=False)


@dataclass(eq=True, slots=True)
class LetRec(Expr):
    fname: str
    xname: str
    dom: Ty
    cod: Ty
    fbody: Expr
    body: Expr
    pos: object = field(default=None, compare=False, repr=False)
    ty: object = field(default=None, compare=False, repr=False)


@dataclass(eq=True, slots=True)
class Prim(Expr):
    op: str
    args: list
    pos: object = field(default=None, compare=False, repr=False)
    ty: object = field(default=None, compare=False, repr=False)


@dataclass(eq=True, slots=True)
class Inl(Expr):
    arg: Expr
    anno: Ty
    pos: object = field(default=None, compare=False, repr=False)
    ty: object = field(default=None, compare=False, repr=False)


@dataclass(eq=True, slots=True)
class Inr(Expr):
    arg: Expr
    anno: Ty
    pos: object = field(default=None, compare=False, repr=False)
    ty: object = field(default=None, compare=False, repr=False)


@dataclass(eq=True, slots=True)
class Case(Expr):
    scrut: Expr
    lname: str
    lbody: Expr
    rname: str
    rbody: Expr
    pos: object = field(default=None, compare=False, repr=False)
    ty: object = field(default=None, compare=False, repr=False)


@dataclass(eq=True, slots=True)
class Sign(Expr):
    arg: Expr
    pos: object = field(default=None, compare=False, repr=False)
    ty: object = field(default=None, compare=False, repr=False)


@dataclass(eq=True, slots=True)
class NilE(Expr):
    anno: Ty  # element type
    pos: object = field(default=None, compare=False, repr=False)
    ty: object = field(default=None, compare=False, repr=False)


@dataclass(eq=True, slots=True)
class Cons(Expr):
    head: Expr
    tail: Expr
    pos: object = field(default=None, compare=False, repr=False)
    ty: object = field(default=None, compare=False, repr=False)


@dataclass(eq=True, slots=True)
class CaseList(Expr):
    scrut: Expr
    nilbody: Expr
    hname: str
    tname: str
    consbody: Expr
    pos: object = field(default=None, compare=False, repr=False)
    ty: object = field(default=None, compare=False, repr=False)


@dataclass(eq=True, slots=True)
class Par(Expr):
    left: Expr
    right: Expr
    pos: object = field(default=None, compare=False, repr=False)
    ty: object = field(default=None, compare=False, repr=False)


# --------------------------------------------------------------------------
# Pretty printer (inverse of the parser up to whitespace)

# Precedence levels: 0 binders/branches, 1 cons, 2 add/sub, 3 mul/div,
# 4 unary, 5 application, 6 atoms.
_ADD_PREC = {"add": 2, "sub": 2}
_MUL_PREC = {"mul": 3, "div": 3}


def expr_to_src(e: Expr, prec: int = 0) -> str:
    s, p = _render(e)
    return f"({s})" if p < prec else s


def _render(e: Expr) -> tuple[str, int]:
    cls = e.__class__
    if cls is Var:
        return e.name, 6
    if cls is LitR:
        return repr(float(e.value)), 6
    if cls is LitI:
        return f"{e.value}i", 6
    if cls is UnitE:
        return "()", 6
    if cls is Pair:
        return f"({expr_to_src(e.fst)}, {expr_to_src(e.snd)})", 6
    if cls is Fst:
        return f"fst({expr_to_src(e.arg)})", 6
    if cls is Snd:
        return f"snd({expr_to_src(e.arg)})", 6
    if cls is Sign:
        return f"sign({expr_to_src(e.arg)})", 6
    if cls is Par:
        return f"par({expr_to_src(e.left)}, {expr_to_src(e.right)})", 6
    if cls is NilE:
        return f"[]@{type_to_src(e.anno, 2)}", 6
    if cls is Cons:
        return f"{expr_to_src(e.head, 2)} :: {expr_to_src(e.tail, 1)}", 1
    if cls is App:
        return f"{expr_to_src(e.fn, 5)} {expr_to_src(e.arg, 6)}", 5
    if cls is Lam:
        return (f"\\({e.name}: {type_to_src(e.anno)}). {expr_to_src(e.body)}", 0)
    if cls is Let:
        return (f"let {e.name}: {type_to_src(e.anno)} = {expr_to_src(e.bound)} "
                f"in {expr_to_src(e.body)}", 0)
    if cls is LetRec:
        return (f"letrec {e.fname} ({e.xname}: {type_to_src(e.dom)}): "
                f"{type_to_src(e.cod)} = {expr_to_src(e.fbody)} "
                f"in {expr_to_src(e.body)}", 0)
    if cls is Prim:
        op = e.op
        if op in INFIX_OPS:
            lvl = _ADD_PREC.get(op) or _MUL_PREC[op]
            a = expr_to_src(e.args[0], lvl)
            b = expr_to_src(e.args[1], lvl + 1)  # left associative
            return f"{a} {INFIX_OPS[op]} {b}", lvl
        if op == "neg":
            return f"-{expr_to_src(e.args[0], 4)}", 4
        return f"{op}({expr_to_src(e.args[0])})", 6
    if cls is Inl:
        return f"inl@{type_to_src(e.anno, 2)} {expr_to_src(e.arg, 4)}", 4
    if cls is Inr:
        return f"inr@{type_to_src(e.anno, 2)} {expr_to_src(e.arg, 4)}", 4
    if cls is Case:
        return (f"case {expr_to_src(e.scrut)} {{ inl {e.lname} -> "
                f"{expr_to_src(e.lbody)}; inr {e.rname} -> "
                f"{expr_to_src(e.rbody)} }}", 6)
    if cls is CaseList:
        return (f"caselist {expr_to_src(e.scrut)} {{ [] -> "
                f"{expr_to_src(e.nilbody)}; {e.hname} :: {e.tname} -> "
                f"{expr_to_src(e.consbody)} }}", 6)
    raise AssertionError(f"unknown expr {e!r}")
