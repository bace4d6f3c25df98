"""Runtime values, input/cotangent literals, and structure walkers.

Runtime representation:

    Real   -> float            (engines substitute their own scalar objects)
    Int    -> int
    Unit   -> UNIT sentinel
    Prod   -> 2-tuple
    Sum    -> InlV / InrV
    List   -> NIL / ConsV chain
    Fun    -> Closure

Walkers over list spines are iterative: source programs routinely build
lists with 1e5 elements and CPython recursion cannot absorb that.
"""
from __future__ import annotations

from .errors import DgInputError, DgParseError
from .parser import Token, tokenize
from .syntax import (
    Ty, TReal, TInt, TUnit, TProd, TSum, TList, TFun,
)


class _Unit:
    __slots__ = ()

    def __repr__(self):
        return "()"


UNIT_V = _Unit()


class InlV:
    __slots__ = ("val",)

    def __init__(self, val):
        self.val = val

    def __repr__(self):
        return f"inl {self.val!r}"

    def __eq__(self, other):
        return isinstance(other, InlV) and self.val == other.val


class InrV:
    __slots__ = ("val",)

    def __init__(self, val):
        self.val = val

    def __repr__(self):
        return f"inr {self.val!r}"

    def __eq__(self, other):
        return isinstance(other, InrV) and self.val == other.val


class _Nil:
    __slots__ = ()

    def __repr__(self):
        return "[]"


NIL_V = _Nil()


class ConsV:
    __slots__ = ("head", "tail")

    def __init__(self, head, tail):
        self.head = head
        self.tail = tail

    def __repr__(self):
        return f"[{', '.join(repr(x) for x in iter_list(self))}]"

    def __eq__(self, other):
        if not isinstance(other, ConsV):
            return False
        a, b = self, other
        while isinstance(a, ConsV) and isinstance(b, ConsV):
            if a.head != b.head:
                return False
            a, b = a.tail, b.tail
        return a is NIL_V and b is NIL_V


class Closure:
    __slots__ = ("param", "body", "env")

    def __init__(self, param, body, env):
        self.param = param
        self.body = body
        self.env = env

    def __repr__(self):
        return f"<closure \\{self.param}>"


def iter_list(v):
    while isinstance(v, ConsV):
        yield v.head
        v = v.tail


def list_value(items):
    v = NIL_V
    for x in reversed(list(items)):
        v = ConsV(x, v)
    return v


# --------------------------------------------------------------------------
# Value literals (CLI input syntax): 3.0, 42i, (), (v, w), inl v, inr v,
# [v1, v2].  Parsed shapeless, then conformed against a type.

def parse_literal(src: str):
    toks = tokenize(src)
    val, i = _parse_lit(toks, 0)
    if toks[i].kind != "eof":
        t = toks[i]
        raise DgParseError(f"trailing input in value literal: {t.text!r}",
                           t.line, t.col)
    return val


def _parse_lit(toks: list[Token], i: int):
    t = toks[i]
    if t.kind == "num":
        if t.text.endswith("i"):
            return int(t.text[:-1]), i + 1
        return float(t.text), i + 1
    if t.kind == "sym" and t.text == "-":
        v, j = _parse_lit(toks, i + 1)
        if not isinstance(v, (int, float)):
            raise DgParseError("'-' must prefix a number", t.line, t.col)
        return -v, j
    if t.kind == "sym" and t.text == "(":
        if toks[i + 1].kind == "sym" and toks[i + 1].text == ")":
            return UNIT_V, i + 2
        a, j = _parse_lit(toks, i + 1)
        tj = toks[j]
        if tj.kind == "sym" and tj.text == ",":
            b, k = _parse_lit(toks, j + 1)
            tk = toks[k]
            if not (tk.kind == "sym" and tk.text == ")"):
                raise DgParseError("expected ')'", tk.line, tk.col)
            return (a, b), k + 1
        if tj.kind == "sym" and tj.text == ")":
            return a, j + 1
        raise DgParseError("expected ',' or ')'", tj.line, tj.col)
    if t.kind == "kw" and t.text in ("inl", "inr"):
        v, j = _parse_lit(toks, i + 1)
        return (InlV(v) if t.text == "inl" else InrV(v)), j
    if t.kind == "sym" and t.text == "[":
        items = []
        j = i + 1
        if toks[j].kind == "sym" and toks[j].text == "]":
            return NIL_V, j + 1
        while True:
            v, j = _parse_lit(toks, j)
            items.append(v)
            tj = toks[j]
            if tj.kind == "sym" and tj.text == ",":
                j += 1
                continue
            if tj.kind == "sym" and tj.text == "]":
                return list_value(items), j + 1
            raise DgParseError("expected ',' or ']'", tj.line, tj.col)
    raise DgParseError(f"bad value literal {t.text!r}", t.line, t.col)


def conform(val, ty: Ty):
    """Check/coerce a parsed literal against a type; returns the value."""
    if isinstance(ty, TReal):
        if isinstance(val, float):
            return val
        if isinstance(val, int) and not isinstance(val, bool):
            return float(val)
        raise DgInputError(f"expected a real, got {val!r}")
    if isinstance(ty, TInt):
        if isinstance(val, int):
            return val
        raise DgInputError(f"expected an integer (42i), got {val!r}")
    if isinstance(ty, TUnit):
        if val is UNIT_V:
            return val
        raise DgInputError(f"expected (), got {val!r}")
    if isinstance(ty, TProd):
        if isinstance(val, tuple) and len(val) == 2:
            return (conform(val[0], ty.fst), conform(val[1], ty.snd))
        raise DgInputError(f"expected a pair, got {val!r}")
    if isinstance(ty, TSum):
        if isinstance(val, InlV):
            return InlV(conform(val.val, ty.left))
        if isinstance(val, InrV):
            return InrV(conform(val.val, ty.right))
        raise DgInputError(f"expected inl/inr, got {val!r}")
    if isinstance(ty, TList):
        if val is NIL_V or isinstance(val, ConsV):
            return list_value(conform(x, ty.elem) for x in iter_list(val))
        raise DgInputError(f"expected a list, got {val!r}")
    if isinstance(ty, TFun):
        raise DgInputError("function-typed inputs are not supported")
    raise AssertionError(f"unknown type {ty!r}")


def value_to_literal(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, bool):
        raise AssertionError("bool is not a runtime value")
    if isinstance(v, int):
        return f"{v}i"
    if v is UNIT_V:
        return "()"
    if isinstance(v, tuple):
        return f"({value_to_literal(v[0])}, {value_to_literal(v[1])})"
    if isinstance(v, InlV):
        return f"inl {value_to_literal(v.val)}"
    if isinstance(v, InrV):
        return f"inr {value_to_literal(v.val)}"
    if v is NIL_V or isinstance(v, ConsV):
        return "[" + ", ".join(value_to_literal(x) for x in iter_list(v)) + "]"
    if isinstance(v, Closure):
        return repr(v)
    raise AssertionError(f"cannot print value {v!r}")


# --------------------------------------------------------------------------
# Type-directed structure walkers.
#
# All of these mirror a value whose Real leaves may hold arbitrary scalar
# representations (floats for plain values, dual objects inside engines).
# ``map_scalars`` rebuilds the structure; ``scalars_of``/``zip_scalars``
# iterate leaves left-to-right, which fixes the input numbering shared by
# every engine.

def map_scalars(ty: Ty, val, f):
    """Rebuild ``val`` with ``f`` applied to every Real leaf."""
    if isinstance(ty, TReal):
        return f(val)
    if isinstance(ty, (TInt, TUnit)):
        return val
    if isinstance(ty, TProd):
        return (map_scalars(ty.fst, val[0], f), map_scalars(ty.snd, val[1], f))
    if isinstance(ty, TSum):
        if isinstance(val, InlV):
            return InlV(map_scalars(ty.left, val.val, f))
        return InrV(map_scalars(ty.right, val.val, f))
    if isinstance(ty, TList):
        return list_value(map_scalars(ty.elem, x, f) for x in iter_list(val))
    raise AssertionError(f"map_scalars over {ty!r}")


def scalars_of(ty: Ty, val):
    """Yield every Real leaf of ``val``, left to right (iterative spine)."""
    stack = [(ty, val)]
    while stack:
        t, v = stack.pop()
        if isinstance(t, TReal):
            yield v
        elif isinstance(t, (TInt, TUnit)):
            pass
        elif isinstance(t, TProd):
            stack.append((t.snd, v[1]))
            stack.append((t.fst, v[0]))
        elif isinstance(t, TSum):
            if isinstance(v, InlV):
                stack.append((t.left, v.val))
            else:
                stack.append((t.right, v.val))
        elif isinstance(t, TList):
            items = list(iter_list(v))
            for x in reversed(items):
                stack.append((t.elem, x))
        else:
            raise AssertionError(f"scalars_of over {t!r}")


def zip_scalars(ty: Ty, a, b):
    """Yield paired Real leaves of two same-shaped values.

    Shapes must agree on sum tags and list lengths; used to pair an
    engine's dual output with a user-supplied cotangent.
    """
    stack = [(ty, a, b)]
    while stack:
        t, x, y = stack.pop()
        if isinstance(t, TReal):
            yield x, y
        elif isinstance(t, (TInt, TUnit)):
            pass
        elif isinstance(t, TProd):
            stack.append((t.snd, x[1], y[1]))
            stack.append((t.fst, x[0], y[0]))
        elif isinstance(t, TSum):
            if isinstance(x, InlV) and isinstance(y, InlV):
                stack.append((t.left, x.val, y.val))
            elif isinstance(x, InrV) and isinstance(y, InrV):
                stack.append((t.right, x.val, y.val))
            else:
                raise DgInputError("sum tag mismatch between value and cotangent")
        elif isinstance(t, TList):
            xs, ys = list(iter_list(x)), list(iter_list(y))
            if len(xs) != len(ys):
                raise DgInputError("list length mismatch between value and cotangent")
            for xe, ye in zip(reversed(xs), reversed(ys)):
                stack.append((t.elem, xe, ye))
        else:
            raise AssertionError(f"zip_scalars over {t!r}")


def count_scalars(ty: Ty, val) -> int:
    return sum(1 for _ in scalars_of(ty, val))


def rebuild_with(ty: Ty, template, scalars):
    """Mirror ``template`` replacing Real leaves with ``next(scalars)``."""
    it = iter(scalars)
    out = map_scalars(ty, template, lambda _v: next(it))
    return out


# --------------------------------------------------------------------------
# Cotangent arithmetic on input-shaped values (the naive/staged-m collector).

def zero_cotangent(ty: Ty, val):
    """Input-shaped zero; copies the discrete and coproduct structure of
    ``val`` (the zero of a coproduct-containing type depends on the input)."""
    return map_scalars(ty, val, lambda _v: 0.0)


def add_cotangent(ty: Ty, a, b):
    """Pointwise sum of two same-shaped cotangent values."""
    if isinstance(ty, TReal):
        return a + b
    if isinstance(ty, (TInt, TUnit)):
        return a
    if isinstance(ty, TProd):
        return (add_cotangent(ty.fst, a[0], b[0]),
                add_cotangent(ty.snd, a[1], b[1]))
    if isinstance(ty, TSum):
        if isinstance(a, InlV) and isinstance(b, InlV):
            return InlV(add_cotangent(ty.left, a.val, b.val))
        if isinstance(a, InrV) and isinstance(b, InrV):
            return InrV(add_cotangent(ty.right, a.val, b.val))
        raise AssertionError("cotangent sum tag mismatch")
    if isinstance(ty, TList):
        xs, ys = list(iter_list(a)), list(iter_list(b))
        if len(xs) != len(ys):
            raise AssertionError("cotangent list length mismatch")
        return list_value(add_cotangent(ty.elem, x, y) for x, y in zip(xs, ys))
    raise AssertionError(f"add_cotangent over {ty!r}")
