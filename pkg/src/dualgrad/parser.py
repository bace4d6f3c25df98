"""Tokenizer and recursive-descent parser for .dg source programs.

Surface grammar (see also README):

    expr  := \\(x: T). expr
           | let x: T = expr in expr
           | letrec f (x: T): T = expr in expr
           | cons
    cons  := add ('::' cons)?                       -- right associative
    add   := mul (('+'|'-') mul)*
    mul   := unary (('*'|'/') unary)*
    unary := '-' unary | inl@T unary | inr@T unary | app
    app   := atom atom*                             -- juxtaposition
    atom  := literal | ident | '()' | '(' e ')' | '(' e ',' e ')'
           | fst(e) | snd(e) | sign(e) | par(e, e)
           | sin(e) | cos(e) | exp(e) | log(e) | sqrt(e)
           | '[]@' T | case e { inl x -> e; inr y -> e }
           | caselist e { [] -> e; h :: t -> e }

Integer literals carry an ``i`` suffix (``42i``); bare numerals are reals.
``#`` starts a line comment.
"""
from __future__ import annotations

import re

from .errors import DgParseError
from .syntax import (
    BOOL, INT, REAL, UNIT,
    App, Case, CaseList, Cons, Expr, Fst, Inl, Inr, Lam, Let, LetRec, LitI,
    LitR, NilE, Pair, Par, Prim, Sign, Snd, TFun, TList, TProd, TSum, Ty,
    UnitE, Var, PREFIX_FUN_OPS,
)

KEYWORDS = frozenset(
    ["let", "letrec", "in", "case", "caselist", "inl", "inr", "sign",
     "par", "fst", "snd", *PREFIX_FUN_OPS]
)

_TOKEN_RE = re.compile(
    r"""
      (?P<ws>[ \t\r\n]+|\#[^\n]*)
    | (?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?i?)
    | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
    | (?P<sym>::|->|[\\(){}\[\],;:.+\-*/@=])
    """,
    re.VERBOSE,
)


class Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col

    def __repr__(self):
        return f"Token({self.kind}, {self.text!r}, {self.line}:{self.col})"


def tokenize(src: str) -> list[Token]:
    out = []
    line, line_start = 1, 0
    i, n = 0, len(src)
    while i < n:
        m = _TOKEN_RE.match(src, i)
        if m is None:
            col = i - line_start + 1
            raise DgParseError(f"unexpected character {src[i]!r}", line, col)
        col = i - line_start + 1
        if m.lastgroup == "ws":
            nl = m.group().count("\n")
            if nl:
                line += nl
                line_start = i + m.group().rindex("\n") + 1
        elif m.lastgroup == "num":
            out.append(Token("num", m.group(), line, col))
        elif m.lastgroup == "ident":
            text = m.group()
            kind = "kw" if text in KEYWORDS else "ident"
            out.append(Token(kind, text, line, col))
        else:
            out.append(Token("sym", m.group(), line, col))
        i = m.end()
    out.append(Token("eof", "", line, n - line_start + 1))
    return out


_ATOM_START_SYMS = frozenset(["(", "["])
_ATOM_START_KWS = frozenset(
    ["fst", "snd", "sign", "par", "case", "caselist", *PREFIX_FUN_OPS]
)


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0

    # -- token plumbing ----------------------------------------------------
    def peek(self) -> Token:
        return self.toks[self.i]

    def next(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def at_sym(self, text) -> bool:
        t = self.peek()
        return t.kind == "sym" and t.text == text

    def at_kw(self, text) -> bool:
        t = self.peek()
        return t.kind == "kw" and t.text == text

    def expect(self, kind, text=None) -> Token:
        t = self.peek()
        if t.kind != kind or (text is not None and t.text != text):
            want = text if text is not None else kind
            raise DgParseError(f"expected {want!r}, got {t.text!r}", t.line, t.col)
        return self.next()

    def expect_sym(self, text) -> Token:
        return self.expect("sym", text)

    def expect_ident(self) -> str:
        return self.expect("ident").text

    def _pos(self) -> tuple[int, int]:
        t = self.peek()
        return (t.line, t.col)

    # -- types -------------------------------------------------------------
    def parse_type(self) -> Ty:
        left = self.parse_type_sum()
        if self.at_sym("->"):
            self.next()
            return TFun(left, self.parse_type())
        return left

    def parse_type_sum(self) -> Ty:
        left = self.parse_type_atom()
        if self.at_sym("+"):
            self.next()
            return TSum(left, self.parse_type_sum())
        return left

    def parse_type_atom(self) -> Ty:
        t = self.peek()
        if t.kind == "ident":
            if t.text == "R":
                self.next()
                return REAL
            if t.text == "Z":
                self.next()
                return INT
            if t.text == "Bool":
                self.next()
                return BOOL
            raise DgParseError(f"unknown type name {t.text!r}", t.line, t.col)
        if self.at_sym("("):
            self.next()
            if self.at_sym(")"):
                self.next()
                return UNIT
            inner = self.parse_type()
            if self.at_sym(","):
                self.next()
                snd = self.parse_type()
                self.expect_sym(")")
                return TProd(inner, snd)
            self.expect_sym(")")
            return inner
        if self.at_sym("["):
            self.next()
            elem = self.parse_type()
            self.expect_sym("]")
            return TList(elem)
        raise DgParseError(f"expected a type, got {t.text!r}", t.line, t.col)

    # -- expressions -------------------------------------------------------
    def parse_expr(self) -> Expr:
        pos = self._pos()
        if self.at_sym("\\"):
            self.next()
            self.expect_sym("(")
            name = self.expect_ident()
            self.expect_sym(":")
            anno = self.parse_type()
            self.expect_sym(")")
            self.expect_sym(".")
            return Lam(name, anno, self.parse_expr(), pos=pos)
        if self.at_kw("let"):
            self.next()
            name = self.expect_ident()
            self.expect_sym(":")
            anno = self.parse_type()
            self.expect_sym("=")
            bound = self.parse_expr()
            self.expect("kw", "in")
            return Let(name, anno, bound, self.parse_expr(), pos=pos)
        if self.at_kw("letrec"):
            self.next()
            fname = self.expect_ident()
            self.expect_sym("(")
            xname = self.expect_ident()
            self.expect_sym(":")
            dom = self.parse_type()
            self.expect_sym(")")
            self.expect_sym(":")
            cod = self.parse_type()
            self.expect_sym("=")
            fbody = self.parse_expr()
            self.expect("kw", "in")
            return LetRec(fname, xname, dom, cod, fbody, self.parse_expr(), pos=pos)
        return self.parse_cons()

    def parse_cons(self) -> Expr:
        pos = self._pos()
        head = self.parse_add()
        if self.at_sym("::"):
            self.next()
            return Cons(head, self.parse_cons(), pos=pos)
        return head

    def parse_add(self) -> Expr:
        e = self.parse_mul()
        while self.at_sym("+") or self.at_sym("-"):
            t = self.next()
            rhs = self.parse_mul()
            e = Prim("add" if t.text == "+" else "sub", [e, rhs],
                     pos=(t.line, t.col))
        return e

    def parse_mul(self) -> Expr:
        e = self.parse_unary()
        while self.at_sym("*") or self.at_sym("/"):
            t = self.next()
            rhs = self.parse_unary()
            e = Prim("mul" if t.text == "*" else "div", [e, rhs],
                     pos=(t.line, t.col))
        return e

    def parse_unary(self) -> Expr:
        pos = self._pos()
        if self.at_sym("-"):
            self.next()
            return Prim("neg", [self.parse_unary()], pos=pos)
        if self.at_kw("inl") or self.at_kw("inr"):
            kw = self.next().text
            self.expect_sym("@")
            anno = self.parse_type_atom()
            arg = self.parse_unary()
            node = Inl if kw == "inl" else Inr
            return node(arg, anno, pos=pos)
        return self.parse_app()

    def _at_atom_start(self) -> bool:
        t = self.peek()
        return (t.kind in ("num", "ident")
                or (t.kind == "sym" and t.text in _ATOM_START_SYMS)
                or (t.kind == "kw" and t.text in _ATOM_START_KWS))

    def parse_app(self) -> Expr:
        e = self.parse_atom()
        while self._at_atom_start():
            pos = self._pos()
            e = App(e, self.parse_atom(), pos=pos)
        return e

    def parse_atom(self) -> Expr:
        t = self.peek()
        pos = (t.line, t.col)
        if t.kind == "num":
            self.next()
            if t.text.endswith("i"):
                body = t.text[:-1]
                if "." in body or "e" in body or "E" in body:
                    raise DgParseError("integer literal cannot have a fraction",
                                       t.line, t.col)
                return LitI(int(body), pos=pos)
            return LitR(float(t.text), pos=pos)
        if t.kind == "ident":
            self.next()
            return Var(t.text, pos=pos)
        if self.at_sym("("):
            self.next()
            if self.at_sym(")"):
                self.next()
                return UnitE(pos=pos)
            inner = self.parse_expr()
            if self.at_sym(","):
                self.next()
                snd = self.parse_expr()
                self.expect_sym(")")
                return Pair(inner, snd, pos=pos)
            self.expect_sym(")")
            return inner
        if self.at_sym("["):
            self.next()
            self.expect_sym("]")
            self.expect_sym("@")
            return NilE(self.parse_type_atom(), pos=pos)
        if t.kind == "kw":
            kw = t.text
            if kw in ("fst", "snd", "sign") or kw in PREFIX_FUN_OPS:
                self.next()
                self.expect_sym("(")
                arg = self.parse_expr()
                self.expect_sym(")")
                if kw == "fst":
                    return Fst(arg, pos=pos)
                if kw == "snd":
                    return Snd(arg, pos=pos)
                if kw == "sign":
                    return Sign(arg, pos=pos)
                return Prim(kw, [arg], pos=pos)
            if kw == "par":
                self.next()
                self.expect_sym("(")
                left = self.parse_expr()
                self.expect_sym(",")
                right = self.parse_expr()
                self.expect_sym(")")
                return Par(left, right, pos=pos)
            if kw == "case":
                self.next()
                scrut = self.parse_expr()
                self.expect_sym("{")
                self.expect("kw", "inl")
                lname = self.expect_ident()
                self.expect_sym("->")
                lbody = self.parse_expr()
                self.expect_sym(";")
                self.expect("kw", "inr")
                rname = self.expect_ident()
                self.expect_sym("->")
                rbody = self.parse_expr()
                self.expect_sym("}")
                return Case(scrut, lname, lbody, rname, rbody, pos=pos)
            if kw == "caselist":
                self.next()
                scrut = self.parse_expr()
                self.expect_sym("{")
                self.expect_sym("[")
                self.expect_sym("]")
                self.expect_sym("->")
                nilbody = self.parse_expr()
                self.expect_sym(";")
                hname = self.expect_ident()
                self.expect_sym("::")
                tname = self.expect_ident()
                self.expect_sym("->")
                consbody = self.parse_expr()
                self.expect_sym("}")
                return CaseList(scrut, nilbody, hname, tname, consbody, pos=pos)
        raise DgParseError(f"unexpected token {t.text!r}", t.line, t.col)


def parse(src: str) -> Expr:
    """Parse a .dg program into an (unannotated) AST."""
    p = _Parser(tokenize(src))
    e = p.parse_expr()
    t = p.peek()
    if t.kind != "eof":
        raise DgParseError(f"trailing input starting at {t.text!r}", t.line, t.col)
    return e


def parse_type(src: str) -> Ty:
    p = _Parser(tokenize(src))
    ty = p.parse_type()
    t = p.peek()
    if t.kind != "eof":
        raise DgParseError(f"trailing input starting at {t.text!r}", t.line, t.col)
    return ty
