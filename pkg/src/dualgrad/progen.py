"""Seeded generator of small well-typed programs plus evaluation points.

Used by the property/fuzz suites: generated programs exercise sharing,
sign-driven control flow, pairs, lists, and par, with primitive usage
guarded so evaluation stays finite and smooth (division by 1+y*y, log and
sqrt of 1+x*x), and evaluation points kept away from sign boundaries.
"""
from __future__ import annotations

import random

from .syntax import (
    REAL, TProd, Case, CaseList, Cons, Fst, Lam, Let, LitR, NilE, Pair, Par,
    Prim, Sign, Snd, Var,
)
from .typecheck import check_program

INPUT_TEMPLATES = (
    REAL,
    TProd(REAL, REAL),
    TProd(REAL, TProd(REAL, REAL)),
    TProd(TProd(REAL, REAL), REAL),
)


def _scalar_paths(ty, base):
    """Expressions of type R projecting out of a variable of type ty."""
    if ty == REAL:
        return [base]
    out = []
    if isinstance(ty, TProd):
        out += _scalar_paths(ty.fst, Fst(base))
        out += _scalar_paths(ty.snd, Snd(base))
    return out


class _Gen:
    def __init__(self, rng: random.Random, allow_par: bool):
        self.rng = rng
        self.allow_par = allow_par
        self.fresh = 0

    def name(self, prefix="v"):
        self.fresh += 1
        return f"{prefix}{self.fresh}"

    def scalar(self, env, depth):
        rng = self.rng
        if depth <= 0:
            if env and rng.random() < 0.85:
                return rng.choice(env)
            v = round(rng.uniform(-2.0, 2.0), 3)
            # negative reals have no literal surface form: -v parses as neg
            return LitR(v) if v >= 0 else Prim("neg", [LitR(-v)])
        roll = rng.random()
        if roll < 0.30:
            op = rng.choice(("add", "sub", "mul"))
            return Prim(op, [self.scalar(env, depth - 1),
                             self.scalar(env, depth - 1)])
        if roll < 0.38:
            return Prim("neg", [self.scalar(env, depth - 1)])
        if roll < 0.50:
            op = rng.choice(("sin", "cos"))
            return Prim(op, [self.scalar(env, depth - 1)])
        if roll < 0.56:
            # guarded division: denominator bounded away from zero
            a = self.scalar(env, depth - 1)
            b = self.scalar(env, depth - 1)
            return Prim("div", [a, Prim("add", [LitR(1.0),
                                                Prim("mul", [b, b])])])
        if roll < 0.62:
            op = self.rng.choice(("log", "sqrt"))
            a = self.scalar(env, depth - 1)
            return Prim(op, [Prim("add", [LitR(1.0), Prim("mul", [a, a])])])
        if roll < 0.66:
            a = self.scalar(env, depth - 1)
            return Prim("exp", [Prim("sin", [a])])
        if roll < 0.80:
            # let-sharing: the bound scalar is offered for reuse
            n = self.name()
            bound = self.scalar(env, depth - 1)
            body = self.scalar(env + [Var(n), Var(n)], depth - 1)
            return Let(n, REAL, bound, body)
        if roll < 0.88:
            scrut = self.scalar(env, depth - 1)
            u1, u2 = self.name("u"), self.name("u")
            return Case(Sign(scrut), u1, self.scalar(env, depth - 1),
                        u2, self.scalar(env, depth - 1))
        if roll < 0.94 and self.allow_par:
            n = self.name("q")
            pe = Par(self.scalar(env, depth - 1), self.scalar(env, depth - 1))
            v = Var(n)
            return Let(n, TProd(REAL, REAL), pe,
                       Prim("add", [Fst(v), Snd(v)]))
        # one-step list fold
        n = self.name("l")
        h, t = self.name("h"), self.name("t")
        lst = Cons(self.scalar(env, depth - 1),
                   Cons(self.scalar(env, depth - 1), NilE(REAL)))
        return CaseList(lst, LitR(0.0), h, t,
                        Prim("add", [Var(h), self.scalar(env + [Var(h)],
                                                         depth - 1)]))


def random_program(rng: random.Random, allow_par: bool = True,
                   max_depth: int = 4):
    """Returns (typechecked program of some sigma -> R, input value)."""
    sigma = rng.choice(INPUT_TEMPLATES)
    gen = _Gen(rng, allow_par)
    pname = "p0"
    env = _scalar_paths(sigma, Var(pname))
    body = gen.scalar(env, rng.randint(1, max_depth))
    prog = Lam(pname, sigma, body)
    check_program(prog)
    x = _random_point(rng, sigma)
    return prog, x


def _random_point(rng, ty):
    if ty == REAL:
        v = rng.uniform(0.1, 2.0)
        return v if rng.random() < 0.5 else -v
    if isinstance(ty, TProd):
        return (_random_point(rng, ty.fst), _random_point(rng, ty.snd))
    raise AssertionError(ty)
