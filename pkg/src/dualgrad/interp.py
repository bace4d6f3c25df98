"""Call-by-value evaluator, shared by the plain interpreter and every
differentiation engine.

All engines in this package interpret the *same* annotated AST with
different scalar semantics instead of emitting transformed source: the
transformations in question map homomorphically over the language, so
interpreting with dual values is observationally the transform-then-
interpret pipeline.  A ``Semantics`` object supplies the scalar hooks:

    literal(r)             lift a real literal
    prim(op, args)         apply a primitive to lifted scalars
    primal(s)              extract the plain float (used by sign)
    par_pair(ev, l, r, env) evaluate a parallel pair

Evaluation is a loop with explicit tail calls, so source-level tail
recursion (the idiom for loops in this language) runs in constant Python
stack regardless of iteration count.
"""
from __future__ import annotations

from .schedule import SequentialScheduler
from .syntax import (
    App, Case, CaseList, Cons, Fst, Inl, Inr, Lam, Let, LetRec, LitI, LitR,
    NilE, OPS, Pair, Par, Prim, Sign, Snd, UnitE, Var,
)
from .values import Closure, ConsV, InlV, InrV, NIL_V, UNIT_V

INL_UNIT = InlV(UNIT_V)
INR_UNIT = InrV(UNIT_V)


class Semantics:
    """Plain float semantics; engines subclass and override the hooks."""

    __slots__ = ("scheduler", "prim_ops", "sign_observer")

    def __init__(self, scheduler=None, sign_observer=None):
        self.scheduler = scheduler or SequentialScheduler()
        self.prim_ops = 0
        self.sign_observer = sign_observer

    def literal(self, r):
        return r

    def prim(self, op, args):
        self.prim_ops += 1
        return op.fn(*args)

    def primal(self, s):
        return s

    def par_pair(self, ev, left, right, env):
        return self.scheduler.fork_join(
            lambda: ev(self, left, env), lambda: ev(self, right, env))


def evaluate(sem, e, env):
    """Big-step evaluation of ``e`` under ``env`` with scalar hooks ``sem``."""
    while True:
        cls = e.__class__
        if cls is Var:
            return env[e.name]
        if cls is Prim:
            op = OPS[e.op]
            args = [evaluate(sem, a, env) for a in e.args]
            return sem.prim(op, args)
        if cls is Let:
            v = evaluate(sem, e.bound, env)
            env = {**env, e.name: v}
            e = e.body
            continue
        if cls is App:
            f = evaluate(sem, e.fn, env)
            a = evaluate(sem, e.arg, env)
            env = {**f.env, f.param: a}
            e = f.body
            continue
        if cls is LitR:
            return sem.literal(e.value)
        if cls is LitI:
            return e.value
        if cls is UnitE:
            return UNIT_V
        if cls is Pair:
            return (evaluate(sem, e.fst, env), evaluate(sem, e.snd, env))
        if cls is Fst:
            return evaluate(sem, e.arg, env)[0]
        if cls is Snd:
            return evaluate(sem, e.arg, env)[1]
        if cls is Lam:
            return Closure(e.name, e.body, env)
        if cls is LetRec:
            clos = Closure(e.xname, e.fbody, None)
            env = {**env, e.fname: clos}
            clos.env = env
            e = e.body
            continue
        if cls is Case:
            s = evaluate(sem, e.scrut, env)
            if isinstance(s, InlV):
                env = {**env, e.lname: s.val}
                e = e.lbody
            else:
                env = {**env, e.rname: s.val}
                e = e.rbody
            continue
        if cls is Sign:
            s = evaluate(sem, e.arg, env)
            p = sem.primal(s)
            if sem.sign_observer is not None:
                sem.sign_observer(p)
            # sign(x) is inr () for x >= 0, inl () for x < 0
            return INR_UNIT if p >= 0.0 else INL_UNIT
        if cls is Inl:
            return InlV(evaluate(sem, e.arg, env))
        if cls is Inr:
            return InrV(evaluate(sem, e.arg, env))
        if cls is NilE:
            return NIL_V
        if cls is Cons:
            return ConsV(evaluate(sem, e.head, env),
                         evaluate(sem, e.tail, env))
        if cls is CaseList:
            s = evaluate(sem, e.scrut, env)
            if s is NIL_V:
                e = e.nilbody
            else:
                env = {**env, e.hname: s.head, e.tname: s.tail}
                e = e.consbody
            continue
        if cls is Par:
            return sem.par_pair(evaluate, e.left, e.right, env)
        raise AssertionError(f"unknown expr {e!r}")


def eval_program(prog, x, scheduler=None, sign_observer=None):
    """Apply a typechecked top-level lambda to an input value."""
    sem = Semantics(scheduler, sign_observer)
    body_env = {prog.name: x}
    return evaluate(sem, prog.body, body_env)
