"""The unoptimised dual-numbers reverse engine.

Each scalar carries a closure backpropagator from its own cotangent to a
full input-shaped cotangent.  Elegant, provably correct, and exponential
under sharing: a backpropagator is re-entered once per use of its scalar,
so this engine is a validation oracle with a hard size guard, not a
production path.
"""
from __future__ import annotations

from .errors import GuardExceeded
from .interp import Semantics, evaluate
from .stats import EngineResult, RunStats
from .typecheck import check_program
from .values import add_cotangent, conform, rebuild_with, zero_cotangent
from .wrap import (
    default_cotangent, input_scalars, interleave, output_pairs, strip_primal,
)

OP_GUARD = 1 << 20


class _ND:
    """Scalar paired with its backpropagator."""

    __slots__ = ("p", "i", "bp")

    def __init__(self, p, i, bp):
        self.p = p
        self.i = i
        self.bp = bp


class NaiveSemantics(Semantics):
    __slots__ = ("stats", "czero", "sigma", "next_id")

    def __init__(self, stats, czero, sigma):
        super().__init__()
        self.stats = stats
        self.czero = czero
        self.sigma = sigma
        self.next_id = 0

    def _wrap(self, fn):
        i = self.next_id
        self.next_id = i + 1
        self.stats.backprops_created += 1
        stats = self.stats

        def bp(z):
            stats.invocations[i] += 1
            return fn(z)

        return i, bp

    def literal(self, r):
        czero = self.czero
        i, bp = self._wrap(lambda z: czero)
        return _ND(r, i, bp)

    def prim(self, op, args):
        self.stats.primal_ops += 1
        if self.stats.primal_ops > OP_GUARD:
            raise GuardExceeded(
                f"naive engine refuses programs over {OP_GUARD} primitive ops")
        ps = [a.p for a in args]
        parts = op.partials(*ps)
        children = [(d, a.bp) for d, a in zip(parts, args)]
        ty = self.sigma
        czero = self.czero

        def run(z):
            total = None
            for d, child in children:
                c = child(d * z)
                total = c if total is None else add_cotangent(ty, total, c)
            return total if total is not None else czero

        i, bp = self._wrap(run)
        return _ND(op.fn(*ps), i, bp)

    def primal(self, s):
        return s.p


def grad_naive(prog, x, ct=None) -> EngineResult:
    """Primal value, cotangent ct . J, and instrumentation counters."""
    sigma, tau = check_program(prog)
    x = conform(x, sigma)
    stats = RunStats(engine="naive")
    czero = zero_cotangent(sigma, x)
    sem = NaiveSemantics(stats, czero, sigma)

    base = input_scalars(sigma, x)
    k = len(base)

    def one_hot(i, z):
        return rebuild_with(sigma, x,
                            (z if j == i else 0.0 for j in range(k)))

    def make_input(i, v):
        j, bp = sem._wrap(lambda z, i=i: one_hot(i, z))
        assert j == i
        return _ND(v, j, bp)

    dual_in, ninputs = interleave(sigma, x, make_input)
    stats.input_scalars = ninputs

    out = evaluate(sem, prog.body, {prog.name: dual_in})
    primal = strip_primal(tau, out, lambda d: d.p)
    ct_val = conform(ct, tau) if ct is not None else default_cotangent(tau, primal)

    total = czero
    for dual, z in output_pairs(tau, out, ct_val, lambda d: d.p):
        total = add_cotangent(sigma, total, dual.bp(z))
    return EngineResult(primal, total, stats)
