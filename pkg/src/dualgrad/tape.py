"""The final sequential engine: mutable-slot staging with defunctionalized
backpropagators.

Backpropagators are reduced to Contrib lists -- triples of (scale, target
ID, target Contrib) -- because a primitive's reverse derivative is fully
described by its partials at the forward point.  The staging structure is
a flat array indexed by ID holding (contrib, accumulated cotangent); the
cotangent collector of earlier stages is gone, since an input's cotangent
can be read straight out of its own slot after the resolve loop.

Two modes:

* deferred: the forward pass only builds the Contrib graph; a contrib is
  written into its slot by the first contribution that reaches it during
  the reverse pass.
* eager: every Contrib is appended to the tape at creation time (a
  growable array in the forward pass), and the reverse pass only
  accumulates cotangents -- classical taping.
"""
from __future__ import annotations

from .errors import OrderViolation
from .interp import Semantics, evaluate
from .stats import EngineResult, RunStats
from .typecheck import check_program
from .values import conform
from .wrap import (
    default_cotangent, interleave, output_pairs, rebuild_gradient,
    strip_primal,
)


class _TD:
    """Scalar with (ID, Contrib)."""

    __slots__ = ("p", "i", "cb")

    def __init__(self, p, i, cb):
        self.p = p
        self.i = i
        self.cb = cb


class TapeSemantics(Semantics):
    __slots__ = ("stats", "next_id", "tape", "validate")

    def __init__(self, stats, eager: bool, validate: bool = False):
        super().__init__()
        self.stats = stats
        self.next_id = 0
        # Eager mode appends [contrib, cotangent] cells during the forward
        # pass (amortized O(1) growable array); deferred allocates after.
        self.tape = [] if eager else None
        self.validate = validate

    def _new(self, p, cb):
        i = self.next_id
        self.next_id = i + 1
        self.stats.backprops_created += 1
        if self.tape is not None:
            self.tape.append([cb, 0.0])
        return _TD(p, i, cb)

    def literal(self, r):
        return self._new(r, [])

    def prim(self, op, args):
        self.stats.primal_ops += 1
        ps = [a.p for a in args]
        parts = op.partials(*ps)
        cb = [(d, a.i, a.cb) for d, a in zip(parts, args)]
        if self.validate:
            again = op.partials(*ps)
            if any(d1 != d2 and (d1 == d1 or d2 == d2)  # tolerate NaN
                   for d1, d2 in zip(parts, again)):
                raise AssertionError(f"non-reproducible partials for {op.name}")
        return self._new(op.fn(*ps), cb)

    def make_input(self, i, v):
        d = self._new(v, [])
        assert d.i == i
        return d

    def primal(self, s):
        return s.p


def resolve_tape(tape, root_contribs, stats, eager: bool):
    """Iterate slots from the highest ID down to 0, pushing each slot's
    contributions into strictly lower slots."""
    for i, cbj, a in root_contribs:
        _accumulate(tape, i, cbj, a, stats)
    n = len(tape)
    for i in range(n - 1, -1, -1):
        cell = tape[i]
        cb, d = cell[0], cell[1]
        stats.slots_resolved += 1
        if stats.key_events[i] == 0:
            # Nothing ever contributed to this scalar (dead data flow):
            # its cotangent is exactly zero and its backpropagator is
            # never invoked.  In deferred mode the slot is still empty; in
            # eager mode this skip is what keeps both modes' resolve
            # behavior identical.
            continue
        stats.invocations[i] += 1
        for scale, j, cbj in cb:
            if j >= i:
                raise OrderViolation(
                    f"slot {i} contributes to slot {j} >= {i}")
            stats.edges_traversed += 1
            _accumulate(tape, j, cbj, scale * d, stats)
    return tape


def _accumulate(tape, j, cbj, a, stats):
    stats.key_events[j] += 1
    cell = tape[j]
    if cell[0] is None:
        cell[0] = cbj  # deferred install
    cell[1] += a


def grad_tape(prog, x, ct=None, eager: bool = False,
              validate_scales: bool = False) -> EngineResult:
    sigma, tau = check_program(prog)
    x = conform(x, sigma)
    stats = RunStats(engine="tape-eager" if eager else "tape")
    sem = TapeSemantics(stats, eager, validate_scales)

    dual_in, k = interleave(sigma, x, sem.make_input)
    stats.input_scalars = k
    out = evaluate(sem, prog.body, {prog.name: dual_in})
    primal = strip_primal(tau, out, lambda d: d.p)
    ct_val = conform(ct, tau) if ct is not None else default_cotangent(tau, primal)
    pairs = output_pairs(tau, out, ct_val, lambda d: d.p)

    if eager:
        tape = sem.tape
    else:
        # Slot count comes from the final ID counter after the forward pass.
        tape = [[None, 0.0] for _ in range(sem.next_id)]
    stats.tape_len = len(tape)

    resolve_tape(tape, [(d.i, d.cb, z) for d, z in pairs], stats, eager)
    gradient = gradient_of_input(tape, sigma, x, k)
    return EngineResult(primal, gradient, stats, tape=tape)


def gradient_of_input(tape, sigma, x, k):
    """Input cotangents are the accumulated cotangents of slots 0..k-1."""
    return rebuild_gradient(sigma, x, lambda i: tape[i][1])
