"""The three intermediate engines of the ladder.

All three delay (stage) backpropagator calls in an ordered map keyed by a
monotonically increasing ID, merge staged calls to the same ID by adding
their arguments (linear factoring), and resolve highest-ID-first, which
guarantees each backpropagator runs at most once:

* ``staged`` (m): backpropagators return a Staged value -- a pair of an
  input-shaped cotangent collector and the staging map; zero and plus on
  Staged are structural.
* ``cayley`` (c): backpropagators return Staged -> Staged updaters; zero
  and plus become identity and function composition, and a staged call is
  an insert-or-accumulate on the staging map.
* ``sparse`` (s): like (m), but the collector keeps just the scalars in an
  integer-keyed map (input scalar i at key i), and the gradient is rebuilt
  from that map at the end.
"""
from __future__ import annotations

from .errors import OrderViolation
from .interp import Semantics, evaluate
from .omap import OMap, Steps
from .stats import EngineResult, RunStats
from .typecheck import check_program
from .values import add_cotangent, conform, rebuild_with, zero_cotangent
from .wrap import (
    default_cotangent, input_scalars, interleave, output_pairs,
    rebuild_gradient, strip_primal,
)


class _SD:
    """Scalar paired with (ID, backpropagator)."""

    __slots__ = ("p", "i", "bp")

    def __init__(self, p, i, bp):
        self.p = p
        self.i = i
        self.bp = bp


class StagedVal:
    """A cotangent collector plus the staging map ID -> (handle, arg)."""

    __slots__ = ("col", "stage")

    def __init__(self, col, stage: OMap):
        self.col = col
        self.stage = stage


def _combine_entry(old, new):
    f, a = old
    g, b = new
    if f is not g:
        raise AssertionError(
            "inconsistent staging IDs: one key maps to two distinct handles")
    return (f, a + b)


def staged_plus(a: StagedVal, b: StagedVal, col_plus=None) -> StagedVal:
    """Pointwise sum: collectors added, staging maps unioned with linear
    factoring (common keys sum their accumulated arguments)."""
    col = col_plus(a.col, b.col) if col_plus is not None else None
    return StagedVal(col, a.stage.union_with(b.stage, _combine_entry))


def staged_call(i, f, x, zero_col, stage_steps, stats) -> StagedVal:
    """A single delayed call: (zero collector, {i -> (f, x)})."""
    stats.key_events[i] += 1
    return StagedVal(zero_col,
                     OMap(steps=stage_steps).insert_with(i, (f, x)))


# --------------------------------------------------------------------------
# Collector strategies for the m and s variants.

class ValueCollector:
    """Stage m: the collector is an input-shaped cotangent value."""

    def __init__(self, sigma, x, k):
        self._sigma = sigma
        self._x = x
        self._k = k
        self.zero = zero_cotangent(sigma, x)

    def plus(self, a, b):
        return add_cotangent(self._sigma, a, b)

    def one_hot(self, i, z):
        return rebuild_with(self._sigma, self._x,
                            (z if j == i else 0.0 for j in range(self._k)))

    def gradient(self, col, sigma, x):
        return col


class MapCollector:
    """Stage s: the collector keeps just the scalars, keyed by input ID."""

    def __init__(self, steps: Steps):
        self._steps = steps
        self.zero = OMap(steps=steps)

    def plus(self, a: OMap, b: OMap):
        return a.union_with(b, lambda u, v: u + v)

    def one_hot(self, i, z):
        return OMap(steps=self._steps).insert_with(i, z)

    def gradient(self, col: OMap, sigma, x):
        return rebuild_gradient(sigma, x, lambda i: col.get(i, 0.0))


# --------------------------------------------------------------------------
# Semantics

class _StagedSemBase(Semantics):
    __slots__ = ("stats", "next_id")

    def __init__(self, stats):
        super().__init__()
        self.stats = stats
        self.next_id = 0

    def wrap(self, fn):
        i = self.next_id
        self.next_id = i + 1
        self.stats.backprops_created += 1
        stats = self.stats

        def bp(z):
            stats.invocations[i] += 1
            return fn(z)

        return i, bp

    def primal(self, s):
        return s.p


class MapStagedSemantics(_StagedSemBase):
    """Stages m and s: backpropagators return StagedVal."""

    __slots__ = ("collector", "stage_steps", "zero_staged")

    def __init__(self, stats, collector, stage_steps):
        super().__init__(stats)
        self.collector = collector
        self.stage_steps = stage_steps
        self.zero_staged = StagedVal(collector.zero, OMap(steps=stage_steps))

    def literal(self, r):
        zero = self.zero_staged
        i, bp = self.wrap(lambda z: zero)
        return _SD(r, i, bp)

    def prim(self, op, args):
        self.stats.primal_ops += 1
        ps = [a.p for a in args]
        parts = op.partials(*ps)
        children = [(d, a.i, a.bp) for d, a in zip(parts, args)]
        col = self.collector
        steps = self.stage_steps
        stats = self.stats

        def run(z):
            total = None
            for d, ci, cbp in children:
                s = staged_call(ci, cbp, d * z, col.zero, steps, stats)
                total = s if total is None else staged_plus(total, s, col.plus)
            return total

        i, bp = self.wrap(run)
        return _SD(op.fn(*ps), i, bp)

    def make_input(self, i, v):
        col = self.collector
        j, bp = self.wrap(
            lambda z, i=i: StagedVal(col.one_hot(i, z),
                                     OMap(steps=self.stage_steps)))
        assert j == i
        return _SD(v, j, bp)

    def resolve(self, staged: StagedVal):
        """Pop the maximum ID, invoke, merge, repeat; returns the collector."""
        col = self.collector
        while not staged.stage.is_empty():
            i, (f, a), rest = staged.stage.delete_max()
            res = f(a)
            mk = res.stage.max_key()
            if mk is not None and mk >= i:
                raise OrderViolation(
                    f"backpropagator {i} staged a call with ID {mk} >= {i}")
            staged = staged_plus(StagedVal(staged.col, rest), res, col.plus)
        return staged.col


class CayleySemantics(_StagedSemBase):
    """Stage c: backpropagators return StagedVal -> StagedVal updaters."""

    __slots__ = ("sigma", "x", "k", "stage_steps", "czero")

    def __init__(self, stats, sigma, x, k, stage_steps):
        super().__init__(stats)
        self.sigma = sigma
        self.x = x
        self.k = k
        self.stage_steps = stage_steps
        self.czero = zero_cotangent(sigma, x)

    def _staged_call_u(self, i, f, x):
        """Insert-or-accumulate a delayed call into the staging map."""
        stats = self.stats

        def upd(sv: StagedVal) -> StagedVal:
            stats.key_events[i] += 1
            return StagedVal(sv.col,
                             sv.stage.insert_with(i, (f, x), _combine_entry))

        return upd

    def literal(self, r):
        i, bp = self.wrap(lambda z: _identity)
        return _SD(r, i, bp)

    def prim(self, op, args):
        self.stats.primal_ops += 1
        ps = [a.p for a in args]
        parts = op.partials(*ps)
        children = [(d, a.i, a.bp) for d, a in zip(parts, args)]
        mk_call = self._staged_call_u

        def run(z):
            ups = [mk_call(ci, cbp, d * z) for d, ci, cbp in children]
            return _compose(ups)

        i, bp = self.wrap(run)
        return _SD(op.fn(*ps), i, bp)

    def make_input(self, i, v):
        sigma, x, k = self.sigma, self.x, self.k

        def one_hot_update(z, i=i):
            def upd(sv: StagedVal) -> StagedVal:
                hot = rebuild_with(sigma, x,
                                   (z if j == i else 0.0 for j in range(k)))
                return StagedVal(add_cotangent(sigma, sv.col, hot), sv.stage)
            return upd

        j, bp = self.wrap(one_hot_update)
        assert j == i
        return _SD(v, j, bp)

    def resolve(self, root_updater):
        """Apply the composite updater to the one remaining zero Staged,
        then run the highest-ID-first loop."""
        s = root_updater(StagedVal(self.czero, OMap(steps=self.stage_steps)))
        while not s.stage.is_empty():
            i, (f, a), rest = s.stage.delete_max()
            s2 = f(a)(StagedVal(s.col, rest))
            mk = s2.stage.max_key()
            if mk is not None and mk >= i:
                raise OrderViolation(
                    f"backpropagator {i} staged a call with ID {mk} >= {i}")
            s = s2
        return s.col


def _identity(sv):
    return sv


def _compose(fns):
    if not fns:
        return _identity

    def composed(sv):
        # Right-to-left, matching (f . g) x = f (g x); a flat loop keeps
        # long compositions off the Python stack.
        for f in reversed(fns):
            sv = f(sv)
        return sv

    return composed


# --------------------------------------------------------------------------
# Wrappers

def _finish(sem, prog, x, ct, sigma, tau, root_builder):
    dual_in, k = interleave(sigma, x, sem.make_input)
    sem.stats.input_scalars = k
    out = evaluate(sem, prog.body, {prog.name: dual_in})
    primal = strip_primal(tau, out, lambda d: d.p)
    ct_val = conform(ct, tau) if ct is not None else default_cotangent(tau, primal)
    pairs = output_pairs(tau, out, ct_val, lambda d: d.p)
    root = root_builder(pairs)
    col = sem.resolve(root)
    return primal, col


def grad_staged(prog, x, ct=None) -> EngineResult:
    """Stage m: map-based staging with linear factoring."""
    sigma, tau = check_program(prog)
    x = conform(x, sigma)
    stats = RunStats(engine="staged")
    stage_steps = Steps()
    collector = ValueCollector(sigma, x, len(input_scalars(sigma, x)))
    sem = MapStagedSemantics(stats, collector, stage_steps)

    def root_builder(pairs):
        root = sem.zero_staged
        for dual, z in pairs:
            root = staged_plus(
                root,
                staged_call(dual.i, dual.bp, z, collector.zero, stage_steps,
                            stats),
                collector.plus)
        return root

    primal, col = _finish(sem, prog, x, ct, sigma, tau, root_builder)
    stats.map_ops = stage_steps.n
    return EngineResult(primal, collector.gradient(col, sigma, x), stats)


def grad_sparse(prog, x, ct=None) -> EngineResult:
    """Stage s: integer-keyed scalar collector plus gradient rebuild."""
    sigma, tau = check_program(prog)
    x = conform(x, sigma)
    stats = RunStats(engine="sparse")
    stage_steps = Steps()
    col_steps = Steps()
    collector = MapCollector(col_steps)
    sem = MapStagedSemantics(stats, collector, stage_steps)

    def root_builder(pairs):
        root = sem.zero_staged
        for dual, z in pairs:
            root = staged_plus(
                root,
                staged_call(dual.i, dual.bp, z, collector.zero, stage_steps,
                            stats),
                collector.plus)
        return root

    primal, col = _finish(sem, prog, x, ct, sigma, tau, root_builder)
    stats.map_ops = stage_steps.n + col_steps.n
    stats.collector_map_ops = col_steps.n
    return EngineResult(primal, collector.gradient(col, sigma, x), stats)


def grad_cayley(prog, x, ct=None) -> EngineResult:
    """Stage c: Cayley-transformed updaters (zero = id, plus = compose)."""
    sigma, tau = check_program(prog)
    x = conform(x, sigma)
    stats = RunStats(engine="cayley")
    stage_steps = Steps()
    k = len(input_scalars(sigma, x))
    sem = CayleySemantics(stats, sigma, x, k, stage_steps)

    def root_builder(pairs):
        ups = [sem._staged_call_u(dual.i, dual.bp, z) for dual, z in pairs]
        return _compose(ups)

    primal, col = _finish(sem, prog, x, ct, sigma, tau, root_builder)
    stats.map_ops = stage_steps.n
    return EngineResult(primal, col, stats)
