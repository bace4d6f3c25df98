import random

import pytest

from dualgrad import compile_program
from dualgrad.compare import max_deviation
from dualgrad.errors import OrderViolation
from dualgrad.omap import OMap, Steps
from dualgrad.oracle import gradient_forward
from dualgrad.programs import chain_src
from dualgrad.staged import (
    MapStagedSemantics, StagedVal, ValueCollector, grad_cayley, grad_sparse,
    grad_staged, staged_call, staged_plus,
)
from dualgrad.stats import RunStats
from dualgrad.syntax import REAL, TProd
from helpers import corpus_cases, load_program

ENGINES = {"staged": grad_staged, "cayley": grad_cayley, "sparse": grad_sparse}


def _sv(col, entries, steps):
    m = OMap(steps=steps)
    for k, v in entries.items():
        m = m.insert_with(k, v)
    return StagedVal(col, m)


def _add(a, b):
    return a + b


def test_staged_plus_merges_with_linear_factoring():
    # (c1, {f1 -> a1, f2 -> a2}) + (c2, {f2 -> a3})
    #   = (c1 + c2, {f1 -> a1, f2 -> a2 + a3})
    steps = Steps()
    f1, f2 = (lambda z: z), (lambda z: z)
    a = _sv(1.0, {1: (f1, 10.0), 2: (f2, 20.0)}, steps)
    b = _sv(2.0, {2: (f2, 5.0)}, steps)
    out = staged_plus(a, b, _add)
    assert out.col == 3.0
    got = {k: v[1] for k, v in out.stage.items()}
    assert got == {1: 10.0, 2: 25.0}
    assert out.stage.get(1)[0] is f1
    assert out.stage.get(2)[0] is f2


def test_staged_plus_unit_law():
    steps = Steps()
    f = lambda z: z
    x = _sv(4.5, {7: (f, 2.5)}, steps)
    zero = _sv(0.0, {}, steps)
    out = staged_plus(x, zero, _add)
    assert out.col == 4.5
    assert {k: v[1] for k, v in out.stage.items()} == {7: 2.5}


def test_staged_plus_single_key_factoring():
    steps = Steps()
    f = lambda z: z
    a = _sv(0.0, {1: (f, 2.0)}, steps)
    b = _sv(0.0, {1: (f, 3.0)}, steps)
    out = staged_plus(a, b, _add)
    assert {k: v[1] for k, v in out.stage.items()} == {1: 5.0}


def test_staged_plus_rejects_inconsistent_handles():
    steps = Steps()
    a = _sv(0.0, {1: ((lambda z: z), 2.0)}, steps)
    b = _sv(0.0, {1: ((lambda z: z), 3.0)}, steps)
    with pytest.raises(AssertionError):
        staged_plus(a, b, _add)


def test_resolve_paper_f_chain():
    """The four-backpropagator staging example: f4 resolves through f3, f2,
    f1 with every call merged, final collector (0, (55, 0))."""
    sigma = TProd(REAL, TProd(REAL, REAL))
    stats = RunStats()
    steps = Steps()
    collector = ValueCollector(sigma, (0.0, (0.0, 0.0)), 3)
    sem = MapStagedSemantics(stats, collector, steps)

    def wrap(i, fn):
        def bp(z):
            stats.invocations[i] += 1
            return fn(z)
        return bp

    def call(i, f, x):
        return staged_call(i, f, x, collector.zero, steps, stats)

    f1 = wrap(1, lambda z: StagedVal((0.0, (z, 0.0)), OMap(steps=steps)))
    f2 = wrap(2, lambda z: staged_plus(call(1, f1, 2 * z),
                                       call(1, f1, 3 * z), collector.plus))
    f3 = wrap(3, lambda z: staged_plus(call(2, f2, 4 * z),
                                       call(1, f1, 5 * z), collector.plus))
    f4 = wrap(4, lambda z: staged_plus(call(2, f2, z),
                                       call(3, f3, 2 * z), collector.plus))

    # f4 applied to 1 stages {f2 -> 1, f3 -> 2}
    first = f4(1.0)
    assert {k: v[1] for k, v in first.stage.items()} == {2: 1.0, 3: 2.0}

    # resolving f3 merges its calls: {f2 -> 9, f1 -> 10}
    i, (f, a), rest = first.stage.delete_max()
    assert i == 3 and a == 2.0
    merged = staged_plus(StagedVal(first.col, rest), f(a), collector.plus)
    assert {k: v[1] for k, v in merged.stage.items()} == {2: 9.0, 1: 10.0}

    # running the loop to completion accumulates 55 at the middle slot
    out = sem.resolve(merged)
    assert out == (0.0, (55.0, 0.0))
    assert max(stats.invocations.values()) == 1


@pytest.mark.parametrize("engine", sorted(ENGINES))
def test_fig1(engine):
    prog, sigma, tau = load_program("fig1.dg")
    res = ENGINES[engine](prog, (3.0, 2.0))
    assert res.value == 15.0
    assert res.gradient == (8.0, 3.0)


@pytest.mark.parametrize("engine", sorted(ENGINES))
def test_identity(engine):
    prog, _, _ = compile_program(r"\(x: R). x")
    res = ENGINES[engine](prog, 5.0)
    assert (res.value, res.gradient) == (5.0, 1.0)


@pytest.mark.parametrize("engine", sorted(ENGINES))
def test_chain14_everyone_called_at_most_once(engine):
    prog, _, _ = compile_program(chain_src(14))
    res = ENGINES[engine](prog, 1.0)
    assert res.gradient == 2.0 ** 15
    assert max(res.stats.invocations.values()) == 1
    assert res.stats.backprops_invoked == 16  # n + 2 resolutions


@pytest.mark.parametrize("engine", sorted(ENGINES))
def test_oracle_agreement_corpus(engine):
    for name, prog, sigma, tau, x in corpus_cases():
        res = ENGINES[engine](prog, x)
        ref = gradient_forward(prog, x)
        _, rel = max_deviation(sigma, res.gradient, ref)
        assert rel <= 1e-9, (engine, name, rel)
        assert all(c <= 1 for c in res.stats.invocations.values()), name


def test_variants_agree_exactly_on_key_multisets():
    for name, prog, sigma, tau, x in corpus_cases():
        events = [dict(ENGINES[e](prog, x).stats.key_events)
                  for e in ("staged", "cayley", "sparse")]
        assert events[0] == events[1] == events[2], name


def test_resolve_order_violation_detected():
    """A hand-built staged value whose handle stages an ID above itself
    must trip the resolve-order assertion."""
    stats = RunStats()
    steps = Steps()
    collector = ValueCollector(REAL, 0.0, 1)
    sem = MapStagedSemantics(stats, collector, steps)

    def bad(z):
        return staged_call(9, lambda w: sem.zero_staged, z, collector.zero,
                           steps, stats)

    start = staged_call(3, bad, 1.0, collector.zero, steps, stats)
    with pytest.raises(OrderViolation):
        sem.resolve(staged_plus(sem.zero_staged, start, collector.plus))


def test_sparse_rebuild_uses_input_ids():
    from dualgrad.values import list_value
    prog, sigma, tau = load_program("dot4.dg")
    x = (list_value([1.0, 2.0]), list_value([3.0, 4.0]))
    res = grad_sparse(prog, x)
    assert res.gradient == (list_value([3.0, 4.0]), list_value([1.0, 2.0]))
