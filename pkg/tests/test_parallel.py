import itertools
import random

import pytest

from dualgrad import compile_program
from dualgrad.compare import max_deviation, values_close, values_equal
from dualgrad.parallel import JobGraph, grad_parallel, id_leq
from dualgrad.progen import random_program
from dualgrad.schedule import (
    ProcessScheduler, SequentialScheduler, ThreadScheduler,
)
from dualgrad.tape import grad_tape
from helpers import PAR_PROGRAMS, corpus_cases, load_program

# Canonical labels of the reference job graph: the DFS order over the
# JobDescr tree (before, left, right, self) visits alpha, beta, delta,
# epsilon, zeta, gamma, eta.
ALPHA, BETA, DELTA, EPS, ZETA, GAMMA, ETA = range(7)

EXPECTED_EDGES = sorted([
    (ALPHA, BETA), (ALPHA, GAMMA), (BETA, DELTA), (BETA, EPS),
    (DELTA, ZETA), (EPS, ZETA), (ZETA, ETA), (GAMMA, ETA),
])
EXPECTED_COUNTS = {ALPHA: 0, BETA: 3, DELTA: 2, EPS: 1, ZETA: 2,
                   GAMMA: 2, ETA: 1}


def test_partial_order_job_graph_exact():
    prog, sigma, tau = load_program("partial_order.dg")
    res = grad_parallel(prog, (1.0, 2.0))
    assert res.graph["jobs"] == 7
    assert res.graph["edges"] == EXPECTED_EDGES
    assert res.graph["counts"] == EXPECTED_COUNTS


def test_partial_order_gradient_matches_tape():
    prog, sigma, tau = load_program("partial_order.dg")
    res = grad_parallel(prog, (1.0, 2.0))
    ref = grad_tape(prog, (1.0, 2.0))
    assert values_close(sigma, res.gradient, ref.gradient, rtol=1e-12)


def _graph_of(prog, x):
    # raw JobGraph (not the canonical summary) for order tests
    from dualgrad.interp import evaluate
    from dualgrad.parallel import JobCounter, JobDescr, ParSemantics, _PD, _enc_input
    from dualgrad.stats import RunStats
    from dualgrad.typecheck import check_program
    from dualgrad.values import conform
    from dualgrad.wrap import interleave
    sigma, tau = check_program(prog)
    x = conform(x, sigma)
    counter = JobCounter()
    sem = ParSemantics(RunStats(), counter, None, counter.take())
    dual_in, _ = interleave(sigma, x, lambda i, v: _PD(v, _enc_input(i)))
    evaluate(sem, prog.body, {prog.name: dual_in})
    return JobGraph(JobDescr(sem.hist, sem.jid, sem.seq))


def test_id_leq_examples():
    prog, sigma, tau = load_program("partial_order.dg")
    g = _graph_of(prog, (1.0, 2.0))
    label = {i: j for i, j in enumerate(g.canon_order)}
    beta, delta, eps, zeta = (label[BETA], label[DELTA], label[EPS],
                              label[ZETA])
    assert id_leq((beta, 0), (zeta, 1), g)
    assert not id_leq((delta, 0), (eps, 0), g)
    assert not id_leq((eps, 0), (delta, 0), g)
    assert id_leq((beta, 1), (beta, 1), g)
    # the dependency (beta, 2) -> (zeta, 0) is in the order even though
    # zeta's sequence counter restarted below 2
    assert id_leq((beta, 2), (zeta, 0), g)
    with pytest.raises(KeyError):
        id_leq((999, 0), (beta, 0), g)


@pytest.mark.parametrize("seed", range(25))
def test_id_leq_is_a_partial_order(seed):
    rng = random.Random(4000 + seed)
    prog, x = random_program(rng, allow_par=True)
    g = _graph_of(prog, x)
    ids = [(j, s) for j, c in g.counts.items() for s in range(max(c, 1))]
    ids = ids[:14]
    for a in ids:
        assert id_leq(a, a, g)  # reflexive
    for a, b in itertools.permutations(ids, 2):
        if id_leq(a, b, g) and id_leq(b, a, g):
            assert a == b  # antisymmetric
    for a, b, c in itertools.permutations(ids, 3):
        if id_leq(a, b, g) and id_leq(b, c, g):
            assert id_leq(a, c, g)  # transitive


def test_program_without_par_bitwise_equals_tape():
    for name in ("fig1.dg", "deep_share.dg", "geo_loop.dg", "mixed_sum.dg"):
        prog, sigma, tau = load_program(name)
        for case, p, s, t, x in corpus_cases():
            if not case.startswith(name):
                continue
            rp = grad_parallel(prog, x)
            rt = grad_tape(prog, x)
            assert values_equal(sigma, rp.gradient, rt.gradient), case
            assert rp.graph["jobs"] == 1
            assert rp.graph["edges"] == []


def test_empty_par_jobs_allowed():
    prog, sigma, tau = compile_program(
        r"\(x: R). let q: (R, R) = par(x, x) in fst(q) + snd(q)")
    res = grad_parallel(prog, 2.0)
    assert res.gradient == 2.0
    # root and both spawned jobs perform no primitive operation; only the
    # join continuation (the addition) does
    counts = res.graph["counts"]
    assert sorted(counts.values()) == [0, 0, 0, 1]


@pytest.mark.parametrize("sched_factory", [
    SequentialScheduler, lambda: ThreadScheduler(4),
    lambda: ProcessScheduler(4)])
def test_schedulers_agree(sched_factory):
    for name in PAR_PROGRAMS:
        prog, sigma, tau = load_program(name)
        for case, p, s, t, x in corpus_cases():
            if not case.startswith(name):
                continue
            ref = grad_parallel(prog, x, scheduler=SequentialScheduler())
            res = grad_parallel(prog, x, scheduler=sched_factory())
            assert values_equal(sigma, res.gradient, ref.gradient), case
            assert res.graph == ref.graph, case


def test_canonical_graph_stable_over_repeated_parallel_runs():
    prog, sigma, tau = load_program("partial_order.dg")
    graphs = [grad_parallel(prog, (1.0, 2.0),
                            scheduler=ProcessScheduler(4)).graph
              for _ in range(10)]
    assert all(g == graphs[0] for g in graphs)


def test_matches_tape_on_whole_corpus():
    for case, prog, sigma, tau, x in corpus_cases():
        rp = grad_parallel(prog, x)
        rt = grad_tape(prog, x)
        assert values_close(sigma, rp.gradient, rt.gradient, rtol=1e-9), case


@pytest.mark.parametrize("seed", range(40))
def test_fuzz_par_gradients_match_tape(seed):
    rng = random.Random(5000 + seed)
    prog, x = random_program(rng, allow_par=True)
    sigma = prog.anno
    rp = grad_parallel(prog, x)
    rt = grad_tape(prog, x)
    assert values_close(sigma, rp.gradient, rt.gradient, rtol=1e-9)
