import pytest

from dualgrad import compile_program
from dualgrad.compare import max_deviation
from dualgrad.errors import GuardExceeded
from dualgrad.naive import grad_naive, _ND
from dualgrad.oracle import gradient_forward
from dualgrad.programs import chain_src
from dualgrad.syntax import REAL, TProd
from dualgrad.wrap import interleave, strip_primal
from helpers import corpus_cases, load_program


def test_fig1_gradient():
    prog, sigma, tau = load_program("fig1.dg")
    res = grad_naive(prog, (3.0, 2.0))
    assert res.value == 15.0
    assert res.gradient == (8.0, 3.0)


def test_constant_backpropagator_returns_zero():
    prog, _, _ = compile_program(r"\(x: R). 2.0")
    res = grad_naive(prog, 1.0)
    assert res.gradient == 0.0


def test_chain3_counts():
    # chain(3): 4 doubling levels; the input backpropagator is re-entered
    # 2^4 = 16 times, the op backpropagators 2^4 - 1 = 15 times in total.
    prog, _, _ = compile_program(chain_src(3))
    res = grad_naive(prog, 1.0, 1.0)
    assert res.value == 16.0
    assert res.gradient == 16.0
    inv = res.stats.invocations
    assert inv[0] == 16
    assert sum(c for i, c in inv.items() if i > 0) == 15
    # per-level doubling of invocations
    assert [inv[i] for i in range(5)] == [16, 8, 4, 2, 1]


def test_chain_total_invocations_formula():
    for n in (1, 4, 7):
        prog, _, _ = compile_program(chain_src(n))
        res = grad_naive(prog, 1.0)
        op_total = sum(c for i, c in res.stats.invocations.items() if i > 0)
        assert op_total == 2 ** (n + 1) - 1
        assert res.stats.invocations[0] == 2 ** (n + 1)


def test_guard_refuses_large_forward_pass():
    # each iteration performs 3 primitive ops, so 400k iterations cross
    # the naive guard of 2^20 forward ops
    prog, _, _ = compile_program(r"""
\(x: R).
  letrec go (st: (R, R)): R =
    case sign(snd(st) - 0.5) {
      inl stop -> fst(st);
      inr more -> go (fst(st) + x, snd(st) - 1.0)
    }
  in go (0.0, 400000.0)
""")
    with pytest.raises(GuardExceeded):
        grad_naive(prog, 1.0)


def test_interleave_deinterleave_roundtrip():
    sigma = TProd(REAL, TProd(REAL, REAL))
    x = (1.5, (-2.0, 0.25))
    dual, k = interleave(sigma, x, lambda i, v: _ND(v, i, lambda z: None))
    assert k == 3
    assert strip_primal(sigma, dual, lambda d: d.p) == x


def test_matches_oracle_on_corpus():
    for name, prog, sigma, tau, x in corpus_cases():
        res = grad_naive(prog, x)
        ref = gradient_forward(prog, x)
        _, rel = max_deviation(sigma, res.gradient, ref)
        assert rel <= 1e-9, (name, rel)


def test_backpropagators_are_monoid_homomorphisms():
    # f(0) = 0 and f(a+b) = f(a) + f(b) for the output backpropagator
    prog, sigma, tau = load_program("deep_share.dg")
    x = (0.8, -1.1)
    g0 = grad_naive(prog, x, 0.0).gradient
    assert g0 == (0.0, 0.0)
    ga = grad_naive(prog, x, 2.0).gradient
    gb = grad_naive(prog, x, 3.0).gradient
    gab = grad_naive(prog, x, 5.0).gradient
    for u, v, w in zip(ga, gb, gab):
        assert abs((u + v) - w) <= 1e-9 * max(1.0, abs(w))
