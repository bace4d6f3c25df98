import math
import random

import pytest

from dualgrad import compile_program, forward_ad, gradient_fd, gradient_forward
from dualgrad.compare import max_deviation, values_close
from dualgrad.progen import random_program
from dualgrad.programs import chain_src
from dualgrad.syntax import REAL, TProd
from dualgrad.values import rebuild_with, scalars_of
from helpers import corpus_cases, load_program


def test_forward_ad_fig1():
    prog, sigma, tau = load_program("fig1.dg")
    y, dy = forward_ad(prog, (3.0, 2.0), (1.0, 0.0))
    assert y == 15.0
    assert dy == 8.0  # d/dx of x(x+y) = 2x + y
    y, dy = forward_ad(prog, (3.0, 2.0), (0.0, 0.0))
    assert (y, dy) == (15.0, 0.0)


def test_forward_ad_identity():
    prog, _, _ = compile_program(r"\(x: R). x")
    assert forward_ad(prog, 5.0, 1.0) == (5.0, 1.0)


def test_gradient_forward_examples():
    prog, sigma, tau = load_program("fig1.dg")
    assert gradient_forward(prog, (3.0, 2.0)) == (8.0, 3.0)
    const, _, _ = compile_program(r"\(x: R). 7.0")
    assert gradient_forward(const, 123.0) == 0.0
    chain, _, _ = compile_program(chain_src(3))
    assert gradient_forward(chain, 1.0) == 16.0


def test_gradient_fd_examples():
    prog, sigma, tau = load_program("fig1.dg")
    g = gradient_fd(prog, (3.0, 2.0), h=1e-5)
    assert abs(g[0] - 8.0) < 1e-6 and abs(g[1] - 3.0) < 1e-6
    ident, _, _ = compile_program(r"\(x: R). x")
    assert abs(gradient_fd(ident, 5.0) - 1.0) < 1e-9
    sinp, _, _ = compile_program(r"\(x: R). sin(x)")
    assert abs(gradient_fd(sinp, 0.0) - 1.0) < 1e-9  # cos(0) = 1


def test_discrete_inputs_untouched():
    prog, sigma, tau = compile_program(
        r"\(p: (R, Z)). fst(p) * fst(p)")
    g = gradient_fd(prog, (3.0, 7), h=1e-5)
    assert g[1] == 7  # discrete leaf copied, not differentiated
    gf = gradient_forward(prog, (3.0, 7))
    assert gf == (6.0, 7)


@pytest.mark.parametrize("seed", range(40))
def test_forward_tangent_linearity(seed):
    rng = random.Random(3000 + seed)
    prog, x = random_program(rng, allow_par=False)
    sigma = prog.anno
    k = sum(1 for _ in scalars_of(sigma, x))
    d1 = rebuild_with(sigma, x, (rng.uniform(-1, 1) for _ in range(k)))
    d2 = rebuild_with(sigma, x, (rng.uniform(-1, 1) for _ in range(k)))
    a, b = rng.uniform(-2, 2), rng.uniform(-2, 2)
    mix = rebuild_with(
        sigma, x, (a * u + b * v
                   for u, v in zip(scalars_of(sigma, d1), scalars_of(sigma, d2))))
    _, t1 = forward_ad(prog, x, d1)
    _, t2 = forward_ad(prog, x, d2)
    _, tm = forward_ad(prog, x, mix)
    want = a * t1 + b * t2
    assert abs(tm - want) <= 1e-12 * max(1.0, abs(tm), abs(want))


def test_forward_agrees_with_fd_on_corpus():
    for name, prog, sigma, tau, x in corpus_cases():
        gf = gradient_forward(prog, x)
        gd = gradient_fd(prog, x, h=1e-5)
        abs_d, rel_d = max_deviation(sigma, gf, gd)
        assert abs_d <= 1e-5 or rel_d <= 1e-4, (name, abs_d, rel_d)
