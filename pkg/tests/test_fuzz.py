"""Cross-engine agreement and resolve-order safety over generated programs.

The acceptance suite runs the full 1000-program sweep (criterion 9); this
is a faster everyday version with a distinct seed range.
"""
import random

import pytest

from dualgrad.compare import values_close
from dualgrad.naive import grad_naive
from dualgrad.oracle import gradient_forward
from dualgrad.parallel import grad_parallel
from dualgrad.progen import random_program
from dualgrad.staged import grad_cayley, grad_sparse, grad_staged
from dualgrad.tape import grad_tape


@pytest.mark.parametrize("seed", range(100))
def test_all_engines_agree_with_forward_oracle(seed):
    rng = random.Random(7_000_000 + seed)
    prog, x = random_program(rng)
    sigma = prog.anno
    ref = gradient_forward(prog, x)
    engines = [
        grad_naive(prog, x),
        grad_staged(prog, x),
        grad_cayley(prog, x),
        grad_sparse(prog, x),
        grad_tape(prog, x),
        grad_tape(prog, x, eager=True),
        grad_parallel(prog, x),
    ]
    for res in engines:
        assert values_close(sigma, res.gradient, ref, rtol=1e-9, atol=1e-12), \
            (seed, res.stats.engine)
    for res in engines[1:6]:
        assert all(c <= 1 for c in res.stats.invocations.values()), \
            (seed, res.stats.engine)


@pytest.mark.parametrize("seed", range(40))
def test_stage_equivalence_key_multisets(seed):
    rng = random.Random(7_100_000 + seed)
    prog, x = random_program(rng)
    runs = [grad_staged(prog, x), grad_cayley(prog, x), grad_sparse(prog, x),
            grad_tape(prog, x), grad_tape(prog, x, eager=True)]
    base = dict(runs[0].stats.key_events)
    for r in runs[1:]:
        assert dict(r.stats.key_events) == base, (seed, r.stats.engine)
