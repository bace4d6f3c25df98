"""Uniform entry point over the whole engine ladder."""
from __future__ import annotations

from .naive import grad_naive
from .parallel import grad_parallel
from .schedule import make_scheduler
from .staged import grad_cayley, grad_sparse, grad_staged
from .stats import EngineResult
from .tape import grad_tape

ENGINE_NAMES = ("naive", "staged", "cayley", "sparse", "tape", "parallel")


def gradient(prog, x, ct=None, engine: str = "tape", threads: int = 1,
             eager_tape: bool = False, scheduler_kind: str = "process",
             ) -> EngineResult:
    """Differentiate ``prog`` at ``x`` with output cotangent ``ct``.

    ``prog`` is a typechecked top-level lambda; ``x``/``ct`` are runtime
    values (parse literals with ``values.parse_literal`` first).
    """
    if engine == "naive":
        return grad_naive(prog, x, ct)
    if engine == "staged":
        return grad_staged(prog, x, ct)
    if engine == "cayley":
        return grad_cayley(prog, x, ct)
    if engine == "sparse":
        return grad_sparse(prog, x, ct)
    if engine == "tape":
        return grad_tape(prog, x, ct, eager=eager_tape)
    if engine == "parallel":
        sched = make_scheduler(threads, scheduler_kind)
        return grad_parallel(prog, x, ct, scheduler=sched)
    raise ValueError(f"unknown engine {engine!r}; choose from {ENGINE_NAMES}")
