"""Benchmark harness: wall-time measurement, scaling fits, speedup.

Methodology: per measurement, a few warmup runs followed by a median of
repeated timed runs (GC paused during timing); scaling exponents come
from a least-squares fit of log(time) against log(n).  Absolute times are
hardware-specific; the assertable quantities are ratios, fitted
exponents, and the deterministic operation counters.
"""
from __future__ import annotations

import gc
import math
import time
from dataclasses import dataclass, field

from .engines import gradient
from .parser import parse
from .programs import (
    dot_input, dotprod_src, particles_input, particles_src, rotvecquat_input,
    rotvecquat_src, scalarmul_src, summatvec_input, summatvec_src,
)
from .typecheck import check_program
from .values import count_scalars, scalars_of

SUITES = ("scalarmul", "dotprod", "summatvec", "rotvecquat", "particles")


@dataclass
class RunReport:
    program: str
    engine: str
    n: int
    threads: int = 1
    wall_time: float = 0.0
    primal_ops: int = 0
    reverse_steps: int = 0
    backprop_histogram: dict = field(default_factory=dict)
    gradient_checksum: float = 0.0

    def as_json(self) -> dict:
        return {
            "program": self.program,
            "engine": self.engine,
            "n": self.n,
            "threads": self.threads,
            "wall_time": self.wall_time,
            "primal_ops": self.primal_ops,
            "reverse_steps": self.reverse_steps,
            "backprop_histogram": self.backprop_histogram,
            "gradient_checksum": self.gradient_checksum,
        }


def measure(fn, reps: int = 20, warmup: int = 3) -> float:
    """Median wall time of ``fn()`` over ``reps`` runs after warmups."""
    for _ in range(warmup):
        fn()
    times = []
    gc_was_on = gc.isenabled()
    gc.disable()
    try:
        for _ in range(reps):
            t0 = time.perf_counter()
            fn()
            times.append(time.perf_counter() - t0)
    finally:
        if gc_was_on:
            gc.enable()
    times.sort()
    return times[len(times) // 2]


def reverse_steps(stats) -> int:
    """Slot visits plus contribution-edge traversals of the reverse pass."""
    return stats.slots_resolved + stats.edges_traversed


def checksum(sigma, grad) -> float:
    return math.fsum(scalars_of(sigma, grad))


def fit_scaling_exponent(sizes, times) -> float:
    """Least-squares slope of log(time) vs log(n)."""
    pts = [(math.log(n), math.log(t)) for n, t in zip(sizes, times) if t > 0]
    if len(pts) < 2:
        return float("nan")
    mx = sum(p[0] for p in pts) / len(pts)
    my = sum(p[1] for p in pts) / len(pts)
    var = sum((p[0] - mx) ** 2 for p in pts)
    cov = sum((p[0] - mx) * (p[1] - my) for p in pts)
    return cov / var if var > 0 else float("nan")


def _compiled(src):
    prog = parse(src)
    sigma, tau = check_program(prog)
    return prog, sigma


def run_suite(suite: str, sizes, threads_list=(1,), engine: str | None = None,
              reps: int = 20, warmup: int = 3) -> list[RunReport]:
    """Run one benchmark family across sizes (and thread counts for the
    parallel suite); returns one report per configuration."""
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {SUITES}")
    reports: list[RunReport] = []

    if suite == "scalarmul":
        engine = engine or "tape"
        prog, sigma = _compiled(scalarmul_src())
        x = (1.5, 2.5)
        for n in sizes:
            res = gradient(prog, x, engine=engine)

            def once(n=n):
                for _ in range(n):
                    gradient(prog, x, engine=engine)

            t = measure(once, reps=reps, warmup=warmup)
            reports.append(RunReport(
                "scalarmul", engine, n, 1, t, res.stats.primal_ops,
                reverse_steps(res.stats), res.stats.invocation_histogram(),
                checksum(sigma, res.gradient)))
        return reports

    if suite in ("dotprod", "summatvec"):
        engine = engine or "tape"
        src = dotprod_src() if suite == "dotprod" else summatvec_src()
        make_input = dot_input if suite == "dotprod" else summatvec_input
        prog, sigma = _compiled(src)
        for n in sizes:
            x = make_input(n)
            res = gradient(prog, x, engine=engine)
            t = measure(lambda: gradient(prog, x, engine=engine),
                        reps=reps, warmup=warmup)
            reports.append(RunReport(
                suite, engine, n, 1, t, res.stats.primal_ops,
                reverse_steps(res.stats), res.stats.invocation_histogram(),
                checksum(sigma, res.gradient)))
        return reports

    if suite == "rotvecquat":
        engine = engine or "tape"
        prog, sigma = _compiled(rotvecquat_src())
        x = rotvecquat_input()
        # Full Jacobian: one reverse pass per output scalar (three here).
        cts = [(1.0, (0.0, 0.0)), (0.0, (1.0, 0.0)), (0.0, (0.0, 1.0))]

        def jac_once(reps_inner=1):
            for ct in cts:
                gradient(prog, x, ct=ct, engine=engine)

        res = gradient(prog, x, ct=cts[0], engine=engine)
        for n in sizes:
            def once(n=n):
                for _ in range(n):
                    jac_once()

            t = measure(once, reps=reps, warmup=warmup)
            reports.append(RunReport(
                "rotvecquat", engine, n, 1, t, res.stats.primal_ops,
                reverse_steps(res.stats), res.stats.invocation_histogram(),
                checksum(sigma, res.gradient)))
        return reports

    # particles: the parallel suite; sizes are step counts
    engine = engine or "parallel"
    x = particles_input()
    for n in sizes:
        prog, sigma = _compiled(particles_src(steps=n))
        for threads in threads_list:
            res = gradient(prog, x, engine=engine, threads=threads)
            t = measure(
                lambda: gradient(prog, x, engine=engine, threads=threads),
                reps=reps, warmup=warmup)
            reports.append(RunReport(
                "particles", engine, n, threads, t, res.stats.primal_ops,
                reverse_steps(res.stats), res.stats.invocation_histogram(),
                checksum(sigma, res.gradient)))
    return reports


def speedups(reports) -> dict[int, float]:
    """Wall-time speedup per thread count relative to threads=1, computed
    within each (program, n) group."""
    base = {}
    for r in reports:
        if r.threads == 1:
            base[(r.program, r.n)] = r.wall_time
    out = {}
    for r in reports:
        b = base.get((r.program, r.n))
        if b and r.threads != 1 and r.wall_time > 0:
            out[r.threads] = b / r.wall_time
    return out
