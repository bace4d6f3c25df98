"""Command-line front end.

    dualgrad grad FILE --engine ENGINE --input LIT [--ct LIT]
                 [--threads N] [--eager-tape] [--stats]
    dualgrad check FILE --input LIT [--engines a,b,c] [--json]
    dualgrad bench --suite NAME --sizes a,b,c [--threads 1,2,4]
                 [--reps N] [--json]

Exit code 0 on success; 1 on a failed check; 2 on parse/type/input errors.
"""
from __future__ import annotations

import argparse
import json
import sys

from .bench import SUITES, fit_scaling_exponent, run_suite, speedups
from .compare import max_deviation
from .engines import ENGINE_NAMES, gradient
from .errors import DgError
from .oracle import eval_plain, gradient_fd, gradient_forward
from .parser import parse
from .typecheck import check_program
from .values import conform, parse_literal, value_to_literal
from .interp import Semantics, evaluate

FD_STEP = 1e-5
BOUNDARY_MARGIN = 10 * FD_STEP


def _load(path: str):
    with open(path, "r", encoding="utf-8") as f:
        src = f.read()
    prog = parse(src)
    sigma, tau = check_program(prog)
    return prog, sigma, tau


def _int_list(text: str) -> list[int]:
    return [int(float(s)) for s in text.split(",") if s]


def cmd_grad(args) -> int:
    prog, sigma, tau = _load(args.file)
    x = conform(parse_literal(args.input), sigma)
    ct = parse_literal(args.ct) if args.ct is not None else None
    res = gradient(prog, x, ct=ct, engine=args.engine, threads=args.threads,
                   eager_tape=args.eager_tape)
    print(f"value: {value_to_literal(res.value)}")
    print(f"gradient: {value_to_literal(res.gradient)}")
    if args.stats:
        print(json.dumps(res.stats.as_json()))
        if res.graph is not None:
            print(json.dumps({"job_graph": res.graph}))
    return 0


def _near_sign_boundary(prog, x) -> bool:
    closest = [float("inf")]

    def observe(p):
        closest[0] = min(closest[0], abs(p))

    sem = Semantics(sign_observer=observe)
    evaluate(sem, prog.body, {prog.name: x})
    return closest[0] < BOUNDARY_MARGIN


def cmd_check(args) -> int:
    prog, sigma, tau = _load(args.file)
    x = conform(parse_literal(args.input), sigma)
    ct = parse_literal(args.ct) if args.ct is not None else None
    engines = (args.engines.split(",") if args.engines else list(ENGINE_NAMES))
    ref = gradient_forward(prog, x, ct)
    skip_fd = _near_sign_boundary(prog, x)
    if skip_fd:
        print("warning: evaluation point is near a sign boundary; "
              "finite-difference check skipped", file=sys.stderr)
        fd = None
    else:
        fd = gradient_fd(prog, x, ct, h=FD_STEP)
    failed = False
    rows = []
    for name in engines:
        res = gradient(prog, x, ct=ct, engine=name, threads=args.threads)
        _, rel_fwd = max_deviation(sigma, res.gradient, ref)
        ok = rel_fwd <= 1e-9
        line = {"engine": name, "max_rel_vs_forward": rel_fwd,
                "forward_check": "PASS" if ok else "FAIL"}
        if fd is not None:
            abs_fd, rel_fd = max_deviation(sigma, res.gradient, fd)
            ok_fd = abs_fd <= 1e-5 or rel_fd <= 1e-4
            line["max_rel_vs_fd"] = rel_fd
            line["fd_check"] = "PASS" if ok_fd else "FAIL"
            ok = ok and ok_fd
        failed = failed or not ok
        rows.append(line)
    for line in rows:
        if args.json:
            print(json.dumps(line))
        else:
            msg = (f"{line['engine']:>9}: forward {line['forward_check']} "
                   f"(max rel {line['max_rel_vs_forward']:.3e})")
            if "fd_check" in line:
                msg += (f", fd {line['fd_check']} "
                        f"(max rel {line['max_rel_vs_fd']:.3e})")
            print(msg)
    return 1 if failed else 0


def cmd_bench(args) -> int:
    sizes = _int_list(args.sizes) if args.sizes else None
    threads = _int_list(args.threads) if args.threads else [1]
    if sizes is None:
        sizes = {"scalarmul": [1, 2, 4, 8],
                 "dotprod": [250, 500, 1000, 2000],
                 "summatvec": [256, 1024, 4096, 16384],
                 "rotvecquat": [1, 2, 4, 8],
                 "particles": [1000]}[args.suite]
    reports = run_suite(args.suite, sizes, threads_list=threads,
                        engine=args.engine, reps=args.reps,
                        warmup=args.warmup)
    seq = [r for r in reports if r.threads == threads[0]]
    exponent = fit_scaling_exponent([r.n for r in seq],
                                    [r.wall_time for r in seq])
    if args.json:
        for r in reports:
            print(json.dumps(r.as_json()))
        print(json.dumps({"suite": args.suite,
                          "scaling_exponent": exponent,
                          "speedups": speedups(reports)}))
        return 0
    header = (f"{'program':>12} {'engine':>9} {'n':>8} {'thr':>4} "
              f"{'time_s':>12} {'primal_ops':>11} {'rev_steps':>10} "
              f"{'checksum':>14}")
    print(header)
    for r in reports:
        print(f"{r.program:>12} {r.engine:>9} {r.n:>8} {r.threads:>4} "
              f"{r.wall_time:>12.6f} {r.primal_ops:>11} "
              f"{r.reverse_steps:>10} {r.gradient_checksum:>14.6g}")
    print(f"fitted scaling exponent: {exponent:.3f}")
    sp = speedups(reports)
    if sp:
        rendered = ", ".join(f"{t} threads: {s:.2f}x" for t, s in sp.items())
        print(f"speedup vs 1 thread: {rendered}")
    return 0


def cmd_eval(args) -> int:
    prog, sigma, tau = _load(args.file)
    x = conform(parse_literal(args.input), sigma)
    print(f"value: {value_to_literal(eval_plain(prog, x))}")
    return 0


def main(argv=None) -> int:
    sys.setrecursionlimit(200_000)
    ap = argparse.ArgumentParser(
        prog="dualgrad",
        description="Reverse-mode AD for .dg programs: evaluate, "
                    "differentiate, cross-check, benchmark.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("grad", help="differentiate a program at an input")
    g.add_argument("file")
    g.add_argument("--engine", default="tape", choices=ENGINE_NAMES)
    g.add_argument("--input", required=True)
    g.add_argument("--ct", default=None,
                   help="output cotangent literal (default 1.0 for R)")
    g.add_argument("--threads", type=int, default=1)
    g.add_argument("--eager-tape", action="store_true")
    g.add_argument("--stats", action="store_true")
    g.set_defaults(fn=cmd_grad)

    c = sub.add_parser("check", help="cross-check engines against oracles")
    c.add_argument("file")
    c.add_argument("--input", required=True)
    c.add_argument("--ct", default=None)
    c.add_argument("--engines", default=None,
                   help="comma-separated engine subset (default: all)")
    c.add_argument("--threads", type=int, default=1)
    c.add_argument("--json", action="store_true")
    c.set_defaults(fn=cmd_check)

    b = sub.add_parser("bench", help="run a benchmark suite")
    b.add_argument("--suite", required=True, choices=SUITES)
    b.add_argument("--sizes", default=None, help="comma-separated sizes")
    b.add_argument("--threads", default=None,
                   help="comma-separated thread counts (particles)")
    b.add_argument("--engine", default=None, choices=ENGINE_NAMES)
    b.add_argument("--reps", type=int, default=20)
    b.add_argument("--warmup", type=int, default=3)
    b.add_argument("--json", action="store_true")
    b.set_defaults(fn=cmd_bench)

    e = sub.add_parser("eval", help="evaluate a program at an input")
    e.add_argument("file")
    e.add_argument("--input", required=True)
    e.set_defaults(fn=cmd_eval)

    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except DgError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
