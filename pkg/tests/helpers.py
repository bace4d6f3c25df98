"""Shared fixtures: the committed corpus with its evaluation points."""
from __future__ import annotations

from pathlib import Path

from dualgrad import compile_program, parse_literal
from dualgrad.values import conform

REPO = Path(__file__).resolve().parent.parent
PROGRAM_DIR = REPO / "programs"

# program file -> input literals (all chosen away from sign boundaries)
CORPUS_POINTS = {
    "fig1.dg": ["(3.0, 2.0)", "(1.5, -2.0)"],
    "identity.dg": ["5.0"],
    "const.dg": ["1.25"],
    "chain3.dg": ["1.0", "0.7"],
    "poly.dg": ["1.3", "-0.9"],
    "trig.dg": ["(0.7, -0.4)", "(1.2, 0.3)"],
    "sign_branch.dg": ["1.2", "-0.8"],
    "abs_diff.dg": ["(2.0, 0.5)", "(0.25, 1.5)"],
    "geo_loop.dg": ["(1.1, 5.0)", "(0.9, 3.0)"],
    "dot4.dg": ["([1.0, 2.0, -0.5, 3.0], [0.5, -1.0, 2.0, 1.5])"],
    "sumlist.dg": ["[0.5, -1.5, 2.0, 0.25, -0.75]"],
    "par_simple.dg": ["(0.9, -1.3)"],
    "partial_order.dg": ["(1.0, 2.0)", "(0.3, -0.6)"],
    "rotquat_scalar.dg": ["((1.0, (0.5, -0.5)), ((0.9, 0.1), (0.3, -0.2)))"],
    "mixed_sum.dg": ["(1.5, -0.7)", "(-0.6, 0.8)"],
    "deep_share.dg": ["(0.8, -1.1)"],
}

PAR_PROGRAMS = ("par_simple.dg", "partial_order.dg")

_cache = {}


def load_program(name: str):
    """(prog, sigma, tau) for a corpus file, cached."""
    if name not in _cache:
        src = (PROGRAM_DIR / name).read_text()
        _cache[name] = compile_program(src)
    return _cache[name]


def corpus_cases():
    """Yield (name, prog, sigma, tau, input value) over all corpus points."""
    for name, points in CORPUS_POINTS.items():
        prog, sigma, tau = load_program(name)
        for lit in points:
            yield f"{name}@{lit}", prog, sigma, tau, conform(
                parse_literal(lit), sigma)
