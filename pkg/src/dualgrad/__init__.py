"""dualgrad: reverse-mode AD for a small strict functional language.

The package implements an optimization ladder of reverse-mode engines
over one shared interpreter:

    naive    closure backpropagators, exponential under sharing
    staged   ID-keyed call staging with linear factoring
    cayley   staging with constant-time zero/plus (updater composition)
    sparse   integer-keyed scalar collector + gradient rebuild
    tape     flat slot array with defunctionalized Contrib nodes
    parallel compound IDs + job graph, fork-join reverse pass

plus two independent oracles (forward AD, central finite differences),
instrumentation counters, and a benchmark harness.
"""
from .engines import ENGINE_NAMES, gradient
from .errors import (
    DgError, DgInputError, DgParseError, DgTypeError, GuardExceeded,
    OrderViolation,
)
from .interp import eval_program
from .oracle import forward_ad, gradient_fd, gradient_forward
from .parser import parse, parse_type
from .typecheck import check_program, typecheck
from .values import parse_literal, value_to_literal

__all__ = [
    "ENGINE_NAMES", "gradient", "compile_program",
    "DgError", "DgInputError", "DgParseError", "DgTypeError",
    "GuardExceeded", "OrderViolation",
    "eval_program", "forward_ad", "gradient_fd", "gradient_forward",
    "parse", "parse_type", "check_program", "typecheck",
    "parse_literal", "value_to_literal",
]


def compile_program(src: str):
    """Parse and typecheck a program; returns (ast, domain, codomain)."""
    prog = parse(src)
    sigma, tau = check_program(prog)
    return prog, sigma, tau
