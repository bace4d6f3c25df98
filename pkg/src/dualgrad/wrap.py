"""Wrapper plumbing shared by the engines: interleaving per-scalar duals
into the input structure, pairing the dual output with a cotangent, and
rebuilding an input-shaped gradient from per-scalar results.

Input scalars are numbered 0..k-1 left-to-right over the input structure;
every engine uses this same numbering, which is what makes staging-key
multisets comparable across the ladder.
"""
from __future__ import annotations

from .errors import DgInputError
from .syntax import REAL, Ty
from .values import (
    conform, count_scalars, map_scalars, rebuild_with, scalars_of,
    zip_scalars,
)


def interleave(sigma: Ty, x, make_scalar):
    """Replace each input scalar with ``make_scalar(index, value)``.

    Returns (dual input value, number of input scalars).
    """
    counter = [0]

    def lift(v):
        i = counter[0]
        counter[0] = i + 1
        return make_scalar(i, v)

    dual = map_scalars(sigma, x, lift)
    return dual, counter[0]


def input_scalars(sigma: Ty, x) -> list[float]:
    return list(scalars_of(sigma, x))


def strip_primal(tau: Ty, dual_out, primal_of):
    """Recover the plain output value from a dual output."""
    return map_scalars(tau, dual_out, primal_of)


def default_cotangent(tau: Ty, primal_out):
    """The 1.0 cotangent for scalar-valued programs."""
    if tau is REAL or tau == REAL:
        return 1.0
    raise DgInputError(
        "program output is not R; pass an explicit cotangent (--ct)")


def output_pairs(tau: Ty, dual_out, ct, primal_of):
    """Pair each output dual scalar with its cotangent component.

    The cotangent must have the same runtime shape as the output value
    (same sum tags, same list lengths).
    """
    primal = strip_primal(tau, dual_out, primal_of)
    ct = conform(ct, tau)
    # Walk primal/ct once to surface shape errors with a clear message,
    # then walk dual/ct to produce the pairs.
    for _ in zip_scalars(tau, primal, ct):
        pass
    return list(zip_scalars(tau, dual_out, ct))


def rebuild_gradient(sigma: Ty, x, scalar_at):
    """Input-shaped gradient: scalar i comes from ``scalar_at(i)``,
    discrete leaves are copied from the input."""
    k = count_scalars(sigma, x)
    return rebuild_with(sigma, x, (scalar_at(i) for i in range(k)))
