"""Ground-truth gradient providers: dual-numbers forward AD and central
finite differences.  Every reverse engine in this package is checked
against these two, which are independent of each other and of the
reverse-mode machinery.
"""
from __future__ import annotations

from .errors import DgInputError
from .interp import Semantics, evaluate
from .syntax import OPS, Ty
from .typecheck import check_program
from .values import (
    conform, count_scalars, map_scalars, rebuild_with, scalars_of,
    zip_scalars,
)
from .wrap import default_cotangent, rebuild_gradient


class _Fwd:
    """Scalar paired with its tangent."""

    __slots__ = ("p", "t")

    def __init__(self, p, t):
        self.p = p
        self.t = t


class ForwardSemantics(Semantics):
    __slots__ = ()

    def literal(self, r):
        return _Fwd(r, 0.0)

    def prim(self, op, args):
        self.prim_ops += 1
        ps = [a.p for a in args]
        parts = op.partials(*ps)
        t = 0.0
        for d, a in zip(parts, args):
            t += d * a.t
        return _Fwd(op.fn(*ps), t)

    def primal(self, s):
        return s.p


def forward_ad(prog, x, dx):
    """Evaluate ``prog`` at ``x`` with tangent ``dx``; returns
    (value, directional derivative), both shaped like the output."""
    sigma, tau = check_program(prog)
    x = conform(x, sigma)
    dx = conform(dx, sigma)
    xs = list(zip_scalars(sigma, x, dx))
    it = iter(xs)
    dual_in = map_scalars(sigma, x, lambda _v: _Fwd(*next(it)))
    sem = ForwardSemantics()
    out = evaluate(sem, prog.body, {prog.name: dual_in})
    y = map_scalars(tau, out, lambda s: s.p)
    dy = map_scalars(tau, out, lambda s: s.t)
    return y, dy


def gradient_forward(prog, x, ct=None):
    """Gradient via one forward sweep per input scalar (one-hot tangents),
    contracted with the output cotangent ``ct`` (default 1.0 for R)."""
    sigma, tau = check_program(prog)
    x = conform(x, sigma)
    k = count_scalars(sigma, x)
    grad = []
    ct_val = None
    for i in range(k):
        counter = [0]

        def lift(v, i=i, counter=counter):
            j = counter[0]
            counter[0] = j + 1
            return _Fwd(v, 1.0 if j == i else 0.0)

        dual_in = map_scalars(sigma, x, lift)
        sem = ForwardSemantics()
        out = evaluate(sem, prog.body, {prog.name: dual_in})
        if ct_val is None:
            primal = map_scalars(tau, out, lambda s: s.p)
            ct_val = (conform(ct, tau) if ct is not None
                      else default_cotangent(tau, primal))
        acc = 0.0
        for s, z in zip_scalars(tau, out, ct_val):
            acc += s.t * z
        grad.append(acc)
    if k == 0:
        # Still verify that ct (when given) matches the output shape.
        y = eval_plain(prog, x)
        if ct is not None:
            for _ in zip_scalars(tau, y, conform(ct, tau)):
                pass
    return rebuild_with(sigma, x, iter(grad))


def eval_plain(prog, x):
    sem = Semantics()
    return evaluate(sem, prog.body, {prog.name: x})


def gradient_fd(prog, x, ct=None, h: float = 1e-5):
    """Central-difference gradient: (f(x+h e_i) - f(x-h e_i)) / 2h per
    input scalar, contracted with ``ct``.  Discrete inputs untouched."""
    if h <= 0:
        raise DgInputError("fd step h must be positive")
    sigma, tau = check_program(prog)
    x = conform(x, sigma)
    base = list(scalars_of(sigma, x))
    ct_val = None
    grad = []
    for i in range(len(base)):
        up = list(base)
        up[i] += h
        dn = list(base)
        dn[i] -= h
        y_up = eval_plain(prog, rebuild_with(sigma, x, iter(up)))
        y_dn = eval_plain(prog, rebuild_with(sigma, x, iter(dn)))
        if ct_val is None:
            ct_val = (conform(ct, tau) if ct is not None
                      else default_cotangent(tau, y_up))
        acc = 0.0
        for (a, b), (_a2, z) in zip(zip_scalars(tau, y_up, y_dn),
                                    zip_scalars(tau, y_up, ct_val)):
            acc += (a - b) / (2.0 * h) * z
        grad.append(acc)
    return rebuild_with(sigma, x, iter(grad))
