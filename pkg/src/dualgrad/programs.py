"""Source builders for the benchmark programs and reference examples.

These return .dg source text; see the programs/ directory in the
repository for the committed corpus used by the cross-checking tests.
"""
from __future__ import annotations

import random

from .values import list_value


def fig1_src() -> str:
    return r"\(p: (R, R)). let z: R = fst(p) + snd(p) in fst(p) * z"


def chain_src(n: int) -> str:
    """Doubling chain: x1 = x0+x0 ... x_{n+1} = x_n+x_n; value 2^(n+1)*x0.

    The canonical sharing example: naive reverse AD is exponential in n
    here, the staged engines resolve each of the n+2 backpropagators
    (n+1 additions plus the input) exactly once.
    """
    parts = [r"\(x0: R)."]
    for i in range(1, n + 2):
        parts.append(f" let x{i}: R = x{i-1} + x{i-1} in")
    parts.append(f" x{n+1}")
    return "".join(parts)


def scalarmul_src() -> str:
    return r"\(p: (R, R)). fst(p) * snd(p)"


def dotprod_src() -> str:
    return r"""
\(p: ([R], [R])).
  letrec go (st: (R, ([R], [R]))): R =
    caselist fst(snd(st)) {
      [] -> fst(st);
      x :: xs ->
        caselist snd(snd(st)) {
          [] -> fst(st);
          y :: ys -> go (fst(st) + x * y, (xs, ys))
        }
    }
  in go (0.0, p)
"""


def summatvec_src() -> str:
    return r"""
\(p: ([[R]], [R])).
  letrec dot (st: (R, ([R], [R]))): R =
    caselist fst(snd(st)) {
      [] -> fst(st);
      x :: xs ->
        caselist snd(snd(st)) {
          [] -> fst(st);
          y :: ys -> dot (fst(st) + x * y, (xs, ys))
        }
    }
  in letrec rows (st: (R, [[R]])): R =
    caselist snd(st) {
      [] -> fst(st);
      r :: rs -> rows (fst(st) + dot (0.0, (r, snd(p))), rs)
    }
  in rows (0.0, fst(p))
"""


def rotvecquat_src() -> str:
    """Rotate a 3-vector by a quaternion; (Vec3, Quaternion) -> Vec3 with
    Vec3 = (R, (R, R)) and Quaternion = ((R, R), (R, R)) as ((w, x), (y, z)).
    v' = v + w*t + r x t where t = 2*(r x v)."""
    return r"""
\(p: ((R, (R, R)), ((R, R), (R, R)))).
  let v: (R, (R, R)) = fst(p) in
  let q: ((R, R), (R, R)) = snd(p) in
  let vx: R = fst(v) in
  let vy: R = fst(snd(v)) in
  let vz: R = snd(snd(v)) in
  let qw: R = fst(fst(q)) in
  let qx: R = snd(fst(q)) in
  let qy: R = fst(snd(q)) in
  let qz: R = snd(snd(q)) in
  let tx: R = 2.0 * (qy * vz - qz * vy) in
  let ty: R = 2.0 * (qz * vx - qx * vz) in
  let tz: R = 2.0 * (qx * vy - qy * vx) in
  (vx + qw * tx + (qy * tz - qz * ty),
   (vy + qw * ty + (qz * tx - qx * tz),
    vz + qw * tz + (qx * ty - qy * tx)))
"""


def particles_src(steps: int = 1000) -> str:
    """Four particles under an inverse-square attractor with linear drag,
    explicit Euler, simulated in parallel; output sum(x*y) over final
    positions."""
    return rf"""
\(ps: [((R, R), (R, R))]).
  letrec sim (st: (R, ((R, R), (R, R)))): (R, R) =
    case sign(fst(st) - 0.5) {{
      inl stop -> fst(snd(st));
      inr go ->
        let px: R = fst(fst(snd(st))) in
        let py: R = snd(fst(snd(st))) in
        let vx: R = fst(snd(snd(st))) in
        let vy: R = snd(snd(snd(st))) in
        let r2: R = px * px + py * py + 0.25 in
        let rinv3: R = 1.0 / (r2 * sqrt(r2)) in
        let ax: R = -(px * rinv3) - 0.4 * vx in
        let ay: R = -(py * rinv3) - 0.4 * vy in
        sim (fst(st) - 1.0,
             ((px + 0.01 * vx, py + 0.01 * vy),
              (vx + 0.01 * ax, vy + 0.01 * ay)))
    }}
  in
  caselist ps {{ [] -> 0.0; p1 :: r1 ->
  caselist r1 {{ [] -> 0.0; p2 :: r2 ->
  caselist r2 {{ [] -> 0.0; p3 :: r3 ->
  caselist r3 {{ [] -> 0.0; p4 :: r4 ->
    let q: (((R, R), (R, R)), ((R, R), (R, R))) =
      par( par(sim ({steps}.0, p1), sim ({steps}.0, p2)),
           par(sim ({steps}.0, p3), sim ({steps}.0, p4)) ) in
    let a: (R, R) = fst(fst(q)) in
    let b: (R, R) = snd(fst(q)) in
    let c: (R, R) = fst(snd(q)) in
    let d: (R, R) = snd(snd(q)) in
    fst(a) * snd(a) + fst(b) * snd(b) + fst(c) * snd(c) + fst(d) * snd(d)
  }} }} }} }}
"""


def partial_order_src() -> str:
    """The nested-par example whose job graph is the reference fork/join
    diagram: alpha forks into beta and gamma, beta forks into delta and
    epsilon joining into zeta, zeta and gamma join into eta."""
    return r"""
\(p: (R, R)).
  let a: R = fst(p) in
  let b: R = snd(p) in
  let zz: (R, R) =
    par( let x: R = a * b + sin(b) in
         let ys: (R, R) = par(x * a + a, cos(x)) in
         x + fst(ys) * snd(ys),
         exp(a) + b )
  in fst(zz) * snd(zz)
"""


# --------------------------------------------------------------------------
# Benchmark inputs

def dot_input(n: int, seed: int = 12345):
    rng = random.Random(seed)
    xs = list_value(rng.uniform(0.5, 1.5) for _ in range(n))
    ys = list_value(rng.uniform(0.5, 1.5) for _ in range(n))
    return (xs, ys)


def summatvec_input(n: int, seed: int = 12345):
    r = max(1, int(round(n ** 0.5)))
    rng = random.Random(seed)
    mat = list_value(
        list_value(rng.uniform(0.5, 1.5) for _ in range(r))
        for _ in range(r))
    vec = list_value(rng.uniform(0.5, 1.5) for _ in range(r))
    return (mat, vec)


def rotvecquat_input(seed: int = 12345):
    rng = random.Random(seed)

    def s():
        return rng.uniform(-1.0, 1.0)

    return ((s(), (s(), s())), ((s(), s()), (s(), s())))


def particles_input(seed: int = 12345):
    rng = random.Random(seed)
    parts = []
    for _ in range(4):
        pos = (rng.uniform(0.8, 1.6), rng.uniform(0.8, 1.6))
        vel = (rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3))
        parts.append((pos, vel))
    return list_value(parts)
