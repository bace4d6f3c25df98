"""Fork-join parallel reverse AD.

Forward pass: compound IDs.  Every scalar produced by a primitive gets a
(job ID, within-job sequence) pair; job IDs come from a shared atomic
counter, three per fork (left start, right start, continuation).  Each
job owns a tape of defunctionalized contributions written eagerly, and
the fork-join structure is recorded as a JobDescr/History tree exactly as
it unfolds.  Input scalars live outside the job tapes, in a flat
collector indexed by input position.

Reverse pass: the JobDescr tree is walked backwards -- resolve the final
job's cells from count-1 down to 0, then resolve the two forked subtasks
in parallel, then continue with the pre-fork history.  Forks in the
primal become joins in the derivative and vice versa.

All cross-task communication is message passing: a task accumulates
contributions that target cells outside its own job subtree into a local
dictionary which its parent merges after the join (left before right, so
gradients are schedule-independent, whichever scheduler runs the tasks).

Representation notes.  A job tape is columnar (per-cell contribution
counts plus flat scale/target columns) rather than a list of cell
objects, and targets are packed into single integers:

    staged cell (jid, seq)  ->  (jid << 32) | seq
    input slot i            ->  -(i + 1)

Columnar tapes pickle as raw array bytes (see ``_JobTape.__reduce__``),
which keeps the fork-boundary cost of the process scheduler far below
the interpretation work it parallelizes.
"""
from __future__ import annotations

import multiprocessing
from array import array

from .errors import OrderViolation
from .interp import Semantics, evaluate
from .stats import EngineResult, RunStats
from .typecheck import check_program
from .values import conform
from .wrap import (
    default_cotangent, interleave, output_pairs, rebuild_gradient,
    strip_primal,
)

_SHIFT = 32


def _enc_cell(jid: int, seq: int) -> int:
    return (jid << _SHIFT) | seq


def _enc_input(i: int) -> int:
    return -(i + 1)


class _PD:
    """Scalar annotated with its packed contribution target."""

    __slots__ = ("p", "tgt")

    def __init__(self, p, tgt):
        self.p = p
        self.tgt = tgt


def _unpack_tape(counts_b, scales_b, tgts_b):
    t = _JobTape()
    t.counts = array("q", counts_b)
    t.scales = array("d", scales_b)
    t.tgts = array("q", tgts_b)
    return t


class _JobTape:
    """Columnar eager tape of one job: cell i has counts[i] contributions,
    stored flat in scales/tgts; accs holds per-cell accumulated cotangents
    (allocated for the reverse pass)."""

    __slots__ = ("counts", "scales", "tgts", "accs")

    def __init__(self):
        self.counts = []
        self.scales = []
        self.tgts = []
        self.accs = None

    def __len__(self):
        return len(self.counts)

    def __reduce__(self):
        # Cross-process transfer: raw bytes, not per-cell objects.
        return (_unpack_tape, (array("q", self.counts).tobytes(),
                               array("d", self.scales).tobytes(),
                               array("q", self.tgts).tobytes()))


class JobDescr:
    """(history, job ID, number of sequence IDs generated in the job)."""

    __slots__ = ("hist", "jid", "count")

    def __init__(self, hist, jid, count):
        self.hist = hist
        self.jid = jid
        self.count = count

    def __repr__(self):
        return f"JobDescr(jid={self.jid}, count={self.count})"


class HFork:
    """History node: the job descr up to the fork, then the two subtasks."""

    __slots__ = ("before", "left", "right")

    def __init__(self, before, left, right):
        self.before = before
        self.left = left
        self.right = right


H_START = None


class JobCounter:
    """Shared atomic job-ID allocator (valid across forked processes)."""

    def __init__(self):
        self._v = multiprocessing.Value("q", 0)

    def take(self, n=1):
        with self._v.get_lock():
            j = self._v.value
            self._v.value = j + n
        return j


class ParSemantics(Semantics):
    __slots__ = ("stats", "counter", "hist", "jid", "seq", "cur", "arrays")

    def __init__(self, stats, counter, scheduler, jid):
        super().__init__(scheduler)
        self.stats = stats
        self.counter = counter
        self.hist = H_START
        self.jid = jid
        self.seq = 0
        self.cur = _JobTape()
        self.arrays = {jid: self.cur}

    def literal(self, r):
        seq = self.seq
        self.seq = seq + 1
        self.stats.backprops_created += 1
        self.cur.counts.append(0)
        return _PD(r, _enc_cell(self.jid, seq))

    def prim(self, op, args):
        self.stats.primal_ops += 1
        self.stats.backprops_created += 1
        ps = [a.p for a in args]
        parts = op.partials(*ps)
        cur = self.cur
        cur.counts.append(len(args))
        for d, a in zip(parts, args):
            cur.scales.append(d)
            cur.tgts.append(a.tgt)
        seq = self.seq
        self.seq = seq + 1
        return _PD(op.fn(*ps), _enc_cell(self.jid, seq))

    def primal(self, s):
        return s.p

    def par_pair(self, ev, left, right, env):
        j = self.counter.take(3)
        j1, j2, j3 = j, j + 1, j + 2
        pre = JobDescr(self.hist, self.jid, self.seq)

        def branch(jid, expr):
            def run():
                sub = ParSemantics(RunStats(engine=self.stats.engine),
                                   self.counter, self.scheduler, jid)
                v = ev(sub, expr, env)
                return (JobDescr(sub.hist, sub.jid, sub.seq), v,
                        sub.arrays, sub.stats)
            return run

        (ljd, lv, larr, lst), (rjd, rv, rarr, rst) = \
            self.scheduler.fork_join(branch(j1, left), branch(j2, right))
        self.arrays.update(larr)
        self.arrays.update(rarr)
        self.stats.merge(lst)
        self.stats.merge(rst)
        self.hist = HFork(pre, ljd, rjd)
        self.jid = j3
        self.seq = 0
        self.cur = _JobTape()
        self.arrays[j3] = self.cur
        return (lv, rv)


# --------------------------------------------------------------------------
# Job graph: edges of the <=_j order, reachability, canonical labelling.

def _task_start(jd: JobDescr) -> int:
    while jd.hist is not None:
        jd = jd.hist.before
    return jd.jid


def _jobs(jd: JobDescr) -> frozenset[int]:
    out = set()
    stack = [jd]
    while stack:
        d = stack.pop()
        out.add(d.jid)
        if d.hist is not None:
            stack.extend((d.hist.before, d.hist.left, d.hist.right))
    return frozenset(out)


class JobGraph:
    """Fork/join edges plus derived order data for one run."""

    def __init__(self, final: JobDescr):
        self.final = final
        self.edges: set[tuple[int, int]] = set()
        self.counts: dict[int, int] = {}
        order: list[int] = []

        def visit(jd: JobDescr):
            if jd.hist is not None:
                h = jd.hist
                visit(h.before)
                visit(h.left)
                visit(h.right)
                forker = h.before.jid
                self.edges.add((forker, _task_start(h.left)))
                self.edges.add((forker, _task_start(h.right)))
                self.edges.add((h.left.jid, jd.jid))
                self.edges.add((h.right.jid, jd.jid))
            self.counts[jd.jid] = jd.count
            order.append(jd.jid)

        visit(final)
        self.canon_order = order  # DFS order: before, left, right, self
        self._anc = self._closure(reverse=True)
        self._desc = self._closure(reverse=False)

    def _closure(self, reverse: bool) -> dict[int, frozenset[int]]:
        adj: dict[int, list[int]] = {j: [] for j in self.counts}
        for a, b in self.edges:
            if reverse:
                adj[b].append(a)
            else:
                adj[a].append(b)
        out = {}
        for j in self.counts:
            seen = set()
            stack = [j]
            while stack:
                v = stack.pop()
                for w in adj[v]:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            out[j] = frozenset(seen)
        return out

    def job_leq(self, a: int, b: int) -> bool:
        if a not in self.counts or b not in self.counts:
            raise KeyError(f"unknown job ID {a if a not in self.counts else b}")
        return a == b or a in self._anc[b]

    def ancestors(self, j: int) -> frozenset[int]:
        return self._anc[j]

    def descendants(self, j: int) -> frozenset[int]:
        return self._desc[j]

    def canonical(self) -> dict:
        """Structure-determined summary; raw job IDs are renamed by the
        DFS order over the JobDescr tree, so repeated runs of one program
        canonicalize identically."""
        label = {j: i for i, j in enumerate(self.canon_order)}
        return {
            "jobs": len(self.counts),
            "counts": {label[j]: c for j, c in self.counts.items()},
            "edges": sorted((label[a], label[b]) for a, b in self.edges),
        }


def id_leq(a: tuple[int, int], b: tuple[int, int], graph: JobGraph) -> bool:
    """Partial order on compound IDs: within one job the sequence order,
    across distinct jobs the strict fork/join reachability order
    (incomparable across parallel siblings).  This is the order of the
    compound-ID dependency graph of Fig-style examples: a scalar in job
    alpha can only feed scalars of jobs reachable from alpha, wherever
    their sequence counters restart."""
    ja, ia = a
    jb, ib = b
    if ja not in graph.counts or jb not in graph.counts:
        raise KeyError(f"unknown job ID {ja if ja not in graph.counts else jb}")
    if ja == jb:
        return ia <= ib
    return ja in graph.ancestors(jb)


# --------------------------------------------------------------------------
# Parallel resolve

class _ResolveCtx:
    __slots__ = ("arrays", "graph", "scheduler", "done")

    def __init__(self, arrays, graph, scheduler, done):
        self.arrays = arrays
        self.graph = graph
        self.scheduler = scheduler
        self.done = done


def _resolve_task(jd: JobDescr, ctx: _ResolveCtx, seed_col=None):
    """Resolve one task; returns (outside contributions, collector adds,
    local stats).

    Contributions to cells outside this task's job subtree are collected
    and returned rather than applied -- the caller owns those regions and
    merges after the join (left before right), which keeps the arithmetic
    identical under every scheduler.
    """
    local = _jobs(jd)
    out: dict[int, float] = {}
    col: dict[int, float] = dict(seed_col) if seed_col else {}
    stats = RunStats()
    arrays = ctx.arrays
    graph = ctx.graph

    def resolve_job(jd0: JobDescr):
        jid = jd0.jid
        above = graph.descendants(jid)
        if not above <= ctx.done:
            raise OrderViolation(
                f"job {jid} resolved before its successors {above - ctx.done}")
        tape = arrays[jid]
        counts, scales, tgts, accs = (tape.counts, tape.scales, tape.tgts,
                                      tape.accs)
        anc = graph.ancestors(jid)
        off = len(scales)
        edges = 0
        for i in range(jd0.count - 1, -1, -1):
            d = accs[i]
            c = counts[i]
            off -= c
            for e in range(off, off + c):
                tgt = tgts[e]
                edges += 1
                if tgt >= 0:
                    j2 = tgt >> _SHIFT
                    s2 = tgt & 0xFFFFFFFF
                    if not ((j2 == jid and s2 < i)
                            or (j2 != jid and j2 in anc)):
                        raise OrderViolation(
                            f"cell ({jid},{i}) contributes to ({j2},{s2}) "
                            "which is not strictly below it")
                    v = scales[e] * d
                    if j2 in local:
                        arrays[j2].accs[s2] += v
                    else:
                        out[tgt] = out.get(tgt, 0.0) + v
                else:
                    i2 = -tgt - 1
                    col[i2] = col.get(i2, 0.0) + scales[e] * d
        stats.slots_resolved += jd0.count
        stats.edges_traversed += edges
        ctx.done.add(jid)

    resolve_job(jd)
    hist = jd.hist
    if hist is not None:
        lres, rres = ctx.scheduler.fork_join(
            lambda: _resolve_task(hist.left, ctx),
            lambda: _resolve_task(hist.right, ctx))
        for sub, subjd in ((lres, hist.left), (rres, hist.right)):
            sub_out, sub_col, sub_stats = sub
            ctx.done.update(_jobs(subjd))
            stats.merge(sub_stats)
            for i, v in sub_col.items():
                col[i] = col.get(i, 0.0) + v
            for tgt, v in sub_out.items():
                j2 = tgt >> _SHIFT
                if j2 in local:
                    arrays[j2].accs[tgt & 0xFFFFFFFF] += v
                else:
                    out[tgt] = out.get(tgt, 0.0) + v
        b_out, b_col, b_stats = _resolve_task(hist.before, ctx)
        stats.merge(b_stats)
        for i, v in b_col.items():
            col[i] = col.get(i, 0.0) + v
        for tgt, v in b_out.items():
            out[tgt] = out.get(tgt, 0.0) + v
    return out, col, stats


def resolve_parallel(final_jd: JobDescr, arrays, graph, scheduler,
                     root_col=None):
    """Run the reverse pass over the recorded job graph; returns the
    collector adds (input slot -> cotangent) and resolve stats."""
    ctx = _ResolveCtx(arrays, graph, scheduler, set())
    out, col, stats = _resolve_task(final_jd, ctx, seed_col=root_col)
    if out:
        raise AssertionError(f"unrouted contributions after resolve: {out}")
    return col, stats


def grad_parallel(prog, x, ct=None, scheduler=None) -> EngineResult:
    sigma, tau = check_program(prog)
    x = conform(x, sigma)
    stats = RunStats(engine="parallel")
    counter = JobCounter()
    sem = ParSemantics(stats, counter, scheduler, counter.take())

    dual_in, k = interleave(sigma, x,
                            lambda i, v: _PD(v, _enc_input(i)))
    stats.input_scalars = k
    out_val = evaluate(sem, prog.body, {prog.name: dual_in})
    final_jd = JobDescr(sem.hist, sem.jid, sem.seq)
    graph = JobGraph(final_jd)

    primal = strip_primal(tau, out_val, lambda d: d.p)
    ct_val = conform(ct, tau) if ct is not None else default_cotangent(tau, primal)
    pairs = output_pairs(tau, out_val, ct_val, lambda d: d.p)

    for tape in sem.arrays.values():
        tape.accs = [0.0] * len(tape.counts)

    # Root contributions precede every resolution: staged targets go
    # straight into their cells; input targets seed the collector fold so
    # the per-slot addition order matches the sequential tape exactly.
    root_col: dict[int, float] = {}
    for dual, z in pairs:
        tgt = dual.tgt
        if tgt >= 0:
            sem.arrays[tgt >> _SHIFT].accs[tgt & 0xFFFFFFFF] += z
        else:
            i = -tgt - 1
            root_col[i] = root_col.get(i, 0.0) + z

    col, rstats = resolve_parallel(final_jd, sem.arrays, graph,
                                   sem.scheduler, root_col)
    stats.merge(rstats)
    collector = [0.0] * k
    for i, v in col.items():
        collector[i] += v

    gradient = rebuild_gradient(sigma, x, lambda i: collector[i])
    return EngineResult(primal, gradient, stats, graph=graph.canonical())
