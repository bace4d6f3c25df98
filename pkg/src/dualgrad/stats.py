"""Instrumentation counters shared by the engines.

Counters are free-running during a gradient call and frozen into the
returned ``EngineResult``.  ``invocations`` maps backpropagator ID to how
many times it was invoked (resolved); the at-most-once property of the
staged engines is the assertion that every value here is <= 1.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field


@dataclass
class RunStats:
    engine: str = ""
    primal_ops: int = 0
    backprops_created: int = 0
    input_scalars: int = 0
    map_ops: int = 0
    collector_map_ops: int = 0
    tape_len: int = 0
    edges_traversed: int = 0
    slots_resolved: int = 0
    invocations: Counter = field(default_factory=Counter)
    key_events: Counter = field(default_factory=Counter)

    @property
    def backprops_invoked(self) -> int:
        return sum(self.invocations.values())

    @property
    def max_invocations_per_backprop(self) -> int:
        return max(self.invocations.values(), default=0)

    def merge(self, other: "RunStats") -> None:
        """Fold a branch's counters into this one (parallel engine)."""
        self.primal_ops += other.primal_ops
        self.backprops_created += other.backprops_created
        self.map_ops += other.map_ops
        self.collector_map_ops += other.collector_map_ops
        self.edges_traversed += other.edges_traversed
        self.slots_resolved += other.slots_resolved
        self.invocations.update(other.invocations)
        self.key_events.update(other.key_events)

    def invocation_histogram(self) -> dict[int, int]:
        """How many backpropagators were invoked 0, 1, 2, ... times."""
        hist = Counter(self.invocations.values())
        never = self.backprops_created - len(self.invocations)
        if never > 0:
            hist[0] += never
        return dict(sorted(hist.items()))

    def as_json(self) -> dict:
        out = {
            "engine": self.engine,
            "primal_ops": self.primal_ops,
            "backprops_created": self.backprops_created,
            "backprops_invoked": self.backprops_invoked,
            "max_invocations_per_backprop": self.max_invocations_per_backprop,
            "map_ops": self.map_ops,
        }
        if self.tape_len:
            out["tape_len"] = self.tape_len
            out["edges_traversed"] = self.edges_traversed
            out["slots_resolved"] = self.slots_resolved
        return out


@dataclass
class EngineResult:
    value: object
    gradient: object
    stats: RunStats
    graph: object = None  # parallel engine: canonical job-graph summary
    tape: object = None   # tape engine: the resolved tape (tests only)
