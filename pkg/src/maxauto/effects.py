"""Max-plus summaries of counter-op sequences.

A LoopEffect records, per counter, how its value after running an op
sequence depends on the values before: a sparse max-plus affine form
max(entry(d) + weight[d], const).  Output instructions become events
carrying the same kind of expression.  Effects compose associatively
(sparse max-plus matrix product), and iterating one effect forever admits
an exact boundedness classification: a counter grows without bound exactly
when it is reachable from a strictly positive cycle of the flow graph.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Dict, Hashable, Iterable, List, Optional, Tuple

from .automata import CounterOp, GuardedOutput, Inc, MaxInto, Output, Reset
from .errors import InputError

Counter = Hashable
Row = Dict[Counter, int]  # sparse: absent source means "no flow"


@dataclass(eq=True)
class OutputEvent:
    counter: Counter
    flows: Row
    const: Optional[int]

    def value(self, valuation: Dict[Counter, int]) -> int:
        best = self.const if self.const is not None else None
        for d, w in self.flows.items():
            v = valuation[d] + w
            if best is None or v > best:
                best = v
        if best is None:
            raise InputError(f"output event on {self.counter!r} has no defined value")
        return best


@dataclass(eq=True)
class LoopEffect:
    counters: Tuple[Counter, ...]
    flows: Dict[Counter, Row]          # target -> {source: weight}
    consts: Dict[Counter, int]         # target -> injected constant (absent = none)
    events: Tuple[OutputEvent, ...]

    def apply(self, valuation: Dict[Counter, int]):
        """Return (valuation after the summarized ops, list of output (c, value)).

        Agrees with replaying the original op sequence, values included.
        """
        outs = [(ev.counter, ev.value(valuation)) for ev in self.events]
        new: Dict[Counter, int] = {}
        for c in self.counters:
            best: Optional[int] = self.consts.get(c)
            for d, w in self.flows[c].items():
                v = valuation[d] + w
                if best is None or v > best:
                    best = v
            if best is None:
                raise InputError(f"counter {c!r} has no defined post-value")
            new[c] = best
        return new, outs


def identity_effect(counters: Iterable[Counter]) -> LoopEffect:
    cs = tuple(counters)
    return LoopEffect(cs, {c: {c: 0} for c in cs}, {}, ())


def effect_of(ops: Iterable[CounterOp], counters: Iterable[Counter]) -> LoopEffect:
    """Abstract a concrete op sequence (no guarded ops) into a LoopEffect."""
    cs = tuple(counters)
    flows: Dict[Counter, Row] = {c: {c: 0} for c in cs}
    consts: Dict[Counter, int] = {}
    events: List[OutputEvent] = []
    for op in ops:
        if isinstance(op, Inc):
            c = op.counter
            flows[c] = {d: w + 1 for d, w in flows[c].items()}
            if c in consts:
                consts[c] += 1
        elif isinstance(op, Reset):
            flows[op.counter] = {}
            consts[op.counter] = 0
        elif isinstance(op, Output):
            c = op.counter
            events.append(OutputEvent(c, dict(flows[c]), consts.get(c)))
        elif isinstance(op, MaxInto):
            c, d = op.counter, op.source
            row = dict(flows[c])
            for src, w in flows[d].items():
                if row.get(src, -1) < w:
                    row[src] = w
            flows[c] = row
            kc, kd = consts.get(c), consts.get(d)
            if kd is not None and (kc is None or kd > kc):
                consts[c] = kd
        elif isinstance(op, GuardedOutput):
            raise InputError("guarded outputs have no unguarded effect summary")
        else:
            raise InputError(f"unknown op {op!r}")
    return LoopEffect(cs, flows, consts, tuple(events))


def _compose_row(row2: Row, const2: Optional[int], e1: LoopEffect):
    """Substitute e1's post-expressions into one expression of e2."""
    row: Row = {}
    const = const2
    for mid, w2 in row2.items():
        for src, w1 in e1.flows[mid].items():
            w = w1 + w2
            if row.get(src, -1) < w:
                row[src] = w
        k1 = e1.consts.get(mid)
        if k1 is not None:
            k = k1 + w2
            if const is None or k > const:
                const = k
    return row, const


def compose(e1: LoopEffect, e2: LoopEffect) -> LoopEffect:
    """Sequential composition: apply(compose(e1,e2), v) == apply(e2, apply(e1, v))."""
    if set(e1.counters) != set(e2.counters):
        raise InputError("effects over different counter sets do not compose")
    flows: Dict[Counter, Row] = {}
    consts: Dict[Counter, int] = {}
    for c in e1.counters:
        row, const = _compose_row(e2.flows[c], e2.consts.get(c), e1)
        flows[c] = row
        if const is not None:
            consts[c] = const
    events = list(e1.events)
    for ev in e2.events:
        row, const = _compose_row(ev.flows, ev.const, e1)
        events.append(OutputEvent(ev.counter, row, const))
    return LoopEffect(e1.counters, flows, consts, tuple(events))


def compose_all(effects: Iterable[LoopEffect], counters: Iterable[Counter]) -> LoopEffect:
    out = identity_effect(counters)
    for e in effects:
        out = compose(out, e)
    return out


class GrowthClass(enum.Enum):
    BOUNDED = "bounded"
    UNBOUNDED = "unbounded"


def _sccs(nodes, succ):
    """Tarjan's strongly connected components, iterative."""
    index: Dict = {}
    low: Dict = {}
    on_stack: set = set()
    stack: List = []
    comp: Dict = {}
    counter = [0]
    ncomp = [0]
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(succ(root)))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for nxt in it:
                if nxt not in index:
                    index[nxt] = low[nxt] = counter[0]
                    counter[0] += 1
                    stack.append(nxt)
                    on_stack.add(nxt)
                    work.append((nxt, iter(succ(nxt))))
                    advanced = True
                    break
                if nxt in on_stack and low[node] > index[nxt]:
                    low[node] = index[nxt]
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                if low[parent] > low[node]:
                    low[parent] = low[node]
            if low[node] == index[node]:
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    comp[member] = ncomp[0]
                    if member == node:
                        break
                ncomp[0] += 1
    return comp


def iterate_classify(e: LoopEffect) -> Dict[Counter, GrowthClass]:
    """Boundedness of each counter's value under infinite iteration of `e`.

    Unbounded exactly when the counter is reachable in the flow graph from a
    cycle of strictly positive total weight; with natural weights such a
    cycle exists iff some strongly connected component contains an internal
    edge of weight >= 1.
    """
    edges: List[Tuple[Counter, Counter, int]] = []
    succ: Dict[Counter, List[Counter]] = {c: [] for c in e.counters}
    for tgt, row in e.flows.items():
        for src, w in row.items():
            edges.append((src, tgt, w))
            succ[src].append(tgt)
    comp = _sccs(e.counters, lambda n: succ[n])
    seeded = {src for (src, tgt, w) in edges if w >= 1 and comp[src] == comp[tgt]}
    reach = set(seeded)
    frontier = list(seeded)
    while frontier:
        n = frontier.pop()
        for nxt in succ[n]:
            if nxt not in reach:
                reach.add(nxt)
                frontier.append(nxt)
    return {c: (GrowthClass.UNBOUNDED if c in reach else GrowthClass.BOUNDED)
            for c in e.counters}
