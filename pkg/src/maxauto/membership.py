"""Acceptance decisions on finitely presented infinite words.

Lassos u.v^w admit an exact decision: once the state at period boundaries
repeats, one state-cycle's worth of ops is summarized as a LoopEffect and
每 counter's tail output stream is bounded iff no output event of the cycle
is fed by a counter that grows under iteration of that effect.

Ramps u.v^1 w v^2 w ... are certified soundly (accept/reject/unknown):
block-boundary states are provably eventually periodic (the v-step
functional graph has computable preperiod and cycle lengths), and within
the periodic regime two kinds of certificates are checked:

* growth: a counter with a strictly positive self-flow around the v-cycle
  pumps from below by the number of cycle turns in a block, which tends to
  infinity; any output event it feeds (directly, or across segments through
  lower-bound flows, or via a positive cycle of the one-window lower-bound
  effect) receives unbounded values;
* repetition: counters outside the forward flow-closure of (certified
  growing + observed unstable) counters evolve autonomously; if their
  values repeat across one window boundary and are fixpoints of every
  variable loop, all later windows replicate their values and output value
  sets exactly, so those streams are bounded.

Both directions are proof-backed lower/upper bounds, never extrapolation
from observed values, so a decided verdict can never contradict brute
force; everything else is reported unknown.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Hashable, List, Optional, Set, Tuple

from . import acceptance as acc
from .automata import (Inc, Letter, MaxAutomaton, MaxInto, Output, Reset,
                       Transition, require_valid)
from .effects import (GrowthClass, LoopEffect, OutputEvent, compose, effect_of,
                      identity_effect, iterate_classify)
from .errors import InputError
from .words import FiniteWord, LassoWord, RampWord

ACCEPT = "accept"
REJECT = "reject"
UNKNOWN = "unknown"


@dataclass
class MembershipResult:
    verdict: str
    bounded: Dict  # counter -> True / False / None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.verdict == ACCEPT


def _check_width(a: MaxAutomaton, tracks: int) -> None:
    if tracks != a.tracks:
        raise InputError(f"word has {tracks} annotation tracks, automaton wants {a.tracks}")


def _state_after(a: MaxAutomaton, state, word: FiniteWord):
    for l in word:
        state = a.delta[(state, l)].target
    return state


def _ops_along(a: MaxAutomaton, state, word: FiniteWord):
    ops: List = []
    for l in word:
        tr = a.delta[(state, l)]
        ops.extend(tr.ops)
        state = tr.target
    return tuple(ops), state


def lasso_membership(a: MaxAutomaton, w: LassoWord, validate_input: bool = True) -> MembershipResult:
    """Exact acceptance of the ultimately periodic word u.v^w."""
    if validate_input:
        require_valid(a)
    _check_width(a, w.tracks)

    s = _state_after(a, a.initial, w.u)
    seen = {s: 0}
    boundary = [s]
    while True:
        s = _state_after(a, boundary[-1], w.v)
        if s in seen:
            start = seen[s]
            break
        seen[s] = len(boundary)
        boundary.append(s)
    period = len(boundary) - start
    cycle_ops, back = _ops_along(a, boundary[start], w.v * period)
    assert back == boundary[start]

    eff = effect_of(cycle_ops, a.counters)
    growth = iterate_classify(eff)
    bounded: Dict = {}
    for c in a.counters:
        events = [ev for ev in eff.events if ev.counter == c]
        unbounded = any(growth[d] is GrowthClass.UNBOUNDED
                        for ev in events for d in ev.flows)
        bounded[c] = not unbounded
    verdict = ACCEPT if acc.eval_acceptance(a.acceptance, bounded) else REJECT
    return MembershipResult(verdict, bounded)


# --- ramp certification ---------------------------------------------------


@dataclass
class _Orbit:
    """One state's trajectory under repeated application of the v step map."""

    path: List         # path[m] = state after v^m, up to preperiod+cycle
    preperiod: int
    cycle: int

    def power(self, m: int):
        if m < len(self.path):
            return self.path[m]
        return self.path[self.preperiod + (m - self.preperiod) % self.cycle]


def _v_orbits(a: MaxAutomaton, v: FiniteWord) -> Dict:
    orbits = {}
    for s in a.states:
        path = [s]
        index = {s: 0}
        cur = s
        while True:
            cur = _state_after(a, cur, v)
            if cur in index:
                pre = index[cur]
                orbits[s] = _Orbit(path, pre, len(path) - pre)
                break
            index[cur] = len(path)
            path.append(cur)
    return orbits


@dataclass
class _Segment:
    """A piece of one block: fixed ops, or a loop body run `count` times."""

    kind: str                 # "fix" | "loop"
    ops: Tuple
    count: int = 1
    phase: int = 0            # 1-based phase of the owning block in the window


def _diag_lower_bound(e: LoopEffect) -> LoopEffect:
    """Sound lower bound for e iterated any m >= 1 times.

    Keeps only self-flows (w_m[c][c] >= w_1[c][c] for natural weights) and
    injected constants (the last iteration's constant always survives).
    """
    flows = {}
    for c in e.counters:
        w = e.flows[c].get(c)
        flows[c] = {c: w} if w is not None else {}
    return LoopEffect(e.counters, flows, dict(e.consts), ())


def _support_union(effects: List[LoopEffect], counters) -> Dict:
    """Reflexive-transitive closure of the union of all flow supports."""
    succ: Dict = {c: {c} for c in counters}
    for e in effects:
        for tgt, row in e.flows.items():
            for src in row:
                succ[src].add(tgt)
    # closure by iteration (counter sets are modest)
    changed = True
    while changed:
        changed = False
        for c in counters:
            new = set()
            for mid in succ[c]:
                new |= succ[mid]
            if not new <= succ[c]:
                succ[c] |= new
                changed = True
    return succ


def _run_ops(ops, valuation: Dict, sink: List) -> None:
    for op in ops:
        if isinstance(op, Inc):
            valuation[op.counter] += 1
        elif isinstance(op, Reset):
            valuation[op.counter] = 0
        elif isinstance(op, Output):
            sink.append((op.counter, valuation[op.counter]))
        elif isinstance(op, MaxInto):
            v = valuation[op.source]
            if v > valuation[op.counter]:
                valuation[op.counter] = v
        else:
            raise InputError(f"op {op!r} not executable here")


def ramp_certify(a: MaxAutomaton, w: RampWord, horizon: int = 64, window: int = 8,
                 validate_input: bool = True) -> MembershipResult:
    """Sound three-valued acceptance of a ramp word.

    `horizon` caps how many blocks may be examined; `window` caps how many
    multiples of the guaranteed map period are tried when searching for the
    boundary-state repeat.  Exhausting either budget yields unknown.
    """
    if validate_input:
        require_valid(a)
    _check_width(a, w.tracks)

    orbits = _v_orbits(a, w.v)
    alpha = max(o.preperiod for o in orbits.values())
    p = math.lcm(*(o.cycle for o in orbits.values()))
    f = w.first_block

    def nvs(block_index: int) -> int:
        return f + block_index - 1  # number of v's in that block

    # boundary states t[i] = state after u and blocks 1..i
    t = [_state_after(a, a.initial, w.u)]
    for i in range(1, horizon + 1):
        s = orbits[t[i - 1]].power(nvs(i))
        t.append(_state_after(a, s, w.w))

    # provably periodic regime: block maps repeat with period p once every
    # block has at least alpha + 2p v's (two full cycle turns guaranteed)
    i_start = max(1, alpha + 2 * p - f + 1)
    found = None
    for i0 in range(i_start, horizon + 1):
        for r in range(1, window + 1):
            j = i0 + r * p
            if j > horizon:
                break
            if t[j] == t[i0]:
                found = (i0, r * p)
                break
        if found:
            break
    if not found or found[0] + 2 * found[1] > horizon:
        return MembershipResult(UNKNOWN, {c: None for c in a.counters},
                                "block horizon exhausted before a periodic window")
    i0, period = found

    # segment plans per phase (identical op structure for every later window)
    plans: List[List[_Segment]] = []
    for phase in range(1, period + 1):
        j = i0 + phase
        s = t[j - 1]
        orb = orbits[s]
        m = nvs(j)
        pre_ops, at_loop = _ops_along(a, s, w.v * orb.preperiod)
        loop_ops, back = _ops_along(a, at_loop, w.v * orb.cycle)
        assert back == at_loop
        m_full, rem = divmod(m - orb.preperiod, orb.cycle)
        assert m_full >= 2
        rem_ops, after_v = _ops_along(a, at_loop, w.v * rem)
        w_ops, end = _ops_along(a, after_v, w.w)
        assert end == t[j]
        segs = [_Segment("fix", pre_ops, phase=phase),
                _Segment("loop", loop_ops, count=m_full, phase=phase),
                _Segment("fix", rem_ops + w_ops, phase=phase)]
        plans.append(segs)

    # concrete simulation: prefix u + blocks 1..i0 letter by letter, then two
    # windows segment-wise, recording loop entries and per-window outputs
    valuation = {c: 0 for c in a.counters}
    sink: List = []
    state = a.initial
    for l in w.u:
        tr = a.delta[(state, l)]
        _run_ops(tr.ops, valuation, sink)
        state = tr.target
    for i in range(1, i0 + 1):
        block_ops, state = _ops_along(a, state, w.v * nvs(i) + w.w)
        _run_ops(block_ops, valuation, sink)
    assert state == t[i0]

    boundary_vals = [dict(valuation)]
    loop_checks: List[Tuple[int, Dict, Dict, Dict]] = []  # phase, entry, nu1, nu2
    window_outputs: List[List] = []
    loop_effects = {}
    for k in range(2):  # two consecutive windows
        outs: List = []
        for phase, segs in enumerate(plans, start=1):
            delta_count = period // orbits[t[i0 + phase - 1]].cycle
            pre, loop, post = segs
            _run_ops(pre.ops, valuation, outs)
            if loop.ops not in loop_effects:
                loop_effects[loop.ops] = effect_of(loop.ops, a.counters)
            entry = dict(valuation)
            _run_ops(loop.ops, valuation, outs)
            nu1 = dict(valuation)
            nu2, _ = loop_effects[loop.ops].apply(nu1)
            if k == 0:
                loop_checks.append((phase, entry, nu1, nu2))
            for _ in range(loop.count + k * delta_count - 1):
                _run_ops(loop.ops, valuation, outs)
            _run_ops(post.ops, valuation, outs)
        boundary_vals.append(dict(valuation))
        window_outputs.append(outs)

    counters = a.counters
    fix_effects = {}

    def seg_effect(seg: _Segment) -> LoopEffect:
        if seg.kind == "loop":
            return loop_effects[seg.ops]
        if seg.ops not in fix_effects:
            fix_effects[seg.ops] = effect_of(seg.ops, counters)
        return fix_effects[seg.ops]

    window_segments = [seg for segs in plans for seg in segs]

    # --- growth certificates -> G ------------------------------------------
    growing: Set = set()

    def scan_events(e_events, lb: Optional[LoopEffect], sources: Set) -> None:
        for ev in e_events:
            if lb is None:
                keys = set(ev.flows)
            else:
                row, _ = _lb_compose_row(ev.flows, lb)
                keys = set(row)
            if keys & sources:
                growing.add(ev.counter)

    def _lb_compose_row(row2, lb: LoopEffect):
        row = {}
        for mid, w2 in row2.items():
            for src, w1 in lb.flows[mid].items():
                val = w1 + w2
                if row.get(src, -1) < val:
                    row[src] = val
        return row, None

    for idx, seg in enumerate(window_segments):
        if seg.kind != "loop":
            continue
        e_loop = seg_effect(seg)
        pumped = {c for c in counters if e_loop.flows[c].get(c, 0) >= 1}
        if not pumped:
            continue
        scan_events(e_loop.events, None, pumped)
        # follow flows from the loop exit through the rest of this window and
        # one more full window
        lb = identity_effect(counters)
        tail = window_segments[idx + 1:] + window_segments
        for nxt in tail:
            e = seg_effect(nxt)
            if nxt.kind == "loop":
                scan_events(e.events, lb, pumped)
                lb = compose(lb, _diag_lower_bound(e))
            else:
                scan_events(e.events, lb, pumped)
                lb = compose(lb, LoopEffect(e.counters, e.flows, e.consts, ()))

    # one-window lower-bound effect: positive cycles mean values that grow
    # across window boundaries
    wlb = identity_effect(counters)
    for seg in window_segments:
        e = seg_effect(seg)
        part = _diag_lower_bound(e) if seg.kind == "loop" else \
            LoopEffect(e.counters, e.flows, e.consts, ())
        wlb = compose(wlb, part)
    cross = {c for c, g in iterate_classify(wlb).items() if g is GrowthClass.UNBOUNDED}
    if cross:
        lb = identity_effect(counters)
        for seg in window_segments:
            e = seg_effect(seg)
            scan_events(e.events, lb, cross)
            part = _diag_lower_bound(e) if seg.kind == "loop" else \
                LoopEffect(e.counters, e.flows, e.consts, ())
            lb = compose(lb, part)

    # --- repetition certificates -> bounded ---------------------------------
    unstable = {c for _, _, nu1, nu2 in loop_checks for c in counters if nu1[c] != nu2[c]}
    unstable |= {c for c in counters if boundary_vals[0][c] != boundary_vals[1][c]}
    closure = _support_union([seg_effect(s) for s in window_segments], counters)
    tainted: Set = set()
    for src in growing | unstable:
        tainted |= closure[src]
    clean = set(counters) - tainted

    output_counters = {op.counter
                       for seg in window_segments for op in seg.ops
                       if isinstance(op, Output)}
    bounded: Dict = {}
    for c in counters:
        if c in growing:
            bounded[c] = False
        elif c not in output_counters:
            bounded[c] = True  # no tail outputs at all
        elif all(set(ev.flows) <= clean
                 for seg in window_segments for ev in seg_effect(seg).events
                 if ev.counter == c):
            bounded[c] = True
        else:
            bounded[c] = None

    # defensive cross-check: a counter certified bounded must show identical
    # output value sets in the two simulated windows
    w1 = {c: set() for c in counters}
    w2 = {c: set() for c in counters}
    for c, v in window_outputs[0]:
        w1[c].add(v)
    for c, v in window_outputs[1]:
        w2[c].add(v)
    for c in counters:
        if bounded[c] is True and w1[c] != w2[c]:
            bounded[c] = None
        if bounded[c] is False and c in bounded and not (w1[c] or w2[c]) and c not in output_counters:
            bounded[c] = None  # growth claim without any output site: demote

    value = acc.eval_partial(a.acceptance, bounded)
    if value is None:
        return MembershipResult(UNKNOWN, bounded, "no certificate for some acceptance atom")
    return MembershipResult(ACCEPT if value else REJECT, bounded)


def decide(a: MaxAutomaton, word, horizon: int = 64, window: int = 8,
           validate_input: bool = True) -> MembershipResult:
    """Dispatch on the word family: exact for lassos, certified for ramps."""
    if isinstance(word, LassoWord):
        return lasso_membership(a, word, validate_input=validate_input)
    if isinstance(word, RampWord):
        return ramp_certify(a, word, horizon=horizon, window=window,
                            validate_input=validate_input)
    raise InputError(f"not a lasso or ramp word: {word!r}")
