"""Deterministic Muller automata and their embedding into max-automata.

The import direction only: a Muller machine (family of state sets; accept
iff the set of states visited infinitely often belongs to the family) is
simulated by giving every state q a counter that is incremented and output
on entry.  q recurs infinitely often exactly when that counter's outputs
are unbounded, so the Muller family becomes a boolean combination of
boundedness atoms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, FrozenSet, Hashable, List, Tuple

from . import acceptance as acc
from .automata import Inc, Letter, MaxAutomaton, Output, State, Transition
from .errors import InputError, ValidationError


@dataclass
class MullerAutomaton:
    alphabet: Tuple[Hashable, ...]
    tracks: int
    states: Tuple[State, ...]
    initial: State
    delta: Dict[Tuple[State, Letter], State]
    family: FrozenSet[FrozenSet[State]]

    def letters(self):
        for base in self.alphabet:
            for bits in itertools.product((0, 1), repeat=self.tracks):
                yield Letter(base, bits)


def validate_muller(m: MullerAutomaton) -> List[str]:
    report = []
    states = set(m.states)
    if m.initial not in states:
        report.append(f"initial state {m.initial!r} not declared")
    for s in m.states:
        for l in m.letters():
            if (s, l) not in m.delta:
                report.append(f"delta undefined at ({s!r}, {l!r})")
    for key, t in m.delta.items():
        if t not in states:
            report.append(f"transition {key!r} targets undeclared state {t!r}")
    for fset in m.family:
        for q in fset:
            if q not in states:
                report.append(f"acceptance family mentions undeclared state {q!r}")
    return report


def from_muller(m: MullerAutomaton) -> MaxAutomaton:
    """Convert a deterministic complete Muller automaton to a max-automaton.

    One counter per state, incremented and output on every entry, never
    reset; acceptance encodes each family member F as
    (AND_{q in F} !B(c_q)) & (AND_{q not in F} B(c_q)), joined by OR.
    """
    report = validate_muller(m)
    if report:
        raise ValidationError("; ".join(report))
    counter = {q: ("cq", q) for q in m.states}
    delta = {}
    for (s, l), t in m.delta.items():
        delta[(s, l)] = Transition(t, (Inc(counter[t]), Output(counter[t])))
    clauses = []
    for fset in sorted(m.family, key=lambda f: sorted(map(repr, f))):
        lits = []
        for q in m.states:
            atom = acc.Bounded(counter[q])
            lits.append(acc.Not(atom) if q in fset else atom)
        clauses.append(acc.And(tuple(lits)))
    formula = acc.simplify(acc.Or(tuple(clauses))) if clauses else acc.FALSE
    return MaxAutomaton(m.alphabet, m.tracks, m.states, m.initial,
                        tuple(counter[q] for q in m.states), delta, formula)


def muller_accepts_lasso(m: MullerAutomaton, prefix, period) -> bool:
    """Direct Muller evaluation on the ultimately periodic word prefix.period^w.

    Runs the prefix, then iterates the period until the state at period
    boundaries repeats; the infinite-occurrence set is every state touched
    along the repeating segment.
    """
    if not period:
        raise InputError("empty period")
    s = m.initial
    for l in prefix:
        s = m.delta[(s, l)]
    boundary = {s: 0}
    trace = [s]
    while True:
        for l in period:
            s = m.delta[(s, l)]
        if s in boundary:
            start = boundary[s]
            break
        boundary[s] = len(trace)
        trace.append(s)
    inf: set = set()
    s = trace[start]
    reps = len(trace) - start
    for _ in range(reps):
        for l in period:
            s = m.delta[(s, l)]
            inf.add(s)
    return frozenset(inf) in m.family
