"""Deterministic max-automata: counters over naturals, boundedness acceptance.

A machine reads an infinite word over (base alphabet x {0,1}^tracks); every
transition runs a finite op sequence over the counters (increment, reset,
output, c := max(c,d)).  Acceptance is a boolean formula over atoms "the
output stream of counter c is bounded".  Everything here operates on the
finite-prefix semantics (runs, configurations); the infinite-word decision
procedures live in membership.py.

Automata are immutable after construction; all operations below are pure.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Dict, Hashable, Iterable, Iterator, List, NamedTuple, Optional, Tuple, Union

from . import acceptance as acc
from .acceptance import Bounded, Formula, Not, simplify
from .errors import InputError, ValidationError

State = Hashable
Counter = Hashable


class Letter(NamedTuple):
    """One input symbol: a base-alphabet symbol plus annotation bits."""

    base: Hashable
    bits: Tuple[int, ...] = ()


@dataclass(frozen=True)
class Inc:
    counter: Counter
    __slots__ = ("counter",)


@dataclass(frozen=True)
class Reset:
    counter: Counter
    __slots__ = ("counter",)


@dataclass(frozen=True)
class Output:
    counter: Counter
    __slots__ = ("counter",)


@dataclass(frozen=True)
class MaxInto:
    """counter := max(counter, source)."""

    counter: Counter
    source: Counter
    __slots__ = ("counter", "source")


@dataclass(frozen=True)
class GuardedOutput:
    """Output counter only if the remaining suffix lies in the guard language.

    Legal only inside a GuardedMaxAutomaton; every other consumer rejects it.
    """

    counter: Counter
    guard_id: Hashable
    __slots__ = ("counter", "guard_id")


CounterOp = Union[Inc, Reset, Output, MaxInto, GuardedOutput]


def op_counters(op: CounterOp) -> Tuple[Counter, ...]:
    if isinstance(op, MaxInto):
        return (op.counter, op.source)
    return (op.counter,)


class Transition(NamedTuple):
    target: State
    ops: Tuple[CounterOp, ...]


@dataclass
class MaxAutomaton:
    alphabet: Tuple[Hashable, ...]
    tracks: int
    states: Tuple[State, ...]
    initial: State
    counters: Tuple[Counter, ...]
    delta: Dict[Tuple[State, Letter], Transition]
    acceptance: Formula

    def letters(self) -> Iterator[Letter]:
        """All input letters in canonical order (alphabet order, then bits)."""
        for base in self.alphabet:
            for bits in itertools.product((0, 1), repeat=self.tracks):
                yield Letter(base, bits)

    def target(self, state: State, letter: Letter) -> State:
        return self.delta[(state, letter)].target

    def core_key(self):
        """Structural identity of everything except the acceptance formula."""
        delta_items = tuple(sorted(self.delta.items(), key=lambda kv: repr(kv[0])))
        return (self.alphabet, self.tracks, self.states, self.initial,
                self.counters, delta_items)


@dataclass
class Configuration:
    """A run snapshot: control state, counter valuation, per-counter output log."""

    state: State
    valuation: Dict[Counter, int]
    outputs: Dict[Counter, List[int]]

    def copy(self) -> "Configuration":
        return Configuration(self.state, dict(self.valuation),
                             {c: list(v) for c, v in self.outputs.items()})


def initial_configuration(a: MaxAutomaton) -> Configuration:
    return Configuration(a.initial, {c: 0 for c in a.counters},
                         {c: [] for c in a.counters})


def validate(a: MaxAutomaton) -> List[str]:
    """Well-formedness report; empty iff the automaton is usable.

    Flags every missing delta entry (determinism comes for free from the
    map representation, totality does not), dangling state/counter
    references, and annotation-width mismatches.
    """
    report: List[str] = []
    states = set(a.states)
    counters = set(a.counters)
    if len(states) != len(a.states):
        report.append("duplicate state declarations")
    if len(counters) != len(a.counters):
        report.append("duplicate counter declarations")
    if a.initial not in states:
        report.append(f"initial state {a.initial!r} not declared")
    if a.tracks < 0:
        report.append("negative track count")
    expected = {(s, l) for s in a.states for l in a.letters()}
    for key in expected:
        if key not in a.delta:
            s, l = key
            report.append(f"delta undefined at ({s!r}, {_letter_str(l)})")
    for (s, l), tr in a.delta.items():
        if (s, l) not in expected:
            if s not in states:
                report.append(f"transition from undeclared state {s!r}")
            elif l.base not in set(a.alphabet):
                report.append(f"transition on unknown symbol {l.base!r}")
            else:
                report.append(f"letter {_letter_str(l)} has wrong track width (want {a.tracks})")
            continue
        if tr.target not in states:
            report.append(f"transition ({s!r}, {_letter_str(l)}) targets undeclared state {tr.target!r}")
        for op in tr.ops:
            for c in op_counters(op):
                if c not in counters:
                    report.append(f"unknown counter {c!r} in ops at ({s!r}, {_letter_str(l)})")
    for c in acc.atoms(a.acceptance):
        if c not in counters:
            report.append(f"unknown counter {c!r} in acceptance formula")
    return sorted(set(report))


def require_valid(a: MaxAutomaton) -> None:
    report = validate(a)
    if report:
        raise ValidationError("; ".join(report))


def _letter_str(l: Letter) -> str:
    bits = "".join(str(b) for b in l.bits)
    return f"{l.base!r}|{bits}" if bits else repr(l.base)


def apply_ops(ops: Iterable[CounterOp], valuation: Dict[Counter, int],
              outputs: Dict[Counter, List[int]]) -> None:
    """Run an op sequence left-to-right, mutating valuation and output logs."""
    for op in ops:
        if isinstance(op, Inc):
            valuation[op.counter] += 1
        elif isinstance(op, Reset):
            valuation[op.counter] = 0
        elif isinstance(op, Output):
            outputs[op.counter].append(valuation[op.counter])
        elif isinstance(op, MaxInto):
            v = valuation[op.source]
            if v > valuation[op.counter]:
                valuation[op.counter] = v
        else:
            raise InputError(f"op {op!r} is not executable outside a guarded automaton")


def step(a: MaxAutomaton, cfg: Configuration, letter: Letter) -> Configuration:
    """One transition; pure (returns a fresh configuration)."""
    try:
        tr = a.delta[(cfg.state, letter)]
    except KeyError:
        raise InputError(f"no transition from {cfg.state!r} on {_letter_str(letter)}") from None
    out = cfg.copy()
    out.state = tr.target
    apply_ops(tr.ops, out.valuation, out.outputs)
    return out


def run_finite(a: MaxAutomaton, word: Iterable[Letter]) -> Configuration:
    """Fold step over `word` from the initial configuration (all counters 0)."""
    cfg = initial_configuration(a)
    valuation, outputs = cfg.valuation, cfg.outputs
    state = cfg.state
    for letter in word:
        try:
            tr = a.delta[(state, letter)]
        except KeyError:
            raise InputError(f"no transition from {state!r} on {_letter_str(letter)}") from None
        state = tr.target
        apply_ops(tr.ops, valuation, outputs)
    cfg.state = state
    return cfg


eval_acceptance = acc.eval_acceptance


# --- boolean closure ----------------------------------------------------------

def _as_combine(combine) -> Callable[[Formula, Formula], Formula]:
    if combine == "and":
        return lambda f, g: acc.And((f, g))
    if combine == "or":
        return lambda f, g: acc.Or((f, g))
    if callable(combine):
        return combine
    raise InputError(f"unknown connective {combine!r}")


def product(a1: MaxAutomaton, a2: MaxAutomaton, combine="and") -> MaxAutomaton:
    """Synchronized product; the language is `combine` of the two languages.

    Counter sets are disjoined by renaming; only the reachable part of
    Q1 x Q2 is materialized.  When the two factors share an identical core
    (same states, delta, and ops) no pairing or renaming happens at all and
    only the acceptance formulas are combined -- this is what lets
    product(A, complement(A), "and") simplify to the constant false.
    """
    comb = _as_combine(combine)
    if set(a1.alphabet) != set(a2.alphabet) or a1.tracks != a2.tracks:
        raise InputError("product factors must share base alphabet and track width")
    if a1.core_key() == a2.core_key():
        return MaxAutomaton(a1.alphabet, a1.tracks, a1.states, a1.initial, a1.counters,
                            dict(a1.delta), simplify(comb(a1.acceptance, a2.acceptance)))

    left = {c: ("l", c) for c in a1.counters}
    right = {c: ("r", c) for c in a2.counters}
    counters = tuple(left[c] for c in a1.counters) + tuple(right[c] for c in a2.counters)

    delta: Dict[Tuple[State, Letter], Transition] = {}
    init = (a1.initial, a2.initial)
    states: List[State] = [init]
    seen = {init}
    frontier = [init]
    letters = tuple(a1.letters())
    while frontier:
        s1, s2 = frontier.pop(0)
        for l in letters:
            t1 = a1.delta[(s1, l)]
            t2 = a2.delta[(s2, l)]
            tgt = (t1.target, t2.target)
            ops = tuple(_rename_op(op, left) for op in t1.ops) + \
                tuple(_rename_op(op, right) for op in t2.ops)
            delta[((s1, s2), l)] = Transition(tgt, ops)
            if tgt not in seen:
                seen.add(tgt)
                states.append(tgt)
                frontier.append(tgt)
    accf = simplify(comb(acc.rename_atoms(a1.acceptance, left),
                         acc.rename_atoms(a2.acceptance, right)))
    return MaxAutomaton(a1.alphabet, a1.tracks, tuple(states), init, counters, delta, accf)


def _rename_op(op: CounterOp, ren: Dict[Counter, Counter]) -> CounterOp:
    if isinstance(op, Inc):
        return Inc(ren[op.counter])
    if isinstance(op, Reset):
        return Reset(ren[op.counter])
    if isinstance(op, Output):
        return Output(ren[op.counter])
    if isinstance(op, MaxInto):
        return MaxInto(ren[op.counter], ren[op.source])
    if isinstance(op, GuardedOutput):
        return GuardedOutput(ren[op.counter], op.guard_id)
    raise TypeError(f"unknown op {op!r}")


def complement(a: MaxAutomaton) -> MaxAutomaton:
    """Same structure, negated acceptance; exact complement by determinism."""
    return MaxAutomaton(a.alphabet, a.tracks, a.states, a.initial, a.counters,
                        dict(a.delta), simplify(Not(a.acceptance)))


# --- annotation tracks --------------------------------------------------------

def add_track(a: MaxAutomaton) -> MaxAutomaton:
    """Cylindrify: a fresh last annotation track the automaton ignores."""
    delta = {}
    for (s, l), tr in a.delta.items():
        for b in (0, 1):
            delta[(s, Letter(l.base, l.bits + (b,)))] = tr
    return MaxAutomaton(a.alphabet, a.tracks + 1, a.states, a.initial,
                        a.counters, delta, a.acceptance)


def fix_track_zero(a: MaxAutomaton, track: int) -> MaxAutomaton:
    """Instantiate one annotation track with the empty set (bit 0) and drop it."""
    if not 0 <= track < a.tracks:
        raise InputError(f"track {track} out of range for width {a.tracks}")
    delta = {}
    for (s, l), tr in a.delta.items():
        if l.bits[track] != 0:
            continue
        bits = l.bits[:track] + l.bits[track + 1:]
        delta[(s, Letter(l.base, bits))] = tr
    return MaxAutomaton(a.alphabet, a.tracks - 1, a.states, a.initial,
                        a.counters, delta, a.acceptance)


def permute_tracks(a: MaxAutomaton, order: Tuple[int, ...]) -> MaxAutomaton:
    """Reorder annotation tracks; new track i reads old track order[i]."""
    if sorted(order) != list(range(a.tracks)):
        raise InputError(f"{order!r} is not a permutation of {a.tracks} tracks")
    delta = {}
    for (s, l), tr in a.delta.items():
        bits = tuple(l.bits[i] for i in order)
        delta[(s, Letter(l.base, bits))] = tr
    return MaxAutomaton(a.alphabet, a.tracks, a.states, a.initial,
                        a.counters, delta, a.acceptance)


def with_initial(a: MaxAutomaton, state: State) -> MaxAutomaton:
    if state not in set(a.states):
        raise InputError(f"state {state!r} not declared")
    return MaxAutomaton(a.alphabet, a.tracks, a.states, state, a.counters,
                        dict(a.delta), a.acceptance)


# --- output normal form -------------------------------------------------------

def desugar_outputs(a: MaxAutomaton) -> MaxAutomaton:
    """Route every output through a shadow copy register.

    Each counter c gains a shadow c' that is never incremented; output(c)
    becomes [reset c'; c' := max(c', c); output c'] and acceptance atoms move
    to the shadows.  The shadow log equals the original log value-for-value,
    so the language is preserved; the result is a normal form in which every
    output reads a pure copy register.
    """
    shadow = {c: ("shadow", c) for c in a.counters}
    counters = a.counters + tuple(shadow[c] for c in a.counters)
    delta = {}
    for key, tr in a.delta.items():
        ops: List[CounterOp] = []
        for op in tr.ops:
            if isinstance(op, Output):
                s = shadow[op.counter]
                ops.extend((Reset(s), MaxInto(s, op.counter), Output(s)))
            else:
                ops.append(op)
        delta[key] = Transition(tr.target, tuple(ops))
    accf = acc.rename_atoms(a.acceptance, shadow)
    return MaxAutomaton(a.alphabet, a.tracks, a.states, a.initial, counters, delta, accf)
