"""Boolean acceptance formulas over "output stream of counter c is bounded" atoms.

Formulas are immutable trees: `Bounded` atoms, `Const` truth values, and
`Not`/`And`/`Or` connectives (the binary connectives are n-ary internally).
Counters may be any hashable value; the textual grammar (`B(name)`, `!`,
`&`, `|`, `true`, `false`, parentheses) only covers string-named counters.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Hashable, Mapping, Optional

from .errors import InputError, ParseError

Counter = Hashable


@dataclass(frozen=True)
class Formula:
    """Base class; use the concrete node types below."""

    __slots__ = ()


@dataclass(frozen=True)
class Bounded(Formula):
    counter: Counter

    __slots__ = ("counter",)


@dataclass(frozen=True)
class Const(Formula):
    value: bool

    __slots__ = ("value",)


@dataclass(frozen=True)
class Not(Formula):
    child: Formula

    __slots__ = ("child",)


@dataclass(frozen=True)
class And(Formula):
    children: tuple

    __slots__ = ("children",)


@dataclass(frozen=True)
class Or(Formula):
    children: tuple

    __slots__ = ("children",)


TRUE = Const(True)
FALSE = Const(False)


def conj(*parts: Formula) -> Formula:
    return simplify(And(tuple(parts)))


def disj(*parts: Formula) -> Formula:
    return simplify(Or(tuple(parts)))


def negate(f: Formula) -> Formula:
    return simplify(Not(f))


def atoms(f: Formula) -> set:
    """The set of counters mentioned by Bounded atoms of `f`."""
    out: set = set()
    _walk_atoms(f, out)
    return out


def _walk_atoms(f: Formula, out: set) -> None:
    if isinstance(f, Bounded):
        out.add(f.counter)
    elif isinstance(f, Not):
        _walk_atoms(f.child, out)
    elif isinstance(f, (And, Or)):
        for c in f.children:
            _walk_atoms(c, out)


def atom_polarities(f: Formula, positive: bool = True) -> set:
    """Pairs (counter, polarity) where polarity False means the atom occurs
    under an odd number of negations somewhere in `f`."""
    out: set = set()

    def walk(g: Formula, pos: bool) -> None:
        if isinstance(g, Bounded):
            out.add((g.counter, pos))
        elif isinstance(g, Not):
            walk(g.child, not pos)
        elif isinstance(g, (And, Or)):
            for c in g.children:
                walk(c, pos)

    walk(f, positive)
    return out


def eval_acceptance(f: Formula, bounded: Mapping) -> bool:
    """Evaluate `f` with atom Bounded(c) mapped to bounded[c].

    Raises InputError when an atom of `f` has no assignment.
    """
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Bounded):
        try:
            return bool(bounded[f.counter])
        except KeyError:
            raise InputError(f"no boundedness verdict for counter {f.counter!r}") from None
    if isinstance(f, Not):
        return not eval_acceptance(f.child, bounded)
    if isinstance(f, And):
        return all(eval_acceptance(c, bounded) for c in f.children)
    if isinstance(f, Or):
        return any(eval_acceptance(c, bounded) for c in f.children)
    raise TypeError(f"not an acceptance formula: {f!r}")


def eval_partial(f: Formula, bounded: Mapping) -> Optional[bool]:
    """Three-valued (Kleene) evaluation; counters absent from `bounded` or
    mapped to None are unknown.  Returns True/False/None."""
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Bounded):
        v = bounded.get(f.counter)
        return None if v is None else bool(v)
    if isinstance(f, Not):
        v = eval_partial(f.child, bounded)
        return None if v is None else not v
    if isinstance(f, (And, Or)):
        sink = isinstance(f, Or)  # Or short-circuits on True, And on False
        saw_unknown = False
        for c in f.children:
            v = eval_partial(c, bounded)
            if v is sink:
                return sink
            if v is None:
                saw_unknown = True
        return None if saw_unknown else (not sink)
    raise TypeError(f"not an acceptance formula: {f!r}")


def map_atoms(f: Formula, fn: Callable) -> Formula:
    """Rebuild `f` with every Bounded atom replaced by fn(counter) (a Formula)."""
    if isinstance(f, Bounded):
        return fn(f.counter)
    if isinstance(f, Const):
        return f
    if isinstance(f, Not):
        return Not(map_atoms(f.child, fn))
    if isinstance(f, And):
        return And(tuple(map_atoms(c, fn) for c in f.children))
    if isinstance(f, Or):
        return Or(tuple(map_atoms(c, fn) for c in f.children))
    raise TypeError(f"not an acceptance formula: {f!r}")


def rename_atoms(f: Formula, mapping: Mapping) -> Formula:
    return map_atoms(f, lambda c: Bounded(mapping.get(c, c)))


def simplify(f: Formula) -> Formula:
    """Constant folding, double-negation elimination, flattening, duplicate
    removal, and complementary-subtree detection.

    Runs after every boolean composition so that contradictory acceptance
    (f & !f) collapses to the constant false and is detectable syntactically.
    """
    if isinstance(f, (Bounded, Const)):
        return f
    if isinstance(f, Not):
        c = simplify(f.child)
        if isinstance(c, Const):
            return Const(not c.value)
        if isinstance(c, Not):
            return c.child
        return Not(c)
    if isinstance(f, (And, Or)):
        is_and = isinstance(f, And)
        absorber = FALSE if is_and else TRUE
        neutral = TRUE if is_and else FALSE
        flat: list = []
        seen: set = set()
        for raw in f.children:
            c = simplify(raw)
            if c == absorber:
                return absorber
            if c == neutral:
                continue
            # flatten same-connective children
            if isinstance(c, And if is_and else Or):
                grand = c.children
            else:
                grand = (c,)
            for g in grand:
                if g == absorber:
                    return absorber
                if g == neutral or g in seen:
                    continue
                seen.add(g)
                flat.append(g)
        for g in flat:
            complement = g.child if isinstance(g, Not) else Not(g)
            if complement in seen:
                return absorber
        if not flat:
            return neutral
        if len(flat) == 1:
            return flat[0]
        return And(tuple(flat)) if is_and else Or(tuple(flat))
    raise TypeError(f"not an acceptance formula: {f!r}")


# --- textual form ------------------------------------------------------------
#
# Grammar:   or   := and ('|' and)*
#            and  := not ('&' not)*
#            not  := '!' not | atom
#            atom := 'B(' name ')' | 'true' | 'false' | '(' or ')'

_NAME_OK = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_.'")


def format_acceptance(f: Formula) -> str:
    # precedence levels: Or=0 < And=1 < Not=2 < atom=3
    def fmt(g: Formula, min_level: int) -> str:
        if isinstance(g, Const):
            return "true" if g.value else "false"
        if isinstance(g, Bounded):
            name = str(g.counter)
            if not name or not all(ch in _NAME_OK for ch in name):
                raise InputError(f"counter name {name!r} is not printable; canonicalize first")
            return f"B({name})"
        if isinstance(g, Not):
            return _wrap("!" + fmt(g.child, 2), 2, min_level)
        if isinstance(g, And):
            return _wrap(" & ".join(fmt(c, 2) for c in g.children), 1, min_level)
        if isinstance(g, Or):
            return _wrap(" | ".join(fmt(c, 1) for c in g.children), 0, min_level)
        raise TypeError(f"not an acceptance formula: {g!r}")

    def _wrap(body: str, level: int, min_level: int) -> str:
        return f"({body})" if level < min_level else body

    return fmt(f, 0)


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, expected: str) -> None:
        self.skip_ws()
        if not self.text.startswith(expected, self.pos):
            raise ParseError(f"expected {expected!r}", self.pos)
        self.pos += len(expected)


def parse_acceptance(text: str) -> Formula:
    """Parse the `B(name)` / `!` / `&` / `|` / `true` / `false` grammar."""
    sc = _Scanner(text)
    f = _parse_or(sc)
    sc.skip_ws()
    if sc.pos != len(text):
        raise ParseError("trailing input in acceptance formula", sc.pos)
    return f


def _parse_or(sc: _Scanner) -> Formula:
    parts = [_parse_and(sc)]
    while sc.peek() == "|":
        sc.take("|")
        parts.append(_parse_and(sc))
    return parts[0] if len(parts) == 1 else Or(tuple(parts))


def _parse_and(sc: _Scanner) -> Formula:
    parts = [_parse_not(sc)]
    while sc.peek() == "&":
        sc.take("&")
        parts.append(_parse_not(sc))
    return parts[0] if len(parts) == 1 else And(tuple(parts))


def _parse_not(sc: _Scanner) -> Formula:
    if sc.peek() == "!":
        sc.take("!")
        return Not(_parse_not(sc))
    return _parse_atom(sc)


def _parse_atom(sc: _Scanner) -> Formula:
    ch = sc.peek()
    if ch == "(":
        sc.take("(")
        f = _parse_or(sc)
        sc.take(")")
        return f
    text, pos = sc.text, sc.pos
    if text.startswith("true", pos):
        sc.pos += 4
        return TRUE
    if text.startswith("false", pos):
        sc.pos += 5
        return FALSE
    if text.startswith("B(", pos):
        sc.pos += 2
        start = sc.pos
        while sc.pos < len(text) and text[sc.pos] != ")":
            sc.pos += 1
        name = text[start:sc.pos].strip()
        if not name:
            raise ParseError("empty counter name in B()", start)
        sc.take(")")
        return Bounded(name)
    raise ParseError("expected atom, constant, or parenthesized formula", pos)
