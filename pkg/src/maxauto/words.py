"""Finitely presented infinite words: lassos u.v^w and ramps u.v^1wv^2w...

Words are tuples of Letters (see automata.Letter).  Lassos denote u
followed by v forever; ramps denote u then v w vv w vvv w ..., the block
of v's growing by one each round -- the canonical witness family for
unbounded behaviour.  Both carry annotation tracks like any other word.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Set, Tuple, Union

from .automata import Letter
from .errors import InputError, ParseError

FiniteWord = Tuple[Letter, ...]


def finite_word(text: str, bits: Tuple[int, ...] = ()) -> FiniteWord:
    """Single-character symbols, all with the same annotation bits."""
    return tuple(Letter(ch, bits) for ch in text)


@dataclass(frozen=True)
class LassoWord:
    u: FiniteWord
    v: FiniteWord

    def __post_init__(self):
        if not self.v:
            raise InputError("lasso period must be nonempty")
        _check_width(self.u + self.v)

    @property
    def tracks(self) -> int:
        return len(self.v[0].bits)


@dataclass(frozen=True)
class RampWord:
    u: FiniteWord
    v: FiniteWord
    w: FiniteWord
    # index of the first v-block; 1 in every externally constructed ramp,
    # bumped internally when annotate() folds whole blocks into u
    first_block: int = 1

    def __post_init__(self):
        if not self.v:
            raise InputError("ramp pump factor must be nonempty")
        if self.first_block < 1:
            raise InputError("first_block must be >= 1")
        _check_width(self.u + self.v + self.w)

    @property
    def tracks(self) -> int:
        return len(self.v[0].bits)

    def block(self, i: int) -> FiniteWord:
        """The i-th block (i >= 1 counts from the current prefix): v^(f+i-1) w."""
        return self.v * (self.first_block + i - 1) + self.w


Word = Union[LassoWord, RampWord]


def _check_width(letters: Iterable[Letter]) -> None:
    widths = {len(l.bits) for l in letters}
    if len(widths) > 1:
        raise InputError(f"mixed annotation widths {sorted(widths)} in one word")


def prefix(word, n: int) -> FiniteWord:
    """First n letters of the denoted infinite word (or of a finite word)."""
    if n < 0:
        raise InputError("prefix length must be >= 0")
    if isinstance(word, tuple):
        if n > len(word):
            raise InputError(f"prefix {n} exceeds finite word of length {len(word)}")
        return word[:n]
    out: list = []
    if isinstance(word, LassoWord):
        out.extend(word.u[:n])
        while len(out) < n:
            out.extend(word.v[: n - len(out)])
        return tuple(out)
    if isinstance(word, RampWord):
        out.extend(word.u[:n])
        i = 1
        while len(out) < n:
            out.extend(word.block(i)[: n - len(out)])
            i += 1
        return tuple(out)
    raise TypeError(f"not a word: {word!r}")


def _annotate_finite(letters: FiniteWord, positions: Set[int], offset: int) -> FiniteWord:
    return tuple(
        Letter(l.base, l.bits + (1 if offset + i in positions else 0,))
        for i, l in enumerate(letters)
    )


def annotate(word, positions: Iterable[int]):
    """Append one annotation track marking exactly the given finite position set.

    Lasso and ramp shapes are preserved: the prefix containing max(positions)
    is folded into u so the tail stays literally periodic (for ramps, whole
    blocks are folded and the first-block index advances accordingly).
    """
    pos = set(positions)
    if any(p < 0 for p in pos):
        raise InputError("annotation positions must be >= 0")
    if isinstance(word, tuple):
        if pos and max(pos) >= len(word):
            raise InputError("annotation position beyond the end of a finite word")
        return _annotate_finite(word, pos, 0)
    horizon = max(pos) + 1 if pos else 0
    if isinstance(word, LassoWord):
        u = list(word.u)
        while len(u) < horizon:
            u.extend(word.v)
        new_u = _annotate_finite(tuple(u), pos, 0)
        new_v = _annotate_finite(word.v, set(), 0)
        return LassoWord(new_u, new_v)
    if isinstance(word, RampWord):
        u = list(word.u)
        first = word.first_block
        while len(u) < horizon:
            u.extend(word.v * first + word.w)
            first += 1
        new = RampWord(_annotate_finite(tuple(u), pos, 0),
                       _annotate_finite(word.v, set(), 0),
                       _annotate_finite(word.w, set(), 0),
                       first_block=first)
        return new
    raise TypeError(f"not a word: {word!r}")


def project_last_track(word):
    """Drop the last annotation track (inverse of annotate, forgetting the set)."""
    def drop(letters: FiniteWord) -> FiniteWord:
        return tuple(Letter(l.base, l.bits[:-1]) for l in letters)

    if isinstance(word, tuple):
        return drop(word)
    if isinstance(word, LassoWord):
        return LassoWord(drop(word.u), drop(word.v))
    if isinstance(word, RampWord):
        return RampWord(drop(word.u), drop(word.v), drop(word.w), word.first_block)
    raise TypeError(f"not a word: {word!r}")


def parse_word_spec(text: str, alphabet=None):
    """Parse `lasso:<u>:<v>` or `ramp:<u>:<v>:<w>` into a word.

    Symbols are single characters; when `alphabet` is given each symbol must
    belong to it.  The produced word has no annotation tracks.
    """
    parts = text.strip().split(":")
    kind = parts[0]
    if kind == "lasso":
        if len(parts) != 3:
            raise ParseError(f"lasso spec needs 2 fields, got {len(parts) - 1}: {text!r}")
        u, v = (_parse_symbols(p, alphabet, text) for p in parts[1:])
        if not v:
            raise ParseError(f"empty lasso period in {text!r}")
        return LassoWord(u, v)
    if kind == "ramp":
        if len(parts) != 4:
            raise ParseError(f"ramp spec needs 3 fields, got {len(parts) - 1}: {text!r}")
        u, v, w = (_parse_symbols(p, alphabet, text) for p in parts[1:])
        if not v:
            raise ParseError(f"empty ramp pump factor in {text!r}")
        return RampWord(u, v, w)
    raise ParseError(f"word spec must start with 'lasso:' or 'ramp:': {text!r}")


def format_word_spec(word) -> str:
    def sym(letters: FiniteWord) -> str:
        for l in letters:
            if l.bits:
                raise InputError("only 0-track words have a spec form")
            if not isinstance(l.base, str) or len(l.base) != 1:
                raise InputError(f"symbol {l.base!r} has no single-character form")
        return "".join(l.base for l in letters)

    if isinstance(word, LassoWord):
        return f"lasso:{sym(word.u)}:{sym(word.v)}"
    if isinstance(word, RampWord):
        if word.first_block != 1:
            raise InputError("folded ramps have no spec form")
        return f"ramp:{sym(word.u)}:{sym(word.v)}:{sym(word.w)}"
    raise TypeError(f"not a word: {word!r}")


def _parse_symbols(text: str, alphabet, whole: str) -> FiniteWord:
    if alphabet is not None:
        for ch in text:
            if ch not in alphabet:
                raise ParseError(f"symbol {ch!r} not in alphabet {sorted(alphabet)!r} ({whole!r})")
    return finite_word(text)
