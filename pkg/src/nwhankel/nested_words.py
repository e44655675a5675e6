"""Nested words and their encoding as words over a tagged alphabet.

A nested word is a base word ``w`` plus a non-crossing matching relation
``nu`` of (call, return) position pairs.  Its tagged encoding marks each
call position ``i`` as ``<s``, each return position as ``s>`` and every
other position as the plain internal letter ``s``.

Text syntax for tagged words is whitespace-separated tokens; the empty
word is spelled ``eps``::

    >>> format_word(parse_word("b <a <a b> b>"))
    'b <a <a b> b>'
"""
from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import InputError, InvalidNestedWord, NotWellMatched

EPSILON_TOKEN = "eps"
_RESERVED = set("<>/ \t\r\n,")


class Kind(enum.IntEnum):
    # value order is the shortlex order on tagged letters
    INTERNAL = 0
    CALL = 1
    RETURN = 2


@dataclass(frozen=True, order=True)
class TaggedLetter:
    kind: Kind
    symbol: str

    def __str__(self):
        if self.kind is Kind.CALL:
            return "<" + self.symbol
        if self.kind is Kind.RETURN:
            return self.symbol + ">"
        return self.symbol


TaggedWord = tuple  # tuple[TaggedLetter, ...]


def call(s: str) -> TaggedLetter:
    return TaggedLetter(Kind.CALL, s)


def ret(s: str) -> TaggedLetter:
    return TaggedLetter(Kind.RETURN, s)


def internal(s: str) -> TaggedLetter:
    return TaggedLetter(Kind.INTERNAL, s)


def check_symbol(symbol: str) -> str:
    if not isinstance(symbol, str) or not symbol:
        raise InputError(f"base letter must be a non-empty string, got {symbol!r}")
    if symbol == EPSILON_TOKEN or any(ch in _RESERVED for ch in symbol):
        raise InputError(f"illegal base letter {symbol!r}")
    return symbol


def check_alphabet(alphabet: Sequence[str]) -> tuple[str, ...]:
    """Validate an alphabet and return it as a tuple in the given order."""
    alphabet = tuple(alphabet)
    if not alphabet:
        raise InputError("alphabet must be non-empty")
    for s in alphabet:
        check_symbol(s)
    if len(set(alphabet)) != len(alphabet):
        raise InputError(f"alphabet has repeated letters: {alphabet}")
    return alphabet


def parse_token(token: str) -> TaggedLetter:
    if token.startswith("<") and not token.endswith(">"):
        return call(check_symbol(token[1:]))
    if token.endswith(">") and not token.startswith("<"):
        return ret(check_symbol(token[:-1]))
    return internal(check_symbol(token))


def parse_word(text: str) -> TaggedWord:
    """Parse the whitespace-token syntax into a tagged word."""
    tokens = text.split()
    if tokens == [EPSILON_TOKEN]:
        return ()
    return tuple(parse_token(t) for t in tokens)


def format_word(tw: TaggedWord) -> str:
    if not tw:
        return EPSILON_TOKEN
    return " ".join(str(x) for x in tw)


def is_well_matched(tw: TaggedWord) -> bool:
    stack = []
    for letter in tw:
        if letter.kind is Kind.CALL:
            stack.append(letter)
        elif letter.kind is Kind.RETURN:
            if not stack:
                return False
            stack.pop()
    return not stack


def _match(tw: TaggedWord) -> list[tuple[int, int]]:
    """Return the 1-based call/return pairs of ``tw`` or raise NotWellMatched."""
    open_calls = []
    pairs = []
    for pos, letter in enumerate(tw, start=1):
        if letter.kind is Kind.CALL:
            open_calls.append(pos)
        elif letter.kind is Kind.RETURN:
            if not open_calls:
                raise NotWellMatched(pos, "return without a pending call")
            pairs.append((open_calls.pop(), pos))
    if open_calls:
        raise NotWellMatched(open_calls[-1], "call never returned")
    return sorted(pairs)


def check_well_matched(tw: TaggedWord) -> TaggedWord:
    _match(tw)
    return tw


def nesting_depth(tw: TaggedWord) -> int:
    depth = best = 0
    for letter in tw:
        if letter.kind is Kind.CALL:
            depth += 1
            best = max(best, depth)
        elif letter.kind is Kind.RETURN:
            depth -= 1
    return best


@dataclass(frozen=True)
class NestedWord:
    """Base word plus matching relation; positions in ``nu`` are 1-based."""

    word: tuple[str, ...]
    nu: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "word", tuple(self.word))
        object.__setattr__(self, "nu", tuple(sorted(tuple(p) for p in self.nu)))

    def __len__(self):
        return len(self.word)

    def to_json(self) -> str:
        return json.dumps({"word": list(self.word), "nu": [list(p) for p in self.nu]})

    @classmethod
    def from_json(cls, text: str) -> "NestedWord":
        data = json.loads(text)
        try:
            nw = cls(tuple(data["word"]), tuple(tuple(p) for p in data["nu"]))
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed nested word JSON: {exc}") from exc
        violations = validate(nw)
        if violations:
            raise InvalidNestedWord(violations)
        return nw


def validate(nw: NestedWord) -> list[str]:
    """List the violated matching-relation conditions; empty means valid."""
    problems = []
    length = len(nw.word)
    seen: dict[int, tuple[int, int]] = {}
    for i, j in nw.nu:
        if not (1 <= i < j <= length):
            problems.append(f"pair ({i},{j}) needs 1 <= i < j <= {length}")
        for p in (i, j):
            if p in seen and seen[p] != (i, j):
                problems.append(f"position {p} is in both {seen[p]} and ({i},{j})")
            seen[p] = (i, j)
    pairs = sorted(set(nw.nu))
    for a, (i, j) in enumerate(pairs):
        for i2, j2 in pairs[a + 1:]:
            if i < i2 <= j < j2 or i2 < i <= j2 < j:
                problems.append(f"pairs ({i},{j}) and ({i2},{j2}) cross")
    if len(pairs) != len(nw.nu):
        problems.append("matching relation lists a pair twice")
    return problems


def encode(nw: NestedWord) -> TaggedWord:
    violations = validate(nw)
    if violations:
        raise InvalidNestedWord(violations)
    calls = {i for i, _ in nw.nu}
    returns = {j for _, j in nw.nu}
    out = []
    for pos, s in enumerate(nw.word, start=1):
        if pos in calls:
            out.append(call(s))
        elif pos in returns:
            out.append(ret(s))
        else:
            out.append(internal(s))
    return tuple(out)


def decode(tw: TaggedWord) -> NestedWord:
    pairs = _match(tw)
    return NestedWord(tuple(x.symbol for x in tw), tuple(pairs))


def tagged_letters(alphabet: Sequence[str]) -> list[TaggedLetter]:
    """All tagged letters over ``alphabet``: internals, then calls, then returns."""
    alphabet = check_alphabet(alphabet)
    return [TaggedLetter(k, s) for k in Kind for s in alphabet]


def _words_of_length(letters, length) -> Iterator[TaggedWord]:
    # depth-first in letter order; prune prefixes that cannot close in time
    prefix: list[TaggedLetter] = []

    def rec(depth):
        remaining = length - len(prefix)
        if remaining == 0:
            if depth == 0:
                yield tuple(prefix)
            return
        for letter in letters:
            if letter.kind is Kind.CALL:
                if depth + 1 > remaining - 1:
                    continue
                d = depth + 1
            elif letter.kind is Kind.RETURN:
                if depth == 0:
                    continue
                d = depth - 1
            else:
                if depth > remaining - 1:
                    continue
                d = depth
            prefix.append(letter)
            yield from rec(d)
            prefix.pop()

    yield from rec(0)


def enumerate_well_matched(alphabet: Sequence[str], max_len: int) -> list[TaggedWord]:
    """Every well-matched tagged word of length <= ``max_len`` in shortlex order."""
    if max_len < 0:
        raise InputError("max_len must be non-negative")
    letters = tagged_letters(alphabet)
    out = []
    for length in range(max_len + 1):
        out.extend(_words_of_length(letters, length))
    return out


def enumerate_all(alphabet: Sequence[str], max_len: int) -> list[TaggedWord]:
    """Every tagged word (matched or not) of length <= ``max_len``, shortlex."""
    letters = tagged_letters(alphabet)
    out = []
    for length in range(max_len + 1):
        out.extend(itertools.product(letters, repeat=length))
    return out


def shortlex_key(alphabet: Sequence[str]):
    index = {s: i for i, s in enumerate(alphabet)}

    def key(tw):
        return (len(tw), [(x.kind, index[x.symbol]) for x in tw])

    return key
