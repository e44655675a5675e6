"""Finite blocks of nested Hankel matrices and word Hankel matrices.

The nested Hankel matrix of ``f`` has rows and columns labelled by
well-matched tagged words and entry ``f(uv)`` at ``(u, v)``.  Because the
concatenation of two well-matched words is again well-matched, every entry
is defined.  The classical word Hankel matrix instead ranges over all
tagged words; here it is made total by reading ``f(uv) = 0`` whenever
``uv`` is not well-matched.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import linalg_kernel as lk
from .errors import InputError, NoNonzeroBasis
from .nested_words import (
    Kind,
    TaggedWord,
    check_well_matched,
    enumerate_all,
    enumerate_well_matched,
    format_word,
)
from .wvpa import Wvpa


class Oracle:
    """A deterministic function on well-matched tagged words.

    Values are memoized, so expensive oracles (automaton behavior) are
    evaluated once per distinct word.
    """

    def __init__(self, name: str, fn: Callable[[TaggedWord], float], alphabet=None, constant=None):
        self.name = name
        # set for oracles that ignore their argument; enables the fast word-Hankel path
        self.constant = constant
        self.alphabet = tuple(alphabet) if alphabet is not None else None
        self._fn = fn
        self._cache: dict[TaggedWord, float] = {}

    def __call__(self, w: TaggedWord) -> float:
        w = tuple(w)
        try:
            return self._cache[w]
        except KeyError:
            value = float(self._fn(w))
            self._cache[w] = value
            return value

    def __repr__(self):
        return f"Oracle({self.name})"


def paren_count() -> Oracle:
    return Oracle("paren_count", lambda w: sum(1 for x in w if x.kind is Kind.CALL))


def dyck_one() -> Oracle:
    return Oracle("dyck_one", lambda w: 1.0, constant=1.0)


def constant(c: float) -> Oracle:
    c = float(c)
    return Oracle(f"constant({c:g})", lambda w: c, constant=c)


def automaton_oracle(a: Wvpa, name: str = "automaton") -> Oracle:
    return Oracle(name, a.behavior, alphabet=a.alphabet)


BUILTINS = {
    "paren_count": paren_count,
    "dyck_one": dyck_one,
    "constant0": lambda: constant(0.0),
}


def builtin_oracle(name: str) -> Oracle:
    """Look up a builtin by name; ``constant(c)`` takes a numeric argument."""
    if name in BUILTINS:
        return BUILTINS[name]()
    if name.startswith("constant(") and name.endswith(")"):
        try:
            return constant(float(name[len("constant("):-1]))
        except ValueError:
            pass
    raise InputError(f"unknown function {name!r}; known: {sorted(BUILTINS)} or constant(<c>)")


@dataclass(frozen=True, eq=False)
class HankelBlock:
    row_labels: tuple
    col_labels: tuple
    entries: np.ndarray
    oracle: Oracle = field(repr=False)

    @property
    def oracle_id(self) -> str:
        return self.oracle.name

    @property
    def shape(self):
        return self.entries.shape

    def row(self, label: TaggedWord) -> np.ndarray:
        return self.entries[self.row_labels.index(tuple(label))]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([""] + [format_word(v) for v in self.col_labels])
        for u, values in zip(self.row_labels, self.entries):
            writer.writerow([format_word(u)] + [repr(float(x)) for x in values])
        return buf.getvalue()


def build_block(f: Oracle, rows: Sequence[TaggedWord], cols: Sequence[TaggedWord]) -> HankelBlock:
    rows = tuple(tuple(u) for u in rows)
    cols = tuple(tuple(v) for v in cols)
    for label in rows + cols:
        check_well_matched(label)
    entries = np.array([[f(u + v) for v in cols] for u in rows], dtype=float).reshape(
        len(rows), len(cols)
    )
    entries.setflags(write=False)
    return HankelBlock(rows, cols, entries, f)


def block_rank(b: HankelBlock, rel_tol: float = lk.DEFAULT_RANK_TOL) -> int:
    if b.entries.size == 0:
        return 0
    return lk.numerical_rank(b.entries, rel_tol)


@dataclass(frozen=True, eq=False)
class StabilizedBlock:
    block: HankelBlock
    rank: int
    stabilized: bool
    max_word_len: int
    history: tuple  # (length, rank) per truncation tried


def stabilized_block(
    f: Oracle,
    alphabet: Sequence[str],
    start_len: int = 2,
    max_len: int = 8,
    rel_tol: float = lk.DEFAULT_RANK_TOL,
) -> StabilizedBlock:
    """Grow the label set one word length at a time until the rank settles.

    The rank counts as settled once two consecutive increments leave it
    unchanged.  ``stabilized`` is False when ``max_len`` is reached first.
    """
    if start_len < 0 or start_len > max_len:
        raise InputError("need 0 <= start_len <= max_len")
    history = []
    block = None
    for length in range(start_len, max_len + 1):
        words = enumerate_well_matched(alphabet, length)
        block = build_block(f, words, words)
        history.append((length, block_rank(block, rel_tol)))
        if len(history) >= 3 and history[-1][1] == history[-2][1] == history[-3][1]:
            return StabilizedBlock(block, history[-1][1], True, length, tuple(history))
    return StabilizedBlock(block, history[-1][1], False, max_len, tuple(history))


@dataclass(frozen=True, eq=False)
class SpanningGrid:
    """The n-by-n grid of basis words, their values and the beta factors.

    ``betas[i, j] = values[i, j] / values[0, j]`` (0-based here), so the
    first grid row has all betas equal to one.
    """

    n: int
    words: tuple  # n tuples of n words
    values: np.ndarray
    betas: np.ndarray
    distinct: tuple = ()  # the independent rows picked before padding

    def cells(self):
        for i in range(self.n):
            for j in range(self.n):
                yield i, j, self.words[i][j]

    def describe(self) -> str:
        lines = []
        for i, j, w in self.cells():
            lines.append(
                f"w[{i + 1},{j + 1}] = {format_word(w)}  f={self.values[i, j]:.12g}"
                f"  beta={self.betas[i, j]:.12g}"
            )
        return "\n".join(lines)


def make_grid(words: Sequence[TaggedWord], n: int, f: Oracle) -> SpanningGrid:
    """Lay out ``words`` row-major in an n-by-n grid, cycling to pad."""
    words = [tuple(w) for w in words]
    if not words:
        raise NoNonzeroBasis("empty basis")
    flat = [words[k % len(words)] for k in range(n * n)]
    grid = tuple(tuple(flat[i * n:(i + 1) * n]) for i in range(n))
    values = np.array([[f(w) for w in row] for row in grid], dtype=float)
    if np.any(values == 0.0):
        raise NoNonzeroBasis("grid word with f(w) = 0")
    betas = values / values[0]
    betas[0] = 1.0
    for a in (values, betas):
        a.setflags(write=False)
    return SpanningGrid(n, grid, values, betas, tuple(words))


def select_spanning(
    b: HankelBlock, n: int, rel_tol: float = lk.DEFAULT_RANK_TOL, rank: int | None = None
) -> SpanningGrid:
    """Pick independent block rows with nonzero f-value and arrange them in a grid.

    Rows are scanned in label order and kept when they add a direction
    (greedy Gram-Schmidt).  Only rows whose own value ``f(w)`` is nonzero
    are eligible, because the grid values are used as divisors.
    """
    if rank is None:
        rank = block_rank(b, rel_tol)
    if rank > n * n:
        raise InputError(f"block rank {rank} exceeds n^2 = {n * n}")
    if rank == 0:
        raise NoNonzeroBasis("the block is identically zero")
    h = b.entries
    scale = float(np.linalg.norm(h, 2))
    basis: list[np.ndarray] = []
    chosen: list[int] = []
    for idx, label in enumerate(b.row_labels):
        if abs(b.oracle(label)) <= rel_tol:
            continue
        v = h[idx].astype(float)
        for _ in range(2):
            for q in basis:
                v = v - (q @ v) * q
        norm = np.linalg.norm(v)
        if norm > max(rel_tol, 1e-12) * scale:
            basis.append(v / norm)
            chosen.append(idx)
            if len(chosen) == rank:
                break
    if len(chosen) < rank:
        raise NoNonzeroBasis(
            f"rows with nonzero value span rank {len(chosen)} of {rank}"
        )
    words = [b.row_labels[i] for i in chosen]
    grid = make_grid(words, n, b.oracle)
    # every block row must be reachable from the chosen rows
    sub = h[chosen]
    for idx, label in enumerate(b.row_labels):
        lk.solve_in_span(sub, h[idx], rel_tol=max(rel_tol, 1e-8), label=format_word(label))
    return grid


def grid_size(rank: int) -> int:
    """Smallest n with n^2 >= rank."""
    return math.isqrt(rank - 1) + 1 if rank > 0 else 0


def _depth_profile(w: TaggedWord) -> tuple[int, int]:
    depth = low = 0
    for x in w:
        if x.kind is Kind.CALL:
            depth += 1
        elif x.kind is Kind.RETURN:
            depth -= 1
            low = min(low, depth)
    return depth, low


def word_hankel_block(f: Oracle, alphabet: Sequence[str], max_len: int) -> tuple[list, np.ndarray]:
    """Word Hankel block over all tagged words of length <= ``max_len``.

    ``f`` is consulted only where ``uv`` is well-matched; elsewhere the
    entry is zero.
    """
    words = enumerate_all(alphabet, max_len)
    profile = [_depth_profile(w) for w in words]
    h = np.zeros((len(words), len(words)))
    for i, (u, (du, lu)) in enumerate(zip(words, profile)):
        if lu < 0:
            continue  # u already has an unmatched return
        for j, (v, (dv, lv)) in enumerate(zip(words, profile)):
            if du + dv == 0 and du + lv >= 0:
                h[i, j] = f(u + v)
    return words, h


def _profile_rank(f: Oracle, alphabet: Sequence[str], max_len: int, rel_tol: float) -> int:
    # for a constant oracle an entry depends only on the depth profiles of u
    # and v, and repeated rows or columns do not change the rank
    profiles = sorted({_depth_profile(w) for w in enumerate_all(alphabet, max_len)})
    h = np.zeros((len(profiles), len(profiles)))
    for i, (du, lu) in enumerate(profiles):
        if lu < 0:
            continue
        for j, (dv, lv) in enumerate(profiles):
            if du + dv == 0 and du + lv >= 0:
                h[i, j] = f.constant
    if not np.any(h):
        return 0
    return lk.numerical_rank(h, rel_tol)


def word_hankel_rank(
    f: Oracle, alphabet: Sequence[str], max_len: int, rel_tol: float = lk.DEFAULT_RANK_TOL
) -> int:
    """Rank of the zero-extended word Hankel block up to ``max_len``."""
    if f.constant is not None:
        return _profile_rank(f, alphabet, max_len, rel_tol)
    _, h = word_hankel_block(f, alphabet, max_len)
    if not np.any(h):
        return 0
    return lk.numerical_rank(h, rel_tol)


def word_hankel_rank_growth(
    f: Oracle, alphabet: Sequence[str], lengths: Sequence[int], rel_tol: float = lk.DEFAULT_RANK_TOL
) -> list[tuple[int, int]]:
    lengths = list(lengths)
    if lengths != sorted(lengths):
        raise InputError("lengths must be ascending")
    return [(length, word_hankel_rank(f, alphabet, length, rel_tol)) for length in lengths]


def automaton_row_basis(a: Wvpa, cols: Sequence[TaggedWord]) -> np.ndarray:
    """Rows ``v[i, j](w) = alpha^T E_ij M_w eta`` over the given columns.

    Returns an array of shape (n, n, len(cols)).  Every Hankel row of the
    automaton's behavior is ``sum_ij M_u[i, j] * v[i, j]``.
    """
    right = np.array([a.word_matrix(w) @ a.eta for w in cols]).reshape(len(cols), a.n)
    return a.alpha[:, None, None] * right.T[None, :, :]
