"""Build a weighted VPA from a finite-rank nested Hankel matrix.

Pipeline (``synthesize``):

1. truncate the nested Hankel matrix until its rank settles (``r``);
2. take ``n = ceil(sqrt(r))`` and choose an n-by-n grid of basis words
   ``w[i, j]`` whose rows span the block, all with ``f(w) != 0``;
3. initial/final vectors from the rank-one matrix ``N[i, j] = f(w[0, j])``;
4. basis matrices ``beta[i, j] * E_ij`` and internal matrices as linear
   combinations of them, with coefficients read off the Hankel rows;
5. call/return matrices from an SVD expansion of
   ``N_cr[i, j] = f(<c w[i, j] r>) / beta[i, j]``, one stack symbol per term.

The result is checked against the oracle on every well-matched word up to
``verify_len``; the error is part of the report and is never dropped.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import linalg_kernel as lk
from .errors import InsufficientTerms, NoNonzeroBasis, NotStabilized, RoundTripMismatch, SynthesisError
from .hankel import (
    HankelBlock,
    Oracle,
    SpanningGrid,
    grid_size,
    select_spanning,
    stabilized_block,
)
from .nested_words import call, check_alphabet, enumerate_well_matched, format_word, internal, ret
from .wvpa import Wvpa

__all__ = [
    "SpanningGrid",
    "SynthesisReport",
    "build_vectors",
    "build_internal",
    "build_call_return",
    "synthesize",
    "verify_equivalence",
    "lemma_residuals",
]


def build_vectors(g: SpanningGrid) -> tuple[np.ndarray, np.ndarray]:
    # N has identical rows, so x y^T = N forces a constant x; take x = 1.
    alpha = np.ones(g.n)
    eta = np.array(g.values[0], dtype=float)
    return alpha, eta


def _row(f: Oracle, label, cols) -> np.ndarray:
    return np.array([f(tuple(label) + tuple(v)) for v in cols], dtype=float)


def build_internal(
    g: SpanningGrid,
    f: Oracle,
    b: HankelBlock,
    alphabet: Sequence[str],
    rel_tol: float = 1e-8,
):
    """Return ``(basis, internals, residuals)``.

    ``basis[i, j]`` is the matrix assigned to grid word ``w[i, j]``;
    ``internals[a]`` the internal matrix of letter ``a``; ``residuals[a]``
    the max-norm misfit of the row of ``a`` against the grid rows.
    """
    n = g.n
    basis = {}
    for i, j, _ in g.cells():
        basis[i, j] = g.betas[i, j] * lk.unit_matrix(n, i, j)
    cols = b.col_labels
    grid_rows = np.array([_row(f, w, cols) for _, _, w in g.cells()])
    internals = {}
    residuals = {}
    for a in alphabet:
        target = _row(f, (internal(a),), cols)
        z = lk.solve_in_span(grid_rows, target, rel_tol, label=f"internal letter {a!r}")
        residuals[a] = float(np.max(np.abs(grid_rows.T @ z - target)))
        m = np.zeros((n, n))
        for k, (i, j, _) in enumerate(g.cells()):
            m += z[k] * basis[i, j]
        internals[a] = m
    return basis, internals, residuals


def build_call_return(
    g: SpanningGrid,
    f: Oracle,
    alpha: np.ndarray,
    eta: np.ndarray,
    alphabet: Sequence[str],
    rank_tol: float = lk.DEFAULT_RANK_TOL,
):
    """Call and return matrices for stack symbols ``1..n``.

    With a single base letter this is the plain ``n``-term SVD expansion of
    ``N_aa``.  With several letters, one call matrix per ``(c, gamma)`` has
    to serve every return letter, so the ``N_cr`` are stacked into one
    block matrix (rows indexed by ``(c, i)``, columns by ``(r, j)``) and
    expanded jointly; that needs the block to have rank <= n.
    """
    n = g.n
    letters = list(alphabet)
    k = len(letters)
    stacked = np.zeros((k * n, k * n))
    for ci, c in enumerate(letters):
        for ri, r in enumerate(letters):
            for i, j, w in g.cells():
                value = f((call(c),) + tuple(w) + (ret(r),))
                stacked[ci * n + i, ri * n + j] = value / g.betas[i, j]
    try:
        pairs = lk.svd_expansion(stacked, n, rank_tol) if np.any(stacked) else None
    except InsufficientTerms as exc:
        raise SynthesisError(
            f"call/return block has rank {exc.rank} > n = {n}; "
            "one stack symbol per expansion term is not enough"
        ) from exc
    m_call = {}
    m_ret = {}
    for ci, c in enumerate(letters):
        for gamma in range(1, n + 1):
            m = np.zeros((n, n))
            if pairs is not None:
                m[gamma - 1, :] = pairs[gamma - 1][0][ci * n:(ci + 1) * n] / alpha[gamma - 1]
            m_call[c, gamma] = m
    for ri, r in enumerate(letters):
        for gamma in range(1, n + 1):
            m = np.zeros((n, n))
            if pairs is not None:
                m[:, gamma - 1] = pairs[gamma - 1][1][ri * n:(ri + 1) * n] / eta[gamma - 1]
            m_ret[r, gamma] = m
    return m_call, m_ret


def verify_equivalence(a: Wvpa, f, alphabet: Sequence[str], max_len: int):
    """Compare ``a`` with ``f`` on every well-matched word up to ``max_len``.

    Returns ``(max_abs_error, max_rel_error, worst_word)``.  The relative
    error is normwise: the max absolute error divided by the largest
    ``|f(w)|`` over the same words.
    """
    worst = 0.0
    worst_word = ()
    scale = 0.0
    for w in enumerate_well_matched(alphabet, max_len):
        expected = f(w)
        err = abs(a.behavior(w) - expected)
        scale = max(scale, abs(expected))
        if err > worst:
            worst, worst_word = err, w
    rel = worst / scale if scale > 0 else (0.0 if worst == 0 else float("inf"))
    return worst, rel, worst_word


def lemma_residuals(
    a: Wvpa, g: SpanningGrid, basis: dict, f: Oracle
) -> dict[str, float]:
    """Largest violations of the two construction identities.

    ``lemma1``: ``alpha^T B_ij eta == f(w_ij)`` on the grid and
    ``alpha^T M_a eta == f(a)`` on internal letters.  ``lemma2``:
    ``alpha^T (sum_g C_cg B_ij R_rg) eta == f(<c w_ij r>)``.  Both are
    measured as ``|difference| / max(1, |f|)``.
    """
    def err(got, want):
        return abs(got - want) / max(1.0, abs(want))

    l1 = 0.0
    for i, j, w in g.cells():
        l1 = max(l1, err(a.alpha @ basis[i, j] @ a.eta, f(w)))
    for s in a.alphabet:
        l1 = max(l1, err(a.alpha @ a.m_int[s] @ a.eta, f((internal(s),))))
    l2 = 0.0
    for c in a.alphabet:
        for r in a.alphabet:
            for i, j, w in g.cells():
                got = a.alpha @ a.nest(c, basis[i, j], r) @ a.eta
                l2 = max(l2, err(got, f((call(c),) + tuple(w) + (ret(r),))))
    return {"lemma1": float(l1), "lemma2": float(l2)}


@dataclass(frozen=True, eq=False)
class SynthesisReport:
    automaton: Wvpa
    grid: SpanningGrid
    rank: int
    stabilized: bool
    rank_history: tuple
    residuals: dict
    lemmas: dict
    basis: dict = field(repr=False)
    verify_len: int = 8
    max_abs_error: float = float("nan")
    max_rel_error: float = float("nan")
    worst_word: tuple = ()

    @property
    def n(self) -> int:
        return self.automaton.n

    def check(self, tol: float = 1e-6) -> "SynthesisReport":
        """Raise RoundTripMismatch unless the absolute round-trip error is below ``tol``."""
        if not self.max_abs_error < tol:
            raise RoundTripMismatch(self.max_abs_error, format_word(self.worst_word), tol)
        return self

    def text(self) -> str:
        lines = [
            f"rank={self.rank} n={self.n} gamma={self.automaton.gamma} "
            f"stabilized={'true' if self.stabilized else 'false'}",
            "rank by length: " + ", ".join(f"{L}:{r}" for L, r in self.rank_history),
            "grid:",
            self.grid.describe(),
            "internal residuals: "
            + ", ".join(f"{a}={v:.3g}" for a, v in sorted(self.residuals.items())),
            f"lemma1 residual={self.lemmas['lemma1']:.3g} lemma2 residual={self.lemmas['lemma2']:.3g}",
            f"roundtrip (len<={self.verify_len}): max_abs_error={self.max_abs_error:.12g} "
            f"max_rel_error={self.max_rel_error:.12g} worst={format_word(self.worst_word)}",
        ]
        return "\n".join(lines)


def synthesize(
    f: Oracle,
    alphabet: Sequence[str],
    start_len: int = 2,
    max_len: int = 8,
    rel_tol: float = 1e-8,
    rank_tol: float = lk.DEFAULT_RANK_TOL,
    verify_len: int = 8,
    require_stable: bool = True,
) -> SynthesisReport:
    """Run the whole Hankel-to-automaton pipeline on oracle ``f``.

    Raises NotStabilized, NoNonzeroBasis, NotInSpan or SynthesisError
    when a step cannot be carried out.  A successful return does not mean
    the automaton is right; read ``max_abs_error`` or call ``check``.
    """
    alphabet = check_alphabet(alphabet)
    st = stabilized_block(f, alphabet, start_len, max_len, rank_tol)
    if require_stable and not st.stabilized:
        raise NotStabilized(max_len, [r for _, r in st.history])
    if st.rank == 0:
        raise NoNonzeroBasis("the nested Hankel block is identically zero")
    n = grid_size(st.rank)
    grid = select_spanning(st.block, n, rank_tol, rank=st.rank)
    alpha, eta = build_vectors(grid)
    basis, m_int, residuals = build_internal(grid, f, st.block, alphabet, rel_tol)
    m_call, m_ret = build_call_return(grid, f, alpha, eta, alphabet, rank_tol)
    a = Wvpa(n, alphabet, n, alpha, eta, m_int, m_call, m_ret)
    lemmas = lemma_residuals(a, grid, basis, f)
    abs_err, rel_err, worst = verify_equivalence(a, f, alphabet, verify_len)
    return SynthesisReport(
        automaton=a,
        grid=grid,
        rank=st.rank,
        stabilized=st.stabilized,
        rank_history=st.history,
        residuals=residuals,
        lemmas=lemmas,
        basis=basis,
        verify_len=verify_len,
        max_abs_error=abs_err,
        max_rel_error=rel_err,
        worst_word=worst,
    )
